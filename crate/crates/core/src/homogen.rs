//! The homogenization scheme for the trivialized line bundle: sections,
//! derivations, jets and Atiyah tensors on the base chart correspond to
//! homogeneous tensors on the extended chart with one extra invertible
//! variable `r`, with the Euler field `Z = r ∂r`.
//!
//! The correspondence is normalized by `Δ̃(λ̃) = (Δλ)~` with `λ̃ = r λ`.
//! With this convention the identity derivation `𝟙` maps to `+Z` (the
//! opposite attribution also circulates; the implementation never flips
//! signs and validates everything against the pairing and bracket
//! naturality oracles instead). Closed-form component rules, all derived
//! from the defining evaluation identity:
//! - `AtiyahForm(k)`: `ω̃ = r β̂ + (−1)^{k−1} dr ∧ γ̂`;
//! - `Multiderivation(m)`: `D̃ = r^{1−m} P̂ + r^{2−m} ∂r ∧ Q̂`;
//! - `AtiyahTensor11`: base block unchanged, `𝟙`-row scaled by `r`,
//!   `𝟙`-column scaled by `r^{−1}`.

use crate::atiyah::{
    AtiyahForm, AtiyahTensor11, AtiyahVector2Form, Derivation, JetSection, Multiderivation,
};
use crate::error::Error;
use crate::expr::{is_zero, Chart, Expr, ZeroVerdict};
use crate::report::{StructureReport, Verdict};
use crate::tensor::{
    lie_derivative_form, lie_derivative_multivector, lie_derivative_tensor11, Form, Multivector,
    Tensor11, VectorField, VectorValued2Form,
};
use crate::Result;

/// A base chart together with its extension by the invertible fiber
/// variable, conventionally named `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogChart {
    base: Chart,
    ext: Chart,
    r: String,
}

impl HomogChart {
    pub fn new(base: Chart) -> Result<Self> {
        HomogChart::with_fiber_name(base, "r")
    }

    pub fn with_fiber_name(base: Chart, r: &str) -> Result<Self> {
        if base.vars().iter().any(|v| v == r) {
            return Err(Error::ReservedVariable(r.to_string()));
        }
        let mut vars: Vec<&str> = base.vars().iter().map(|s| s.as_str()).collect();
        vars.push(r);
        let ext = Chart::new(&format!("{}~", base.name()), &vars)?;
        Ok(HomogChart {
            base,
            ext,
            r: r.to_string(),
        })
    }

    pub fn base(&self) -> &Chart {
        &self.base
    }

    pub fn ext(&self) -> &Chart {
        &self.ext
    }

    pub fn fiber_var(&self) -> &str {
        &self.r
    }

    fn r_expr(&self) -> Expr {
        Expr::var(&self.r)
    }

    fn r_index(&self) -> usize {
        self.base.dim()
    }

    /// The Euler field `Z = r ∂r` on the extended chart.
    pub fn euler(&self) -> VectorField {
        let mut comps = vec![Expr::zero(); self.ext.dim()];
        comps[self.r_index()] = self.r_expr();
        VectorField::new(self.ext.clone(), comps).expect("euler field")
    }

    /// `λ̃ = r λ`.
    pub fn homogenize_section(&self, lambda: &Expr) -> Result<Expr> {
        (&self.r_expr() * lambda).normalize()
    }

    /// Inverse of [`Self::homogenize_section`]; the input must be `r`-linear.
    pub fn dehomogenize_section(&self, f: &Expr) -> Result<Expr> {
        let lambda = (f * &self.r_expr().pow(-1)).normalize()?;
        if lambda.variables().contains(&self.r) {
            return Err(Error::NotHomogeneous(format!(
                "section is not linear in {}",
                self.r
            )));
        }
        Ok(lambda)
    }

    /// `(X, f) ↦ X̂ + f r ∂r`, so that `Δ̃(λ̃) = (Δλ)~`.
    pub fn homogenize_derivation(&self, delta: &Derivation) -> Result<VectorField> {
        self.base.expect_same(delta.chart())?;
        let mut comps: Vec<Expr> = delta.symbol().components().to_vec();
        comps.push((delta.weight() * &self.r_expr()).normalize()?);
        VectorField::new(self.ext.clone(), comps)
    }

    pub fn dehomogenize_derivation(&self, v: &VectorField) -> Result<Derivation> {
        self.ext.expect_same(v.chart())?;
        self.certify_vector_field(v).require()?;
        let n = self.base.dim();
        let symbol = VectorField::new(self.base.clone(), v.components()[..n].to_vec())?;
        let weight = (v.component(n) * &self.r_expr().pow(-1)).normalize()?;
        Derivation::new(symbol, weight)
    }

    /// `(α, g) ↦ r α̂ + g dr`, so that `⟨ψ̃, Δ̃⟩ = (⟨ψ, Δ⟩)~`.
    pub fn homogenize_jet(&self, psi: &JetSection) -> Result<Form> {
        self.base.expect_same(psi.chart())?;
        let mut out = Form::zero(self.ext.clone(), 1)?;
        for i in 0..self.base.dim() {
            out.set(&[i], (&psi.alpha().component(&[i]) * &self.r_expr()).normalize()?)?;
        }
        out.set(&[self.r_index()], psi.value().clone())?;
        Ok(out)
    }

    /// Lift of a base expression to the extended chart (same variables).
    pub fn lift_fn(&self, f: &Expr) -> Result<Expr> {
        for v in f.variables() {
            self.base.var_index(&v)?;
        }
        f.normalize()
    }

    /// `ω̃ = r β̂ + (−1)^{k−1} dr ∧ γ̂`, componentwise:
    /// base tuples carry `r β`, tuples ending in the `r` slot carry `γ`.
    pub fn homogenize_form(&self, omega: &AtiyahForm) -> Result<Form> {
        self.base.expect_same(omega.chart())?;
        let k = omega.degree();
        let mut out = Form::zero(self.ext.clone(), k)?;
        for (idx, c) in omega.beta().components() {
            out.set(idx, (c * &self.r_expr()).normalize()?)?;
        }
        for (idx, c) in omega.gamma().components() {
            let mut tuple = idx.clone();
            tuple.push(self.r_index());
            out.set(&tuple, c.clone())?;
        }
        Ok(out)
    }

    pub fn dehomogenize_form(&self, omega: &Form) -> Result<AtiyahForm> {
        self.ext.expect_same(omega.chart())?;
        self.certify_form(omega, 0).require()?;
        let k = omega.degree();
        let n = self.r_index();
        let mut beta = Form::zero(self.base.clone(), k)?;
        let mut gamma = Form::zero(self.base.clone(), k - 1)?;
        let rinv = self.r_expr().pow(-1);
        for (idx, c) in omega.components() {
            if idx.contains(&n) {
                let base_idx: Vec<usize> = idx.iter().copied().filter(|&i| i != n).collect();
                gamma.set(&base_idx, self.expect_base(c)?)?;
            } else {
                beta.set(idx, self.expect_base(&(c * &rinv).normalize()?)?)?;
            }
        }
        AtiyahForm::new(beta, gamma)
    }

    /// `D̃ = r^{1−m} P̂ + r^{2−m} ∂r ∧ Q̂`, componentwise: base tuples carry
    /// `r^{1−m} P`, tuples ending in the `r` slot carry
    /// `(−1)^{m−1} r^{2−m} Q`.
    pub fn homogenize_multiderivation(&self, d: &Multiderivation) -> Result<Multivector> {
        self.base.expect_same(d.chart())?;
        let m = d.arity();
        if m == 0 {
            return Multivector::from_function(
                self.ext.clone(),
                &self.homogenize_section(&d.p().scalar())?,
            );
        }
        let mut out = Multivector::zero(self.ext.clone(), m)?;
        let rp = self.r_expr().pow(1 - m as i64);
        for (idx, c) in d.p().components() {
            out.set(idx, (c * &rp).normalize()?)?;
        }
        let q = d.q().expect("positive arity");
        let rq = self.r_expr().pow(2 - m as i64);
        let sign = if (m - 1) % 2 == 1 {
            Expr::int(-1)
        } else {
            Expr::one()
        };
        for (idx, c) in q.components() {
            let mut tuple = idx.clone();
            tuple.push(self.r_index());
            out.set(&tuple, (&(c * &rq) * &sign).normalize()?)?;
        }
        Ok(out)
    }

    pub fn dehomogenize_multivector(&self, p: &Multivector) -> Result<Multiderivation> {
        self.ext.expect_same(p.chart())?;
        let m = p.degree();
        self.certify_multivector(p, m).require()?;
        if m == 0 {
            return Multiderivation::from_section(
                self.base.clone(),
                &self.dehomogenize_section(&p.scalar())?,
            );
        }
        let n = self.r_index();
        let mut pp = Multivector::zero(self.base.clone(), m)?;
        let mut q = Multivector::zero(self.base.clone(), m - 1)?;
        let rp = self.r_expr().pow(m as i64 - 1);
        let rq = self.r_expr().pow(m as i64 - 2);
        let sign = if (m - 1) % 2 == 1 {
            Expr::int(-1)
        } else {
            Expr::one()
        };
        for (idx, c) in p.components() {
            if idx.contains(&n) {
                let base_idx: Vec<usize> = idx.iter().copied().filter(|&i| i != n).collect();
                q.set(&base_idx, self.expect_base(&(&(c * &rq) * &sign).normalize()?)?)?;
            } else {
                pp.set(idx, self.expect_base(&(c * &rp).normalize()?)?)?;
            }
        }
        Multiderivation::new(pp, q)
    }

    /// Homogenization of an Atiyah (1,1)-tensor to a (1,1)-tensor on the
    /// extended chart.
    pub fn homogenize_atiyah11(&self, u: &AtiyahTensor11) -> Result<Tensor11> {
        self.base.expect_same(u.chart())?;
        let n = self.base.dim();
        let r = self.r_expr();
        let mut matrix = vec![vec![Expr::zero(); n + 1]; n + 1];
        for i in 0..=n {
            for j in 0..=n {
                let e = &u.matrix()[i][j];
                matrix[i][j] = match (i == n, j == n) {
                    (false, false) => e.clone(),
                    (true, false) => (e * &r).normalize()?,
                    (false, true) => (e * &r.pow(-1)).normalize()?,
                    (true, true) => e.clone(),
                };
            }
        }
        Tensor11::new(self.ext.clone(), matrix)
    }

    pub fn dehomogenize_tensor11(&self, t: &Tensor11) -> Result<AtiyahTensor11> {
        self.ext.expect_same(t.chart())?;
        self.certify_tensor11(t).require()?;
        let n = self.base.dim();
        let r = self.r_expr();
        let mut matrix = vec![vec![Expr::zero(); n + 1]; n + 1];
        for i in 0..=n {
            for j in 0..=n {
                let e = t.entry(i, j);
                let v = match (i == n, j == n) {
                    (false, false) => e.clone(),
                    (true, false) => (e * &r.pow(-1)).normalize()?,
                    (false, true) => (e * &r).normalize()?,
                    (true, true) => e.clone(),
                };
                matrix[i][j] = self.expect_base(&v)?;
            }
        }
        AtiyahTensor11::new(self.base.clone(), matrix)
    }

    /// Homogenization of a derivation-valued 2-form into a vector-valued
    /// 2-form on the extended chart.
    pub fn homogenize_vector2form(&self, w: &AtiyahVector2Form) -> Result<VectorValued2Form> {
        self.base.expect_same(w.chart())?;
        let n = self.base.dim();
        let mut out = VectorValued2Form::zero(self.ext.clone());
        let rinv = self.r_expr().pow(-1);
        for i in 0..n {
            for j in (i + 1)..n {
                out.set(i, j, self.homogenize_derivation(&w.value(i, j))?)?;
            }
        }
        for i in 0..n {
            // slot pair (∂_i, ∂r) = (∂_i, r^{-1}·Z)
            let v = self
                .homogenize_derivation(&w.value(i, n))?
                .scale(&rinv)?;
            out.set(i, n, v)?;
        }
        Ok(out)
    }

    fn expect_base(&self, e: &Expr) -> Result<Expr> {
        if e.variables().contains(&self.r) {
            return Err(Error::NotHomogeneous(format!(
                "component `{e}` still depends on {}",
                self.r
            )));
        }
        Ok(e.clone())
    }

    fn parity_subst(&self, e: &Expr) -> Result<Expr> {
        e.substitute(&self.r, &-&self.r_expr())
    }

    fn certificate<I>(&self, kind: &str, m: usize, lie: I, parity: I) -> HomogeneityCertificate
    where
        I: IntoIterator<Item = Expr>,
    {
        let mut report = StructureReport::new("homogeneity", 42);
        let lie: Vec<Expr> = lie.into_iter().collect();
        let parity: Vec<Expr> = parity.into_iter().collect();
        report.check_residuals("euler-weight", "homog.lie", lie.iter());
        report.check_residuals("parity", "homog.parity", parity.iter());
        HomogeneityCertificate {
            kind: kind.to_string(),
            weight: m,
            report,
        }
    }

    /// Certificate for a function of weight `1 − m`.
    pub fn certify_function(&self, f: &Expr, m: usize) -> HomogeneityCertificate {
        let z = self.euler();
        let run = || -> Result<(Expr, Expr)> {
            let w = Expr::int(1 - m as i64);
            let lie = (&z.apply(f)? - &(&w * f)).normalize()?;
            let sign = if (1 - (m as i64)).rem_euclid(2) == 1 {
                Expr::int(-1)
            } else {
                Expr::one()
            };
            let parity = (&self.parity_subst(f)? - &(&sign * f)).normalize()?;
            Ok((lie, parity))
        };
        match run() {
            Ok((lie, parity)) => self.certificate("function", m, vec![lie], vec![parity]),
            Err(_) => self.failed_certificate("function", m),
        }
    }

    pub fn certify_vector_field(&self, v: &VectorField) -> HomogeneityCertificate {
        let m = 1;
        let z = self.euler();
        let run = || -> Result<(Vec<Expr>, Vec<Expr>)> {
            let lie = crate::tensor::lie_bracket(&z, v)?;
            let parity = self.vector_parity(v)?;
            Ok((
                lie.components().to_vec(),
                parity.sub(v)?.components().to_vec(),
            ))
        };
        match run() {
            Ok((lie, parity)) => self.certificate("vector_field", m, lie, parity),
            Err(_) => self.failed_certificate("vector_field", m),
        }
    }

    fn vector_parity(&self, v: &VectorField) -> Result<VectorField> {
        let n = self.r_index();
        let comps = v
            .components()
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let s = self.parity_subst(c)?;
                if i == n {
                    (-&s).normalize()
                } else {
                    Ok(s)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        VectorField::new(self.ext.clone(), comps)
    }

    pub fn certify_form(&self, omega: &Form, m: usize) -> HomogeneityCertificate {
        let z = self.euler();
        let run = || -> Result<(Vec<Expr>, Vec<Expr>)> {
            let w = Expr::int(1 - m as i64);
            let lie = lie_derivative_form(&z, omega)?.sub(&omega.scale(&w))?;
            let parity = self.alt_parity_form(omega)?.sub(&self.scaled_parity_form(omega, m)?)?;
            Ok((
                lie.components().map(|(_, c)| c.clone()).collect(),
                parity.components().map(|(_, c)| c.clone()).collect(),
            ))
        };
        match run() {
            Ok((lie, parity)) => self.certificate("form", m, lie, parity),
            Err(_) => self.failed_certificate("form", m),
        }
    }

    fn alt_parity_form(&self, omega: &Form) -> Result<Form> {
        let n = self.r_index();
        omega_parity_components(omega, n, |c| self.parity_subst(c))
    }

    fn scaled_parity_form(&self, omega: &Form, m: usize) -> Result<Form> {
        Ok(if (1 - (m as i64)).rem_euclid(2) == 1 {
            omega.neg()
        } else {
            omega.clone()
        })
    }

    pub fn certify_multivector(&self, p: &Multivector, m: usize) -> HomogeneityCertificate {
        let z = self.euler();
        let run = || -> Result<(Vec<Expr>, Vec<Expr>)> {
            let w = Expr::int(1 - m as i64);
            let lie = lie_derivative_multivector(&z, p)?.sub(&p.scale(&w))?;
            let parity = mv_parity_components(p, self.r_index(), |c| self.parity_subst(c))?
                .sub(&if (1 - (m as i64)).rem_euclid(2) == 1 {
                    p.neg()
                } else {
                    p.clone()
                })?;
            Ok((
                lie.components().map(|(_, c)| c.clone()).collect(),
                parity.components().map(|(_, c)| c.clone()).collect(),
            ))
        };
        match run() {
            Ok((lie, parity)) => self.certificate("multivector", m, lie, parity),
            Err(_) => self.failed_certificate("multivector", m),
        }
    }

    pub fn certify_tensor11(&self, t: &Tensor11) -> HomogeneityCertificate {
        // (1,1)-tensors sit at weight 0 (m = 1) with even parity.
        let z = self.euler();
        let n = self.r_index();
        let run = || -> Result<(Vec<Expr>, Vec<Expr>)> {
            let lie = lie_derivative_tensor11(&z, t)?;
            let mut parity = Vec::new();
            for i in 0..=n {
                for j in 0..=n {
                    let mut s = self.parity_subst(t.entry(i, j))?;
                    let flips = usize::from(i == n) + usize::from(j == n);
                    if flips % 2 == 1 {
                        s = (-&s).normalize()?;
                    }
                    parity.push((&s - t.entry(i, j)).normalize()?);
                }
            }
            let lie = lie
                .matrix()
                .iter()
                .flat_map(|r| r.iter().cloned())
                .collect();
            Ok((lie, parity))
        };
        match run() {
            Ok((lie, parity)) => self.certificate("tensor11", 1, lie, parity),
            Err(_) => self.failed_certificate("tensor11", 1),
        }
    }

    fn failed_certificate(&self, kind: &str, m: usize) -> HomogeneityCertificate {
        let mut report = StructureReport::new("homogeneity", 42);
        report.push(crate::report::AxiomCheck {
            name: "well-formed".to_string(),
            anchor: "homog.domain".to_string(),
            verdict: ZeroVerdict::Unknown,
            sampled: false,
        });
        HomogeneityCertificate {
            kind: kind.to_string(),
            weight: m,
            report,
        }
    }
}

fn omega_parity_components<F>(omega: &Form, r_index: usize, subst: F) -> Result<Form>
where
    F: Fn(&Expr) -> Result<Expr>,
{
    let mut out = Form::zero(omega.chart().clone(), omega.degree())?;
    for (idx, c) in omega.components() {
        let mut v = subst(c)?;
        if idx.contains(&r_index) {
            v = (-&v).normalize()?;
        }
        out.set(idx, v)?;
    }
    Ok(out)
}

fn mv_parity_components<F>(p: &Multivector, r_index: usize, subst: F) -> Result<Multivector>
where
    F: Fn(&Expr) -> Result<Expr>,
{
    let mut out = Multivector::zero(p.chart().clone(), p.degree())?;
    for (idx, c) in p.components() {
        let mut v = subst(c)?;
        if idx.contains(&r_index) {
            v = (-&v).normalize()?;
        }
        out.set(idx, v)?;
    }
    Ok(out)
}

/// Verdict pair for the Euler-weight and parity conditions.
#[derive(Debug, Clone)]
pub struct HomogeneityCertificate {
    pub kind: String,
    /// Contravariant degree `m`; the weight condition is `ℒ_Z T = (1−m) T`.
    pub weight: usize,
    pub report: StructureReport,
}

impl HomogeneityCertificate {
    pub fn passed(&self) -> bool {
        self.report.overall == Verdict::Pass
    }

    fn require(&self) -> Result<()> {
        if self.passed() {
            Ok(())
        } else {
            Err(Error::NotHomogeneous(format!(
                "{} certificate failed (weight {})",
                self.kind, self.weight
            )))
        }
    }
}

/// Poissonization of a biderivation: its homogenization together with the
/// Euler field.
pub fn poissonize(
    hc: &HomogChart,
    j: &Multiderivation,
) -> Result<(Multivector, VectorField)> {
    if j.arity() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            got: j.arity(),
        });
    }
    Ok((hc.homogenize_multiderivation(j)?, hc.euler()))
}

/// Residuals of `{λ̃, μ̃} = ({λ, μ})~` for the given section pairs.
pub fn hom_bracket_residuals(
    hc: &HomogChart,
    j: &Multiderivation,
    pairs: &[(Expr, Expr)],
) -> Result<Vec<Expr>> {
    let pi = hc.homogenize_multiderivation(j)?;
    let mut out = Vec::new();
    for (a, b) in pairs {
        let lifted = {
            let fa = hc.homogenize_section(a)?;
            let fb = hc.homogenize_section(b)?;
            let da = Form::d_of(hc.ext().clone(), &fa)?;
            let db = Form::d_of(hc.ext().clone(), &fb)?;
            pi.eval(&[&da, &db])?
        };
        let base = hc.homogenize_section(&j.apply(&[a, b])?)?;
        out.push((&lifted - &base).normalize()?);
    }
    Ok(out)
}

/// Batch naturality check: for `count` seeded random polynomial Atiyah
/// objects on charts of dimension ≤ 3 with coefficient degree ≤ 2, the
/// homogenization must intertwine `d_D` with `d`, the Schouten–Jacobi
/// bracket with the Schouten bracket, and the Frölicher–Nijenhuis bracket
/// of Atiyah tensors with the ordinary one — all residuals exactly zero.
pub fn naturality_battery(seed: u64, count: usize) -> Result<StructureReport> {
    use crate::atiyah::{d_d, fnd_bracket, sj_bracket, AtiyahForm, AtiyahTensor11};
    use crate::tensor::{ext_d, fn_bracket, schouten};

    let mut report = StructureReport::new("homogenization_naturality", seed);
    let mut sampler = crate::sample::Sampler::new(seed);
    let names = ["x", "y", "z"];
    let mut d_res: Vec<Expr> = Vec::new();
    let mut sj_res: Vec<Expr> = Vec::new();
    let mut fn_res: Vec<Expr> = Vec::new();
    for i in 0..count {
        let dim = 1 + i % 3;
        let chart = Chart::new(&format!("n{i}"), &names[..dim])?;
        let hc = HomogChart::new(chart.clone())?;

        // d_D naturality on a form of degree 1 or 2.
        let k = 1 + i % 2.min(dim);
        let omega = AtiyahForm::new(
            sampler.form(&chart, k, 2)?,
            sampler.form(&chart, k - 1, 2)?,
        )?;
        let lhs = hc.homogenize_form(&d_d(&omega)?)?;
        let rhs = ext_d(&hc.homogenize_form(&omega)?)?;
        d_res.extend(lhs.sub(&rhs)?.components().map(|(_, c)| c.clone()));

        // Schouten–Jacobi naturality on arities summing within range.
        let (m1, m2) = [(1, 1), (1, 2), (2, 2)][i % 3];
        if m1 + m2 - 1 <= dim + 1 {
            let d1 = Multiderivation::new(
                sampler.multivector(&chart, m1, 2)?,
                sampler.multivector(&chart, m1 - 1, 2)?,
            )?;
            let d2 = Multiderivation::new(
                sampler.multivector(&chart, m2, 2)?,
                sampler.multivector(&chart, m2 - 1, 2)?,
            )?;
            let lhs = hc.homogenize_multiderivation(&sj_bracket(&d1, &d2)?)?;
            let rhs = schouten(
                &hc.homogenize_multiderivation(&d1)?,
                &hc.homogenize_multiderivation(&d2)?,
            )?;
            sj_res.extend(lhs.sub(&rhs)?.components().map(|(_, c)| c.clone()));
        }

        // Frölicher–Nijenhuis naturality.
        let n = chart.dim() + 1;
        let mk = |s: &mut crate::sample::Sampler| -> Result<AtiyahTensor11> {
            let matrix: Vec<Vec<Expr>> = (0..n)
                .map(|_| (0..n).map(|_| s.poly(&chart, 2)).collect())
                .collect();
            AtiyahTensor11::new(chart.clone(), matrix)
        };
        let u = mk(&mut sampler)?;
        let v = mk(&mut sampler)?;
        let lhs = hc.homogenize_vector2form(&fnd_bracket(&u, &v)?)?;
        let rhs = fn_bracket(&hc.homogenize_atiyah11(&u)?, &hc.homogenize_atiyah11(&v)?)?;
        for i in 0..hc.ext().dim() {
            for j in (i + 1)..hc.ext().dim() {
                fn_res.extend(lhs.value(i, j).sub(&rhs.value(i, j))?.components().to_vec());
            }
        }
    }
    report.check_residuals("exterior-differential", "natural.d", d_res.iter());
    report.check_residuals("schouten-jacobi", "natural.sj", sj_res.iter());
    report.check_residuals("frolicher-nijenhuis", "natural.fn", fn_res.iter());
    Ok(report)
}

/// Contact check: on a `(2k+1)`-dimensional chart, `θ ∧ (dθ)^k` must be a
/// nonvanishing top form.
pub fn check_contact(theta: &Form, seed: u64) -> Result<()> {
    if theta.degree() != 1 {
        return Err(Error::NotContact("expected a 1-form".to_string()));
    }
    let n = theta.chart().dim();
    if n % 2 == 0 {
        return Err(Error::NotContact(format!(
            "chart dimension {n} is even"
        )));
    }
    let k = (n - 1) / 2;
    let dtheta = crate::tensor::ext_d(theta)?;
    let mut top = theta.clone();
    for _ in 0..k {
        top = top.wedge(&dtheta)?;
    }
    let idx: Vec<usize> = (0..n).collect();
    let coeff = top.component(&idx);
    match is_zero(&coeff, seed) {
        ZeroVerdict::NonZero { .. } => Ok(()),
        _ => Err(Error::NotContact(format!(
            "θ ∧ (dθ)^{k} has vanishing coefficient `{coeff}`"
        ))),
    }
}

/// Symplectization of a contact form: `ω̃ = d(rθ)`, the homogenization of
/// the differential of the contact Atiyah 1-form.
pub fn symplectize_contact(hc: &HomogChart, theta: &Form, seed: u64) -> Result<Form> {
    hc.base().expect_same(theta.chart())?;
    check_contact(theta, seed)?;
    let theta_atiyah = AtiyahForm::from_beta(theta.clone())?;
    let omega = crate::atiyah::d_d(&theta_atiyah)?;
    hc.homogenize_form(&omega)
}

/// Reads the structure form back from a symplectic Atiyah 2-form:
/// `i_𝟙 ω = θ ∘ σ`, i.e. `θ = −γ` in the decomposition.
pub fn contact_from_symplectic_atiyah(omega: &AtiyahForm, seed: u64) -> Result<Form> {
    if omega.degree() != 2 {
        return Err(Error::DegenerateForm(format!(
            "expected a 2-form, got degree {}",
            omega.degree()
        )));
    }
    // Nondegeneracy of the full (n+1)×(n+1) evaluation matrix.
    let chart = omega.chart().clone();
    let n = chart.dim();
    let mut w = vec![vec![Expr::zero(); n + 1]; n + 1];
    for a in 0..=n {
        for b in 0..=n {
            let da = Derivation::basis(chart.clone(), a);
            let db = Derivation::basis(chart.clone(), b);
            w[a][b] = omega.eval(&[&da, &db])?;
        }
    }
    let det = crate::tensor::det(&w)?;
    if !is_zero(&det, seed).is_nonzero() {
        return Err(Error::DegenerateForm(format!("determinant `{det}`")));
    }
    Ok(omega.gamma().neg())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atiyah::{commutator, d_d, pair, sj_bracket};
    use crate::gallery;
    use crate::tensor::{ext_d, schouten};

    fn hc3() -> HomogChart {
        HomogChart::new(gallery::chart_r3()).unwrap()
    }

    #[test]
    fn section_homogenization() {
        let hc = hc3();
        assert_eq!(
            hc.homogenize_section(&Expr::one()).unwrap(),
            Expr::var("r")
        );
        let z = Expr::var("z");
        let rz = hc.homogenize_section(&z).unwrap();
        assert_eq!(rz, (&Expr::var("r") * &z).normalize().unwrap());
        // Z(λ̃) = λ̃ for λ = x².
        let lam = Expr::var("x").pow(2);
        let lifted = hc.homogenize_section(&lam).unwrap();
        assert_eq!(hc.euler().apply(&lifted).unwrap(), lifted);
        // Round trip.
        assert_eq!(hc.dehomogenize_section(&lifted).unwrap(), lam.normalize().unwrap());
    }

    #[test]
    fn derivation_homogenization() {
        let hc = hc3();
        // 𝟙 ↦ r ∂r = Z.
        let one = Derivation::one(hc.base().clone());
        assert_eq!(hc.homogenize_derivation(&one).unwrap(), hc.euler());
        // (∂z, 0) ↦ ∂z.
        let dz = Derivation::basis(hc.base().clone(), 2);
        assert_eq!(
            hc.homogenize_derivation(&dz).unwrap(),
            VectorField::coordinate(hc.ext().clone(), 2)
        );
        // Defining identity Δ̃(λ̃) = (Δλ)~ for a generic derivation.
        let mut s = crate::sample::Sampler::new(17);
        let delta = Derivation::new(
            s.vector_field(hc.base(), 2).unwrap(),
            s.poly(hc.base(), 2),
        )
        .unwrap();
        let lam = s.poly(hc.base(), 2);
        let lhs = hc
            .homogenize_derivation(&delta)
            .unwrap()
            .apply(&hc.homogenize_section(&lam).unwrap())
            .unwrap();
        let rhs = hc
            .homogenize_section(&delta.apply(&lam).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
        // Commutators map to Lie brackets.
        let d2 = Derivation::new(
            s.vector_field(hc.base(), 2).unwrap(),
            s.poly(hc.base(), 2),
        )
        .unwrap();
        let lhs = hc
            .homogenize_derivation(&commutator(&delta, &d2).unwrap())
            .unwrap();
        let rhs = crate::tensor::lie_bracket(
            &hc.homogenize_derivation(&delta).unwrap(),
            &hc.homogenize_derivation(&d2).unwrap(),
        )
        .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn jet_homogenization_and_pairing() {
        let hc = hc3();
        // j¹λ ↦ d λ̃.
        let lam = &(&Expr::var("x") * &Expr::var("z")) + &Expr::var("y").pow(2);
        let jet = JetSection::j1(hc.base().clone(), &lam).unwrap();
        let lifted = hc.homogenize_jet(&jet).unwrap();
        let d_tilde = Form::d_of(
            hc.ext().clone(),
            &hc.homogenize_section(&lam).unwrap(),
        )
        .unwrap();
        assert_eq!(lifted, d_tilde);
        // Pairing naturality on randomized data.
        let mut s = crate::sample::Sampler::new(23);
        let psi = JetSection::from_coefficients(
            hc.base().clone(),
            &(0..4).map(|_| s.poly(hc.base(), 2)).collect::<Vec<_>>(),
        )
        .unwrap();
        let delta = Derivation::from_coefficients(
            hc.base().clone(),
            &(0..4).map(|_| s.poly(hc.base(), 2)).collect::<Vec<_>>(),
        )
        .unwrap();
        let lhs = Form::pair(
            &hc.homogenize_jet(&psi).unwrap(),
            &hc.homogenize_derivation(&delta).unwrap(),
        )
        .unwrap();
        let rhs = hc
            .homogenize_section(&pair(&psi, &delta).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn multiderivation_homogenization() {
        let hc = hc3();
        // J = (∂x∧∂y, 0) ↦ r^{-1} ∂x∧∂y.
        let mut lam = Multivector::zero(hc.base().clone(), 2).unwrap();
        lam.set(&[0, 1], Expr::one()).unwrap();
        let j = Multiderivation::jacobi_pair(lam, VectorField::zero(hc.base().clone()))
            .unwrap();
        let pi = hc.homogenize_multiderivation(&j).unwrap();
        let mut expect = Multivector::zero(hc.ext().clone(), 2).unwrap();
        expect.set(&[0, 1], Expr::var("r").pow(-1)).unwrap();
        assert_eq!(pi, expect);
        // Round trip on the contact pair.
        let j = gallery::contact_r3_jacobi(hc.base()).unwrap();
        let pi = hc.homogenize_multiderivation(&j).unwrap();
        assert_eq!(hc.dehomogenize_multivector(&pi).unwrap(), j);
        // ℒ_Z π̃ = −π̃ and Poisson.
        assert!(hc.certify_multivector(&pi, 2).passed());
        assert!(schouten(&pi, &pi).unwrap().is_zero());
    }

    #[test]
    fn atiyah_form_homogenization() {
        let hc = hc3();
        // Θ = (θ, 0) ↦ r θ.
        let theta = gallery::contact_theta_r3(hc.base()).unwrap();
        let lifted = hc
            .homogenize_form(&AtiyahForm::from_beta(theta.clone()).unwrap())
            .unwrap();
        let mut expect = Form::zero(hc.ext().clone(), 1).unwrap();
        expect.set(&[2], Expr::var("r")).unwrap();
        expect
            .set(&[0], (-&(&Expr::var("r") * &Expr::var("y"))).normalize().unwrap())
            .unwrap();
        assert_eq!(lifted, expect);
        // Round trip through the certificate.
        let omega = d_d(&AtiyahForm::from_beta(theta).unwrap()).unwrap();
        let lifted = hc.homogenize_form(&omega).unwrap();
        assert!(hc.certify_form(&lifted, 0).passed());
        assert_eq!(hc.dehomogenize_form(&lifted).unwrap(), omega);
    }

    #[test]
    fn naturality_of_d() {
        // hom ∘ d_D = d ∘ hom on a randomized Atiyah 2-form.
        let hc = hc3();
        let mut s = crate::sample::Sampler::new(31);
        let omega = AtiyahForm::new(
            s.form(hc.base(), 2, 2).unwrap(),
            s.form(hc.base(), 1, 2).unwrap(),
        )
        .unwrap();
        let lhs = hc.homogenize_form(&d_d(&omega).unwrap()).unwrap();
        let rhs = ext_d(&hc.homogenize_form(&omega).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn naturality_of_sj_bracket() {
        let hc = hc3();
        let j = gallery::contact_r3_jacobi(hc.base()).unwrap();
        let one = Multiderivation::one(hc.base().clone()).unwrap();
        let lhs = hc
            .homogenize_multiderivation(&sj_bracket(&one, &j).unwrap())
            .unwrap();
        let rhs = schouten(
            &hc.homogenize_multiderivation(&one).unwrap(),
            &hc.homogenize_multiderivation(&j).unwrap(),
        )
        .unwrap();
        assert_eq!(lhs, rhs);
        // Also settles the sign: [𝟙, J] = −J.
        assert_eq!(
            sj_bracket(&one, &j).unwrap(),
            j.neg()
        );
    }

    #[test]
    fn certify_examples() {
        let hc = hc3();
        // r dx is homogeneous of weight 1 (m = 0).
        let mut rdx = Form::zero(hc.ext().clone(), 1).unwrap();
        rdx.set(&[0], Expr::var("r")).unwrap();
        assert!(hc.certify_form(&rdx, 0).passed());
        // r^{-1} ∂x∧∂y has weight −1 (m = 2).
        let mut p = Multivector::zero(hc.ext().clone(), 2).unwrap();
        p.set(&[0, 1], Expr::var("r").pow(-1)).unwrap();
        assert!(hc.certify_multivector(&p, 2).passed());
        // dx alone fails at m = 0.
        let dx = Form::coordinate(hc.ext().clone(), 0).unwrap();
        let cert = hc.certify_form(&dx, 0);
        assert!(!cert.passed());
    }

    #[test]
    fn poissonize_contact_pair() {
        let hc = hc3();
        let j = gallery::contact_r3_jacobi(hc.base()).unwrap();
        let (pi, z) = poissonize(&hc, &j).unwrap();
        assert_eq!(z, hc.euler());
        assert!(schouten(&pi, &pi).unwrap().is_zero());
        let lz = lie_derivative_multivector(&z, &pi).unwrap();
        assert_eq!(lz, pi.neg());
        // Bracket correspondence on coordinate sections.
        let pairs: Vec<(Expr, Expr)> = vec![
            (Expr::var("x"), Expr::var("y")),
            (Expr::var("x"), Expr::var("z")),
            (Expr::var("y"), Expr::var("z")),
            (Expr::one(), Expr::var("z")),
        ];
        for r in hom_bracket_residuals(&hc, &j, &pairs).unwrap() {
            assert!(r.is_structural_zero(), "residual {r}");
        }
    }

    #[test]
    fn symplectization_examples() {
        let hc = hc3();
        let theta = gallery::contact_theta_r3(hc.base()).unwrap();
        let omega = symplectize_contact(&hc, &theta, 42).unwrap();
        // d(r dz − r y dx) = dr∧dz − y dr∧dx + r dx∧dy.
        let expect = ext_d(&{
            let mut rtheta = Form::zero(hc.ext().clone(), 1).unwrap();
            rtheta.set(&[2], Expr::var("r")).unwrap();
            rtheta
                .set(
                    &[0],
                    (-&(&Expr::var("r") * &Expr::var("y"))).normalize().unwrap(),
                )
                .unwrap();
            rtheta
        })
        .unwrap();
        assert_eq!(omega, expect);
        assert!(ext_d(&omega).unwrap().is_zero());
        // ℒ_Z ω̃ = ω̃ and ω̃ ∧ ω̃ ≠ 0.
        let lz = lie_derivative_form(&hc.euler(), &omega).unwrap();
        assert_eq!(lz, omega);
        let top = omega.wedge(&omega).unwrap();
        assert!(!top.is_zero());
        // One-dimensional chart: θ = dz gives the area form dz∧dr scaled.
        let c1 = Chart::new("r1", &["z"]).unwrap();
        let hc1 = HomogChart::new(c1.clone()).unwrap();
        let theta = Form::coordinate(c1, 0).unwrap();
        let omega = symplectize_contact(&hc1, &theta, 42).unwrap();
        // d(r dz) = dr ∧ dz, i.e. component (z, r) = −1.
        assert_eq!(omega.component(&[0, 1]), Expr::int(-1));
        assert_eq!(omega.components().count(), 1);
    }

    #[test]
    fn contact_extraction_round_trip() {
        let hc = hc3();
        let theta = gallery::contact_theta_r3(hc.base()).unwrap();
        let omega = d_d(&AtiyahForm::from_beta(theta.clone()).unwrap()).unwrap();
        let back = contact_from_symplectic_atiyah(&omega, 42).unwrap();
        assert_eq!(back, theta);
    }

    #[test]
    fn non_contact_is_rejected() {
        let c = gallery::chart_r3();
        // dz on ℝ³ is not contact (dθ = 0).
        let theta = Form::coordinate(c, 2).unwrap();
        assert!(matches!(
            check_contact(&theta, 42),
            Err(Error::NotContact(_))
        ));
    }
}
