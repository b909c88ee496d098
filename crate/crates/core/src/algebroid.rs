//! Frame-based Lie algebroids: axiom verification, the de Rham differential
//! with an optional line representation, the gauge / cotangent / jet
//! algebroid constructors, Spencer-operator checks and algebroid
//! derivations.
//!
//! All data is concrete: an algebroid is a rank, an anchor matrix and
//! structure functions on a fixed frame; sections are coefficient vectors;
//! every axiom becomes a finite list of exact residuals.

use std::collections::BTreeMap;

use crate::atiyah::{d_d_section, lie_derivative_jet, AtiyahForm, JetSection, Multiderivation};
use crate::error::Error;
use crate::expr::{Chart, Expr};
use crate::report::StructureReport;
use crate::sample::{increasing_tuples, Sampler};
use crate::tensor::{
    interior, lie_bracket, lie_derivative_form, sharp, sort_indices, Form, Multivector,
    VectorField,
};
use crate::Result;

/// A Lie algebroid presented on a frame: anchor matrix and structure
/// functions, with an optional representation on the trivial line bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebroidSpec {
    base: Chart,
    rank: usize,
    /// `ρ(e_a) = Σ_i anchor[i][a] ∂_i` (dim × rank).
    anchor: Vec<Vec<Expr>>,
    /// `[e_a, e_b] = Σ_c structure[a][b][c] e_c`, antisymmetric in `(a, b)`.
    structure: Vec<Vec<Vec<Expr>>>,
    /// `∇_{e_a} λ = ρ(e_a)λ + rep[a]·λ` when present.
    rep: Option<Vec<Expr>>,
}

impl AlgebroidSpec {
    /// Builds the spec from the upper triangle of the structure functions:
    /// `upper[(a, b)]` with `a < b` lists the coefficients of `[e_a, e_b]`.
    pub fn new(
        base: Chart,
        rank: usize,
        anchor: Vec<Vec<Expr>>,
        upper: BTreeMap<(usize, usize), Vec<Expr>>,
        rep: Option<Vec<Expr>>,
    ) -> Result<Self> {
        let dim = base.dim();
        if anchor.len() != dim || anchor.iter().any(|row| row.len() != rank) {
            return Err(Error::ShapeMismatch(format!(
                "anchor must be {dim}×{rank}"
            )));
        }
        let anchor = anchor
            .into_iter()
            .map(|row| row.into_iter().map(|e| e.normalize()).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        let mut structure = vec![vec![vec![Expr::zero(); rank]; rank]; rank];
        for ((a, b), coeffs) in upper {
            if a >= b || b >= rank || coeffs.len() != rank {
                return Err(Error::ShapeMismatch(format!(
                    "structure entry ({a}, {b}) out of range"
                )));
            }
            for (c, e) in coeffs.into_iter().enumerate() {
                let e = e.normalize()?;
                structure[a][b][c] = e.clone();
                structure[b][a][c] = (-&e).normalize()?;
            }
        }
        if let Some(phi) = &rep {
            if phi.len() != rank {
                return Err(Error::ShapeMismatch("representation length".to_string()));
            }
        }
        Ok(AlgebroidSpec {
            base,
            rank,
            anchor,
            structure,
            rep,
        })
    }

    pub fn abelian(base: Chart, rank: usize) -> Result<Self> {
        let dim = base.dim();
        AlgebroidSpec::new(
            base,
            rank,
            vec![vec![Expr::zero(); rank]; dim],
            BTreeMap::new(),
            None,
        )
    }

    pub fn base(&self) -> &Chart {
        &self.base
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rep(&self) -> Option<&[Expr]> {
        self.rep.as_deref()
    }

    pub fn anchor_matrix(&self) -> &Vec<Vec<Expr>> {
        &self.anchor
    }

    /// Anchor image of the `a`-th frame section.
    pub fn anchor_field(&self, a: usize) -> Result<VectorField> {
        VectorField::new(
            self.base.clone(),
            (0..self.base.dim())
                .map(|i| self.anchor[i][a].clone())
                .collect(),
        )
    }

    /// Structure coefficients of `[e_a, e_b]`.
    pub fn structure_coeffs(&self, a: usize, b: usize) -> &[Expr] {
        &self.structure[a][b]
    }

    /// Anchor of a section given by frame coefficients.
    pub fn anchor_of(&self, coeffs: &[Expr]) -> Result<VectorField> {
        let mut acc = VectorField::zero(self.base.clone());
        for (a, u) in coeffs.iter().enumerate() {
            acc = acc.add(&self.anchor_field(a)?.scale(u)?)?;
        }
        Ok(acc)
    }

    /// Leibniz-extended bracket of two sections in frame coefficients:
    /// `[u, v] = u_a v_b [e_a, e_b] + ρ(u)(v_b) e_b − ρ(v)(u_a) e_a`.
    pub fn bracket_sections(&self, u: &[Expr], v: &[Expr]) -> Result<Vec<Expr>> {
        if u.len() != self.rank || v.len() != self.rank {
            return Err(Error::ShapeMismatch("section length".to_string()));
        }
        let ru = self.anchor_of(u)?;
        let rv = self.anchor_of(v)?;
        let mut out = vec![Expr::zero(); self.rank];
        for a in 0..self.rank {
            for b in 0..self.rank {
                if self.structure[a][b].iter().all(|e| e.is_structural_zero()) {
                    continue;
                }
                let scale = (&u[a] * &v[b]).normalize()?;
                if scale.is_structural_zero() {
                    continue;
                }
                for (c, s) in self.structure[a][b].iter().enumerate() {
                    out[c] = (&out[c] + &(&scale * s)).normalize()?;
                }
            }
        }
        for b in 0..self.rank {
            out[b] = (&out[b] + &ru.apply(&v[b])?).normalize()?;
            out[b] = (&out[b] - &rv.apply(&u[b])?).normalize()?;
        }
        Ok(out)
    }

    /// Representation action `∇_u λ` of a section on a line-bundle section.
    pub fn rep_action(&self, coeffs: &[Expr], lambda: &Expr) -> Result<Expr> {
        let mut acc = self.anchor_of(coeffs)?.apply(lambda)?;
        if let Some(phi) = &self.rep {
            for (a, u) in coeffs.iter().enumerate() {
                acc = (&acc + &(&(u * &phi[a]) * lambda)).normalize()?;
            }
        }
        Ok(acc)
    }
}

/// Verifies anchor-bracket compatibility, the frame Jacobi identity and,
/// when a representation is present, its flatness.
pub fn verify_algebroid(spec: &AlgebroidSpec, seed: u64) -> Result<StructureReport> {
    let mut report = StructureReport::new("lie_algebroid", seed);
    let r = spec.rank;
    // ρ[e_a, e_b] = [ρ e_a, ρ e_b]
    let mut anchor_residuals = Vec::new();
    for a in 0..r {
        for b in (a + 1)..r {
            let lie = lie_bracket(&spec.anchor_field(a)?, &spec.anchor_field(b)?)?;
            let mut rho_bracket = VectorField::zero(spec.base.clone());
            for (c, s) in spec.structure[a][b].iter().enumerate() {
                rho_bracket = rho_bracket.add(&spec.anchor_field(c)?.scale(s)?)?;
            }
            anchor_residuals.extend(lie.sub(&rho_bracket)?.components().to_vec());
        }
    }
    report.check_residuals("anchor-bracket", "algebroid.anchor", anchor_residuals.iter());

    // Jacobi identity on frame triples.
    let mut jacobi_residuals = Vec::new();
    for a in 0..r {
        for b in (a + 1)..r {
            for c in (b + 1)..r {
                for e in 0..r {
                    let mut acc = Expr::zero();
                    for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
                        // ρ(e_x)(C^e_{yz}) + Σ_d C^d_{yz} C^e_{xd}
                        acc = (&acc
                            + &spec.anchor_field(x)?.apply(&spec.structure[y][z][e])?)
                            .normalize()?;
                        for d in 0..r {
                            acc = (&acc
                                + &(&spec.structure[y][z][d] * &spec.structure[x][d][e]))
                                .normalize()?;
                        }
                    }
                    jacobi_residuals.push(acc);
                }
            }
        }
    }
    report.check_residuals("jacobi", "algebroid.jacobi", jacobi_residuals.iter());

    if spec.rep.is_some() {
        // Flatness: ρ_a(φ_b) − ρ_b(φ_a) − Σ_c C^c_{ab} φ_c = 0.
        let phi = spec.rep.as_ref().expect("checked");
        let mut flat = Vec::new();
        for a in 0..r {
            for b in (a + 1)..r {
                let mut acc = (&spec.anchor_field(a)?.apply(&phi[b])?
                    - &spec.anchor_field(b)?.apply(&phi[a])?)
                    .normalize()?;
                for c in 0..r {
                    acc = (&acc - &(&spec.structure[a][b][c] * &phi[c])).normalize()?;
                }
                flat.push(acc);
            }
        }
        report.check_residuals("representation-flat", "algebroid.rep", flat.iter());
    }
    Ok(report)
}

/// A `k`-cochain on the frame of an algebroid, with scalar (or line-bundle
/// valued) coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Cochain {
    rank: usize,
    degree: usize,
    comps: BTreeMap<Vec<usize>, Expr>,
}

impl Cochain {
    pub fn zero(rank: usize, degree: usize) -> Self {
        Cochain {
            rank,
            degree,
            comps: BTreeMap::new(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn set(&mut self, idx: &[usize], value: Expr) -> Result<()> {
        if idx.len() != self.degree
            || idx.windows(2).any(|w| w[0] >= w[1])
            || idx.iter().any(|&i| i >= self.rank)
        {
            return Err(Error::BadIndexTuple(idx.to_vec()));
        }
        let value = value.normalize()?;
        if value.is_structural_zero() {
            self.comps.remove(idx);
        } else {
            self.comps.insert(idx.to_vec(), value);
        }
        Ok(())
    }

    pub fn component(&self, idx: &[usize]) -> Expr {
        match sort_indices(idx) {
            None => Expr::zero(),
            Some((sorted, sign)) => {
                let c = self.comps.get(&sorted).cloned().unwrap_or_else(Expr::zero);
                if sign < 0 {
                    -&c
                } else {
                    c
                }
            }
        }
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &Expr)> {
        self.comps.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn sub(&self, other: &Cochain) -> Result<Cochain> {
        if self.rank != other.rank || self.degree != other.degree {
            return Err(Error::ShapeMismatch("cochain shapes".to_string()));
        }
        let mut out = self.clone();
        for (idx, v) in &other.comps {
            let cur = out.component(idx);
            out.set(idx, (&cur - v).normalize()?)?;
        }
        Ok(out)
    }
}

/// Cartan-type differential of a frame cochain, using the structure
/// functions and the representation (trivial when `rep` is absent):
/// `(dc)(e_{a_0}, …, e_{a_k}) = Σ_i (−1)^i ∇_{a_i} c(… â_i …)
///  + Σ_{i<j} (−1)^{i+j} c([e_{a_i}, e_{a_j}], … â_i … â_j …)`.
pub fn algebroid_differential(
    spec: &AlgebroidSpec,
    rep: Option<&[Expr]>,
    c: &Cochain,
) -> Result<Cochain> {
    if c.rank != spec.rank {
        return Err(Error::ShapeMismatch("cochain rank".to_string()));
    }
    let k = c.degree;
    let mut out = Cochain::zero(spec.rank, k + 1);
    for idx in increasing_tuples(spec.rank, k + 1) {
        let mut acc = Expr::zero();
        for (i, &a) in idx.iter().enumerate() {
            let rest: Vec<usize> = idx
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, &x)| x)
                .collect();
            let value = c.component(&rest);
            let mut term = spec.anchor_field(a)?.apply(&value)?;
            if let Some(phi) = rep {
                term = (&term + &(&phi[a] * &value)).normalize()?;
            }
            acc = if i % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        for i in 0..idx.len() {
            for j in (i + 1)..idx.len() {
                let rest: Vec<usize> = idx
                    .iter()
                    .enumerate()
                    .filter(|(t, _)| *t != i && *t != j)
                    .map(|(_, &x)| x)
                    .collect();
                for (d, s) in spec.structure[idx[i]][idx[j]].iter().enumerate() {
                    if s.is_structural_zero() {
                        continue;
                    }
                    let mut tuple = vec![d];
                    tuple.extend_from_slice(&rest);
                    let term = (s * &c.component(&tuple)).normalize()?;
                    acc = if (i + j) % 2 == 1 {
                        &acc - &term
                    } else {
                        &acc + &term
                    };
                }
            }
        }
        out.set(&idx, acc.normalize()?)?;
    }
    Ok(out)
}

/// The gauge algebroid of the trivialized line bundle: rank `n + 1` on the
/// frame `{∂_1, …, ∂_n, 𝟙}` with the tautological representation.
pub fn gauge_algebroid(chart: &Chart) -> Result<AlgebroidSpec> {
    let n = chart.dim();
    let mut anchor = vec![vec![Expr::zero(); n + 1]; n];
    for (i, row) in anchor.iter_mut().enumerate() {
        row[i] = Expr::one();
    }
    let mut rep = vec![Expr::zero(); n + 1];
    rep[n] = Expr::one();
    AlgebroidSpec::new(chart.clone(), n + 1, anchor, BTreeMap::new(), Some(rep))
}

/// An Atiyah form as a cochain on the gauge algebroid frame.
pub fn atiyah_form_to_cochain(omega: &AtiyahForm) -> Result<Cochain> {
    let n = omega.chart().dim();
    let k = omega.degree();
    let mut out = Cochain::zero(n + 1, k);
    for (idx, c) in omega.beta().components() {
        out.set(idx, c.clone())?;
    }
    for (idx, c) in omega.gamma().components() {
        let mut tuple = idx.clone();
        tuple.push(n);
        out.set(&tuple, c.clone())?;
    }
    Ok(out)
}

pub fn cochain_to_atiyah_form(chart: &Chart, c: &Cochain) -> Result<AtiyahForm> {
    let n = chart.dim();
    if c.rank != n + 1 {
        return Err(Error::ShapeMismatch("gauge cochain rank".to_string()));
    }
    let k = c.degree;
    let mut beta = Form::zero(chart.clone(), k)?;
    let mut gamma = Form::zero(chart.clone(), k - 1)?;
    for (idx, v) in c.components() {
        if idx.contains(&n) {
            let rest: Vec<usize> = idx.iter().copied().filter(|&i| i != n).collect();
            gamma.set(&rest, v.clone())?;
        } else {
            beta.set(idx, v.clone())?;
        }
    }
    AtiyahForm::new(beta, gamma)
}

/// Lie bracket on 1-forms induced by a bivector:
/// `[α, β]_π = ℒ_{π♯α} β − ℒ_{π♯β} α − d π(α, β)`.
pub fn cotangent_bracket(pi: &Multivector, alpha: &Form, beta: &Form) -> Result<Form> {
    let chart = pi.chart().clone();
    let pa = sharp(pi, alpha)?;
    let pb = sharp(pi, beta)?;
    let mut out = lie_derivative_form(&pa, beta)?;
    out = out.sub(&lie_derivative_form(&pb, alpha)?)?;
    let pairing = pi.eval(&[alpha, beta])?;
    out.sub(&Form::d_of(chart, &pairing)?)
}

/// The cotangent algebroid of a bivector on the frame `{dx_i}`; the
/// algebroid axioms hold exactly when the bivector is Poisson.
pub fn cotangent_algebroid(pi: &Multivector) -> Result<AlgebroidSpec> {
    let chart = pi.chart().clone();
    let n = chart.dim();
    // anchor[i][a] = π(dx_a, dx_i)
    let mut anchor = vec![vec![Expr::zero(); n]; n];
    for a in 0..n {
        let pa = sharp(pi, &Form::coordinate(chart.clone(), a)?)?;
        for (i, row) in anchor.iter_mut().enumerate() {
            row[a] = pa.component(i).clone();
        }
    }
    let mut upper = BTreeMap::new();
    for a in 0..n {
        for b in (a + 1)..n {
            let br = cotangent_bracket(
                pi,
                &Form::coordinate(chart.clone(), a)?,
                &Form::coordinate(chart.clone(), b)?,
            )?;
            upper.insert(
                (a, b),
                (0..n).map(|c| br.component(&[c])).collect::<Vec<_>>(),
            );
        }
    }
    AlgebroidSpec::new(chart, n, anchor, upper, None)
}

/// Jet-algebroid bracket on jet sections:
/// `[ψ, χ]_J = ℒ_{J♯ψ} χ − ℒ_{J♯χ} ψ − d_D J(ψ, χ)`.
pub fn jet_bracket(
    j: &Multiderivation,
    psi: &JetSection,
    chi: &JetSection,
) -> Result<JetSection> {
    let a = lie_derivative_jet(&j.sharp(psi)?, chi)?;
    let b = lie_derivative_jet(&j.sharp(chi)?, psi)?;
    let c = d_d_section(psi.chart().clone(), &j.eval_on_jets(&[psi, chi])?)?;
    a.sub(&b)?.sub(&c)
}

/// The jet algebroid of a biderivation on the frame `{(dx_i, 0), (0, 1)}`,
/// with anchor `σ ∘ J♯` and the representation given by the `J♯`-action.
pub fn jet_algebroid(j: &Multiderivation) -> Result<AlgebroidSpec> {
    let chart = j.chart().clone();
    let n = chart.dim();
    let rank = n + 1;
    let mut anchor = vec![vec![Expr::zero(); rank]; n];
    let mut rep = vec![Expr::zero(); rank];
    for a in 0..rank {
        let sharp = j.sharp(&JetSection::basis(chart.clone(), a)?)?;
        for (i, row) in anchor.iter_mut().enumerate() {
            row[a] = sharp.symbol().component(i).clone();
        }
        rep[a] = sharp.weight().clone();
    }
    let mut upper = BTreeMap::new();
    for a in 0..rank {
        for b in (a + 1)..rank {
            let br = jet_bracket(
                j,
                &JetSection::basis(chart.clone(), a)?,
                &JetSection::basis(chart.clone(), b)?,
            )?;
            upper.insert((a, b), br.coefficients());
        }
    }
    AlgebroidSpec::new(chart, rank, anchor, upper, Some(rep))
}

/// A `k`-Spencer operator presented by its frame values: the first-order
/// operator through the Leibniz rule `𝒟(f α) = f 𝒟(α) + df ∧ ℓ(α)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpencerData {
    /// `𝒟(e_a)`, one `k`-form per frame element.
    pub d_values: Vec<Form>,
    /// `ℓ(e_a)`, one `(k−1)`-form per frame element.
    pub l_values: Vec<Form>,
}

impl SpencerData {
    pub fn new(d_values: Vec<Form>, l_values: Vec<Form>) -> Result<Self> {
        if d_values.is_empty() || d_values.len() != l_values.len() {
            return Err(Error::ShapeMismatch("spencer frame values".to_string()));
        }
        let k = d_values[0].degree();
        for d in &d_values {
            if d.degree() != k {
                return Err(Error::ShapeMismatch("spencer degrees".to_string()));
            }
        }
        for l in &l_values {
            if l.degree() + 1 != k {
                return Err(Error::ShapeMismatch("spencer defect degrees".to_string()));
            }
        }
        Ok(SpencerData { d_values, l_values })
    }

    pub fn degree(&self) -> usize {
        self.d_values[0].degree()
    }

    /// `𝒟` on a section in frame coefficients, via the Leibniz rule.
    pub fn apply_d(&self, chart: &Chart, coeffs: &[Expr]) -> Result<Form> {
        let mut acc = Form::zero(chart.clone(), self.degree())?;
        for (a, u) in coeffs.iter().enumerate() {
            acc = acc.add(&self.d_values[a].scale(u))?;
            let du = Form::d_of(chart.clone(), u)?;
            acc = acc.add(&du.wedge(&self.l_values[a])?)?;
        }
        Ok(acc)
    }

    /// `ℓ` on a section in frame coefficients (bundle map).
    pub fn apply_l(&self, chart: &Chart, coeffs: &[Expr]) -> Result<Form> {
        let mut acc = Form::zero(chart.clone(), self.degree() - 1)?;
        for (a, u) in coeffs.iter().enumerate() {
            acc = acc.add(&self.l_values[a].scale(u))?;
        }
        Ok(acc)
    }
}

/// Verifies the three Spencer identities on all frame pairs and on
/// `5` randomized function-multiplied section pairs:
/// 1. `ℒ_{ρ(α)} 𝒟(β) − ℒ_{ρ(β)} 𝒟(α) − 𝒟([α, β]) = 0`
/// 2. `ℒ_{ρ(α)} ℓ(β) − i_{ρ(β)} 𝒟(α) − ℓ([α, β]) = 0`
/// 3. `i_{ρ(α)} ℓ(β) + i_{ρ(β)} ℓ(α) = 0`
///
/// The sign of the contraction term in the second identity is pinned by the
/// canonical symplectic example (`𝒟 = d`, `ℓ = identity` on the cotangent
/// algebroid), which must pass.
pub fn verify_spencer(
    spec: &AlgebroidSpec,
    s: &SpencerData,
    seed: u64,
) -> Result<StructureReport> {
    if s.d_values.len() != spec.rank {
        return Err(Error::ShapeMismatch("spencer rank".to_string()));
    }
    let mut report = StructureReport::new("spencer_operator", seed);
    let chart = spec.base.clone();
    let rank = spec.rank;

    let mut pairs: Vec<(Vec<Expr>, Vec<Expr>)> = Vec::new();
    for a in 0..rank {
        for b in (a + 1)..rank {
            let mut u = vec![Expr::zero(); rank];
            u[a] = Expr::one();
            let mut v = vec![Expr::zero(); rank];
            v[b] = Expr::one();
            pairs.push((u, v));
        }
    }
    let mut sampler = Sampler::new(seed);
    for _ in 0..5 {
        let u = (0..rank).map(|_| sampler.poly(&chart, 2)).collect();
        let v = (0..rank).map(|_| sampler.poly(&chart, 2)).collect();
        pairs.push((u, v));
    }

    let mut id1 = Vec::new();
    let mut id2 = Vec::new();
    let mut id3 = Vec::new();
    for (u, v) in &pairs {
        let ru = spec.anchor_of(u)?;
        let rv = spec.anchor_of(v)?;
        let du = s.apply_d(&chart, u)?;
        let dv = s.apply_d(&chart, v)?;
        let lu = s.apply_l(&chart, u)?;
        let lv = s.apply_l(&chart, v)?;
        let br = spec.bracket_sections(u, v)?;

        let r1 = lie_derivative_form(&ru, &dv)?
            .sub(&lie_derivative_form(&rv, &du)?)?
            .sub(&s.apply_d(&chart, &br)?)?;
        id1.extend(r1.components().map(|(_, c)| c.clone()));

        let r2 = lie_derivative_form(&ru, &lv)?
            .sub(&interior(&rv, &du)?)?
            .sub(&s.apply_l(&chart, &br)?)?;
        id2.extend(r2.components().map(|(_, c)| c.clone()));

        if s.degree() >= 2 {
            let r3 = interior(&ru, &lv)?.add(&interior(&rv, &lu)?)?;
            id3.extend(r3.components().map(|(_, c)| c.clone()));
        } else {
            // Degree-1 defects are functions; the contraction identity reads
            // ℓ(α)(ρ(β)) + ℓ(β)(ρ(α)) = 0.
            let r3 = (&lv.pair(&ru)? + &lu.pair(&rv)?).normalize()?;
            id3.push(r3);
        }
    }
    report.check_residuals("curvature", "spencer.1", id1.iter());
    report.check_residuals("defect-compatibility", "spencer.2", id2.iter());
    report.check_residuals("defect-skew", "spencer.3", id3.iter());
    Ok(report)
}

/// An algebroid derivation candidate: values on frame sections plus its
/// symbol vector field; extended to all sections by
/// `δ(f α) = ζ(f) α + f δ(α)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivationData {
    /// `δ(e_a)` in frame coefficients.
    pub values: Vec<Vec<Expr>>,
    pub symbol: VectorField,
}

impl DerivationData {
    pub fn apply(&self, coeffs: &[Expr]) -> Result<Vec<Expr>> {
        let rank = self.values.len();
        let mut out = vec![Expr::zero(); rank];
        for (a, u) in coeffs.iter().enumerate() {
            for (b, val) in self.values[a].iter().enumerate() {
                out[b] = (&out[b] + &(u * val)).normalize()?;
            }
            out[a] = (&out[a] + &self.symbol.apply(u)?).normalize()?;
        }
        Ok(out)
    }
}

/// Checks that `δ` is a derivation of the algebroid:
/// `δ[α, β] = [δα, β] + [α, δβ]` (frames and randomized pairs) and
/// `[σ(δ), ρ(α)] = ρ(δα)` on frames.
pub fn verify_algebroid_derivation(
    spec: &AlgebroidSpec,
    delta: &DerivationData,
    seed: u64,
) -> Result<StructureReport> {
    if delta.values.len() != spec.rank
        || delta.values.iter().any(|v| v.len() != spec.rank)
    {
        return Err(Error::ShapeMismatch("derivation frame values".to_string()));
    }
    let mut report = StructureReport::new("algebroid_derivation", seed);
    let chart = spec.base.clone();
    let rank = spec.rank;

    let mut pairs: Vec<(Vec<Expr>, Vec<Expr>)> = Vec::new();
    for a in 0..rank {
        for b in (a + 1)..rank {
            let mut u = vec![Expr::zero(); rank];
            u[a] = Expr::one();
            let mut v = vec![Expr::zero(); rank];
            v[b] = Expr::one();
            pairs.push((u, v));
        }
    }
    let mut sampler = Sampler::new(seed);
    for _ in 0..5 {
        let u = (0..rank).map(|_| sampler.poly(&chart, 2)).collect();
        let v = (0..rank).map(|_| sampler.poly(&chart, 2)).collect();
        pairs.push((u, v));
    }

    let mut leibniz = Vec::new();
    for (u, v) in &pairs {
        let lhs = delta.apply(&spec.bracket_sections(u, v)?)?;
        let du = delta.apply(u)?;
        let dv = delta.apply(v)?;
        let rhs1 = spec.bracket_sections(&du, v)?;
        let rhs2 = spec.bracket_sections(u, &dv)?;
        for c in 0..rank {
            leibniz.push((&(&lhs[c] - &rhs1[c]) - &rhs2[c]).normalize()?);
        }
    }
    report.check_residuals("bracket-derivation", "derivation.bracket", leibniz.iter());

    let mut symbol = Vec::new();
    for a in 0..rank {
        let mut u = vec![Expr::zero(); rank];
        u[a] = Expr::one();
        let lhs = lie_bracket(&delta.symbol, &spec.anchor_field(a)?)?;
        let rhs = spec.anchor_of(&delta.apply(&u)?)?;
        symbol.extend(lhs.sub(&rhs)?.components().to_vec());
    }
    report.check_residuals("symbol-compatibility", "derivation.symbol", symbol.iter());
    Ok(report)
}

/// Builds `δ = ℒ_ζ − 𝟙` on the cotangent algebroid of `π` and reports its
/// derivation check side by side with `ℒ_ζ π + π = 0`; the two verdicts
/// agree exactly when `π` is Poisson.
pub fn check_homogeneity_derivation(
    pi: &Multivector,
    zeta: &VectorField,
    seed: u64,
) -> Result<StructureReport> {
    let chart = pi.chart().clone();
    chart.expect_same(zeta.chart())?;
    let n = chart.dim();
    let spec = cotangent_algebroid(pi)?;
    // δ(dx_a) = ℒ_ζ dx_a − dx_a = d(ζ^a) − dx_a.
    let mut values = Vec::with_capacity(n);
    for a in 0..n {
        let dza = Form::d_of(chart.clone(), zeta.component(a))?;
        let mut coeffs = Vec::with_capacity(n);
        for b in 0..n {
            let mut c = dza.component(&[b]);
            if a == b {
                c = (&c - &Expr::one()).normalize()?;
            }
            coeffs.push(c);
        }
        values.push(coeffs);
    }
    let delta = DerivationData {
        values,
        symbol: zeta.clone(),
    };
    let mut report = verify_algebroid_derivation(&spec, &delta, seed)?;
    report.kind = "homogeneity_derivation".to_string();
    let resid = crate::tensor::lie_derivative_multivector(zeta, pi)?.add(pi)?;
    report.check_residuals(
        "homogeneity",
        "homog.weight",
        resid.components().map(|(_, c)| c).collect::<Vec<_>>(),
    );
    Ok(report)
}

/// `d_D` of an Atiyah form through the gauge-algebroid route; used as the
/// cross-module oracle for the direct Koszul implementation.
pub fn d_d_via_gauge(omega: &AtiyahForm) -> Result<AtiyahForm> {
    let chart = omega.chart().clone();
    let spec = gauge_algebroid(&chart)?;
    let rep: Vec<Expr> = spec.rep().expect("tautological rep").to_vec();
    let c = atiyah_form_to_cochain(omega)?;
    let dc = algebroid_differential(&spec, Some(&rep), &c)?;
    cochain_to_atiyah_form(&chart, &dc)
}

/// Residuals of the homogenization intertwining the jet bracket with the
/// cotangent bracket of the Poissonization on frame jets.
pub fn jet_cotangent_intertwine_residuals(
    hc: &crate::homogen::HomogChart,
    j: &Multiderivation,
) -> Result<Vec<Expr>> {
    let chart = hc.base().clone();
    let n = chart.dim();
    let pi = hc.homogenize_multiderivation(j)?;
    let mut out = Vec::new();
    for a in 0..=n {
        for b in (a + 1)..=n {
            let pa = JetSection::basis(chart.clone(), a)?;
            let pb = JetSection::basis(chart.clone(), b)?;
            let lhs = hc.homogenize_jet(&jet_bracket(j, &pa, &pb)?)?;
            let rhs = cotangent_bracket(
                &pi,
                &hc.homogenize_jet(&pa)?,
                &hc.homogenize_jet(&pb)?,
            )?;
            out.extend(lhs.sub(&rhs)?.components().map(|(_, c)| c.clone()));
        }
    }
    Ok(out)
}
