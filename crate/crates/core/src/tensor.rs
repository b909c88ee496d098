//! Chart calculus: vector fields, differential forms, multivector fields,
//! (1,1)-tensors and smooth maps, with exact components.
//!
//! Conventions, fixed once and used everywhere:
//! - forms and multivectors are stored on strictly increasing index tuples;
//! - evaluation of a decomposable wedge uses the determinant convention,
//!   `(u ∧ v)(α, β) = α(u)β(v) − α(v)β(u)`;
//! - contraction happens in the first slot, so `π^♯α = i_α π` satisfies
//!   `⟨β, π^♯α⟩ = π(α, β)` (the `i_dx(∂x∧∂y) = ∂y` oracle below);
//! - `Tensor11` matrices act on columns: `N(∂_j) = Σ_i m[i][j] ∂_i`.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::expr::{Chart, Expr};
use crate::Result;

/// Sorts an index tuple, returning `(sorted, sign)`, or `None` on repetition.
pub(crate) fn sort_indices(idx: &[usize]) -> Option<(Vec<usize>, i64)> {
    let mut v: Vec<usize> = idx.to_vec();
    let mut sign = 1i64;
    // Insertion sort, counting transpositions.
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// Shared storage for alternating tensors (forms and multivectors).
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Alternating {
    pub chart: Chart,
    pub degree: usize,
    /// Strictly increasing tuples only; absent means zero.
    pub comps: BTreeMap<Vec<usize>, Expr>,
}

impl Alternating {
    // Degrees above the chart dimension are allowed and identically zero.
    fn new(chart: Chart, degree: usize) -> Result<Self> {
        Ok(Alternating {
            chart,
            degree,
            comps: BTreeMap::new(),
        })
    }

    fn set(&mut self, idx: &[usize], value: Expr) -> Result<()> {
        if idx.len() != self.degree
            || idx.windows(2).any(|w| w[0] >= w[1])
            || idx.iter().any(|&i| i >= self.chart.dim())
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

    /// Adds `value` at an arbitrary (possibly unsorted) tuple with the
    /// alternating sign; repeated indices contribute nothing.
    fn add_signed(&mut self, idx: &[usize], value: Expr) {
        if let Some((sorted, sign)) = sort_indices(idx) {
            let signed = if sign < 0 { -&value } else { value };
            let entry = self.comps.entry(sorted.clone()).or_insert_with(Expr::zero);
            *entry = (&*entry + &signed)
                .normalize()
                .expect("normalized components");
            if entry.is_structural_zero() {
                self.comps.remove(&sorted);
            }
        }
    }

    fn normalize_in_place(&mut self) {
        self.comps.retain(|_, v| {
            *v = v.normalize().expect("normalized components");
            !v.is_structural_zero()
        });
    }

    /// Component at a tuple, with sign resolution for unsorted input.
    fn get_signed(&self, idx: &[usize]) -> Expr {
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

    fn add(&self, other: &Alternating) -> Result<Alternating> {
        self.chart.expect_same(&other.chart)?;
        if self.degree != other.degree {
            return Err(Error::DegreeOutOfRange {
                degree: other.degree,
                dim: self.degree,
            });
        }
        let mut out = self.clone();
        for (idx, v) in &other.comps {
            let entry = out.comps.entry(idx.clone()).or_insert_with(Expr::zero);
            *entry = (&*entry + v).normalize()?;
        }
        out.comps.retain(|_, v| !v.is_structural_zero());
        Ok(out)
    }

    fn scale(&self, f: &Expr) -> Alternating {
        let mut out = self.clone();
        out.comps = out
            .comps
            .into_iter()
            .map(|(idx, v)| (idx, (&v * f).normalize().expect("normalized components")))
            .filter(|(_, v)| !v.is_structural_zero())
            .collect();
        out
    }

    fn neg(&self) -> Alternating {
        self.scale(&Expr::int(-1))
    }

    fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    fn wedge(&self, other: &Alternating) -> Result<Alternating> {
        self.chart.expect_same(&other.chart)?;
        let mut out = Alternating::new(self.chart.clone(), self.degree + other.degree)?;
        for (i1, c1) in &self.comps {
            for (i2, c2) in &other.comps {
                let mut idx = i1.clone();
                idx.extend_from_slice(i2);
                out.add_signed(&idx, (c1 * c2).normalize()?);
            }
        }
        Ok(out)
    }

    /// Contraction in the first slot against component vector `v`
    /// (covector components for multivectors, vector components for forms).
    fn interior(&self, v: &[Expr]) -> Result<Alternating> {
        if self.degree == 0 {
            return Err(Error::DegreeOutOfRange {
                degree: 0,
                dim: self.chart.dim(),
            });
        }
        let mut out = Alternating::new(self.chart.clone(), self.degree - 1)?;
        for (idx, c) in &self.comps {
            for (p, &i) in idx.iter().enumerate() {
                let term = (&v[i] * c).normalize()?;
                if term.is_structural_zero() {
                    continue;
                }
                let term = if p % 2 == 0 { term } else { -&term };
                let mut rest = idx.clone();
                rest.remove(p);
                let entry = out.comps.entry(rest).or_insert_with(Expr::zero);
                *entry = (&*entry + &term).normalize()?;
            }
        }
        out.comps.retain(|_, v| !v.is_structural_zero());
        Ok(out)
    }

    /// Full evaluation against `degree` many component vectors.
    fn eval(&self, args: &[Vec<Expr>]) -> Result<Expr> {
        if args.len() != self.degree {
            return Err(Error::ArityMismatch {
                expected: self.degree,
                got: args.len(),
            });
        }
        let mut acc = Expr::zero();
        for (idx, c) in &self.comps {
            // Minor with rows = arguments, columns = tuple indices.
            let minor: Vec<Vec<Expr>> = args
                .iter()
                .map(|a| idx.iter().map(|&i| a[i].clone()).collect())
                .collect();
            let d = det(&minor)?;
            acc = &acc + &(c * &d);
        }
        acc.normalize()
    }

    fn substitute_components<F>(&self, f: F) -> Result<Alternating>
    where
        F: Fn(&Expr) -> Result<Expr>,
    {
        let mut out = self.clone();
        let mut comps = BTreeMap::new();
        for (idx, v) in &out.comps {
            let v = f(v)?.normalize()?;
            if !v.is_structural_zero() {
                comps.insert(idx.clone(), v);
            }
        }
        out.comps = comps;
        Ok(out)
    }
}

/// Exact determinant via cofactor expansion; sized for small matrices.
pub(crate) fn det(m: &[Vec<Expr>]) -> Result<Expr> {
    let n = m.len();
    if n == 0 {
        return Ok(Expr::one());
    }
    if n == 1 {
        return m[0][0].normalize();
    }
    let mut acc = Expr::zero();
    for (j, pivot) in m[0].iter().enumerate() {
        if pivot.is_structural_zero() {
            continue;
        }
        let minor: Vec<Vec<Expr>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let term = (pivot * &det(&minor)?).normalize()?;
        acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc.normalize()
}

/// A vector field with one component per chart variable.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    chart: Chart,
    comps: Vec<Expr>,
}

impl VectorField {
    pub fn new(chart: Chart, comps: Vec<Expr>) -> Result<Self> {
        if comps.len() != chart.dim() {
            return Err(Error::ComponentCount {
                expected: chart.dim(),
                got: comps.len(),
            });
        }
        let comps = comps
            .into_iter()
            .map(|e| e.normalize())
            .collect::<Result<Vec<_>>>()?;
        Ok(VectorField { chart, comps })
    }

    pub fn zero(chart: Chart) -> Self {
        let comps = vec![Expr::zero(); chart.dim()];
        VectorField { chart, comps }
    }

    /// The `i`-th coordinate field.
    pub fn coordinate(chart: Chart, i: usize) -> Self {
        let mut v = VectorField::zero(chart);
        v.comps[i] = Expr::one();
        v
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    pub fn component(&self, i: usize) -> &Expr {
        &self.comps[i]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_structural_zero())
    }

    /// Directional derivative of a function.
    pub fn apply(&self, f: &Expr) -> Result<Expr> {
        let mut acc = Expr::zero();
        for (i, c) in self.comps.iter().enumerate() {
            acc = &acc + &(c * &f.differentiate(self.chart.vars()[i].as_str())?);
        }
        acc.normalize()
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField> {
        self.chart.expect_same(&other.chart)?;
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| (a + b).normalize())
            .collect::<Result<Vec<_>>>()?;
        Ok(VectorField {
            chart: self.chart.clone(),
            comps,
        })
    }

    pub fn scale(&self, f: &Expr) -> Result<VectorField> {
        let comps = self
            .comps
            .iter()
            .map(|c| (c * f).normalize())
            .collect::<Result<Vec<_>>>()?;
        Ok(VectorField {
            chart: self.chart.clone(),
            comps,
        })
    }

    pub fn neg(&self) -> VectorField {
        self.scale(&Expr::int(-1)).expect("normalized components")
    }

    pub fn sub(&self, other: &VectorField) -> Result<VectorField> {
        self.add(&other.neg())
    }

    pub fn to_multivector(&self) -> Multivector {
        let mut alt = Alternating::new(self.chart.clone(), 1).expect("degree 1");
        for (i, c) in self.comps.iter().enumerate() {
            if !c.is_structural_zero() {
                alt.comps.insert(vec![i], c.clone());
            }
        }
        Multivector { alt }
    }
}

/// `[X, Y]^i = Σ_j (X^j ∂_j Y^i − Y^j ∂_j X^i)`.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField> {
    x.chart.expect_same(&y.chart)?;
    let n = x.chart.dim();
    let mut comps = Vec::with_capacity(n);
    for i in 0..n {
        comps.push((&x.apply(&y.comps[i])? - &y.apply(&x.comps[i])?).normalize()?);
    }
    VectorField::new(x.chart.clone(), comps)
}

/// A differential `k`-form.
#[derive(Debug, Clone, PartialEq)]
pub struct Form {
    pub(crate) alt: Alternating,
}

/// A `k`-vector field.
#[derive(Debug, Clone, PartialEq)]
pub struct Multivector {
    pub(crate) alt: Alternating,
}

macro_rules! alternating_api {
    ($ty:ident) => {
        impl $ty {
            pub fn zero(chart: Chart, degree: usize) -> Result<Self> {
                Ok($ty {
                    alt: Alternating::new(chart, degree)?,
                })
            }

            pub fn chart(&self) -> &Chart {
                &self.alt.chart
            }

            pub fn degree(&self) -> usize {
                self.alt.degree
            }

            pub fn set(&mut self, idx: &[usize], value: Expr) -> Result<()> {
                self.alt.set(idx, value)
            }

            /// Adds a (possibly unsorted) component with the alternating sign.
            pub fn add_signed(&mut self, idx: &[usize], value: Expr) {
                self.alt.add_signed(idx, value)
            }

            /// Component at a tuple; unsorted tuples resolve with a sign.
            pub fn component(&self, idx: &[usize]) -> Expr {
                self.alt.get_signed(idx)
            }

            pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &Expr)> {
                self.alt.comps.iter()
            }

            pub fn is_zero(&self) -> bool {
                self.alt.is_zero()
            }

            pub fn add(&self, other: &Self) -> Result<Self> {
                Ok($ty {
                    alt: self.alt.add(&other.alt)?,
                })
            }

            pub fn sub(&self, other: &Self) -> Result<Self> {
                self.add(&other.neg())
            }

            pub fn scale(&self, f: &Expr) -> Self {
                $ty {
                    alt: self.alt.scale(f),
                }
            }

            pub fn neg(&self) -> Self {
                $ty {
                    alt: self.alt.neg(),
                }
            }

            pub fn wedge(&self, other: &Self) -> Result<Self> {
                Ok($ty {
                    alt: self.alt.wedge(&other.alt)?,
                })
            }

            /// Applies a scalar rewriting to every component.
            pub fn map_components<F>(&self, f: F) -> Result<Self>
            where
                F: Fn(&Expr) -> Result<Expr>,
            {
                Ok($ty {
                    alt: self.alt.substitute_components(f)?,
                })
            }
        }
    };
}

alternating_api!(Form);
alternating_api!(Multivector);

impl Form {
    /// The differential of a function.
    pub fn d_of(chart: Chart, f: &Expr) -> Result<Form> {
        let mut out = Form::zero(chart.clone(), 1)?;
        for i in 0..chart.dim() {
            out.set(&[i], f.differentiate(chart.vars()[i].as_str())?)?;
        }
        Ok(out)
    }

    /// Coordinate differential `dx_i`.
    pub fn coordinate(chart: Chart, i: usize) -> Result<Form> {
        let mut out = Form::zero(chart, 1)?;
        out.set(&[i], Expr::one())?;
        Ok(out)
    }

    /// Evaluation on vector fields.
    pub fn eval(&self, args: &[&VectorField]) -> Result<Expr> {
        for a in args {
            self.alt.chart.expect_same(&a.chart)?;
        }
        let vecs: Vec<Vec<Expr>> = args.iter().map(|a| a.comps.clone()).collect();
        self.alt.eval(&vecs)
    }

    /// Pairing of a 1-form with a vector field.
    pub fn pair(&self, x: &VectorField) -> Result<Expr> {
        self.eval(&[x])
    }
}

impl Multivector {
    pub fn from_function(chart: Chart, f: &Expr) -> Result<Multivector> {
        let mut out = Multivector::zero(chart, 0)?;
        let f = f.normalize()?;
        if !f.is_structural_zero() {
            out.alt.comps.insert(Vec::new(), f);
        }
        Ok(out)
    }

    /// The scalar carried by a 0-vector.
    pub fn scalar(&self) -> Expr {
        self.alt
            .comps
            .get(&Vec::new())
            .cloned()
            .unwrap_or_else(Expr::zero)
    }

    /// Evaluation on 1-forms.
    pub fn eval(&self, args: &[&Form]) -> Result<Expr> {
        let n = self.chart().dim();
        let mut vecs = Vec::with_capacity(args.len());
        for a in args {
            self.alt.chart.expect_same(a.chart())?;
            if a.degree() != 1 {
                return Err(Error::DegreeOutOfRange {
                    degree: a.degree(),
                    dim: 1,
                });
            }
            vecs.push((0..n).map(|i| a.component(&[i])).collect::<Vec<Expr>>());
        }
        self.alt.eval(&vecs)
    }

    pub fn to_vector_field(&self) -> Result<VectorField> {
        if self.degree() != 1 {
            return Err(Error::DegreeOutOfRange {
                degree: self.degree(),
                dim: 1,
            });
        }
        let n = self.chart().dim();
        VectorField::new(
            self.chart().clone(),
            (0..n).map(|i| self.component(&[i])).collect(),
        )
    }
}

/// Exterior derivative.
pub fn ext_d(omega: &Form) -> Result<Form> {
    let chart = omega.chart().clone();
    let mut out = Form::zero(chart.clone(), omega.degree() + 1)?;
    for (idx, c) in omega.components() {
        for i in 0..chart.dim() {
            let dc = c.differentiate(chart.vars()[i].as_str())?;
            if dc.is_structural_zero() {
                continue;
            }
            let mut tuple = vec![i];
            tuple.extend_from_slice(idx);
            out.add_signed(&tuple, dc);
        }
    }
    Ok(out)
}

/// Interior product `i_X ω` in the first slot.
pub fn interior(x: &VectorField, omega: &Form) -> Result<Form> {
    omega.chart().expect_same(&x.chart)?;
    Ok(Form {
        alt: omega.alt.interior(&x.comps)?,
    })
}

/// Interior product of a 1-form into a multivector, first slot:
/// `(i_α P)(β, …) = P(α, β, …)`.
pub fn interior_form(alpha: &Form, p: &Multivector) -> Result<Multivector> {
    p.chart().expect_same(alpha.chart())?;
    if alpha.degree() != 1 {
        return Err(Error::DegreeOutOfRange {
            degree: alpha.degree(),
            dim: 1,
        });
    }
    let n = p.chart().dim();
    let covec: Vec<Expr> = (0..n).map(|i| alpha.component(&[i])).collect();
    Ok(Multivector {
        alt: p.alt.interior(&covec)?,
    })
}

/// Sharp map of a bivector: `⟨β, π^♯α⟩ = π(α, β)`.
pub fn sharp(pi: &Multivector, alpha: &Form) -> Result<VectorField> {
    interior_form(alpha, pi)?.to_vector_field()
}

/// Cartan formula `ℒ_X = i_X ∘ d + d ∘ i_X`.
pub fn lie_derivative_form(x: &VectorField, omega: &Form) -> Result<Form> {
    let a = interior(x, &ext_d(omega)?)?;
    let b = ext_d(&interior(x, omega)?)?;
    a.add(&b)
}

/// `ℒ_X P = [X, P]` (Schouten bracket with a field).
pub fn lie_derivative_multivector(x: &VectorField, p: &Multivector) -> Result<Multivector> {
    schouten(&x.to_multivector(), p)
}

/// `(ℒ_X N)(Y) = [X, N Y] − N [X, Y]`, computed on coordinate fields.
pub fn lie_derivative_tensor11(x: &VectorField, n: &Tensor11) -> Result<Tensor11> {
    let chart = n.chart.clone();
    chart.expect_same(&x.chart)?;
    let dim = chart.dim();
    let mut matrix = vec![vec![Expr::zero(); dim]; dim];
    for j in 0..dim {
        let ej = VectorField::coordinate(chart.clone(), j);
        let nej = n.apply(&ej)?;
        let term = lie_bracket(x, &nej)?.sub(&n.apply(&lie_bracket(x, &ej)?)?)?;
        for (i, row) in matrix.iter_mut().enumerate() {
            row[j] = term.comps[i].clone();
        }
    }
    Tensor11::new(chart, matrix)
}

/// Schouten bracket by the explicit bidegree formula on decomposable
/// monomials. On fields it is the Lie bracket, on a field and a multivector
/// the Lie derivative, and `[P, f] = i_df P`.
pub fn schouten(p: &Multivector, q: &Multivector) -> Result<Multivector> {
    p.chart().expect_same(q.chart())?;
    let chart = p.chart().clone();
    let (dp, dq) = (p.degree(), q.degree());

    if dp == 0 && dq == 0 {
        return Multivector::zero(chart, 0);
    }
    if dq == 0 {
        // [P, f] = i_df P
        let f = q.scalar();
        let df = Form::d_of(chart, &f)?;
        return interior_form(&df, p);
    }
    if dp == 0 {
        // [f, Q] = (−1)^q i_df Q
        let f = p.scalar();
        let df = Form::d_of(chart.clone(), &f)?;
        let r = interior_form(&df, q)?;
        return Ok(if dq % 2 == 1 { r.neg() } else { r });
    }

    let out_degree = dp + dq - 1;
    if out_degree > chart.dim() {
        // The bracket vanishes identically on this chart.
        return Multivector::zero(chart.clone(), chart.dim());
    }
    let mut out = Multivector::zero(chart.clone(), out_degree)?;
    // Global sign matching the Gerstenhaber convention of the
    // Schouten–Jacobi bracket: (−1)^{(p−1)(q−1)} times the classical
    // decomposable-field expansion.
    let global = if (dp - 1) * (dq - 1) % 2 == 1 { -1 } else { 1 };

    for (idx_p, f) in p.components() {
        for (idx_q, g) in q.components() {
            // Monomial fields: X_1 = f ∂_{i1}, X_t = ∂_{it}; same for Q.
            for t in 0..dp {
                for u in 0..dq {
                    let xi = idx_p[t];
                    let yj = idx_q[u];
                    // [X_t, Y_u] as (coefficient, index) pairs.
                    let mut bracket: Vec<(Expr, usize)> = Vec::new();
                    match (t == 0, u == 0) {
                        (false, false) => {} // [∂, ∂] = 0
                        (true, false) => {
                            // [f ∂_xi, ∂_yj] = −(∂_yj f) ∂_xi
                            let d = f.differentiate(chart.vars()[yj].as_str())?;
                            if !d.is_structural_zero() {
                                bracket.push(((-&d).normalize()?, xi));
                            }
                        }
                        (false, true) => {
                            // [∂_xi, g ∂_yj] = (∂_xi g) ∂_yj
                            let d = g.differentiate(chart.vars()[xi].as_str())?;
                            if !d.is_structural_zero() {
                                bracket.push((d, yj));
                            }
                        }
                        (true, true) => {
                            // [f ∂_xi, g ∂_yj] = f (∂_xi g) ∂_yj − g (∂_yj f) ∂_xi
                            let dg = g.differentiate(chart.vars()[xi].as_str())?;
                            let df = f.differentiate(chart.vars()[yj].as_str())?;
                            if !dg.is_structural_zero() {
                                bracket.push(((f * &dg).normalize()?, yj));
                            }
                            if !df.is_structural_zero() {
                                bracket.push(((-&(g * &df)).normalize()?, xi));
                            }
                        }
                    }
                    if bracket.is_empty() {
                        continue;
                    }
                    // Coefficients not consumed by the bracket ride along.
                    let mut outer = Expr::one();
                    if t != 0 {
                        outer = (&outer * f).normalize()?;
                    }
                    if u != 0 {
                        outer = (&outer * g).normalize()?;
                    }
                    let term_sign = if (t + u) % 2 == 0 { 1 } else { -1 } * global;
                    for (coeff, k) in bracket {
                        let mut tuple = vec![k];
                        tuple.extend(
                            idx_p
                                .iter()
                                .enumerate()
                                .filter(|(a, _)| *a != t)
                                .map(|(_, &i)| i),
                        );
                        tuple.extend(
                            idx_q
                                .iter()
                                .enumerate()
                                .filter(|(a, _)| *a != u)
                                .map(|(_, &i)| i),
                        );
                        let mut value = (&outer * &coeff).normalize()?;
                        if term_sign < 0 {
                            value = -&value;
                        }
                        out.add_signed(&tuple, value);
                    }
                }
            }
        }
    }
    out.alt.normalize_in_place();
    Ok(out)
}

/// A (1,1)-tensor field; `N(∂_j) = Σ_i matrix[i][j] ∂_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor11 {
    chart: Chart,
    matrix: Vec<Vec<Expr>>,
}

impl Tensor11 {
    pub fn new(chart: Chart, matrix: Vec<Vec<Expr>>) -> Result<Self> {
        let n = chart.dim();
        if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::ComponentCount {
                expected: n,
                got: matrix.len(),
            });
        }
        let matrix = matrix
            .into_iter()
            .map(|row| row.into_iter().map(|e| e.normalize()).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        Ok(Tensor11 { chart, matrix })
    }

    pub fn identity(chart: Chart) -> Self {
        let n = chart.dim();
        let matrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Expr::one() } else { Expr::zero() })
                    .collect()
            })
            .collect();
        Tensor11 { chart, matrix }
    }

    pub fn zero(chart: Chart) -> Self {
        let n = chart.dim();
        Tensor11 {
            chart,
            matrix: vec![vec![Expr::zero(); n]; n],
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn matrix(&self) -> &Vec<Vec<Expr>> {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> &Expr {
        &self.matrix[i][j]
    }

    pub fn apply(&self, x: &VectorField) -> Result<VectorField> {
        self.chart.expect_same(&x.chart)?;
        let n = self.chart.dim();
        let mut comps = vec![Expr::zero(); n];
        for (i, comp) in comps.iter_mut().enumerate() {
            let mut acc = Expr::zero();
            for j in 0..n {
                acc = &acc + &(&self.matrix[i][j] * &x.comps[j]);
            }
            *comp = acc.normalize()?;
        }
        VectorField::new(self.chart.clone(), comps)
    }

    /// `N^∗α = α(N −)` on 1-forms.
    pub fn transpose_apply(&self, alpha: &Form) -> Result<Form> {
        self.chart.expect_same(alpha.chart())?;
        let n = self.chart.dim();
        let mut out = Form::zero(self.chart.clone(), 1)?;
        for j in 0..n {
            let mut acc = Expr::zero();
            for i in 0..n {
                acc = &acc + &(&self.matrix[i][j] * &alpha.component(&[i]));
            }
            out.set(&[j], acc)?;
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Tensor11 {
        let n = self.chart.dim();
        let matrix = (0..n)
            .map(|i| (0..n).map(|j| self.matrix[j][i].clone()).collect())
            .collect();
        Tensor11 {
            chart: self.chart.clone(),
            matrix,
        }
    }

    pub fn compose(&self, other: &Tensor11) -> Result<Tensor11> {
        self.chart.expect_same(&other.chart)?;
        let n = self.chart.dim();
        let mut matrix = vec![vec![Expr::zero(); n]; n];
        for (i, row) in matrix.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                let mut acc = Expr::zero();
                for k in 0..n {
                    acc = &acc + &(&self.matrix[i][k] * &other.matrix[k][j]);
                }
                *entry = acc.normalize()?;
            }
        }
        Tensor11::new(self.chart.clone(), matrix)
    }

    pub fn add(&self, other: &Tensor11) -> Result<Tensor11> {
        self.chart.expect_same(&other.chart)?;
        let n = self.chart.dim();
        let matrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (&self.matrix[i][j] + &other.matrix[i][j]).normalize())
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Tensor11::new(self.chart.clone(), matrix)
    }

    pub fn scale(&self, f: &Expr) -> Result<Tensor11> {
        let n = self.chart.dim();
        let matrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (&self.matrix[i][j] * f).normalize())
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Tensor11::new(self.chart.clone(), matrix)
    }

    pub fn sub(&self, other: &Tensor11) -> Result<Tensor11> {
        self.add(&other.scale(&Expr::int(-1))?)
    }

    pub fn is_zero(&self) -> bool {
        self.matrix
            .iter()
            .all(|r| r.iter().all(|e| e.is_structural_zero()))
    }
}

/// Vector-valued antisymmetric 2-form: values on coordinate pairs `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorValued2Form {
    chart: Chart,
    values: BTreeMap<(usize, usize), VectorField>,
}

impl VectorValued2Form {
    pub fn zero(chart: Chart) -> Self {
        VectorValued2Form {
            chart,
            values: BTreeMap::new(),
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn set(&mut self, i: usize, j: usize, value: VectorField) -> Result<()> {
        if i >= j || j >= self.chart.dim() {
            return Err(Error::BadIndexTuple(vec![i, j]));
        }
        if value.is_zero() {
            self.values.remove(&(i, j));
        } else {
            self.values.insert((i, j), value);
        }
        Ok(())
    }

    pub fn value(&self, i: usize, j: usize) -> VectorField {
        if i == j {
            return VectorField::zero(self.chart.clone());
        }
        if i < j {
            self.values
                .get(&(i, j))
                .cloned()
                .unwrap_or_else(|| VectorField::zero(self.chart.clone()))
        } else {
            self.value(j, i).neg()
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &VectorField)> {
        self.values.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sub(&self, other: &VectorValued2Form) -> Result<VectorValued2Form> {
        self.chart.expect_same(&other.chart)?;
        let mut out = VectorValued2Form::zero(self.chart.clone());
        let n = self.chart.dim();
        for i in 0..n {
            for j in (i + 1)..n {
                out.set(i, j, self.value(i, j).sub(&other.value(i, j))?)?;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, f: &Expr) -> Result<VectorValued2Form> {
        let mut out = VectorValued2Form::zero(self.chart.clone());
        for (&(i, j), v) in &self.values {
            out.set(i, j, v.scale(f)?)?;
        }
        Ok(out)
    }
}

/// Frölicher–Nijenhuis bracket of two (1,1)-tensors on coordinate fields:
/// `[U,V](X,Y) = [UX,VY] − U[VX,Y] − U[X,VY] + UV[X,Y] + (U ↔ V)`.
pub fn fn_bracket(u: &Tensor11, v: &Tensor11) -> Result<VectorValued2Form> {
    u.chart.expect_same(&v.chart)?;
    let chart = u.chart.clone();
    let n = chart.dim();
    let mut out = VectorValued2Form::zero(chart.clone());
    for i in 0..n {
        for j in (i + 1)..n {
            let x = VectorField::coordinate(chart.clone(), i);
            let y = VectorField::coordinate(chart.clone(), j);
            let mut acc = VectorField::zero(chart.clone());
            for (a, b) in [(u, v), (v, u)] {
                let ax = a.apply(&x)?;
                let by = b.apply(&y)?;
                let bx = b.apply(&x)?;
                acc = acc
                    .add(&lie_bracket(&ax, &by)?)?
                    .sub(&a.apply(&lie_bracket(&bx, &y)?)?)?
                    .sub(&a.apply(&lie_bracket(&x, &by)?)?)?
                    .add(&a.apply(&b.apply(&lie_bracket(&x, &y)?)?)?)?;
            }
            out.set(i, j, acc)?;
        }
    }
    Ok(out)
}

/// Nijenhuis torsion
/// `𝒯_N(X,Y) = [NX,NY] − N[NX,Y] − N[X,NY] + N²[X,Y]` on coordinate fields.
pub fn nijenhuis_torsion(n: &Tensor11) -> Result<VectorValued2Form> {
    let chart = n.chart.clone();
    let dim = chart.dim();
    let mut out = VectorValued2Form::zero(chart.clone());
    for i in 0..dim {
        for j in (i + 1)..dim {
            let x = VectorField::coordinate(chart.clone(), i);
            let y = VectorField::coordinate(chart.clone(), j);
            let nx = n.apply(&x)?;
            let ny = n.apply(&y)?;
            let t = lie_bracket(&nx, &ny)?
                .sub(&n.apply(&lie_bracket(&nx, &y)?)?)?
                .sub(&n.apply(&lie_bracket(&x, &ny)?)?)?
                .add(&n.apply(&n.apply(&lie_bracket(&x, &y)?)?)?)?;
            out.set(i, j, t)?;
        }
    }
    Ok(out)
}

fn increasing_tuples(dim: usize, k: usize) -> Vec<Vec<usize>> {
    let mut all = Vec::new();
    let mut stack = vec![(Vec::new(), 0usize)];
    while let Some((cur, start)) = stack.pop() {
        if cur.len() == k {
            all.push(cur);
            continue;
        }
        for i in start..dim {
            let mut next = cur.clone();
            next.push(i);
            stack.push((next, i + 1));
        }
    }
    all.sort();
    all
}

/// Inserts `N` into the `slot`-th argument of a form, reading off components
/// on increasing tuples. The result is an honest alternating tensor exactly
/// when [`form_insertion_skew_defect`] is empty.
pub fn contract11_form(n: &Tensor11, omega: &Form, slot: usize) -> Result<Form> {
    omega.chart().expect_same(&n.chart)?;
    let k = omega.degree();
    if slot >= k {
        return Err(Error::SlotOutOfRange { slot, degree: k });
    }
    let chart = omega.chart().clone();
    let dim = chart.dim();
    let mut out = Form::zero(chart.clone(), k)?;
    for idx in increasing_tuples(dim, k) {
        // ω(…, N ∂_{i_slot}, …) = Σ_c m[c][i_slot] ω(…, ∂_c, …)
        let mut acc = Expr::zero();
        for c in 0..dim {
            let coef = n.matrix[c][idx[slot]].clone();
            if coef.is_structural_zero() {
                continue;
            }
            let mut tuple = idx.clone();
            tuple[slot] = c;
            acc = &acc + &(&coef * &omega.component(&tuple));
        }
        let acc = acc.normalize()?;
        if !acc.is_structural_zero() {
            out.set(&idx, acc)?;
        }
    }
    Ok(out)
}

/// Inserts `N^∗` into the `slot`-th covector argument of a multivector.
pub fn contract11_multivector(n: &Tensor11, p: &Multivector, slot: usize) -> Result<Multivector> {
    p.chart().expect_same(&n.chart)?;
    let k = p.degree();
    if slot >= k {
        return Err(Error::SlotOutOfRange { slot, degree: k });
    }
    let chart = p.chart().clone();
    let dim = chart.dim();
    let mut out = Multivector::zero(chart.clone(), k)?;
    for idx in increasing_tuples(dim, k) {
        // P(…, N^∗ dx_a, …) = Σ_c m[a][c] P(…, dx_c, …)
        let mut acc = Expr::zero();
        for c in 0..dim {
            let coef = n.matrix[idx[slot]][c].clone();
            if coef.is_structural_zero() {
                continue;
            }
            let mut tuple = idx.clone();
            tuple[slot] = c;
            acc = &acc + &(&coef * &p.component(&tuple));
        }
        let acc = acc.normalize()?;
        if !acc.is_structural_zero() {
            out.set(&idx, acc)?;
        }
    }
    Ok(out)
}

/// Symmetric defect of the slot-0 insertion on a 2-form:
/// entries `ω(N∂_a, ∂_b) + ω(N∂_b, ∂_a)`; empty means the insertion is skew.
pub fn form_insertion_skew_defect(n: &Tensor11, omega: &Form) -> Result<Vec<Expr>> {
    if omega.degree() != 2 {
        return Err(Error::DegreeOutOfRange {
            degree: omega.degree(),
            dim: 2,
        });
    }
    let dim = omega.chart().dim();
    let mut defects = Vec::new();
    for a in 0..dim {
        for b in a..dim {
            let mut lhs = Expr::zero();
            for c in 0..dim {
                lhs = &lhs + &(&n.matrix[c][a] * &omega.component(&[c, b]));
                lhs = &lhs + &(&n.matrix[c][b] * &omega.component(&[c, a]));
            }
            let lhs = lhs.normalize()?;
            if !lhs.is_structural_zero() {
                defects.push(lhs);
            }
        }
    }
    Ok(defects)
}

/// Symmetric defect of `π(N^∗ −, −)`:
/// entries `π(N^∗dx_a, dx_b) + π(N^∗dx_b, dx_a)`.
pub fn multivector_insertion_skew_defect(n: &Tensor11, pi: &Multivector) -> Result<Vec<Expr>> {
    if pi.degree() != 2 {
        return Err(Error::DegreeOutOfRange {
            degree: pi.degree(),
            dim: 2,
        });
    }
    let dim = pi.chart().dim();
    let mut defects = Vec::new();
    for a in 0..dim {
        for b in a..dim {
            let mut lhs = Expr::zero();
            for c in 0..dim {
                lhs = &lhs + &(&n.matrix[a][c] * &pi.component(&[c, b]));
                lhs = &lhs + &(&n.matrix[b][c] * &pi.component(&[c, a]));
            }
            let lhs = lhs.normalize()?;
            if !lhs.is_structural_zero() {
                defects.push(lhs);
            }
        }
    }
    Ok(defects)
}

/// A smooth map between charts, one source-variable expression per target
/// variable.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothMap {
    source: Chart,
    target: Chart,
    comps: Vec<Expr>,
}

impl SmoothMap {
    pub fn new(source: Chart, target: Chart, comps: Vec<Expr>) -> Result<Self> {
        if comps.len() != target.dim() {
            return Err(Error::ComponentCount {
                expected: target.dim(),
                got: comps.len(),
            });
        }
        let comps = comps
            .into_iter()
            .map(|e| e.normalize())
            .collect::<Result<Vec<_>>>()?;
        for c in &comps {
            for v in c.variables() {
                source.var_index(&v)?;
            }
        }
        Ok(SmoothMap {
            source,
            target,
            comps,
        })
    }

    pub fn identity(chart: Chart) -> Self {
        let comps = (0..chart.dim()).map(|i| chart.coord(i)).collect();
        SmoothMap {
            source: chart.clone(),
            target: chart,
            comps,
        }
    }

    pub fn source(&self) -> &Chart {
        &self.source
    }

    pub fn target(&self) -> &Chart {
        &self.target
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &SmoothMap) -> Result<SmoothMap> {
        inner.target.expect_same(&self.source)?;
        let comps = self
            .comps
            .iter()
            .map(|c| inner.substitute_into(c))
            .collect::<Result<Vec<_>>>()?;
        SmoothMap::new(inner.source.clone(), self.target.clone(), comps)
    }

    /// Simultaneous substitution of this map's components into a
    /// target-chart expression.
    fn substitute_into(&self, f: &Expr) -> Result<Expr> {
        let binds: Vec<(String, Expr)> = self
            .target
            .vars()
            .iter()
            .cloned()
            .zip(self.comps.iter().cloned())
            .collect();
        crate::expr::substitute_many(f, &binds)
    }

    /// Pullback of a function on the target chart.
    pub fn pullback_fn(&self, f: &Expr) -> Result<Expr> {
        for v in f.variables() {
            self.target.var_index(&v)?;
        }
        self.substitute_into(f)
    }

    /// Pullback of a form on the target chart.
    pub fn pullback(&self, omega: &Form) -> Result<Form> {
        self.target.expect_same(omega.chart())?;
        let k = omega.degree();
        let mut out = Form::zero(self.source.clone(), k)?;
        let n_src = self.source.dim();
        // dφ^j = Σ_i ∂φ^j/∂x_i dx_i
        let jac = self.jacobian()?;
        for (idx, c) in omega.components() {
            let coeff = self.substitute_into(c)?;
            // Expand dφ^{idx_1} ∧ … ∧ dφ^{idx_k} over source tuples.
            let mut terms: Vec<(Vec<usize>, Expr)> = vec![(Vec::new(), coeff)];
            for &j in idx {
                let mut next = Vec::new();
                for (tuple, acc) in &terms {
                    for i in 0..n_src {
                        let dj = &jac[j][i];
                        if dj.is_structural_zero() {
                            continue;
                        }
                        let mut t = tuple.clone();
                        t.push(i);
                        next.push((t, (acc * dj).normalize()?));
                    }
                }
                terms = next;
            }
            for (tuple, value) in terms {
                out.add_signed(&tuple, value);
            }
        }
        Ok(out)
    }

    /// Jacobian matrix `∂φ^j / ∂x_i`, rows indexed by target components.
    pub fn jacobian(&self) -> Result<Vec<Vec<Expr>>> {
        self.comps
            .iter()
            .map(|c| {
                (0..self.source.dim())
                    .map(|i| c.differentiate(self.source.vars()[i].as_str()))
                    .collect::<Result<Vec<_>>>()
            })
            .collect()
    }

    /// Pushforward of a source vector field along the map, expressed in the
    /// target frame with source-variable coefficients ("vector along map").
    pub fn push_along(&self, z: &VectorField) -> Result<Vec<Expr>> {
        self.source.expect_same(z.chart())?;
        let jac = self.jacobian()?;
        jac.iter()
            .map(|row| {
                let mut acc = Expr::zero();
                for (i, e) in row.iter().enumerate() {
                    acc = &acc + &(e * z.component(i));
                }
                acc.normalize()
            })
            .collect()
    }

    /// Target vector field precomposed with the map, as a vector along it.
    pub fn vf_along(&self, z: &VectorField) -> Result<Vec<Expr>> {
        self.target.expect_same(z.chart())?;
        z.components()
            .iter()
            .map(|c| self.substitute_into(c))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart2() -> Chart {
        Chart::new("m", &["x", "y"]).unwrap()
    }
    fn chart3() -> Chart {
        Chart::new("m", &["x", "y", "z"]).unwrap()
    }
    fn x() -> Expr {
        Expr::var("x")
    }
    fn y() -> Expr {
        Expr::var("y")
    }

    fn vf(chart: &Chart, comps: &[Expr]) -> VectorField {
        VectorField::new(chart.clone(), comps.to_vec()).unwrap()
    }

    #[test]
    fn lie_bracket_examples() {
        let c = chart2();
        let dx = VectorField::coordinate(c.clone(), 0);
        let dy = VectorField::coordinate(c.clone(), 1);
        assert!(lie_bracket(&dx, &dy).unwrap().is_zero());
        // [x∂x, ∂x] = −∂x
        let xdx = vf(&c, &[x(), Expr::zero()]);
        assert_eq!(lie_bracket(&xdx, &dx).unwrap(), dx.neg());
        // [r∂r, r^{-1}∂x] = −r^{-1}∂x on chart (x, r)
        let cr = Chart::new("mr", &["x", "r"]).unwrap();
        let r = Expr::var("r");
        let euler = vf(&cr, &[Expr::zero(), r.clone()]);
        let field = vf(&cr, &[r.pow(-1), Expr::zero()]);
        assert_eq!(lie_bracket(&euler, &field).unwrap(), field.neg());
    }

    #[test]
    fn ext_d_examples() {
        let c = chart3();
        // d(x dy) = dx ∧ dy
        let mut omega = Form::zero(c.clone(), 1).unwrap();
        omega.set(&[1], x()).unwrap();
        let d = ext_d(&omega).unwrap();
        assert_eq!(d.component(&[0, 1]), Expr::one());
        assert_eq!(d.components().count(), 1);
        // d(dz − y dx) = dx ∧ dy
        let mut theta = Form::zero(c.clone(), 1).unwrap();
        theta.set(&[2], Expr::one()).unwrap();
        theta.set(&[0], -&y()).unwrap();
        let d = ext_d(&theta).unwrap();
        assert_eq!(d.component(&[0, 1]), Expr::one());
        assert_eq!(d.components().count(), 1);
        // d(d f) = 0 for f = x²y + sin(x)
        let f = &(&x().pow(2) * &y()) + &x().sin();
        let df = Form::d_of(c.clone(), &f).unwrap();
        assert!(ext_d(&df).unwrap().is_zero());
    }

    #[test]
    fn interior_examples() {
        let c = chart2();
        // i_∂x (dx∧dy) = dy
        let mut omega = Form::zero(c.clone(), 2).unwrap();
        omega.set(&[0, 1], Expr::one()).unwrap();
        let dx = VectorField::coordinate(c.clone(), 0);
        let res = interior(&dx, &omega).unwrap();
        assert_eq!(res.component(&[1]), Expr::one());
        assert_eq!(res.components().count(), 1);
        // i_{r∂r}(dr∧dz) = r dz on chart (z, r)
        let cr = Chart::new("mr", &["z", "r"]).unwrap();
        let mut drdz = Form::zero(cr.clone(), 2).unwrap();
        // dr∧dz = −dz∧dr: component (z, r) is −1
        drdz.set(&[0, 1], Expr::int(-1)).unwrap();
        let euler = vf(&cr, &[Expr::zero(), Expr::var("r")]);
        let res = interior(&euler, &drdz).unwrap();
        assert_eq!(res.component(&[0]), Expr::var("r"));
        // i_dx (∂x∧∂y) = ∂y — the sharp sign convention oracle
        let mut p = Multivector::zero(c.clone(), 2).unwrap();
        p.set(&[0, 1], Expr::one()).unwrap();
        let dxf = Form::coordinate(c.clone(), 0).unwrap();
        let res = interior_form(&dxf, &p).unwrap();
        assert_eq!(res.component(&[1]), Expr::one());
        assert_eq!(res.components().count(), 1);
    }

    #[test]
    fn lie_derivative_examples() {
        // ℒ_{r∂r}(r dx) = r dx on chart (x, r)
        let cr = Chart::new("mr", &["x", "r"]).unwrap();
        let r = Expr::var("r");
        let euler = vf(&cr, &[Expr::zero(), r.clone()]);
        let mut rdx = Form::zero(cr.clone(), 1).unwrap();
        rdx.set(&[0], r.clone()).unwrap();
        assert_eq!(lie_derivative_form(&euler, &rdx).unwrap(), rdx);
        // ℒ_{r∂r}(r^{-1} ∂x∧∂y) = −r^{-1} ∂x∧∂y on chart (x, y, r)
        let c = Chart::new("mr", &["x", "y", "r"]).unwrap();
        let euler = vf(&c, &[Expr::zero(), Expr::zero(), Expr::var("r")]);
        let mut p = Multivector::zero(c.clone(), 2).unwrap();
        p.set(&[0, 1], Expr::var("r").pow(-1)).unwrap();
        assert_eq!(lie_derivative_multivector(&euler, &p).unwrap(), p.neg());
        // ℒ_X(𝟙) = 0
        let n = Tensor11::identity(c.clone());
        let xf = vf(
            &c,
            &[
                (&x() * &y()).normalize().unwrap(),
                Expr::var("r"),
                x().pow(2),
            ],
        );
        assert!(lie_derivative_tensor11(&xf, &n).unwrap().is_zero());
    }

    #[test]
    fn schouten_constant_bivector() {
        let c = chart2();
        let mut p = Multivector::zero(c.clone(), 2).unwrap();
        p.set(&[0, 1], Expr::one()).unwrap();
        assert!(schouten(&p, &p).unwrap().is_zero());
    }

    #[test]
    fn schouten_so3_is_poisson() {
        let c = chart3();
        // π = z ∂x∧∂y + x ∂y∧∂z + y ∂z∧∂x
        let mut p = Multivector::zero(c.clone(), 2).unwrap();
        p.set(&[0, 1], Expr::var("z")).unwrap();
        p.set(&[1, 2], Expr::var("x")).unwrap();
        p.set(&[0, 2], -&Expr::var("y")).unwrap();
        assert!(schouten(&p, &p).unwrap().is_zero());
    }

    #[test]
    fn schouten_failing_bivector() {
        let c = chart3();
        // π = x ∂x∧∂y + ∂x∧∂z is not Poisson.
        let mut p = Multivector::zero(c.clone(), 2).unwrap();
        p.set(&[0, 1], x()).unwrap();
        p.set(&[0, 2], Expr::one()).unwrap();
        assert!(!schouten(&p, &p).unwrap().is_zero());
    }

    #[test]
    fn schouten_euler_weight() {
        // [Z, π̃] = −π̃ for π̃ = r^{-1}∂x∧∂y, Z = r∂r.
        let c = Chart::new("mr", &["x", "y", "r"]).unwrap();
        let z = vf(&c, &[Expr::zero(), Expr::zero(), Expr::var("r")]);
        let mut p = Multivector::zero(c.clone(), 2).unwrap();
        p.set(&[0, 1], Expr::var("r").pow(-1)).unwrap();
        let b = schouten(&z.to_multivector(), &p).unwrap();
        assert_eq!(b, p.neg());
    }

    #[test]
    fn schouten_with_functions_is_first_slot_insertion() {
        // [P, f] = i_df P, fixed by the bracket's composition order.
        let c = chart2();
        let mut p = Multivector::zero(c.clone(), 2).unwrap();
        p.set(&[0, 1], Expr::one()).unwrap();
        let f = Multivector::from_function(c.clone(), &x()).unwrap();
        let b = schouten(&p, &f).unwrap();
        // i_dx(∂x∧∂y) = ∂y
        assert_eq!(b.component(&[1]), Expr::one());
        assert_eq!(b.components().count(), 1);
    }

    #[test]
    fn schouten_gerstenhaber_sign() {
        // [z ∂x∧∂y, ∂z∧∂w] = +∂x∧∂y∧∂w in this convention.
        let c = Chart::new("m4", &["x", "y", "z", "w"]).unwrap();
        let mut p = Multivector::zero(c.clone(), 2).unwrap();
        p.set(&[0, 1], Expr::var("z")).unwrap();
        let mut q = Multivector::zero(c.clone(), 2).unwrap();
        q.set(&[2, 3], Expr::one()).unwrap();
        let b = schouten(&p, &q).unwrap();
        assert_eq!(b.component(&[0, 1, 3]), Expr::one());
        assert_eq!(b.components().count(), 1);
    }

    #[test]
    fn torsion_examples() {
        let c = chart2();
        // Constant matrix: zero torsion.
        let n = Tensor11::new(
            c.clone(),
            vec![
                vec![Expr::int(2), Expr::int(1)],
                vec![Expr::zero(), Expr::int(3)],
            ],
        )
        .unwrap();
        assert!(nijenhuis_torsion(&n).unwrap().is_zero());
        // Standard complex structure on ℝ⁴.
        let c4 = Chart::new("m4", &["x1", "y1", "x2", "y2"]).unwrap();
        let j = crate::gallery::standard_j(&c4).unwrap();
        assert!(nijenhuis_torsion(&j).unwrap().is_zero());
        // Direct-formula oracle on (∂x, ∂y); on N = [[0, x],[0, 0]] the
        // expansion cancels to zero, and a second dependent-entry example
        // has honest nonzero torsion.
        for (matrix, expect_zero) in [
            (
                vec![vec![Expr::zero(), x()], vec![Expr::zero(), Expr::zero()]],
                true,
            ),
            (vec![vec![Expr::zero(), x()], vec![Expr::zero(), x()]], false),
        ] {
            let n = Tensor11::new(c.clone(), matrix).unwrap();
            let t = nijenhuis_torsion(&n).unwrap();
            let dx = VectorField::coordinate(c.clone(), 0);
            let dy = VectorField::coordinate(c.clone(), 1);
            let ndx = n.apply(&dx).unwrap();
            let ndy = n.apply(&dy).unwrap();
            let expected = lie_bracket(&ndx, &ndy)
                .unwrap()
                .sub(&n.apply(&lie_bracket(&ndx, &dy).unwrap()).unwrap())
                .unwrap()
                .sub(&n.apply(&lie_bracket(&dx, &ndy).unwrap()).unwrap())
                .unwrap()
                .add(
                    &n.apply(&n.apply(&lie_bracket(&dx, &dy).unwrap()).unwrap())
                        .unwrap(),
                )
                .unwrap();
            assert_eq!(expected.is_zero(), expect_zero);
            assert_eq!(t.value(0, 1), expected);
        }
    }

    #[test]
    fn fn_bracket_is_twice_torsion() {
        let c = chart2();
        let n = Tensor11::new(
            c.clone(),
            vec![
                vec![x(), (&x() * &y()).normalize().unwrap()],
                vec![y(), x().pow(2)],
            ],
        )
        .unwrap();
        let double = fn_bracket(&n, &n).unwrap();
        let twice = nijenhuis_torsion(&n).unwrap().scale(&Expr::int(2)).unwrap();
        assert_eq!(double, twice);
    }

    #[test]
    fn pullback_examples() {
        let c = chart2();
        let id = SmoothMap::identity(c.clone());
        let mut omega = Form::zero(c.clone(), 2).unwrap();
        omega.set(&[0, 1], x()).unwrap();
        assert_eq!(id.pullback(&omega).unwrap(), omega);
        // Fiberwise addition pulls Σ p dx back to Σ (p+q) dx.
        let g = Chart::new("g", &["x", "p"]).unwrap();
        let w = Chart::new("w", &["x", "p", "q"]).unwrap();
        let mul = SmoothMap::new(
            w.clone(),
            g.clone(),
            vec![Expr::var("x"), &Expr::var("p") + &Expr::var("q")],
        )
        .unwrap();
        let mut canon = Form::zero(g.clone(), 1).unwrap();
        canon.set(&[0], Expr::var("p")).unwrap();
        let pulled = mul.pullback(&canon).unwrap();
        assert_eq!(
            pulled.component(&[0]),
            (&Expr::var("p") + &Expr::var("q")).normalize().unwrap()
        );
    }

    #[test]
    fn contract11_examples() {
        let c = chart2();
        let mut omega = Form::zero(c.clone(), 2).unwrap();
        omega.set(&[0, 1], Expr::one()).unwrap();
        let id = Tensor11::identity(c.clone());
        assert_eq!(contract11_form(&id, &omega, 0).unwrap(), omega);
        // π_N for π = ¼(∂x₁∧∂x₂ − ∂y₁∧∂y₂), N = standard j on ℝ⁴
        //   gives ¼(∂y₁∧∂x₂ + ∂x₁∧∂y₂)
        let c4 = Chart::new("m4", &["x1", "y1", "x2", "y2"]).unwrap();
        let j = crate::gallery::standard_j(&c4).unwrap();
        let mut pi = Multivector::zero(c4.clone(), 2).unwrap();
        pi.set(&[0, 2], Expr::rat(1, 4)).unwrap();
        pi.set(&[1, 3], Expr::rat(-1, 4)).unwrap();
        let pin = contract11_multivector(&j, &pi, 0).unwrap();
        assert_eq!(pin.component(&[1, 2]), Expr::rat(1, 4));
        assert_eq!(pin.component(&[0, 3]), Expr::rat(1, 4));
        assert_eq!(pin.components().count(), 2);
        assert!(multivector_insertion_skew_defect(&j, &pi)
            .unwrap()
            .is_empty());
        // N² for standard j is −identity.
        let j2 = j.compose(&j).unwrap();
        let plus_one = Tensor11::identity(c4.clone());
        assert!(j2.add(&plus_one).unwrap().is_zero());
    }

    #[test]
    fn sharp_convention() {
        let c = chart2();
        let mut pi = Multivector::zero(c.clone(), 2).unwrap();
        pi.set(&[0, 1], Expr::one()).unwrap();
        let dx = Form::coordinate(c.clone(), 0).unwrap();
        let dy = Form::coordinate(c.clone(), 1).unwrap();
        assert_eq!(
            sharp(&pi, &dx).unwrap(),
            VectorField::coordinate(c.clone(), 1)
        );
        assert_eq!(
            sharp(&pi, &dy).unwrap(),
            VectorField::coordinate(c.clone(), 0).neg()
        );
    }
}
