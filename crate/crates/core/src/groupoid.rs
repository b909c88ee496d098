//! Explicit chart groupoids: the pair groupoid, fiberwise addition of a
//! vector bundle, and the trivial scaling extension, together with axiom
//! checks, multiplicativity verdicts for functions, forms and vector
//! fields, and differentiation of multiplicative forms into Spencer data.
//!
//! Composable loci are supplied by the constructors as explicit chart
//! parametrizations, along with the embeddings needed for the unit and
//! inverse laws; nothing is ever solved from equations.

use crate::algebroid::{AlgebroidSpec, SpencerData};
use crate::error::Error;
use crate::expr::{Chart, Expr};
use crate::report::StructureReport;
use crate::tensor::{interior, lie_derivative_form, Form, SmoothMap, VectorField};
use crate::Result;

/// Composable-pair data: a chart for the locus and the three canonical maps
/// into the arrow chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ComposablePairs {
    pub chart: Chart,
    pub p1: SmoothMap,
    pub p2: SmoothMap,
    pub mul: SmoothMap,
}

/// Triple-composable data for the associativity check.
#[derive(Debug, Clone, PartialEq)]
pub struct ComposableTriples {
    pub chart: Chart,
    /// `(g, h, k) ↦ (g·h, k)`.
    pub left: SmoothMap,
    /// `(g, h, k) ↦ (g, h·k)`.
    pub right: SmoothMap,
}

/// A Lie groupoid presented on explicit charts.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartGroupoid {
    pub name: String,
    pub arrows: Chart,
    pub objects: Chart,
    pub source: SmoothMap,
    pub target: SmoothMap,
    pub unit: SmoothMap,
    pub inverse: SmoothMap,
    pub pairs: ComposablePairs,
    pub triples: Option<ComposableTriples>,
    /// `g ↦ (1_{t(g)}, g)` in the composable chart.
    pub unit_left: SmoothMap,
    /// `g ↦ (g, 1_{s(g)})`.
    pub unit_right: SmoothMap,
    /// `g ↦ (g, g^{−1})`.
    pub inverse_pair: SmoothMap,
    /// Right-invariant vector field on the arrows per algebroid frame
    /// section, when the constructor provides the algebroid.
    pub right_invariant: Option<Vec<VectorField>>,
    pub algebroid: Option<AlgebroidSpec>,
    /// Euler data `(Z on arrows, lift on composable pairs)` for scaling
    /// extensions.
    pub euler: Option<(VectorField, VectorField)>,
}

fn suffixed(chart: &Chart, suffix: &str) -> Vec<String> {
    chart.vars().iter().map(|v| format!("{v}{suffix}")).collect()
}

fn vars_of(names: &[String]) -> Vec<&str> {
    names.iter().map(|s| s.as_str()).collect()
}

fn coords(names: &[String]) -> Vec<Expr> {
    names.iter().map(|v| Expr::var(v)).collect()
}

/// The pair groupoid of a chart: arrows are ordered pairs, the target is
/// the first block and the source the second.
pub fn pair_groupoid(base: &Chart) -> Result<ChartGroupoid> {
    let b1 = suffixed(base, "1");
    let b2 = suffixed(base, "2");
    let b3 = suffixed(base, "3");
    let b4 = suffixed(base, "4");
    let g = Chart::new(
        &format!("{}_pair", base.name()),
        &vars_of(&[b1.clone(), b2.clone()].concat()),
    )?;
    let w = Chart::new(
        &format!("{}_pair2", base.name()),
        &vars_of(&[b1.clone(), b2.clone(), b3.clone()].concat()),
    )?;
    let w3 = Chart::new(
        &format!("{}_pair3", base.name()),
        &vars_of(&[b1.clone(), b2.clone(), b3.clone(), b4.clone()].concat()),
    )?;
    let m = base.clone();

    let block = |names: &[Vec<String>]| -> Vec<Expr> {
        names.iter().flat_map(|ns| coords(ns)).collect()
    };
    let source = SmoothMap::new(g.clone(), m.clone(), coords(&b2))?;
    let target = SmoothMap::new(g.clone(), m.clone(), coords(&b1))?;
    // The unit doubles the base block; base variables name the first copy
    // after substitution of x ↦ x.
    let unit = SmoothMap::new(
        m.clone(),
        g.clone(),
        [coords_of_chart(&m), coords_of_chart(&m)].concat(),
    )?;
    let inverse = SmoothMap::new(g.clone(), g.clone(), block(&[b2.clone(), b1.clone()]))?;
    let pairs = ComposablePairs {
        chart: w.clone(),
        p1: SmoothMap::new(w.clone(), g.clone(), block(&[b1.clone(), b2.clone()]))?,
        p2: SmoothMap::new(w.clone(), g.clone(), block(&[b2.clone(), b3.clone()]))?,
        mul: SmoothMap::new(w.clone(), g.clone(), block(&[b1.clone(), b3.clone()]))?,
    };
    let triples = Some(ComposableTriples {
        chart: w3.clone(),
        left: SmoothMap::new(w3.clone(), w.clone(), block(&[b1.clone(), b3.clone(), b4.clone()]))?,
        right: SmoothMap::new(w3, w.clone(), block(&[b1.clone(), b2.clone(), b4]))?,
    });
    let unit_left = SmoothMap::new(g.clone(), w.clone(), block(&[b1.clone(), b1.clone(), b2.clone()]))?;
    let unit_right = SmoothMap::new(g.clone(), w.clone(), block(&[b1.clone(), b2.clone(), b2.clone()]))?;
    let inverse_pair = SmoothMap::new(g.clone(), w, block(&[b1.clone(), b2, b1.clone()]))?;

    // Tangent algebroid: identity anchor, zero structure functions.
    let n = base.dim();
    let mut anchor = vec![vec![Expr::zero(); n]; n];
    for (i, row) in anchor.iter_mut().enumerate() {
        row[i] = Expr::one();
    }
    let algebroid = AlgebroidSpec::new(
        base.clone(),
        n,
        anchor,
        std::collections::BTreeMap::new(),
        None,
    )?;
    // Right-invariant extension of a frame field: components in the target
    // block, zero in the source block.
    let mut right_invariant = Vec::with_capacity(n);
    for i in 0..n {
        let mut comps = vec![Expr::zero(); 2 * n];
        comps[i] = Expr::one();
        right_invariant.push(VectorField::new(g.clone(), comps)?);
    }

    Ok(ChartGroupoid {
        name: format!("pair({})", base.name()),
        arrows: g,
        objects: m,
        source,
        target,
        unit,
        inverse,
        pairs,
        triples,
        unit_left,
        unit_right,
        inverse_pair,
        right_invariant: Some(right_invariant),
        algebroid: Some(algebroid),
        euler: None,
    })
}

fn coords_of_chart(chart: &Chart) -> Vec<Expr> {
    (0..chart.dim()).map(|i| chart.coord(i)).collect()
}

/// Fiberwise addition on a trivial rank-`k` bundle: arrows `(x, p)` with
/// `s = t = x` and multiplication adding the fiber coordinates.
pub fn vb_addition_groupoid(base: &Chart, fiber_rank: usize) -> Result<ChartGroupoid> {
    if fiber_rank == 0 {
        return Err(Error::ShapeMismatch("fiber rank must be positive".into()));
    }
    let p: Vec<String> = (1..=fiber_rank).map(|i| format!("p{i}")).collect();
    let q: Vec<String> = (1..=fiber_rank).map(|i| format!("q{i}")).collect();
    let u: Vec<String> = (1..=fiber_rank).map(|i| format!("u{i}")).collect();
    let base_names: Vec<String> = base.vars().to_vec();
    for extra in p.iter().chain(&q).chain(&u) {
        if base_names.contains(extra) {
            return Err(Error::ReservedVariable(extra.clone()));
        }
    }
    let g = Chart::new(
        &format!("{}_vb", base.name()),
        &vars_of(&[base_names.clone(), p.clone()].concat()),
    )?;
    let w = Chart::new(
        &format!("{}_vb2", base.name()),
        &vars_of(&[base_names.clone(), p.clone(), q.clone()].concat()),
    )?;
    let w3 = Chart::new(
        &format!("{}_vb3", base.name()),
        &vars_of(&[base_names.clone(), p.clone(), q.clone(), u.clone()].concat()),
    )?;
    let m = base.clone();

    let base_coords = coords(&base_names);
    let zeros = vec![Expr::zero(); fiber_rank];
    let sum = |a: &[String], b: &[String]| -> Vec<Expr> {
        a.iter()
            .zip(b)
            .map(|(x, y)| &Expr::var(x) + &Expr::var(y))
            .collect()
    };
    let negs = |a: &[String]| -> Vec<Expr> { a.iter().map(|x| -&Expr::var(x)).collect() };

    let source = SmoothMap::new(g.clone(), m.clone(), base_coords.clone())?;
    let target = source.clone();
    let unit = SmoothMap::new(
        m.clone(),
        g.clone(),
        [base_coords.clone(), zeros.clone()].concat(),
    )?;
    let inverse = SmoothMap::new(
        g.clone(),
        g.clone(),
        [base_coords.clone(), negs(&p)].concat(),
    )?;
    let pairs = ComposablePairs {
        chart: w.clone(),
        p1: SmoothMap::new(
            w.clone(),
            g.clone(),
            [base_coords.clone(), coords(&p)].concat(),
        )?,
        p2: SmoothMap::new(
            w.clone(),
            g.clone(),
            [base_coords.clone(), coords(&q)].concat(),
        )?,
        mul: SmoothMap::new(
            w.clone(),
            g.clone(),
            [base_coords.clone(), sum(&p, &q)].concat(),
        )?,
    };
    let triples = Some(ComposableTriples {
        chart: w3.clone(),
        left: SmoothMap::new(
            w3.clone(),
            w.clone(),
            [base_coords.clone(), sum(&p, &q), coords(&u)].concat(),
        )?,
        right: SmoothMap::new(
            w3,
            w.clone(),
            [base_coords.clone(), coords(&p), sum(&q, &u)].concat(),
        )?,
    });
    let unit_left = SmoothMap::new(
        g.clone(),
        w.clone(),
        [base_coords.clone(), zeros.clone(), coords(&p)].concat(),
    )?;
    let unit_right = SmoothMap::new(
        g.clone(),
        w.clone(),
        [base_coords.clone(), coords(&p), zeros.clone()].concat(),
    )?;
    let inverse_pair = SmoothMap::new(
        g.clone(),
        w,
        [base_coords.clone(), coords(&p), negs(&p)].concat(),
    )?;

    let algebroid = AlgebroidSpec::abelian(base.clone(), fiber_rank)?;
    let n = base.dim();
    let mut right_invariant = Vec::with_capacity(fiber_rank);
    for a in 0..fiber_rank {
        let mut comps = vec![Expr::zero(); n + fiber_rank];
        comps[n + a] = Expr::one();
        right_invariant.push(VectorField::new(g.clone(), comps)?);
    }

    Ok(ChartGroupoid {
        name: format!("vb_addition({}, {fiber_rank})", base.name()),
        arrows: g,
        objects: m,
        source,
        target,
        unit,
        inverse,
        pairs,
        triples,
        unit_left,
        unit_right,
        inverse_pair,
        right_invariant: Some(right_invariant),
        algebroid: Some(algebroid),
        euler: None,
    })
}

fn extend_chart(chart: &Chart, r: &str) -> Result<Chart> {
    if chart.vars().iter().any(|v| v == r) {
        return Err(Error::ReservedVariable(r.to_string()));
    }
    let mut names: Vec<&str> = chart.vars().iter().map(|s| s.as_str()).collect();
    names.push(r);
    Chart::new(&format!("{}x", chart.name()), &names)
}

fn extend_map(map: &SmoothMap, source: &Chart, target: &Chart, r: &str) -> Result<SmoothMap> {
    let mut comps = map.components().to_vec();
    comps.push(Expr::var(r));
    SmoothMap::new(source.clone(), target.clone(), comps)
}

fn extend_field(v: &VectorField, chart: &Chart) -> Result<VectorField> {
    let mut comps = v.components().to_vec();
    comps.push(Expr::zero());
    VectorField::new(chart.clone(), comps)
}

/// Trivial scaling extension: appends the invertible variable `r` to every
/// chart, extends all structure maps `r`-equivariantly (the first factor
/// carries `r` through the multiplication), and records the Euler field.
pub fn scaling_extension(inner: &ChartGroupoid) -> Result<ChartGroupoid> {
    let r = "r";
    let g = extend_chart(&inner.arrows, r)?;
    let m = extend_chart(&inner.objects, r)?;
    let w = extend_chart(&inner.pairs.chart, r)?;

    let pairs = ComposablePairs {
        chart: w.clone(),
        p1: extend_map(&inner.pairs.p1, &w, &g, r)?,
        p2: extend_map(&inner.pairs.p2, &w, &g, r)?,
        mul: extend_map(&inner.pairs.mul, &w, &g, r)?,
    };
    let triples = match &inner.triples {
        Some(t) => {
            let w3 = extend_chart(&t.chart, r)?;
            Some(ComposableTriples {
                chart: w3.clone(),
                left: extend_map(&t.left, &w3, &w, r)?,
                right: extend_map(&t.right, &w3, &w, r)?,
            })
        }
        None => None,
    };

    let algebroid = match &inner.algebroid {
        Some(spec) => {
            let base = extend_chart(spec.base(), r)?;
            let rank = spec.rank();
            let mut anchor = Vec::with_capacity(base.dim());
            for row in spec.anchor_matrix() {
                anchor.push(row.clone());
            }
            anchor.push(vec![Expr::zero(); rank]);
            let mut upper = std::collections::BTreeMap::new();
            for a in 0..rank {
                for b in (a + 1)..rank {
                    upper.insert((a, b), spec.structure_coeffs(a, b).to_vec());
                }
            }
            Some(AlgebroidSpec::new(
                base,
                rank,
                anchor,
                upper,
                spec.rep().map(|p| p.to_vec()),
            )?)
        }
        None => None,
    };
    let right_invariant = match &inner.right_invariant {
        Some(fields) => Some(
            fields
                .iter()
                .map(|f| extend_field(f, &g))
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };

    let mut euler_g = vec![Expr::zero(); g.dim()];
    euler_g[g.dim() - 1] = Expr::var(r);
    let mut euler_w = vec![Expr::zero(); w.dim()];
    euler_w[w.dim() - 1] = Expr::var(r);

    Ok(ChartGroupoid {
        name: format!("scaling({})", inner.name),
        arrows: g.clone(),
        objects: m.clone(),
        source: extend_map(&inner.source, &g, &m, r)?,
        target: extend_map(&inner.target, &g, &m, r)?,
        unit: extend_map(&inner.unit, &m, &g, r)?,
        inverse: extend_map(&inner.inverse, &g, &g, r)?,
        pairs,
        triples,
        unit_left: extend_map(&inner.unit_left, &g, &w, r)?,
        unit_right: extend_map(&inner.unit_right, &g, &w, r)?,
        inverse_pair: extend_map(&inner.inverse_pair, &g, &w, r)?,
        right_invariant,
        algebroid,
        euler: Some((
            VectorField::new(g, euler_g)?,
            VectorField::new(w, euler_w)?,
        )),
    })
}

fn map_residuals(lhs: &SmoothMap, rhs: &SmoothMap) -> Result<Vec<Expr>> {
    lhs.source().expect_same(rhs.source())?;
    lhs.target().expect_same(rhs.target())?;
    lhs.components()
        .iter()
        .zip(rhs.components())
        .map(|(a, b)| (a - b).normalize())
        .collect()
}

/// Exact residuals for every groupoid axiom expressible on the supplied
/// charts.
pub fn groupoid_axioms(gpd: &ChartGroupoid, seed: u64) -> Result<StructureReport> {
    let mut report = StructureReport::new("groupoid_axioms", seed);
    let id_g = SmoothMap::identity(gpd.arrows.clone());
    let id_m = SmoothMap::identity(gpd.objects.clone());

    report.check_residuals(
        "composable-locus",
        "groupoid.locus",
        map_residuals(
            &gpd.source.compose(&gpd.pairs.p1)?,
            &gpd.target.compose(&gpd.pairs.p2)?,
        )?
        .iter(),
    );
    report.check_residuals(
        "unit-section",
        "groupoid.unit-section",
        [
            map_residuals(&gpd.source.compose(&gpd.unit)?, &id_m)?,
            map_residuals(&gpd.target.compose(&gpd.unit)?, &id_m)?,
        ]
        .concat()
        .iter(),
    );
    report.check_residuals(
        "mul-source-target",
        "groupoid.mul-st",
        [
            map_residuals(
                &gpd.source.compose(&gpd.pairs.mul)?,
                &gpd.source.compose(&gpd.pairs.p2)?,
            )?,
            map_residuals(
                &gpd.target.compose(&gpd.pairs.mul)?,
                &gpd.target.compose(&gpd.pairs.p1)?,
            )?,
        ]
        .concat()
        .iter(),
    );
    report.check_residuals(
        "unit-laws",
        "groupoid.units",
        [
            map_residuals(&gpd.pairs.mul.compose(&gpd.unit_left)?, &id_g)?,
            map_residuals(&gpd.pairs.mul.compose(&gpd.unit_right)?, &id_g)?,
        ]
        .concat()
        .iter(),
    );
    report.check_residuals(
        "inversion",
        "groupoid.inverse",
        [
            map_residuals(&gpd.inverse.compose(&gpd.inverse)?, &id_g)?,
            map_residuals(&gpd.source.compose(&gpd.inverse)?, &gpd.target)?,
            map_residuals(&gpd.target.compose(&gpd.inverse)?, &gpd.source)?,
            map_residuals(
                &gpd.pairs.mul.compose(&gpd.inverse_pair)?,
                &gpd.unit.compose(&gpd.target)?,
            )?,
        ]
        .concat()
        .iter(),
    );
    if let Some(t) = &gpd.triples {
        report.check_residuals(
            "associativity",
            "groupoid.assoc",
            map_residuals(
                &gpd.pairs.mul.compose(&t.left)?,
                &gpd.pairs.mul.compose(&t.right)?,
            )?
            .iter(),
        );
    }
    Ok(report)
}

/// Multiplicative function check: `f∘mul − f∘p1 − f∘p2 = 0` on the
/// composable chart.
pub fn is_multiplicative_function(
    gpd: &ChartGroupoid,
    f: &Expr,
    seed: u64,
) -> Result<StructureReport> {
    let mut report = StructureReport::new("multiplicative_function", seed);
    let resid = (&(&gpd.pairs.mul.pullback_fn(f)? - &gpd.pairs.p1.pullback_fn(f)?)
        - &gpd.pairs.p2.pullback_fn(f)?)
        .normalize()?;
    report.check_residual("cocycle", "mult.function", &resid);
    Ok(report)
}

/// Multiplicative form check: `mul^∗ω − p1^∗ω − p2^∗ω = 0`.
pub fn is_multiplicative_form(
    gpd: &ChartGroupoid,
    omega: &Form,
    seed: u64,
) -> Result<StructureReport> {
    let mut report = StructureReport::new("multiplicative_form", seed);
    let resid = gpd
        .pairs
        .mul
        .pullback(omega)?
        .sub(&gpd.pairs.p1.pullback(omega)?)?
        .sub(&gpd.pairs.p2.pullback(omega)?)?;
    report.check_residuals(
        "cocycle",
        "mult.form",
        resid.components().map(|(_, c)| c).collect::<Vec<_>>(),
    );
    Ok(report)
}

/// Multiplicative vector field check. The caller supplies the lift on the
/// composable chart; its compatibility with both projections is verified
/// first, then the multiplication relation `dmul(Z_W) = Z∘mul`. A lift
/// mismatch is reported as a failing axiom rather than an error.
pub fn is_multiplicative_vf(
    gpd: &ChartGroupoid,
    z: &VectorField,
    z_lift: &VectorField,
    seed: u64,
) -> Result<StructureReport> {
    gpd.arrows.expect_same(z.chart())?;
    gpd.pairs.chart.expect_same(z_lift.chart())?;
    let mut report = StructureReport::new("multiplicative_vector_field", seed);
    for (name, map) in [("lift-p1", &gpd.pairs.p1), ("lift-p2", &gpd.pairs.p2)] {
        let push = map.push_along(z_lift)?;
        let along = map.vf_along(z)?;
        let residuals: Vec<Expr> = push
            .iter()
            .zip(&along)
            .map(|(a, b)| (a - b).normalize())
            .collect::<Result<Vec<_>>>()?;
        report.check_residuals(name, "mult.vf-lift", residuals.iter());
    }
    let push = gpd.pairs.mul.push_along(z_lift)?;
    let along = gpd.pairs.mul.vf_along(z)?;
    let residuals: Vec<Expr> = push
        .iter()
        .zip(&along)
        .map(|(a, b)| (a - b).normalize())
        .collect::<Result<Vec<_>>>()?;
    report.check_residuals("multiplication", "mult.vf", residuals.iter());
    Ok(report)
}

/// Differentiation of a multiplicative form into Spencer data:
/// `𝒟(e_a) = 1^∗(ℒ_{→e_a} ω)` and `ℓ(e_a) = 1^∗(i_{→e_a} ω)`.
pub fn spencer_of_form(gpd: &ChartGroupoid, omega: &Form) -> Result<SpencerData> {
    let fields = gpd
        .right_invariant
        .as_ref()
        .ok_or_else(|| Error::MissingRightInvariantRule(gpd.name.clone()))?;
    gpd.arrows.expect_same(omega.chart())?;
    let mut d_values = Vec::with_capacity(fields.len());
    let mut l_values = Vec::with_capacity(fields.len());
    for f in fields {
        d_values.push(gpd.unit.pullback(&lie_derivative_form(f, omega)?)?);
        l_values.push(gpd.unit.pullback(&interior(f, omega)?)?);
    }
    SpencerData::new(d_values, l_values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::verify_spencer;

    fn r2() -> Chart {
        Chart::new("m", &["u", "v"]).unwrap()
    }

    /// `t^∗ω − s^∗ω` for the area form on the pair groupoid of ℝ².
    fn pair_symplectic(gpd: &ChartGroupoid) -> Form {
        let mut omega = Form::zero(gpd.arrows.clone(), 2).unwrap();
        omega.set(&[0, 1], Expr::one()).unwrap();
        omega.set(&[2, 3], Expr::int(-1)).unwrap();
        omega
    }

    #[test]
    fn pair_groupoid_axioms() {
        let gpd = pair_groupoid(&r2()).unwrap();
        let report = groupoid_axioms(&gpd, 42).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn vb_addition_axioms() {
        let base = Chart::new("m", &["x"]).unwrap();
        let gpd = vb_addition_groupoid(&base, 1).unwrap();
        assert!(groupoid_axioms(&gpd, 42).unwrap().passed());
    }

    #[test]
    fn scaling_extension_axioms() {
        let base = Chart::new("m", &["x"]).unwrap();
        let gpd = scaling_extension(&pair_groupoid(&base).unwrap()).unwrap();
        assert!(groupoid_axioms(&gpd, 42).unwrap().passed());
    }

    #[test]
    fn difference_form_is_multiplicative() {
        let gpd = pair_groupoid(&r2()).unwrap();
        let omega = pair_symplectic(&gpd);
        assert!(is_multiplicative_form(&gpd, &omega, 42).unwrap().passed());
        // The sum form fails with a residual of twice the middle term.
        let mut bad = Form::zero(gpd.arrows.clone(), 2).unwrap();
        bad.set(&[0, 1], Expr::one()).unwrap();
        bad.set(&[2, 3], Expr::one()).unwrap();
        let report = is_multiplicative_form(&gpd, &bad, 42).unwrap();
        assert!(!report.passed());
        // d of a multiplicative form stays multiplicative.
        let d = crate::tensor::ext_d(&omega).unwrap();
        assert!(is_multiplicative_form(&gpd, &d, 42).unwrap().passed());
    }

    #[test]
    fn canonical_form_is_multiplicative() {
        let base = Chart::new("m", &["x"]).unwrap();
        let gpd = vb_addition_groupoid(&base, 1).unwrap();
        // ω = dp ∧ dx
        let mut omega = Form::zero(gpd.arrows.clone(), 2).unwrap();
        omega.set(&[0, 1], Expr::int(-1)).unwrap();
        assert!(is_multiplicative_form(&gpd, &omega, 42).unwrap().passed());
        // Units are Lagrangian: the unit pullback vanishes.
        let pulled = gpd.unit.pullback(&omega).unwrap();
        assert!(pulled.is_zero());
    }

    #[test]
    fn multiplicative_functions() {
        let base = Chart::new("m", &["x"]).unwrap();
        let gpd = vb_addition_groupoid(&base, 1).unwrap();
        // The fiber coordinate is additive; the base coordinate is not.
        assert!(is_multiplicative_function(&gpd, &Expr::var("p1"), 42)
            .unwrap()
            .passed());
        assert!(!is_multiplicative_function(&gpd, &Expr::var("x"), 42)
            .unwrap()
            .passed());
    }

    #[test]
    fn euler_field_is_multiplicative() {
        let base = Chart::new("m", &["x"]).unwrap();
        let gpd = scaling_extension(&pair_groupoid(&base).unwrap()).unwrap();
        let (z, lift) = gpd.euler.clone().unwrap();
        let report = is_multiplicative_vf(&gpd, &z, &lift, 42).unwrap();
        assert!(report.passed(), "{report:?}");
        // Zero field passes trivially.
        let zero_g = VectorField::zero(gpd.arrows.clone());
        let zero_w = VectorField::zero(gpd.pairs.chart.clone());
        assert!(is_multiplicative_vf(&gpd, &zero_g, &zero_w, 42)
            .unwrap()
            .passed());
    }

    #[test]
    fn non_multiplicative_field_fails() {
        // x∂x in the target block of the pair groupoid is not mul-related.
        let base = Chart::new("m", &["x"]).unwrap();
        let gpd = pair_groupoid(&base).unwrap();
        let z = VectorField::new(
            gpd.arrows.clone(),
            vec![Expr::var("x1"), Expr::zero()],
        )
        .unwrap();
        let lift = VectorField::new(
            gpd.pairs.chart.clone(),
            vec![Expr::var("x1"), Expr::zero(), Expr::zero()],
        )
        .unwrap();
        let report = is_multiplicative_vf(&gpd, &z, &lift, 42).unwrap();
        assert!(!report.passed());
        // The failure is a lift mismatch on the second projection.
        assert!(!report.axiom("lift-p2").unwrap().verdict.is_zero());
    }

    #[test]
    fn spencer_of_canonical_form_is_identity_defect() {
        let base = Chart::new("m", &["x1", "x2", "x3"]).unwrap();
        let gpd = vb_addition_groupoid(&base, 3).unwrap();
        // ω = Σ dp_i ∧ dx_i
        let mut omega = Form::zero(gpd.arrows.clone(), 2).unwrap();
        for i in 0..3 {
            omega.set(&[i, 3 + i], Expr::int(-1)).unwrap();
        }
        let s = spencer_of_form(&gpd, &omega).unwrap();
        for (a, l) in s.l_values.iter().enumerate() {
            let expect = Form::coordinate(base.clone(), a).unwrap();
            assert_eq!(l, &expect, "defect of frame {a} is dx_{a}");
        }
        for d in &s.d_values {
            assert!(d.is_zero());
        }
        let spec = gpd.algebroid.clone().unwrap();
        assert!(verify_spencer(&spec, &s, 42).unwrap().passed());
    }

    #[test]
    fn spencer_of_pair_difference_form() {
        let base = r2();
        let gpd = pair_groupoid(&base).unwrap();
        let omega = pair_symplectic(&gpd);
        let s = spencer_of_form(&gpd, &omega).unwrap();
        // ℓ(v) = i_v ω_M on the base.
        let mut omega_m = Form::zero(base.clone(), 2).unwrap();
        omega_m.set(&[0, 1], Expr::one()).unwrap();
        for a in 0..2 {
            let expect = crate::tensor::interior(
                &VectorField::coordinate(base.clone(), a),
                &omega_m,
            )
            .unwrap();
            assert_eq!(s.l_values[a], expect);
        }
        let spec = gpd.algebroid.clone().unwrap();
        assert!(verify_spencer(&spec, &s, 42).unwrap().passed());
    }
}
