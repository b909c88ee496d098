//! Cross-module oracles: every construction is checked against an
//! independently computed route — homogenization against the ordinary
//! calculus, the direct differential against the frame route, verifier
//! equivalences across modules.

use lbcalc::algebroid::{
    cotangent_algebroid, check_homogeneity_derivation, verify_spencer, SpencerData,
};
use lbcalc::atiyah::{
    d_d, fnd_bracket, sj_bracket, AtiyahForm, AtiyahTensor11, Multiderivation,
};
use lbcalc::expr::{is_zero, Chart, Expr};
use lbcalc::gallery;
use lbcalc::homogen::HomogChart;
use lbcalc::sample::Sampler;
use lbcalc::structures::verify_pn;
use lbcalc::tensor::{ext_d, fn_bracket, schouten, Form, Multivector, Tensor11, VectorField};

fn chart(dim: usize) -> Chart {
    let names = ["x", "y", "z"];
    Chart::new("m", &names[..dim]).unwrap()
}

fn random_atiyah_form(s: &mut Sampler, c: &Chart, k: usize) -> AtiyahForm {
    AtiyahForm::new(s.form(c, k, 2).unwrap(), s.form(c, k - 1, 2).unwrap()).unwrap()
}

fn random_multiderivation(s: &mut Sampler, c: &Chart, m: usize) -> Multiderivation {
    Multiderivation::new(
        s.multivector(c, m, 2).unwrap(),
        s.multivector(c, m - 1, 2).unwrap(),
    )
    .unwrap()
}

fn random_atiyah11(s: &mut Sampler, c: &Chart) -> AtiyahTensor11 {
    let n = c.dim() + 1;
    let matrix: Vec<Vec<Expr>> = (0..n)
        .map(|_| (0..n).map(|_| s.poly(c, 2)).collect())
        .collect();
    AtiyahTensor11::new(c.clone(), matrix).unwrap()
}

#[test]
fn homogenization_intertwines_d() {
    for dim in 1..=3 {
        let c = chart(dim);
        let hc = HomogChart::new(c.clone()).unwrap();
        let mut s = Sampler::new(100 + dim as u64);
        for k in 1..=2usize.min(dim) {
            let omega = random_atiyah_form(&mut s, &c, k);
            let lhs = hc.homogenize_form(&d_d(&omega).unwrap()).unwrap();
            let rhs = ext_d(&hc.homogenize_form(&omega).unwrap()).unwrap();
            assert_eq!(lhs, rhs, "dim {dim}, degree {k}");
        }
    }
}

#[test]
fn homogenization_intertwines_sj_with_schouten() {
    for dim in 2..=3 {
        let c = chart(dim);
        let hc = HomogChart::new(c.clone()).unwrap();
        let mut s = Sampler::new(200 + dim as u64);
        for (m1, m2) in [(1usize, 1usize), (1, 2), (2, 2)] {
            if m1 + m2 - 1 > dim + 1 {
                continue;
            }
            let d1 = random_multiderivation(&mut s, &c, m1);
            let d2 = random_multiderivation(&mut s, &c, m2);
            let lhs = hc
                .homogenize_multiderivation(&sj_bracket(&d1, &d2).unwrap())
                .unwrap();
            let rhs = schouten(
                &hc.homogenize_multiderivation(&d1).unwrap(),
                &hc.homogenize_multiderivation(&d2).unwrap(),
            )
            .unwrap();
            assert_eq!(lhs, rhs, "dim {dim}, arities ({m1}, {m2})");
        }
    }
}

#[test]
fn homogenization_intertwines_fnd_with_fn() {
    for dim in 1..=2 {
        let c = chart(dim);
        let hc = HomogChart::new(c.clone()).unwrap();
        let mut s = Sampler::new(300 + dim as u64);
        let u = random_atiyah11(&mut s, &c);
        let v = random_atiyah11(&mut s, &c);
        let lhs = hc
            .homogenize_vector2form(&fnd_bracket(&u, &v).unwrap())
            .unwrap();
        let rhs = fn_bracket(
            &hc.homogenize_atiyah11(&u).unwrap(),
            &hc.homogenize_atiyah11(&v).unwrap(),
        )
        .unwrap();
        assert_eq!(lhs, rhs, "dim {dim}");
    }
}

#[test]
fn homogenize_outputs_are_certified_and_round_trip() {
    let c = chart(3);
    let hc = HomogChart::new(c.clone()).unwrap();
    let mut s = Sampler::new(41);
    for k in 1..=2 {
        let omega = random_atiyah_form(&mut s, &c, k);
        let lifted = hc.homogenize_form(&omega).unwrap();
        assert!(hc.certify_form(&lifted, 0).passed());
        assert_eq!(hc.dehomogenize_form(&lifted).unwrap(), omega);
    }
    for m in 1..=2 {
        let d = random_multiderivation(&mut s, &c, m);
        let lifted = hc.homogenize_multiderivation(&d).unwrap();
        assert!(hc.certify_multivector(&lifted, m).passed());
        assert_eq!(hc.dehomogenize_multivector(&lifted).unwrap(), d);
    }
    let u = random_atiyah11(&mut s, &c);
    let lifted = hc.homogenize_atiyah11(&u).unwrap();
    assert!(hc.certify_tensor11(&lifted).passed());
    assert_eq!(hc.dehomogenize_tensor11(&lifted).unwrap(), u);
}

#[test]
fn pn_spencer_equivalence_gallery() {
    // verify_pn's skewness+compatibility verdicts coincide with the Spencer
    // verdict of (d∘N^∗, N^∗) over the cotangent algebroid, on passing and
    // failing pairs alike.
    let c3 = gallery::chart_r3();
    let c4 = gallery::chart_r4();
    let c2 = Chart::new("m", &["x", "y"]).unwrap();
    let mut flat2 = Multivector::zero(c2.clone(), 2).unwrap();
    flat2.set(&[0, 1], Expr::one()).unwrap();

    let shear = Tensor11::new(
        c2.clone(),
        vec![
            vec![Expr::one(), Expr::var("x")],
            vec![Expr::zero(), Expr::one()],
        ],
    )
    .unwrap();

    let cases: Vec<(Multivector, Tensor11)> = vec![
        (
            gallery::so3_poisson(&c3).unwrap(),
            Tensor11::identity(c3.clone()),
        ),
        (
            gallery::c2_model_bivector(&c4).unwrap(),
            gallery::standard_j(&c4).unwrap(),
        ),
        (flat2.clone(), Tensor11::identity(c2.clone())),
        (flat2.clone(), shear),
        (
            flat2,
            Tensor11::identity(c2.clone()).scale(&Expr::var("x")).unwrap(),
        ),
    ];
    for (i, (pi, n)) in cases.into_iter().enumerate() {
        let pn = verify_pn(&pi, &n, 42).unwrap();
        let pn_conditions = pn.axiom("skewness").unwrap().verdict.is_zero()
            && pn.axiom("compatibility").unwrap().verdict.is_zero();

        let chart = pi.chart().clone();
        let spec = cotangent_algebroid(&pi).unwrap();
        let d_values = (0..chart.dim())
            .map(|a| {
                let dxa = Form::coordinate(chart.clone(), a).unwrap();
                ext_d(&n.transpose_apply(&dxa).unwrap()).unwrap()
            })
            .collect();
        let l_values = (0..chart.dim())
            .map(|a| {
                let dxa = Form::coordinate(chart.clone(), a).unwrap();
                n.transpose_apply(&dxa).unwrap()
            })
            .collect();
        let s = SpencerData::new(d_values, l_values).unwrap();
        let spencer = verify_spencer(&spec, &s, 42).unwrap();
        assert_eq!(
            pn_conditions,
            spencer.passed(),
            "case {i}: PN and Spencer verdicts disagree ({pn:?} vs {spencer:?})"
        );
    }
}

#[test]
fn homogeneity_derivation_equivalence_gallery() {
    // verify_algebroid_derivation(ℒ_ζ − 𝟙) agrees with is_zero(ℒ_ζπ + π)
    // on a gallery of Poisson structures.
    let c = gallery::chart_r3();
    let euler = gallery::euler_field(&c).unwrap();
    let mut flat = Multivector::zero(c.clone(), 2).unwrap();
    flat.set(&[0, 1], Expr::one()).unwrap();
    // Weighted field making the constant bivector homogeneous:
    // ℒ_ζ π = −π for ζ = −x ∂x.
    let weighted = VectorField::new(
        c.clone(),
        vec![-&Expr::var("x"), Expr::zero(), Expr::zero()],
    )
    .unwrap();

    let cases: Vec<(Multivector, VectorField)> = vec![
        (gallery::so3_poisson(&c).unwrap(), euler.clone()),
        (flat.clone(), euler.clone()),
        (flat.clone(), weighted),
        (Multivector::zero(c.clone(), 2).unwrap(), euler),
    ];
    for (i, (pi, zeta)) in cases.into_iter().enumerate() {
        let report = check_homogeneity_derivation(&pi, &zeta, 42).unwrap();
        let derivation_ok = report.axiom("bracket-derivation").unwrap().verdict.is_zero()
            && report.axiom("symbol-compatibility").unwrap().verdict.is_zero();
        let residual = lbcalc::tensor::lie_derivative_multivector(&zeta, &pi)
            .unwrap()
            .add(&pi)
            .unwrap();
        let homogeneous = residual
            .components()
            .all(|(_, c)| is_zero(c, 42).is_zero());
        assert_eq!(
            derivation_ok, homogeneous,
            "case {i}: derivation and homogeneity verdicts disagree"
        );
    }
}

#[test]
fn jacobi_iff_homogeneous_poisson() {
    // verify_jacobi(J) passes exactly when the Poissonization is a
    // homogeneous Poisson structure.
    let c = gallery::chart_r3();
    let hc = HomogChart::new(c.clone()).unwrap();
    let good = gallery::contact_r3_jacobi(&c).unwrap();
    let bad = {
        // (Λ, E) with Λ non-Poisson and E = 0 is not Jacobi.
        let mut lam = Multivector::zero(c.clone(), 2).unwrap();
        lam.set(&[0, 1], Expr::var("x")).unwrap();
        lam.set(&[0, 2], Expr::one()).unwrap();
        Multiderivation::jacobi_pair(lam, VectorField::zero(c.clone())).unwrap()
    };
    for (j, expect) in [(good, true), (bad, false)] {
        let jacobi = lbcalc::structures::verify_jacobi(&j, 42).unwrap().passed();
        let (pi, z) = lbcalc::homogen::poissonize(&hc, &j).unwrap();
        let hp = lbcalc::structures::verify_homogeneous_poisson(&pi, &z, 42)
            .unwrap()
            .passed();
        assert_eq!(jacobi, expect);
        assert_eq!(jacobi, hp);
    }
}
