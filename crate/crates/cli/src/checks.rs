//! Check dispatch: turns a scenario check declaration into a structure
//! report by calling into the calculus library.

use anyhow::{anyhow, Result};

use lbcalc::algebroid::{
    cotangent_algebroid, check_homogeneity_derivation, gauge_algebroid, jet_algebroid,
    jet_cotangent_intertwine_residuals, verify_algebroid, verify_spencer, SpencerData,
};
use lbcalc::atiyah::{d_d, AtiyahForm};
use lbcalc::expr::{is_zero, Expr, ZeroVerdict};
use lbcalc::homogen::{naturality_battery, poissonize, symplectize_contact};
use lbcalc::report::{AxiomCheck, StructureReport};
use lbcalc::structures::{
    atiyah_form_from_jacobi, jacobi_from_contact, jn_pn_equivalence, magri_morosi,
    reeb_residuals, verify_holomorphic_poisson, verify_homogeneous_poisson, verify_jacobi,
    verify_jn, verify_pn, verify_poisson,
};
use lbcalc::tensor::{ext_d, lie_derivative_form, Form};

use crate::scenario::{CheckDecl, Scenario};

/// Pushes a success/failure axiom for a quantity that must be nonzero.
fn nonzero_axiom(report: &mut StructureReport, name: &str, anchor: &str, value: &Expr) {
    let verdict = match is_zero(value, report.seed) {
        ZeroVerdict::NonZero { .. } => ZeroVerdict::Zero,
        ZeroVerdict::Zero => ZeroVerdict::NonZero {
            witness: lbcalc::expr::Witness {
                point: Vec::new(),
                value: format!("`{value}` vanishes identically"),
            },
        },
        ZeroVerdict::Unknown => ZeroVerdict::Unknown,
    };
    report.push(AxiomCheck {
        name: name.to_string(),
        anchor: anchor.to_string(),
        verdict,
        sampled: value.contains_prim(),
    });
}

fn agreement_axiom(report: &mut StructureReport, name: &str, anchor: &str, agree: bool) {
    report.push(AxiomCheck {
        name: name.to_string(),
        anchor: anchor.to_string(),
        verdict: if agree {
            ZeroVerdict::Zero
        } else {
            ZeroVerdict::NonZero {
                witness: lbcalc::expr::Witness {
                    point: Vec::new(),
                    value: "verdicts differ".to_string(),
                },
            }
        },
        sampled: false,
    });
}

/// Runs one check and returns its report.
pub fn run_check(scenario: &Scenario, check: &CheckDecl, seed: u64) -> Result<StructureReport> {
    let get = |opt: &Option<String>| -> String { opt.clone().unwrap_or_default() };
    match check.kind.as_str() {
        "verify_poisson" => {
            let pi = &scenario.multivectors[&get(&check.bivector)];
            Ok(verify_poisson(pi, seed)?)
        }
        "verify_jacobi" => {
            let j = &scenario.jacobis[&get(&check.jacobi)];
            Ok(verify_jacobi(j, seed)?)
        }
        "verify_homogeneous_poisson" => {
            let pi = &scenario.multivectors[&get(&check.bivector)];
            let zeta = &scenario.vectors[&get(&check.vector)];
            Ok(verify_homogeneous_poisson(pi, zeta, seed)?)
        }
        "verify_pn" => {
            let pi = &scenario.multivectors[&get(&check.bivector)];
            let n = &scenario.tensor11s[&get(&check.tensor11)];
            Ok(verify_pn(pi, n, seed)?)
        }
        "magri_morosi" => {
            let omega = &scenario.forms[&get(&check.form)];
            let n = &scenario.tensor11s[&get(&check.tensor11)];
            Ok(magri_morosi(omega, n, seed)?)
        }
        "verify_jn" => {
            let j = &scenario.jacobis[&get(&check.jacobi)];
            let n = &scenario.atiyah11s[&get(&check.atiyah11)];
            Ok(verify_jn(j, n, seed)?)
        }
        "jn_pn_equiv" => {
            let j = &scenario.jacobis[&get(&check.jacobi)];
            let n = &scenario.atiyah11s[&get(&check.atiyah11)];
            let (jn, pn, agree) = jn_pn_equivalence(&scenario.homog, j, n, seed)?;
            let mut report = StructureReport::new("jn_pn_equivalence", seed);
            let jn_passed = jn.passed();
            report.absorb("jn", jn);
            report.absorb("pn", pn);
            agreement_axiom(&mut report, "equivalence", "jn.hom-equiv", agree);
            // The report "passes" when the two pipelines agree and the
            // underlying structure passes; expect=fail scenarios target the
            // structure verdict.
            let _ = jn_passed;
            Ok(report)
        }
        "verify_holomorphic_poisson" => {
            let pi = &scenario.multivectors[&get(&check.bivector)];
            let n = &scenario.tensor11s[&get(&check.tensor11)];
            Ok(verify_holomorphic_poisson(pi, n, seed)?)
        }
        "contact_roundtrip" => {
            let theta = &scenario.forms[&get(&check.form)];
            contact_roundtrip(scenario, check, theta, seed)
        }
        "poissonize_check" => {
            let j = &scenario.jacobis[&get(&check.jacobi)];
            poissonize_check(scenario, j, seed)
        }
        "hp_derivation_equiv" => {
            let pi = &scenario.multivectors[&get(&check.bivector)];
            let zeta = &scenario.vectors[&get(&check.vector)];
            let mut report = check_homogeneity_derivation(pi, zeta, seed)?;
            let derivation_ok = report
                .axiom("bracket-derivation")
                .map(|a| a.verdict.is_zero())
                .unwrap_or(false)
                && report
                    .axiom("symbol-compatibility")
                    .map(|a| a.verdict.is_zero())
                    .unwrap_or(false);
            let homogeneous = report
                .axiom("homogeneity")
                .map(|a| a.verdict.is_zero())
                .unwrap_or(false);
            agreement_axiom(
                &mut report,
                "derivation-iff-homogeneous",
                "hp.equivalence",
                derivation_ok == homogeneous,
            );
            Ok(report)
        }
        "certify_homogeneous" => certify(scenario, check),
        "verify_algebroid" => {
            let spec = match check.of.as_deref() {
                Some("cotangent") => {
                    cotangent_algebroid(&scenario.multivectors[&get(&check.bivector)])?
                }
                Some("jet") => jet_algebroid(&scenario.jacobis[&get(&check.jacobi)])?,
                Some("gauge") => gauge_algebroid(&scenario.chart)?,
                _ => unreachable!("validated"),
            };
            Ok(verify_algebroid(&spec, seed)?)
        }
        "jet_cotangent_intertwine" => {
            let j = &scenario.jacobis[&get(&check.jacobi)];
            let mut report = StructureReport::new("jet_cotangent_intertwine", seed);
            let residuals = jet_cotangent_intertwine_residuals(&scenario.homog, j)?;
            report.check_residuals("frame-intertwine", "jet.hom-intertwine", residuals.iter());
            Ok(report)
        }
        "pn_spencer_equiv" => {
            let pi = &scenario.multivectors[&get(&check.bivector)];
            let n = &scenario.tensor11s[&get(&check.tensor11)];
            let pn = verify_pn(pi, n, seed)?;
            let pn_conditions = pn.axiom("skewness").unwrap().verdict.is_zero()
                && pn.axiom("compatibility").unwrap().verdict.is_zero();
            let chart = pi.chart().clone();
            let spec = cotangent_algebroid(pi)?;
            let d_values = (0..chart.dim())
                .map(|a| {
                    let dxa = Form::coordinate(chart.clone(), a)?;
                    ext_d(&n.transpose_apply(&dxa)?)
                })
                .collect::<lbcalc::Result<Vec<_>>>()?;
            let l_values = (0..chart.dim())
                .map(|a| n.transpose_apply(&Form::coordinate(chart.clone(), a)?))
                .collect::<lbcalc::Result<Vec<_>>>()?;
            let s = SpencerData::new(d_values, l_values)?;
            let spencer = verify_spencer(&spec, &s, seed)?;
            let agree = pn_conditions == spencer.passed();
            let mut report = StructureReport::new("pn_spencer_equivalence", seed);
            report.absorb("pn", pn);
            report.absorb("spencer", spencer);
            agreement_axiom(&mut report, "equivalence", "pn.spencer-equiv", agree);
            Ok(report)
        }
        "naturality" => {
            let count = check.count.unwrap_or(20);
            Ok(naturality_battery(seed, count)?)
        }
        "groupoid_axioms" => {
            let gpd = &scenario.groupoids[&get(&check.groupoid)];
            Ok(lbcalc::groupoid::groupoid_axioms(gpd, seed)?)
        }
        "multiplicative_form" => {
            let (gname, omega) = &scenario.gforms[&get(&check.gform)];
            let gpd = &scenario.groupoids[gname];
            Ok(lbcalc::groupoid::is_multiplicative_form(gpd, omega, seed)?)
        }
        "d_multiplicative" => {
            let (gname, omega) = &scenario.gforms[&get(&check.gform)];
            let gpd = &scenario.groupoids[gname];
            let mut report =
                lbcalc::groupoid::is_multiplicative_form(gpd, &ext_d(omega)?, seed)?;
            report.kind = "multiplicative_differential".to_string();
            Ok(report)
        }
        "unit_pullback_zero" => {
            let (gname, omega) = &scenario.gforms[&get(&check.gform)];
            let gpd = &scenario.groupoids[gname];
            let pulled = gpd.unit.pullback(omega)?;
            let mut report = StructureReport::new("unit_pullback", seed);
            report.check_residuals(
                "lagrangian-units",
                "groupoid.unit-pullback",
                pulled.components().map(|(_, c)| c).collect::<Vec<_>>(),
            );
            Ok(report)
        }
        "multiplicative_function" => {
            let (gname, f) = &scenario.gfunctions[&get(&check.gfunction)];
            let gpd = &scenario.groupoids[gname];
            Ok(lbcalc::groupoid::is_multiplicative_function(gpd, f, seed)?)
        }
        "multiplicative_vf" => {
            let (gname, z, lift) = &scenario.gvectors[&get(&check.gvector)];
            let gpd = &scenario.groupoids[gname];
            Ok(lbcalc::groupoid::is_multiplicative_vf(gpd, z, lift, seed)?)
        }
        "euler_multiplicative" => {
            let gpd = &scenario.groupoids[&get(&check.groupoid)];
            let (z, lift) = gpd
                .euler
                .clone()
                .ok_or_else(|| anyhow!("groupoid has no Euler field"))?;
            let mut report = lbcalc::groupoid::is_multiplicative_vf(gpd, &z, &lift, seed)?;
            report.kind = "euler_multiplicative".to_string();
            Ok(report)
        }
        "spencer_of_form" => spencer_of_form_check(scenario, check, seed),
        other => Err(anyhow!("unknown check kind `{other}`")),
    }
}

fn certify(scenario: &Scenario, check: &CheckDecl) -> Result<StructureReport> {
    let hc = &scenario.homog;
    let name = |o: &Option<String>| o.clone().unwrap_or_default();
    let cert = match check.object.as_deref().unwrap_or_default() {
        "function" => hc.certify_function(
            &scenario.functions[&name(&check.function)],
            check.weight.unwrap_or(0),
        ),
        "vector" => hc.certify_vector_field(&scenario.vectors[&name(&check.vector)]),
        "form" => hc.certify_form(
            &scenario.forms[&name(&check.form)],
            check.weight.unwrap_or(0),
        ),
        "multivector" => hc.certify_multivector(
            &scenario.multivectors[&name(&check.multivector)],
            check.weight.unwrap_or(0),
        ),
        "tensor11" => hc.certify_tensor11(&scenario.tensor11s[&name(&check.tensor11)]),
        _ => unreachable!("validated"),
    };
    Ok(cert.report)
}

fn contact_roundtrip(
    scenario: &Scenario,
    check: &CheckDecl,
    theta: &Form,
    seed: u64,
) -> Result<StructureReport> {
    let mut report = StructureReport::new("contact_roundtrip", seed);
    let hc = &scenario.homog;

    if let Err(e) = lbcalc::homogen::check_contact(theta, seed) {
        report.push(AxiomCheck {
            name: "contact".to_string(),
            anchor: "contact.nondegenerate".to_string(),
            verdict: ZeroVerdict::NonZero {
                witness: lbcalc::expr::Witness {
                    point: Vec::new(),
                    value: format!("{e}"),
                },
            },
            sampled: true,
        });
        return Ok(report);
    }
    report.check_residual("contact", "contact.nondegenerate", &Expr::zero());

    // ω = d_DΘ is d_D-closed and nondegenerate; J = ω^{−1}.
    let omega = d_d(&AtiyahForm::from_beta(theta.clone())?)?;
    let ddo = d_d(&omega)?;
    let mut closed: Vec<Expr> = ddo.beta().components().map(|(_, c)| c.clone()).collect();
    closed.extend(ddo.gamma().components().map(|(_, c)| c.clone()));
    report.check_residuals("closed", "contact.dd-closed", closed.iter());

    let j = jacobi_from_contact(theta, seed)?;
    let e = j.q().expect("arity 2").to_vector_field()?;
    report.check_residuals("reeb", "contact.reeb", reeb_residuals(theta, &e)?.iter());

    // Round trip J → ω reproduces d_DΘ exactly.
    let back = atiyah_form_from_jacobi(&j, seed)?;
    let diff = back.sub(&omega)?;
    let mut rt: Vec<Expr> = diff.beta().components().map(|(_, c)| c.clone()).collect();
    rt.extend(diff.gamma().components().map(|(_, c)| c.clone()));
    report.check_residuals("roundtrip", "contact.inverse-roundtrip", rt.iter());

    // Symplectization: ℒ_Z ω̃ = ω̃ and ω̃ ∧ ω̃ ≠ 0 (top power on ℝ³).
    let lifted = symplectize_contact(hc, theta, seed)?;
    let lz = lie_derivative_form(&hc.euler(), &lifted)?.sub(&lifted)?;
    report.check_residuals(
        "homogeneous-symplectic",
        "contact.symplectization",
        lz.components().map(|(_, c)| c).collect::<Vec<_>>(),
    );
    let dim = hc.ext().dim();
    let mut top = lifted.clone();
    for _ in 1..dim / 2 {
        top = top.wedge(&lifted)?;
    }
    let idx: Vec<usize> = (0..dim).collect();
    nonzero_axiom(&mut report, "volume", "contact.volume", &top.component(&idx));

    // Optional expected Reeb field comparison.
    if let Some(reeb_name) = &check.reeb {
        let expected = &scenario.vectors[reeb_name];
        let diff = e.sub(expected)?;
        report.check_residuals(
            "reeb-expected",
            "contact.reeb-named",
            diff.components().iter(),
        );
    }
    Ok(report)
}

fn poissonize_check(
    scenario: &Scenario,
    j: &lbcalc::atiyah::Multiderivation,
    seed: u64,
) -> Result<StructureReport> {
    let hc = &scenario.homog;
    let mut report = StructureReport::new("poissonization", seed);
    report.absorb("jacobi", verify_jacobi(j, seed)?);
    let (pi, z) = poissonize(hc, j)?;
    report.absorb(
        "homogeneous-poisson",
        verify_homogeneous_poisson(&pi, &z, seed)?,
    );
    // Bracket correspondence on all coordinate-section pairs plus the
    // constant section, plus randomized polynomial sections.
    let chart = scenario.chart.clone();
    let mut pairs: Vec<(Expr, Expr)> = Vec::new();
    let mut generators: Vec<Expr> = (0..chart.dim()).map(|i| chart.coord(i)).collect();
    generators.push(Expr::one());
    for (i, a) in generators.iter().enumerate() {
        for b in generators.iter().skip(i + 1) {
            pairs.push((a.clone(), b.clone()));
        }
    }
    let mut sampler = lbcalc::sample::Sampler::new(seed);
    for _ in 0..10 {
        pairs.push((sampler.poly(&chart, 2), sampler.poly(&chart, 2)));
    }
    let residuals = lbcalc::homogen::hom_bracket_residuals(hc, j, &pairs)?;
    report.check_residuals("bracket-correspondence", "homog.bracket", residuals.iter());
    report.absorb(
        "certificate",
        hc.certify_multivector(&pi, 2).report.clone(),
    );
    Ok(report)
}

fn spencer_of_form_check(
    scenario: &Scenario,
    check: &CheckDecl,
    seed: u64,
) -> Result<StructureReport> {
    let (gname, omega) = &scenario.gforms[&check.gform.clone().unwrap_or_default()];
    let gpd = &scenario.groupoids[gname];
    let s = lbcalc::groupoid::spencer_of_form(gpd, omega)?;
    let spec = gpd
        .algebroid
        .clone()
        .ok_or_else(|| anyhow!("groupoid `{gname}` carries no algebroid"))?;
    let mut report = StructureReport::new("spencer_of_form", seed);
    report.absorb("spencer", verify_spencer(&spec, &s, seed)?);
    if check.ell_identity {
        let chart = spec.base().clone();
        let mut residuals = Vec::new();
        for (a, l) in s.l_values.iter().enumerate() {
            let expect = Form::coordinate(chart.clone(), a)?;
            residuals.extend(l.sub(&expect)?.components().map(|(_, c)| c.clone()));
        }
        report.check_residuals("defect-is-identity", "spencer.ell-identity", residuals.iter());
    }
    if let Some(base_form_name) = &check.ell_interior_of {
        let base_form = &scenario.forms[base_form_name];
        let chart = spec.base().clone();
        let mut residuals = Vec::new();
        for (a, l) in s.l_values.iter().enumerate() {
            let expect = lbcalc::tensor::interior(
                &lbcalc::tensor::VectorField::coordinate(chart.clone(), a),
                base_form,
            )?;
            residuals.extend(l.sub(&expect)?.components().map(|(_, c)| c.clone()));
        }
        report.check_residuals(
            "defect-is-interior",
            "spencer.ell-interior",
            residuals.iter(),
        );
    }
    Ok(report)
}
