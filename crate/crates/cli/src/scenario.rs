//! Scenario files: TOML schema, validation and resolution into calculus
//! objects.
//!
//! A scenario declares one chart, named tensors with expression-string
//! components, optional groupoids, and a list of checks. Component tables
//! are keyed by concatenated variable names (`xy = "1"` for the
//! `∂x∧∂y`-slot); keys may also separate indices with spaces or `|`.
//! Declarations marked `extended = true` live on the chart extended by the
//! fiber variable `r`.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use lbcalc::atiyah::{AtiyahTensor11, Multiderivation};
use lbcalc::expr::{Chart, Expr};
use lbcalc::groupoid::{pair_groupoid, scaling_extension, vb_addition_groupoid, ChartGroupoid};
use lbcalc::homogen::HomogChart;
use lbcalc::tensor::{Form, Multivector, Tensor11, VectorField};

use crate::parse::parse_expr;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: Option<String>,
    pub chart: ChartDecl,
    #[serde(default)]
    pub function: BTreeMap<String, FunctionDecl>,
    #[serde(default)]
    pub vector: BTreeMap<String, VectorDecl>,
    #[serde(default)]
    pub form: BTreeMap<String, ComponentsDecl>,
    #[serde(default)]
    pub bivector: BTreeMap<String, ComponentsDecl>,
    #[serde(default)]
    pub multivector: BTreeMap<String, ComponentsDecl>,
    #[serde(default)]
    pub tensor11: BTreeMap<String, MatrixDecl>,
    #[serde(default)]
    pub atiyah11: BTreeMap<String, MatrixDecl>,
    #[serde(default)]
    pub jacobi: BTreeMap<String, JacobiDecl>,
    #[serde(default)]
    pub groupoid: BTreeMap<String, GroupoidDecl>,
    #[serde(default)]
    pub gform: BTreeMap<String, GFormDecl>,
    #[serde(default)]
    pub gfunction: BTreeMap<String, GFunctionDecl>,
    #[serde(default)]
    pub gvector: BTreeMap<String, GVectorDecl>,
    #[serde(default, rename = "check")]
    pub checks: Vec<CheckDecl>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartDecl {
    pub vars: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionDecl {
    pub expr: String,
    #[serde(default)]
    pub extended: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorDecl {
    pub components: BTreeMap<String, String>,
    #[serde(default)]
    pub extended: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentsDecl {
    #[serde(default)]
    pub components: BTreeMap<String, String>,
    /// Required when `components` is empty (zero tensors).
    pub degree: Option<usize>,
    #[serde(default)]
    pub extended: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDecl {
    pub matrix: Vec<Vec<String>>,
    #[serde(default)]
    pub extended: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JacobiDecl {
    /// Bivector components of the pair.
    #[serde(default)]
    pub lambda: BTreeMap<String, String>,
    /// Vector components of the pair.
    #[serde(default)]
    pub e: BTreeMap<String, String>,
    /// Alternatively, build the pair by inverting a declared contact form.
    pub from_contact: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupoidDecl {
    pub kind: String,
    pub base_vars: Option<Vec<String>>,
    pub fiber_rank: Option<usize>,
    pub inner: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GFormDecl {
    pub groupoid: String,
    pub components: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GFunctionDecl {
    pub groupoid: String,
    pub expr: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GVectorDecl {
    pub groupoid: String,
    pub components: BTreeMap<String, String>,
    /// Lift to the composable-pairs chart.
    pub lift: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckDecl {
    pub kind: String,
    pub name: Option<String>,
    #[serde(default = "default_expect")]
    pub expect: String,
    // Named arguments; which ones are required depends on the kind.
    pub function: Option<String>,
    pub vector: Option<String>,
    pub form: Option<String>,
    pub bivector: Option<String>,
    pub multivector: Option<String>,
    pub tensor11: Option<String>,
    pub atiyah11: Option<String>,
    pub jacobi: Option<String>,
    pub groupoid: Option<String>,
    pub gform: Option<String>,
    pub gfunction: Option<String>,
    pub gvector: Option<String>,
    /// Algebroid constructor selector for `verify_algebroid`.
    pub of: Option<String>,
    /// Contravariant weight for `certify_homogeneous`.
    pub weight: Option<usize>,
    /// Object kind for `certify_homogeneous`.
    pub object: Option<String>,
    /// Sample count for `naturality`.
    pub count: Option<usize>,
    /// Expected Reeb field name for `contact_roundtrip`.
    pub reeb: Option<String>,
    /// For `spencer_of_form`: assert `ℓ(e_a) = dx_a` exactly.
    #[serde(default)]
    pub ell_identity: bool,
    /// For `spencer_of_form`: assert `ℓ(e_a) = i_{e_a}` of this base form.
    pub ell_interior_of: Option<String>,
}

fn default_expect() -> String {
    "pass".to_string()
}

/// A fully validated scenario with resolved calculus objects.
pub struct Scenario {
    pub name: String,
    pub chart: Chart,
    pub homog: HomogChart,
    pub functions: BTreeMap<String, Expr>,
    pub vectors: BTreeMap<String, VectorField>,
    pub forms: BTreeMap<String, Form>,
    pub multivectors: BTreeMap<String, Multivector>,
    pub tensor11s: BTreeMap<String, Tensor11>,
    pub atiyah11s: BTreeMap<String, AtiyahTensor11>,
    pub jacobis: BTreeMap<String, Multiderivation>,
    pub groupoids: BTreeMap<String, ChartGroupoid>,
    pub gforms: BTreeMap<String, (String, Form)>,
    pub gfunctions: BTreeMap<String, (String, Expr)>,
    pub gvectors: BTreeMap<String, (String, VectorField, VectorField)>,
    pub checks: Vec<CheckDecl>,
}

/// Splits a component key into variable indices by greedy longest-name
/// matching, allowing ` `, `,` and `|` separators.
pub fn parse_key(chart: &Chart, key: &str) -> Result<Vec<usize>> {
    let mut by_len: Vec<(usize, &String)> = chart.vars().iter().enumerate().collect();
    by_len.sort_by_key(|(_, name)| std::cmp::Reverse(name.len()));
    let mut rest = key;
    let mut out = Vec::new();
    'outer: while !rest.is_empty() {
        if let Some(stripped) = rest.strip_prefix([' ', ',', '|']) {
            rest = stripped;
            continue;
        }
        for (idx, name) in &by_len {
            if let Some(stripped) = rest.strip_prefix(name.as_str()) {
                out.push(*idx);
                rest = stripped;
                continue 'outer;
            }
        }
        bail!(
            "component key `{key}` does not decompose into variables of chart `{}` (stuck at `{rest}`)",
            chart.name()
        );
    }
    Ok(out)
}

fn parse_component(src: &str, chart: &Chart, what: &str) -> Result<Expr> {
    let e = parse_expr(src).map_err(|e| anyhow!("{what}: {e}"))?;
    for v in e.variables() {
        chart
            .var_index(&v)
            .map_err(|_| anyhow!("{what}: unknown variable `{v}` on chart `{}`", chart.name()))?;
    }
    Ok(e)
}

impl Scenario {
    pub fn resolve(file: ScenarioFile, fallback_name: &str) -> Result<Scenario> {
        let vars: Vec<&str> = file.chart.vars.iter().map(|s| s.as_str()).collect();
        let chart = Chart::new("m", &vars).map_err(|e| anyhow!("chart: {e}"))?;
        let homog = HomogChart::new(chart.clone()).map_err(|e| anyhow!("chart: {e}"))?;
        let pick = |extended: bool| -> Chart {
            if extended {
                homog.ext().clone()
            } else {
                chart.clone()
            }
        };

        let mut scenario = Scenario {
            name: file.name.unwrap_or_else(|| fallback_name.to_string()),
            chart: chart.clone(),
            homog: homog.clone(),
            functions: BTreeMap::new(),
            vectors: BTreeMap::new(),
            forms: BTreeMap::new(),
            multivectors: BTreeMap::new(),
            tensor11s: BTreeMap::new(),
            atiyah11s: BTreeMap::new(),
            jacobis: BTreeMap::new(),
            groupoids: BTreeMap::new(),
            gforms: BTreeMap::new(),
            gfunctions: BTreeMap::new(),
            gvectors: BTreeMap::new(),
            checks: file.checks,
        };

        for (name, decl) in file.function {
            let on = pick(decl.extended);
            let e = parse_component(&decl.expr, &on, &format!("function.{name}"))?;
            scenario.functions.insert(name, e);
        }
        for (name, decl) in file.vector {
            let on = pick(decl.extended);
            let mut comps = vec![Expr::zero(); on.dim()];
            for (key, src) in &decl.components {
                let idx = parse_key(&on, key)?;
                if idx.len() != 1 {
                    bail!("vector.{name}: key `{key}` must name one variable");
                }
                comps[idx[0]] = parse_component(src, &on, &format!("vector.{name}"))?;
            }
            scenario
                .vectors
                .insert(name, VectorField::new(on, comps)?);
        }
        for (name, decl) in file.form {
            let on = pick(decl.extended);
            let f = build_form(&on, &decl, &format!("form.{name}"))?;
            scenario.forms.insert(name, f);
        }
        for (name, decl) in file.bivector {
            let on = pick(decl.extended);
            let p = build_multivector(&on, &decl, &format!("bivector.{name}"))?;
            if p.degree() != 2 {
                bail!("bivector.{name}: expected degree 2");
            }
            scenario.multivectors.insert(name, p);
        }
        for (name, decl) in file.multivector {
            let on = pick(decl.extended);
            let p = build_multivector(&on, &decl, &format!("multivector.{name}"))?;
            scenario.multivectors.insert(name, p);
        }
        for (name, decl) in file.tensor11 {
            let on = pick(decl.extended);
            let m = build_matrix(&on, &decl.matrix, on.dim(), &format!("tensor11.{name}"))?;
            scenario.tensor11s.insert(name, Tensor11::new(on, m)?);
        }
        for (name, decl) in file.atiyah11 {
            if decl.extended {
                bail!("atiyah11.{name}: Atiyah tensors live on the base chart");
            }
            let m = build_matrix(
                &chart,
                &decl.matrix,
                chart.dim() + 1,
                &format!("atiyah11.{name}"),
            )?;
            scenario
                .atiyah11s
                .insert(name, AtiyahTensor11::new(chart.clone(), m)?);
        }
        for (name, decl) in file.jacobi {
            let j = if let Some(theta_name) = &decl.from_contact {
                let theta = scenario.forms.get(theta_name).ok_or_else(|| {
                    anyhow!("jacobi.{name}: undeclared contact form `{theta_name}`")
                })?;
                lbcalc::structures::jacobi_from_contact(theta, 42)
                    .with_context(|| format!("jacobi.{name}"))?
            } else {
                let mut lam = Multivector::zero(chart.clone(), 2)?;
                for (key, src) in &decl.lambda {
                    let idx = parse_key(&chart, key)?;
                    lam.set(&idx, parse_component(src, &chart, &format!("jacobi.{name}"))?)?;
                }
                let mut e = vec![Expr::zero(); chart.dim()];
                for (key, src) in &decl.e {
                    let idx = parse_key(&chart, key)?;
                    if idx.len() != 1 {
                        bail!("jacobi.{name}: e-key `{key}` must name one variable");
                    }
                    e[idx[0]] = parse_component(src, &chart, &format!("jacobi.{name}"))?;
                }
                Multiderivation::jacobi_pair(lam, VectorField::new(chart.clone(), e)?)?
            };
            scenario.jacobis.insert(name, j);
        }
        // Groupoids may reference each other (scaling of an inner one);
        // resolve in declaration order with one retry pass for forward
        // references.
        let mut pending: Vec<(String, GroupoidDecl)> = file.groupoid.into_iter().collect();
        let mut progress = true;
        while progress && !pending.is_empty() {
            progress = false;
            let mut next = Vec::new();
            for (name, decl) in pending {
                match build_groupoid(&decl, &scenario.groupoids)? {
                    Some(g) => {
                        scenario.groupoids.insert(name, g);
                        progress = true;
                    }
                    None => next.push((name, decl)),
                }
            }
            pending = next;
        }
        if let Some((name, _)) = pending.first() {
            bail!("groupoid.{name}: unresolved `inner` reference");
        }
        for (name, decl) in file.gform {
            let gpd = scenario
                .groupoids
                .get(&decl.groupoid)
                .ok_or_else(|| anyhow!("gform.{name}: undeclared groupoid `{}`", decl.groupoid))?;
            let f = build_form(
                &gpd.arrows,
                &ComponentsDecl {
                    components: decl.components,
                    degree: None,
                    extended: false,
                },
                &format!("gform.{name}"),
            )?;
            scenario.gforms.insert(name, (decl.groupoid, f));
        }
        for (name, decl) in file.gfunction {
            let gpd = scenario.groupoids.get(&decl.groupoid).ok_or_else(|| {
                anyhow!("gfunction.{name}: undeclared groupoid `{}`", decl.groupoid)
            })?;
            let e = parse_component(&decl.expr, &gpd.arrows, &format!("gfunction.{name}"))?;
            scenario.gfunctions.insert(name, (decl.groupoid, e));
        }
        for (name, decl) in file.gvector {
            let gpd = scenario.groupoids.get(&decl.groupoid).ok_or_else(|| {
                anyhow!("gvector.{name}: undeclared groupoid `{}`", decl.groupoid)
            })?;
            let build = |chart: &Chart,
                         comps: &BTreeMap<String, String>|
             -> Result<VectorField> {
                let mut v = vec![Expr::zero(); chart.dim()];
                for (key, src) in comps {
                    let idx = parse_key(chart, key)?;
                    if idx.len() != 1 {
                        bail!("gvector.{name}: key `{key}` must name one variable");
                    }
                    v[idx[0]] = parse_component(src, chart, &format!("gvector.{name}"))?;
                }
                Ok(VectorField::new(chart.clone(), v)?)
            };
            let z = build(&gpd.arrows, &decl.components)?;
            let lift = build(&gpd.pairs.chart, &decl.lift)?;
            scenario.gvectors.insert(name, (decl.groupoid, z, lift));
        }
        scenario.validate_checks()?;
        Ok(scenario)
    }

    fn validate_checks(&self) -> Result<()> {
        for (i, check) in self.checks.iter().enumerate() {
            let whom = format!("check #{i} ({})", check.kind);
            if !matches!(check.expect.as_str(), "pass" | "fail" | "unknown") {
                bail!("{whom}: expect must be pass, fail or unknown");
            }
            let need = |opt: &Option<String>,
                        table: &dyn Fn(&str) -> bool,
                        role: &str|
             -> Result<()> {
                let name = opt
                    .as_ref()
                    .ok_or_else(|| anyhow!("{whom}: missing argument `{role}`"))?;
                if !table(name) {
                    bail!("{whom}: undeclared {role} `{name}`");
                }
                Ok(())
            };
            let fnc = |n: &str| self.functions.contains_key(n);
            let vec_ = |n: &str| self.vectors.contains_key(n);
            let frm = |n: &str| self.forms.contains_key(n);
            let mvf = |n: &str| self.multivectors.contains_key(n);
            let t11 = |n: &str| self.tensor11s.contains_key(n);
            let a11 = |n: &str| self.atiyah11s.contains_key(n);
            let jac = |n: &str| self.jacobis.contains_key(n);
            let gpd = |n: &str| self.groupoids.contains_key(n);
            let gfm = |n: &str| self.gforms.contains_key(n);
            let gfn = |n: &str| self.gfunctions.contains_key(n);
            let gvc = |n: &str| self.gvectors.contains_key(n);
            match check.kind.as_str() {
                "verify_poisson" => need(&check.bivector, &mvf, "bivector")?,
                "verify_jacobi" => need(&check.jacobi, &jac, "jacobi")?,
                "verify_homogeneous_poisson" => {
                    need(&check.bivector, &mvf, "bivector")?;
                    need(&check.vector, &vec_, "vector")?;
                }
                "verify_pn" | "verify_holomorphic_poisson" | "pn_spencer_equiv" => {
                    need(&check.bivector, &mvf, "bivector")?;
                    need(&check.tensor11, &t11, "tensor11")?;
                }
                "magri_morosi" => {
                    need(&check.form, &frm, "form")?;
                    need(&check.tensor11, &t11, "tensor11")?;
                }
                "verify_jn" | "jn_pn_equiv" => {
                    need(&check.jacobi, &jac, "jacobi")?;
                    need(&check.atiyah11, &a11, "atiyah11")?;
                }
                "contact_roundtrip" => {
                    need(&check.form, &frm, "form")?;
                    if let Some(reeb) = &check.reeb {
                        if !self.vectors.contains_key(reeb) {
                            bail!("{whom}: undeclared vector `{reeb}`");
                        }
                    }
                }
                "poissonize_check" => need(&check.jacobi, &jac, "jacobi")?,
                "hp_derivation_equiv" => {
                    need(&check.bivector, &mvf, "bivector")?;
                    need(&check.vector, &vec_, "vector")?;
                }
                "certify_homogeneous" => {
                    let object = check
                        .object
                        .as_deref()
                        .ok_or_else(|| anyhow!("{whom}: missing `object` kind"))?;
                    match object {
                        "function" => need(&check.function, &fnc, "function")?,
                        "vector" => need(&check.vector, &vec_, "vector")?,
                        "form" => need(&check.form, &frm, "form")?,
                        "multivector" => need(&check.multivector, &mvf, "multivector")?,
                        "tensor11" => need(&check.tensor11, &t11, "tensor11")?,
                        _ => bail!("{whom}: unknown object kind `{object}`"),
                    }
                    if object != "vector" && object != "tensor11" && check.weight.is_none() {
                        bail!("{whom}: missing `weight`");
                    }
                }
                "verify_algebroid" => match check.of.as_deref() {
                    Some("cotangent") => need(&check.bivector, &mvf, "bivector")?,
                    Some("jet") => need(&check.jacobi, &jac, "jacobi")?,
                    Some("gauge") => {}
                    _ => bail!("{whom}: `of` must be cotangent, jet or gauge"),
                },
                "jet_cotangent_intertwine" => need(&check.jacobi, &jac, "jacobi")?,
                "naturality" => {}
                "groupoid_axioms" => need(&check.groupoid, &gpd, "groupoid")?,
                "multiplicative_form" | "d_multiplicative" | "unit_pullback_zero" => {
                    need(&check.gform, &gfm, "gform")?
                }
                "multiplicative_function" => need(&check.gfunction, &gfn, "gfunction")?,
                "multiplicative_vf" => need(&check.gvector, &gvc, "gvector")?,
                "euler_multiplicative" => need(&check.groupoid, &gpd, "groupoid")?,
                "spencer_of_form" => {
                    need(&check.gform, &gfm, "gform")?;
                    if let Some(base_form) = &check.ell_interior_of {
                        if !self.forms.contains_key(base_form) {
                            bail!("{whom}: undeclared form `{base_form}`");
                        }
                    }
                }
                other => bail!("{whom}: unknown check kind `{other}`"),
            }
        }
        Ok(())
    }
}

fn build_form(chart: &Chart, decl: &ComponentsDecl, what: &str) -> Result<Form> {
    let degree = infer_degree(chart, &decl.components, decl.degree, what)?;
    let mut out = Form::zero(chart.clone(), degree)?;
    for (key, src) in &decl.components {
        let idx = parse_key(chart, key)?;
        if idx.len() != degree {
            bail!("{what}: key `{key}` has length {} but degree is {degree}", idx.len());
        }
        out.add_signed(&idx, parse_component(src, chart, what)?);
    }
    Ok(out)
}

fn build_multivector(chart: &Chart, decl: &ComponentsDecl, what: &str) -> Result<Multivector> {
    let degree = infer_degree(chart, &decl.components, decl.degree, what)?;
    let mut out = Multivector::zero(chart.clone(), degree)?;
    for (key, src) in &decl.components {
        let idx = parse_key(chart, key)?;
        if idx.len() != degree {
            bail!("{what}: key `{key}` has length {} but degree is {degree}", idx.len());
        }
        out.add_signed(&idx, parse_component(src, chart, what)?);
    }
    Ok(out)
}

fn infer_degree(
    chart: &Chart,
    comps: &BTreeMap<String, String>,
    declared: Option<usize>,
    what: &str,
) -> Result<usize> {
    if let Some(d) = declared {
        return Ok(d);
    }
    let first = comps
        .keys()
        .next()
        .ok_or_else(|| anyhow!("{what}: empty components require an explicit `degree`"))?;
    Ok(parse_key(chart, first)?.len())
}

fn build_matrix(
    chart: &Chart,
    rows: &[Vec<String>],
    size: usize,
    what: &str,
) -> Result<Vec<Vec<Expr>>> {
    if rows.len() != size || rows.iter().any(|r| r.len() != size) {
        bail!("{what}: expected a {size}×{size} matrix");
    }
    rows.iter()
        .map(|row| {
            row.iter()
                .map(|src| parse_component(src, chart, what))
                .collect()
        })
        .collect()
}

fn build_groupoid(
    decl: &GroupoidDecl,
    existing: &BTreeMap<String, ChartGroupoid>,
) -> Result<Option<ChartGroupoid>> {
    match decl.kind.as_str() {
        "pair" => {
            let vars = decl
                .base_vars
                .as_ref()
                .ok_or_else(|| anyhow!("pair groupoid requires base_vars"))?;
            let names: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
            let base = Chart::new("base", &names)?;
            Ok(Some(pair_groupoid(&base)?))
        }
        "vb_addition" => {
            let vars = decl
                .base_vars
                .as_ref()
                .ok_or_else(|| anyhow!("vb_addition groupoid requires base_vars"))?;
            let rank = decl
                .fiber_rank
                .ok_or_else(|| anyhow!("vb_addition groupoid requires fiber_rank"))?;
            let names: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
            let base = Chart::new("base", &names)?;
            Ok(Some(vb_addition_groupoid(&base, rank)?))
        }
        "scaling" => {
            let inner = decl
                .inner
                .as_ref()
                .ok_or_else(|| anyhow!("scaling groupoid requires `inner`"))?;
            match existing.get(inner) {
                Some(g) => Ok(Some(scaling_extension(g)?)),
                None => Ok(None),
            }
        }
        other => bail!("unknown groupoid kind `{other}`"),
    }
}

/// Parses and validates a scenario from TOML text.
pub fn parse_scenario(text: &str, fallback_name: &str) -> Result<Scenario> {
    let file: ScenarioFile = toml::from_str(text).context("invalid scenario TOML")?;
    Scenario::resolve(file, fallback_name)
}
