//! Exact symbolic scalar expressions on a chart.
//!
//! An [`Expr`] is an ordinary expression tree. [`Expr::normalize`] rewrites it
//! into a canonical sorted monomial form over the rationals in which primitive
//! calls (`sin`, `cos`, `exp`) are opaque atoms; on the Laurent-polynomial
//! fragment structural equality of normal forms decides semantic equality.
//! [`is_zero`] upgrades that into a three-valued verdict with seeded numeric
//! sampling for expressions containing primitive atoms.

mod poly;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::Result;

pub use poly::PrimKind;
pub(crate) use poly::{prim_poly, Poly};

/// Numeric tolerance below which a sampled residual counts as "zero".
pub const SAMPLE_TOLERANCE: f64 = 1e-7;
/// Number of sample points used by [`is_zero`].
pub const SAMPLE_POINTS: usize = 20;

#[derive(Debug, PartialEq, Eq)]
struct ChartInner {
    name: String,
    vars: Vec<String>,
}

/// An ordered coordinate chart. Cheap to clone; compared structurally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart(Arc<ChartInner>);

impl Chart {
    /// New chart; variable names must be pairwise distinct and nonempty.
    pub fn new(name: &str, vars: &[&str]) -> Result<Chart> {
        let mut seen = BTreeSet::new();
        for v in vars {
            if v.is_empty() || !seen.insert(v.to_string()) {
                return Err(Error::UnknownVariable(v.to_string(), name.to_string()));
            }
        }
        if vars.is_empty() {
            return Err(Error::DegreeOutOfRange { degree: 0, dim: 0 });
        }
        Ok(Chart(Arc::new(ChartInner {
            name: name.to_string(),
            vars: vars.iter().map(|s| s.to_string()).collect(),
        })))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn vars(&self) -> &[String] {
        &self.0.vars
    }

    pub fn dim(&self) -> usize {
        self.0.vars.len()
    }

    pub fn var_index(&self, v: &str) -> Result<usize> {
        self.0
            .vars
            .iter()
            .position(|w| w == v)
            .ok_or_else(|| Error::UnknownVariable(v.to_string(), self.0.name.clone()))
    }

    /// Coordinate expression for the `i`-th variable.
    pub fn coord(&self, i: usize) -> Expr {
        Expr::var(&self.0.vars[i])
    }

    pub(crate) fn expect_same(&self, other: &Chart) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ChartMismatch {
                expected: self.name().to_string(),
                got: other.name().to_string(),
            })
        }
    }
}

/// A symbolic scalar expression tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Const(BigRational),
    Var(String),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    IntPow(Box<Expr>, i64),
    Prim(PrimKind, Box<Expr>),
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Const(BigRational::zero())
    }

    pub fn one() -> Expr {
        Expr::Const(BigRational::one())
    }

    pub fn int(n: i64) -> Expr {
        Expr::Const(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn rat(num: i64, den: i64) -> Expr {
        Expr::Const(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn pow(&self, k: i64) -> Expr {
        Expr::IntPow(Box::new(self.clone()), k)
    }

    pub fn sin(&self) -> Expr {
        Expr::Prim(PrimKind::Sin, Box::new(self.clone()))
    }

    pub fn cos(&self) -> Expr {
        Expr::Prim(PrimKind::Cos, Box::new(self.clone()))
    }

    pub fn exp(&self) -> Expr {
        Expr::Prim(PrimKind::Exp, Box::new(self.clone()))
    }

    pub(crate) fn to_poly(&self) -> Result<Poly> {
        match self {
            Expr::Const(c) => Ok(Poly::constant(c.clone())),
            Expr::Var(v) => Ok(Poly::var(v)),
            Expr::Sum(terms) => {
                let mut acc = Poly::zero();
                for t in terms {
                    acc = acc.add(&t.to_poly()?);
                }
                Ok(acc)
            }
            Expr::Product(factors) => {
                let mut acc = Poly::one();
                for f in factors {
                    acc = acc.mul(&f.to_poly()?);
                }
                Ok(acc)
            }
            Expr::IntPow(base, k) => base.to_poly()?.pow(*k),
            Expr::Prim(kind, arg) => Ok(prim_poly(*kind, arg.to_poly()?)),
        }
    }

    pub(crate) fn from_poly(p: &Poly) -> Expr {
        if p.is_zero() {
            return Expr::zero();
        }
        let mut terms: Vec<Expr> = Vec::with_capacity(p.0.len());
        for (mono, coeff) in &p.0 {
            let mut factors: Vec<Expr> = Vec::new();
            if !coeff.is_one() || mono.is_unit() {
                factors.push(Expr::Const(coeff.clone()));
            }
            for (atom, e) in &mono.0 {
                let base = match atom {
                    poly::Atom::Var(v) => Expr::Var(v.clone()),
                    poly::Atom::Prim(kind, arg) => {
                        Expr::Prim(*kind, Box::new(Expr::from_poly(arg)))
                    }
                };
                factors.push(if *e == 1 { base } else { base.pow(*e) });
            }
            terms.push(if factors.len() == 1 {
                factors.pop().unwrap()
            } else {
                Expr::Product(factors)
            });
        }
        if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::Sum(terms)
        }
    }

    /// Canonical normal form. Idempotent; on the primitive-free fragment
    /// structural equality of normal forms decides semantic equality.
    pub fn normalize(&self) -> Result<Expr> {
        Ok(Expr::from_poly(&self.to_poly()?))
    }

    /// Partial derivative with respect to `v`, in normal form.
    pub fn differentiate(&self, v: &str) -> Result<Expr> {
        Ok(Expr::from_poly(&self.to_poly()?.diff(v)))
    }

    /// Substitute a variable by an expression, in normal form.
    pub fn substitute(&self, v: &str, rep: &Expr) -> Result<Expr> {
        Ok(Expr::from_poly(&self.to_poly()?.subst(v, &rep.to_poly()?)?))
    }

    /// IEEE double evaluation at a point binding every variable.
    pub fn eval(&self, point: &BTreeMap<String, f64>) -> Result<f64> {
        self.to_poly()?.eval_f64(point)
    }

    /// Exact division in the Laurent ring: `Some(q)` with `self = q·d`
    /// when the quotient exists, `None` otherwise.
    pub fn div_exact(&self, d: &Expr) -> Option<Expr> {
        let p = self.to_poly().ok()?;
        let d = d.to_poly().ok()?;
        p.div_exact(&d).map(|q| Expr::from_poly(&q))
    }

    /// Exact rational evaluation; `None` when a primitive atom occurs.
    pub fn eval_exact(
        &self,
        point: &BTreeMap<String, BigRational>,
    ) -> Result<Option<BigRational>> {
        self.to_poly()?.eval_exact(point)
    }

    /// Free variables, sorted.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        if let Ok(p) = self.to_poly() {
            p.collect_vars(&mut out);
        } else {
            collect_tree_vars(self, &mut out);
        }
        out
    }

    pub fn is_structural_zero(&self) -> bool {
        matches!(self.to_poly(), Ok(p) if p.is_zero())
    }

    pub fn contains_prim(&self) -> bool {
        match self.to_poly() {
            Ok(p) => p.contains_prim(),
            Err(_) => true,
        }
    }
}

/// Simultaneous substitution of several variables, in normal form.
pub fn substitute_many(e: &Expr, binds: &[(String, Expr)]) -> Result<Expr> {
    let mut reps = BTreeMap::new();
    for (name, rep) in binds {
        reps.insert(name.clone(), rep.to_poly()?);
    }
    Ok(Expr::from_poly(&e.to_poly()?.subst_many(&reps)?))
}

fn collect_tree_vars(e: &Expr, out: &mut BTreeSet<String>) {
    match e {
        Expr::Const(_) => {}
        Expr::Var(v) => {
            out.insert(v.clone());
        }
        Expr::Sum(xs) | Expr::Product(xs) => xs.iter().for_each(|x| collect_tree_vars(x, out)),
        Expr::IntPow(b, _) => collect_tree_vars(b, out),
        Expr::Prim(_, a) => collect_tree_vars(a, out),
    }
}

impl std::ops::Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        Expr::Sum(vec![self.clone(), rhs.clone()])
    }
}

impl std::ops::Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        Expr::Sum(vec![self.clone(), -rhs])
    }
}

impl std::ops::Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        Expr::Product(vec![self.clone(), rhs.clone()])
    }
}

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Product(vec![Expr::int(-1), self.clone()])
    }
}

fn fmt_rational(c: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c.denom().is_one() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if c.is_negative() {
                    write!(f, "(")?;
                    fmt_rational(c, f)?;
                    write!(f, ")")
                } else {
                    fmt_rational(c, f)
                }
            }
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Sum(terms) => {
                if terms.is_empty() {
                    return write!(f, "0");
                }
                write!(f, "(")?;
                for (i, t) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, ")")
            }
            Expr::Product(factors) => {
                if factors.is_empty() {
                    return write!(f, "1");
                }
                for (i, x) in factors.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
            Expr::IntPow(base, k) => write!(f, "{base}^{k}"),
            Expr::Prim(kind, arg) => write!(f, "{}({})", kind.name(), arg),
        }
    }
}

/// Sampled witness of a nonzero value.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Witness {
    /// Point as (variable, exact rational) pairs, rationals rendered `p/q`.
    pub point: Vec<(String, String)>,
    /// Value at the point (exact rational when available, float otherwise).
    pub value: String,
}

/// Outcome of the three-valued zero test.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ZeroVerdict {
    /// Proved exactly: the normal form is the zero polynomial.
    Zero,
    /// A point where the expression is definitely nonzero.
    NonZero { witness: Witness },
    /// Sampling was inconclusive (primitive atoms, all residuals tiny).
    Unknown,
}

impl ZeroVerdict {
    pub fn is_zero(&self) -> bool {
        matches!(self, ZeroVerdict::Zero)
    }

    pub fn is_nonzero(&self) -> bool {
        matches!(self, ZeroVerdict::NonZero { .. })
    }
}

fn rat_repr(c: &BigRational) -> String {
    if c.denom().is_one() {
        format!("{}", c.numer())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Seeded sample point with coordinates in `[-2,-0.1] ∪ [0.1, 2]`,
/// exact rationals with denominator 10.
fn sample_point(rng: &mut ChaCha8Rng, vars: &BTreeSet<String>) -> BTreeMap<String, BigRational> {
    vars.iter()
        .map(|v| {
            let k: i64 = rng.gen_range(1..=20);
            let sign: bool = rng.gen();
            let num = if sign { k } else { -k };
            (
                v.clone(),
                BigRational::new(BigInt::from(num), BigInt::from(10)),
            )
        })
        .collect()
}

fn to_f64_point(p: &BTreeMap<String, BigRational>) -> BTreeMap<String, f64> {
    p.iter()
        .map(|(k, v)| (k.clone(), v.to_f64().unwrap()))
        .collect()
}

fn witness_at(point: &BTreeMap<String, BigRational>, value: String) -> Witness {
    Witness {
        point: point.iter().map(|(k, v)| (k.clone(), rat_repr(v))).collect(),
        value,
    }
}

/// Three-valued zero test.
///
/// `Zero` is returned only when the normal form is structurally zero.
/// Otherwise the expression is sampled at [`SAMPLE_POINTS`] seeded points; a
/// primitive-free expression is additionally decided exactly, so `Unknown`
/// never occurs on the Laurent-polynomial fragment.
pub fn is_zero(e: &Expr, sampler_seed: u64) -> ZeroVerdict {
    let poly = match e.to_poly() {
        Ok(p) => p,
        // Unnormalizable input (negative power of a non-monomial): sample the
        // tree numerically below through eval; conservative fallback.
        Err(_) => return ZeroVerdict::Unknown,
    };
    if poly.is_zero() {
        return ZeroVerdict::Zero;
    }
    let mut vars = BTreeSet::new();
    poly.collect_vars(&mut vars);
    let mut rng = ChaCha8Rng::seed_from_u64(sampler_seed);
    let prim_free = !poly.contains_prim();

    for _ in 0..SAMPLE_POINTS {
        let point = sample_point(&mut rng, &vars);
        if prim_free {
            match poly.eval_exact(&point) {
                Ok(Some(v)) if !v.is_zero() => {
                    return ZeroVerdict::NonZero {
                        witness: witness_at(&point, rat_repr(&v)),
                    };
                }
                _ => {}
            }
        } else if let Ok(v) = poly.eval_f64(&to_f64_point(&point)) {
            if v.abs() > SAMPLE_TOLERANCE {
                return ZeroVerdict::NonZero {
                    witness: witness_at(&point, format!("{v:?}")),
                };
            }
        }
    }

    if prim_free {
        // A nonzero polynomial cannot vanish on a large enough integer grid;
        // walk one deterministically to produce an exact witness.
        if let Some(w) = grid_witness(&poly, &vars) {
            return ZeroVerdict::NonZero { witness: w };
        }
    }
    ZeroVerdict::Unknown
}

fn grid_witness(poly: &Poly, vars: &BTreeSet<String>) -> Option<Witness> {
    let vars: Vec<&String> = vars.iter().collect();
    if vars.is_empty() {
        // Nonzero constant.
        let v = poly.eval_exact(&BTreeMap::new()).ok()??;
        return Some(witness_at(&BTreeMap::new(), rat_repr(&v)));
    }
    // Degree bound per variable over the support (absolute exponents cover
    // the Laurent case after clearing).
    let bound = 8usize.max(poly.0.len() + 2);
    let mut idx = vec![1u32; vars.len()];
    loop {
        let point: BTreeMap<String, BigRational> = vars
            .iter()
            .zip(&idx)
            .map(|(v, k)| ((*v).clone(), BigRational::from_integer(BigInt::from(*k))))
            .collect();
        if let Ok(Some(v)) = poly.eval_exact(&point) {
            if !v.is_zero() {
                return Some(witness_at(&point, rat_repr(&v)));
            }
        }
        // Advance odometer.
        let mut carry = true;
        for slot in idx.iter_mut() {
            if carry {
                *slot += 1;
                if *slot as usize > bound {
                    *slot = 1;
                } else {
                    carry = false;
                }
            }
        }
        if carry {
            return None;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Expr {
        Expr::var("x")
    }
    fn y() -> Expr {
        Expr::var("y")
    }
    fn r() -> Expr {
        Expr::var("r")
    }
    fn pt(binds: &[(&str, f64)]) -> BTreeMap<String, f64> {
        binds.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn normalize_ring_identity() {
        // x*(x+1) - x^2 - x -> 0
        let e = &(&x() * &(&x() + &Expr::one())) - &(&x().pow(2) + &x());
        assert_eq!(e.normalize().unwrap(), Expr::zero());
    }

    #[test]
    fn normalize_laurent() {
        // r * r^-1 -> 1
        let e = &r() * &r().pow(-1);
        assert_eq!(e.normalize().unwrap(), Expr::one());
    }

    #[test]
    fn normalize_prim_atom_ring() {
        // sin(x)^2 + sin(x)*(1 - sin(x)) - sin(x) -> 0
        let s = x().sin();
        let e = &(&s.pow(2) + &(&s * &(&Expr::one() - &s))) - &s;
        assert_eq!(e.normalize().unwrap(), Expr::zero());
    }

    #[test]
    fn normalize_idempotent() {
        let e = &(&x() + &y()).pow(3) - &(&x() * &y().pow(-2));
        let n1 = e.normalize().unwrap();
        let n2 = n1.normalize().unwrap();
        assert_eq!(n1, n2);
    }

    #[test]
    fn normalize_zero_inverse_errors() {
        let e = (&x() - &x()).pow(-1);
        assert_eq!(e.normalize(), Err(Error::DivisionByZero));
    }

    #[test]
    fn differentiate_examples() {
        // d(x^2 y)/dx = 2xy
        let e = &x().pow(2) * &y();
        let d = e.differentiate("x").unwrap();
        let expect = (&(&Expr::int(2) * &x()) * &y()).normalize().unwrap();
        assert_eq!(d, expect);
        // d(r^-1)/dr = -r^-2
        let d = r().pow(-1).differentiate("r").unwrap();
        assert_eq!(d, (-&r().pow(-2)).normalize().unwrap());
        // d(sin(xy))/dx = y cos(xy)
        let e = (&x() * &y()).sin();
        let d = e.differentiate("x").unwrap();
        let expect = (&y() * &(&x() * &y()).cos()).normalize().unwrap();
        assert_eq!(d, expect);
    }

    #[test]
    fn differentiate_finite_difference() {
        let e = (&x() * &y()).sin();
        let d = e.differentiate("x").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let px: f64 = rng.gen_range(0.2..1.5);
            let py: f64 = rng.gen_range(0.2..1.5);
            let h = 1e-5;
            let fd = (e.eval(&pt(&[("x", px + h), ("y", py)])).unwrap()
                - e.eval(&pt(&[("x", px - h), ("y", py)])).unwrap())
                / (2.0 * h);
            let dv = d.eval(&pt(&[("x", px), ("y", py)])).unwrap();
            assert!((fd - dv).abs() / dv.abs().max(1.0) < 1e-6, "{fd} vs {dv}");
        }
    }

    #[test]
    fn partials_commute() {
        let e = &(&x().pow(2) * &y()) + &(&x() * &y()).sin();
        let dxy = e
            .differentiate("x")
            .unwrap()
            .differentiate("y")
            .unwrap();
        let dyx = e
            .differentiate("y")
            .unwrap()
            .differentiate("x")
            .unwrap();
        assert_eq!(dxy, dyx);
    }

    #[test]
    fn eval_examples() {
        let e = &x().pow(2) + &y();
        assert_eq!(e.eval(&pt(&[("x", 2.0), ("y", 1.0)])).unwrap(), 5.0);
        assert_eq!(r().pow(-1).eval(&pt(&[("r", 2.0)])).unwrap(), 0.5);
        assert_eq!(Expr::zero().exp().eval(&pt(&[])).unwrap(), 1.0);
        assert_eq!(
            (&x() + &y()).eval(&pt(&[("x", 1.0)])),
            Err(Error::UnboundVariable("y".into()))
        );
        assert_eq!(
            r().pow(-1).eval(&pt(&[("r", 0.0)])),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn is_zero_trivial() {
        assert_eq!(is_zero(&(&x() - &x()), 42), ZeroVerdict::Zero);
        assert!(is_zero(&(&x() * &y()), 42).is_nonzero());
    }

    #[test]
    fn is_zero_prim_identity_unknown() {
        // sin^2 + cos^2 - 1 is not decided, but all residuals are tiny.
        let e = &(&x().sin().pow(2) + &x().cos().pow(2)) - &Expr::one();
        assert_eq!(is_zero(&e, 42), ZeroVerdict::Unknown);
        let vars = e.variables();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..SAMPLE_POINTS {
            let p = sample_point(&mut rng, &vars);
            let v = e.eval(&to_f64_point(&p)).unwrap();
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn is_zero_tiny_polynomial_is_nonzero() {
        // Coefficients below the float tolerance are still decided exactly.
        let e = &Expr::rat(1, 1_000_000_000) * &x();
        assert!(is_zero(&e, 42).is_nonzero());
    }

    #[test]
    fn eval_ring_homomorphism() {
        let a = &x().pow(2) + &y();
        let b = &y() - &Expr::int(3);
        let c = &x() * &y();
        let combined = &(&a * &b) + &c;
        let p = pt(&[("x", 1.3), ("y", -0.7)]);
        let lhs = combined.eval(&p).unwrap();
        let rhs = a.eval(&p).unwrap() * b.eval(&p).unwrap() + c.eval(&p).unwrap();
        assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
    }

    #[test]
    fn display_roundtrips_through_normalize() {
        let e = &(&x() + &y()).pow(2) - &(&x() * &(&x() * &y()).sin());
        let n = e.normalize().unwrap();
        let shown = format!("{n}");
        assert!(shown.contains("sin"));
    }
}
