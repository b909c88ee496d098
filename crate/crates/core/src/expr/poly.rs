//! Internal normal form: multivariate Laurent polynomials over the rationals,
//! with opaque primitive calls (`sin`, `cos`, `exp`) treated as extra atoms.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num::{BigInt, BigRational, One, ToPrimitive, Zero};

use crate::error::Error;
use crate::Result;

/// Primitive function kinds admitted as opaque atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PrimKind {
    Sin,
    Cos,
    Exp,
}

impl PrimKind {
    pub fn name(self) -> &'static str {
        match self {
            PrimKind::Sin => "sin",
            PrimKind::Cos => "cos",
            PrimKind::Exp => "exp",
        }
    }

    fn eval(self, x: f64) -> f64 {
        match self {
            PrimKind::Sin => x.sin(),
            PrimKind::Cos => x.cos(),
            PrimKind::Exp => x.exp(),
        }
    }
}

/// A multiplicative atom: a variable or a normalized primitive call.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Atom {
    Var(String),
    Prim(PrimKind, Poly),
}

/// A monomial: sorted list of (atom, exponent), exponents nonzero.
/// Negative exponents are allowed (Laurent fragment).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Mono(pub Vec<(Atom, i64)>);

impl Mono {
    pub fn unit() -> Self {
        Mono(Vec::new())
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    fn mul(&self, other: &Mono) -> Mono {
        let mut out: Vec<(Atom, i64)> = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let e = self.0[i].1 + other.0[j].1;
                    if e != 0 {
                        out.push((self.0[i].0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Mono(out)
    }

    fn invert(&self) -> Mono {
        Mono(self.0.iter().map(|(a, e)| (a.clone(), -e)).collect())
    }

    /// Graded-lex monomial order; only meaningful on nonnegative-exponent
    /// monomials (where it is multiplication-compatible and well-founded).
    fn cmp_grlex(&self, other: &Mono) -> Ordering {
        let da: i64 = self.0.iter().map(|(_, e)| e).sum();
        let db: i64 = other.0.iter().map(|(_, e)| e).sum();
        if da != db {
            return da.cmp(&db);
        }
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some((_, e)), None) => return e.cmp(&0),
                (None, Some((_, f))) => return 0.cmp(f),
                (Some((a, e)), Some((b, f))) => match a.cmp(b) {
                    Ordering::Less => return e.cmp(&0),
                    Ordering::Greater => return 0.cmp(f),
                    Ordering::Equal => {
                        if e != f {
                            return e.cmp(f);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }

    /// Componentwise divisibility for nonnegative-exponent monomials.
    fn divides(&self, other: &Mono) -> bool {
        self.0.iter().all(|(a, e)| {
            other
                .0
                .iter()
                .find(|(b, _)| b == a)
                .map(|(_, f)| f >= e)
                .unwrap_or(false)
        })
    }
}

/// Canonical polynomial: sorted term list with nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Poly(pub Vec<(Mono, BigRational)>);

fn collect(map: BTreeMap<Mono, BigRational>) -> Poly {
    Poly(map.into_iter().filter(|(_, c)| !c.is_zero()).collect())
}

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly(vec![(Mono::unit(), c)])
        }
    }

    pub fn var(name: &str) -> Self {
        Poly(vec![(
            Mono(vec![(Atom::Var(name.to_string()), 1)]),
            BigRational::one(),
        )])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    #[cfg(test)]
    pub fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0[0].0.is_unit() && self.0[0].1.is_one()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut map: BTreeMap<Mono, BigRational> = self.0.iter().cloned().collect();
        for (m, c) in &other.0 {
            let entry = map.entry(m.clone()).or_insert_with(BigRational::zero);
            *entry += c;
        }
        collect(map)
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|(m, c)| (m.clone(), -c.clone())).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut map: BTreeMap<Mono, BigRational> = BTreeMap::new();
        for (m1, c1) in &self.0 {
            for (m2, c2) in &other.0 {
                let m = m1.mul(m2);
                let entry = map.entry(m).or_insert_with(BigRational::zero);
                *entry += c1 * c2;
            }
        }
        collect(map)
    }

    pub fn pow(&self, k: i64) -> Result<Poly> {
        if k == 0 {
            return Ok(Poly::one());
        }
        if k > 0 {
            let mut base = self.clone();
            let mut exp = k as u64;
            let mut acc = Poly::one();
            while exp > 0 {
                if exp & 1 == 1 {
                    acc = acc.mul(&base);
                }
                exp >>= 1;
                if exp > 0 {
                    base = base.mul(&base);
                }
            }
            return Ok(acc);
        }
        // Negative power: only a single nonzero term is invertible.
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.0.len() != 1 {
            return Err(Error::NonMonomialInverse(format!("{self:?}"), k));
        }
        let (m, c) = &self.0[0];
        let inv = Poly(vec![(m.invert(), c.recip())]);
        inv.pow(-k)
    }

    /// Derivative of an atom with respect to a variable.
    fn atom_diff(atom: &Atom, v: &str) -> Poly {
        match atom {
            Atom::Var(w) => {
                if w == v {
                    Poly::one()
                } else {
                    Poly::zero()
                }
            }
            Atom::Prim(kind, arg) => {
                let darg = arg.diff(v);
                if darg.is_zero() {
                    return Poly::zero();
                }
                let outer = match kind {
                    PrimKind::Sin => prim_poly(PrimKind::Cos, arg.clone()),
                    PrimKind::Cos => prim_poly(PrimKind::Sin, arg.clone()).neg(),
                    PrimKind::Exp => prim_poly(PrimKind::Exp, arg.clone()),
                };
                outer.mul(&darg)
            }
        }
    }

    pub fn diff(&self, v: &str) -> Poly {
        let mut acc = Poly::zero();
        for (mono, coeff) in &self.0 {
            for (idx, (atom, e)) in mono.0.iter().enumerate() {
                let d_atom = Poly::atom_diff(atom, v);
                if d_atom.is_zero() {
                    continue;
                }
                // coeff * e * atom^(e-1) * rest * d_atom
                let mut rest: Vec<(Atom, i64)> = Vec::with_capacity(mono.0.len());
                for (j, (a, f)) in mono.0.iter().enumerate() {
                    let f = if j == idx { f - 1 } else { *f };
                    if f != 0 {
                        rest.push((a.clone(), f));
                    }
                }
                let c = coeff * BigRational::from_integer(BigInt::from(*e));
                let term = Poly(vec![(Mono(rest), c)]).mul(&d_atom);
                acc = acc.add(&term);
            }
        }
        acc
    }

    /// Substitute `v` by `rep` everywhere, including inside primitive
    /// arguments. Fails when a negative power of a non-monomial appears.
    pub fn subst(&self, v: &str, rep: &Poly) -> Result<Poly> {
        let mut acc = Poly::zero();
        for (mono, coeff) in &self.0 {
            let mut term = Poly::constant(coeff.clone());
            for (atom, e) in &mono.0 {
                let base = match atom {
                    Atom::Var(w) if w == v => rep.clone(),
                    Atom::Var(w) => Poly::var(w),
                    Atom::Prim(kind, arg) => prim_poly(*kind, arg.subst(v, rep)?),
                };
                term = term.mul(&base.pow(*e)?);
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// Simultaneous substitution of several variables.
    pub fn subst_many(&self, reps: &BTreeMap<String, Poly>) -> Result<Poly> {
        let mut acc = Poly::zero();
        for (mono, coeff) in &self.0 {
            let mut term = Poly::constant(coeff.clone());
            for (atom, e) in &mono.0 {
                let base = match atom {
                    Atom::Var(w) => reps.get(w).cloned().unwrap_or_else(|| Poly::var(w)),
                    Atom::Prim(kind, arg) => prim_poly(*kind, arg.subst_many(reps)?),
                };
                term = term.mul(&base.pow(*e)?);
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    pub fn contains_prim(&self) -> bool {
        self.0
            .iter()
            .any(|(m, _)| m.0.iter().any(|(a, _)| matches!(a, Atom::Prim(..))))
    }

    pub fn collect_vars(&self, out: &mut std::collections::BTreeSet<String>) {
        for (m, _) in &self.0 {
            for (a, _) in &m.0 {
                match a {
                    Atom::Var(v) => {
                        out.insert(v.clone());
                    }
                    Atom::Prim(_, arg) => arg.collect_vars(out),
                }
            }
        }
    }

    pub fn eval_f64(&self, point: &BTreeMap<String, f64>) -> Result<f64> {
        let mut total = 0.0;
        for (mono, coeff) in &self.0 {
            let mut term = coeff.to_f64().ok_or(Error::DivisionByZero)?;
            for (atom, e) in &mono.0 {
                let base = match atom {
                    Atom::Var(v) => *point
                        .get(v)
                        .ok_or_else(|| Error::UnboundVariable(v.clone()))?,
                    Atom::Prim(kind, arg) => kind.eval(arg.eval_f64(point)?),
                };
                if base == 0.0 && *e < 0 {
                    return Err(Error::DivisionByZero);
                }
                term *= base.powi(*e as i32);
            }
            total += term;
        }
        Ok(total)
    }

    /// Exact rational evaluation; `Ok(None)` when a primitive atom occurs.
    pub fn eval_exact(&self, point: &BTreeMap<String, BigRational>) -> Result<Option<BigRational>> {
        let mut total = BigRational::zero();
        for (mono, coeff) in &self.0 {
            let mut term = coeff.clone();
            for (atom, e) in &mono.0 {
                let base = match atom {
                    Atom::Var(v) => point
                        .get(v)
                        .ok_or_else(|| Error::UnboundVariable(v.clone()))?
                        .clone(),
                    Atom::Prim(..) => return Ok(None),
                };
                if base.is_zero() {
                    if *e < 0 {
                        return Err(Error::DivisionByZero);
                    }
                    term = BigRational::zero();
                    break;
                }
                let p = if *e < 0 { base.recip() } else { base };
                for _ in 0..e.unsigned_abs() {
                    term *= &p;
                }
            }
            total += term;
        }
        Ok(Some(total))
    }

    /// Exponent range per atom, as (min, max) over the support.
    fn exponent_ranges(&self) -> BTreeMap<Atom, (i64, i64)> {
        let mut out: BTreeMap<Atom, (i64, i64)> = BTreeMap::new();
        for (m, _) in &self.0 {
            for (a, e) in &m.0 {
                let entry = out.entry(a.clone()).or_insert((0, 0));
                entry.0 = entry.0.min(*e);
                entry.1 = entry.1.max(*e);
            }
        }
        out
    }

    /// Multiply by atom powers so that all exponents become nonnegative.
    /// Returns the polynomialized value and the clearing monomial.
    fn clear_denominators(&self) -> (Poly, Mono) {
        let ranges = self.exponent_ranges();
        let shift: Vec<(Atom, i64)> = ranges
            .into_iter()
            .filter(|(_, (lo, _))| *lo < 0)
            .map(|(a, (lo, _))| (a, -lo))
            .collect();
        let shift = Mono(shift);
        let shifted = Poly(
            self.0
                .iter()
                .map(|(m, c)| (m.mul(&shift), c.clone()))
                .collect(),
        );
        (shifted, shift)
    }

    /// Monomial content: per-atom minimum exponent over the support, where an
    /// atom absent from a term counts as exponent zero.
    fn content_mono(&self) -> Mono {
        let mut atoms: BTreeMap<Atom, i64> = BTreeMap::new();
        for (m, _) in &self.0 {
            for (a, e) in &m.0 {
                atoms.entry(a.clone()).or_insert(*e);
            }
        }
        for (m, _) in &self.0 {
            for (a, lo) in atoms.iter_mut() {
                let e = m
                    .0
                    .iter()
                    .find(|(b, _)| b == a)
                    .map(|(_, e)| *e)
                    .unwrap_or(0);
                *lo = (*lo).min(e);
            }
        }
        Mono(atoms.into_iter().filter(|(_, e)| *e != 0).collect())
    }

    /// Exact division: returns `Some(q)` with `self = q * d` when the
    /// division is exact in the Laurent ring, `None` otherwise.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        // Monomials are units in the Laurent ring: strip them from both sides
        // and divide the content-free parts in the honest polynomial ring.
        let (p, shift_p) = self.clear_denominators();
        let (q, shift_q) = d.clear_denominators();
        let content_p = p.content_mono();
        let content_q = q.content_mono();
        let mut p = Poly(
            p.0.iter()
                .map(|(m, c)| (m.mul(&content_p.invert()), c.clone()))
                .collect(),
        );
        let q = Poly(
            q.0.iter()
                .map(|(m, c)| (m.mul(&content_q.invert()), c.clone()))
                .collect(),
        );
        // Leading term of the divisor in graded lex.
        let (lt_m, lt_c) = q
            .0
            .iter()
            .max_by(|(a, _), (b, _)| a.cmp_grlex(b))
            .cloned()
            .unwrap();
        let mut quot: Vec<(Mono, BigRational)> = Vec::new();
        while !p.is_zero() {
            let (pm, pc) = p
                .0
                .iter()
                .max_by(|(a, _), (b, _)| a.cmp_grlex(b))
                .cloned()
                .unwrap();
            if !lt_m.divides(&pm) {
                return None;
            }
            let tm = pm.mul(&lt_m.invert());
            let tc = pc / &lt_c;
            let t = Poly(vec![(tm.clone(), tc.clone())]);
            p = p.sub(&t.mul(&q));
            quot.push((tm, tc));
        }
        // Reattach the stripped monomial factor.
        let fix = content_p
            .mul(&content_q.invert())
            .mul(&shift_q)
            .mul(&shift_p.invert());
        let mut map: BTreeMap<Mono, BigRational> = BTreeMap::new();
        for (m, c) in quot {
            map.insert(m.mul(&fix), c);
        }
        Some(collect(map))
    }
}

/// Normalized polynomial holding a single primitive atom, with constant
/// arguments folded exactly where the identity is unconditional.
pub fn prim_poly(kind: PrimKind, arg: Poly) -> Poly {
    if arg.is_zero() {
        return match kind {
            PrimKind::Sin => Poly::zero(),
            PrimKind::Cos | PrimKind::Exp => Poly::one(),
        };
    }
    Poly(vec![(
        Mono(vec![(Atom::Prim(kind, arg), 1)]),
        BigRational::one(),
    )])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(name: &str) -> Poly {
        Poly::var(name)
    }

    #[test]
    fn ring_identities() {
        let x = v("x");
        let y = v("y");
        // x*(x+1) - x^2 - x = 0
        let e = x
            .mul(&x.add(&Poly::one()))
            .sub(&x.pow(2).unwrap())
            .sub(&x);
        assert!(e.is_zero());
        let p = x.add(&y).mul(&x.sub(&y));
        let q = x.pow(2).unwrap().sub(&y.pow(2).unwrap());
        assert_eq!(p, q);
    }

    #[test]
    fn laurent_cancellation() {
        let r = v("r");
        let e = r.mul(&r.pow(-1).unwrap());
        assert!(e.is_one());
    }

    #[test]
    fn negative_power_errors() {
        assert_eq!(Poly::zero().pow(-1), Err(Error::DivisionByZero));
        let s = v("x").add(&v("y"));
        assert!(matches!(s.pow(-1), Err(Error::NonMonomialInverse(..))));
    }

    #[test]
    fn derivative_laurent() {
        let r = v("r");
        let d = r.pow(-1).unwrap().diff("r");
        assert_eq!(d, r.pow(-2).unwrap().neg());
    }

    #[test]
    fn exact_division() {
        let x = v("x");
        let y = v("y");
        let p = x.pow(2).unwrap().sub(&y.pow(2).unwrap());
        let d = x.add(&y);
        let q = p.div_exact(&d).unwrap();
        assert_eq!(q, x.sub(&y));
        assert!(p.div_exact(&x.add(&Poly::one())).is_none());
        // Laurent: (x - x^-1) / x = 1 - x^-2
        let p = x.sub(&x.pow(-1).unwrap());
        let q = p.div_exact(&x).unwrap();
        assert_eq!(q, Poly::one().sub(&x.pow(-2).unwrap()));
    }

    #[test]
    fn prim_constant_folding() {
        assert!(prim_poly(PrimKind::Exp, Poly::zero()).is_one());
        assert!(prim_poly(PrimKind::Sin, Poly::zero()).is_zero());
        assert!(prim_poly(PrimKind::Cos, Poly::zero()).is_one());
    }
}
