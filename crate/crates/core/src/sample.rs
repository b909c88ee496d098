//! Seeded random generators for polynomial test data.
//!
//! Verifiers use these for the randomized section pairs their reports
//! mention; tests and the acceptance suite use them for fuzzed inputs.
//! Everything is deterministic in the seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::expr::{Chart, Expr};
use crate::tensor::{Form, Multivector, Tensor11, VectorField};
use crate::Result;

/// Deterministic generator handle.
pub struct Sampler {
    rng: ChaCha8Rng,
    pub seed: u64,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
        }
    }

    /// Child sampler with a derived seed; used to decouple parallel checks.
    pub fn derive(&self, salt: u64) -> Sampler {
        Sampler::new(self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ salt)
    }

    fn small_int(&mut self) -> i64 {
        self.rng.gen_range(-3..=3)
    }

    /// Random polynomial of total degree at most `max_degree` with small
    /// integer coefficients.
    pub fn poly(&mut self, chart: &Chart, max_degree: usize) -> Expr {
        let n = chart.dim();
        let terms = self.rng.gen_range(1..=3);
        let mut acc = Expr::int(self.small_int());
        for _ in 0..terms {
            let mut term = Expr::int(self.small_int());
            let deg = self.rng.gen_range(0..=max_degree);
            for _ in 0..deg {
                let v = self.rng.gen_range(0..n);
                term = &term * &chart.coord(v);
            }
            acc = &acc + &term;
        }
        acc.normalize().expect("polynomial input")
    }

    pub fn vector_field(&mut self, chart: &Chart, max_degree: usize) -> Result<VectorField> {
        let comps = (0..chart.dim())
            .map(|_| self.poly(chart, max_degree))
            .collect();
        VectorField::new(chart.clone(), comps)
    }

    pub fn form(&mut self, chart: &Chart, degree: usize, max_degree: usize) -> Result<Form> {
        let mut out = Form::zero(chart.clone(), degree)?;
        for idx in increasing_tuples(chart.dim(), degree) {
            out.set(&idx, self.poly(chart, max_degree))?;
        }
        Ok(out)
    }

    pub fn multivector(
        &mut self,
        chart: &Chart,
        degree: usize,
        max_degree: usize,
    ) -> Result<Multivector> {
        let mut out = Multivector::zero(chart.clone(), degree)?;
        for idx in increasing_tuples(chart.dim(), degree) {
            out.set(&idx, self.poly(chart, max_degree))?;
        }
        Ok(out)
    }

    pub fn tensor11(&mut self, chart: &Chart, max_degree: usize) -> Result<Tensor11> {
        let n = chart.dim();
        let matrix = (0..n)
            .map(|_| (0..n).map(|_| self.poly(chart, max_degree)).collect())
            .collect();
        Tensor11::new(chart.clone(), matrix)
    }
}

pub(crate) fn increasing_tuples(dim: usize, k: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = Vec::new();
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
