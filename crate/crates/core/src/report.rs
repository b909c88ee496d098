//! Report types shared by every verifier.
//!
//! A verifier never answers with a bare boolean: it returns a
//! [`StructureReport`] listing one [`AxiomCheck`] per identity it evaluated,
//! each with a three-valued verdict and, for failures, a witness.

use serde::Serialize;

use crate::expr::{is_zero, Expr, ZeroVerdict};

/// Overall outcome of a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Unknown,
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

/// One verified identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomCheck {
    /// Short stable identifier of what the axiom states.
    pub name: String,
    /// Stable anchor tag for cross-referencing reports.
    pub anchor: String,
    #[serde(flatten)]
    pub verdict: ZeroVerdict,
    /// True when the verdict came from numeric sampling rather than an
    /// exact normal-form decision.
    pub sampled: bool,
}

/// Report for one structure or operation check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub kind: String,
    pub axioms: Vec<AxiomCheck>,
    pub overall: Verdict,
    /// Seed used for any randomized residual sampling inside this report.
    pub seed: u64,
}

impl StructureReport {
    pub fn new(kind: &str, seed: u64) -> Self {
        StructureReport {
            kind: kind.to_string(),
            axioms: Vec::new(),
            overall: Verdict::Pass,
            seed,
        }
    }

    /// Records a residual expression that must normalize (or sample) to zero.
    pub fn check_residual(&mut self, name: &str, anchor: &str, residual: &Expr) {
        let verdict = is_zero(residual, self.seed);
        let sampled = !matches!(verdict, ZeroVerdict::Zero) || residual.contains_prim();
        self.push(AxiomCheck {
            name: name.to_string(),
            anchor: anchor.to_string(),
            verdict,
            sampled,
        });
    }

    /// Records a batch of residuals under one axiom name; the axiom passes
    /// when every residual is zero, and the first offender is the witness.
    pub fn check_residuals<'a, I>(&mut self, name: &str, anchor: &str, residuals: I)
    where
        I: IntoIterator<Item = &'a Expr>,
    {
        let mut verdict = ZeroVerdict::Zero;
        let mut sampled = false;
        for r in residuals {
            let v = is_zero(r, self.seed);
            sampled = sampled || r.contains_prim();
            match (&verdict, &v) {
                (_, ZeroVerdict::NonZero { .. }) => {
                    verdict = v;
                    break;
                }
                (ZeroVerdict::Zero, ZeroVerdict::Unknown) => verdict = ZeroVerdict::Unknown,
                _ => {}
            }
        }
        self.push(AxiomCheck {
            name: name.to_string(),
            anchor: anchor.to_string(),
            verdict,
            sampled,
        });
    }

    pub fn push(&mut self, axiom: AxiomCheck) {
        match axiom.verdict {
            ZeroVerdict::NonZero { .. } => self.overall = Verdict::Fail,
            ZeroVerdict::Unknown => {
                if self.overall == Verdict::Pass {
                    self.overall = Verdict::Unknown;
                }
            }
            ZeroVerdict::Zero => {}
        }
        self.axioms.push(axiom);
    }

    /// Merges a sub-report as a named group of axioms.
    pub fn absorb(&mut self, prefix: &str, other: StructureReport) {
        for mut ax in other.axioms {
            ax.name = format!("{prefix}.{}", ax.name);
            self.push(ax);
        }
    }

    pub fn passed(&self) -> bool {
        self.overall == Verdict::Pass
    }

    pub fn axiom(&self, name: &str) -> Option<&AxiomCheck> {
        self.axioms.iter().find(|a| a.name == name)
    }
}
