use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("division by zero: negative power of an expression that normalizes to zero")]
    DivisionByZero,
    #[error("negative power of a non-monomial expression is not representable: ({0})^{1}")]
    NonMonomialInverse(String, i64),
    #[error("unbound variable `{0}` in evaluation")]
    UnboundVariable(String),
    #[error("variable `{0}` does not belong to chart `{1}`")]
    UnknownVariable(String, String),
    #[error("chart mismatch: expected `{expected}`, got `{got}`")]
    ChartMismatch { expected: String, got: String },
    #[error("component count {got} does not match expected {expected}")]
    ComponentCount { expected: usize, got: usize },
    #[error("degree {degree} out of range for chart of dimension {dim}")]
    DegreeOutOfRange { degree: usize, dim: usize },
    #[error("index tuple {0:?} is not strictly increasing or out of range")]
    BadIndexTuple(Vec<usize>),
    #[error("contraction slot {slot} out of range for degree {degree}")]
    SlotOutOfRange { slot: usize, degree: usize },
    #[error("arity mismatch: operator of arity {expected} applied to {got} arguments")]
    ArityMismatch { expected: usize, got: usize },
    #[error("arity overflow: bracket of arities {0} and {1} exceeds chart capacity {2}")]
    ArityOverflow(usize, usize, usize),
    #[error("matrix is singular: determinant normalizes to zero")]
    SingularMatrix,
    #[error("inverse is not exactly representable: determinant `{0}` does not divide a cofactor")]
    NonExactInverse(String),
    #[error("form is degenerate: {0}")]
    DegenerateForm(String),
    #[error("biderivation is degenerate: {0}")]
    DegenerateJacobi(String),
    #[error("not a contact form: {0}")]
    NotContact(String),
    #[error("tensor is not homogeneous: {0}")]
    NotHomogeneous(String),
    #[error("missing representation for line-bundle valued cochains")]
    MissingRepresentation,
    #[error("missing right-invariant rule or algebroid data on groupoid `{0}`")]
    MissingRightInvariantRule(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("distinguished variable `{0}` already occurs in the base chart")]
    ReservedVariable(String),
    #[error("multiderivation reconstruction does not reproduce the bracket action")]
    ReconstructionFailed,
}
