//! Exact symbolic coordinate calculus on trivialized line bundles.
//!
//! The crate is organized around a small exact expression engine ([`expr`])
//! on top of which the usual chart calculus ([`tensor`]), the line-bundle
//! calculus of derivations, jets and Atiyah tensors ([`atiyah`]), the
//! homogenization correspondence ([`homogen`]), frame-based Lie algebroids
//! and Spencer operators ([`algebroid`]), certified geometric structures
//! ([`structures`]) and explicit chart groupoids ([`groupoid`]) are built.
//!
//! Everything is exact: coefficients are arbitrary-precision rationals,
//! identities are decided on a canonical normal form, and every verifier
//! returns a report with per-axiom verdicts instead of a bare boolean.

pub mod algebroid;
pub mod atiyah;
pub mod error;
pub mod expr;
pub mod gallery;
pub mod groupoid;
pub mod homogen;
pub mod report;
pub mod sample;
pub mod structures;
pub mod tensor;

pub use error::Error;
pub use expr::{Chart, Expr, PrimKind, ZeroVerdict};

/// Convenient result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
