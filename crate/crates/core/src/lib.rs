//! Non-termination proofs for logic programs with integer arithmetic.
//!
//! The pipeline builds a moded SLD-tree for a class of queries, finds paths
//! that can be repeated forever, derives integer constraints that keep the
//! loop's arithmetic conditions true, and solves them by bit-blasting to SAT.

pub mod analysis;
pub mod constraints;
pub mod engine;
pub mod nonterm;
pub mod sat;
pub mod scalar;
pub mod syntax;

pub use scalar::Coefficient;

/// Polynomials with arbitrary-precision coefficients, used throughout constraint generation.
pub type IntPoly = constraints::Poly<num_bigint::BigInt>;
/// Polynomials with machine-word coefficients, for fast sampling.
pub type SmallPoly = constraints::Poly<i64>;
/// Polynomials with 128-bit coefficients.
pub type WidePoly = constraints::Poly<i128>;
