//! Exact modular verification of sums-of-determinants representations.
//!
//! A general form of degree `d` in `n` variables is a sum of `s`
//! determinants of matrices of forms with a fixed homogeneous degree
//! matrix `A` iff the submaximal minors of `s` general such matrices span
//! the degree-`d` forms. This crate computes that span exactly over a prime
//! field, replays the inductive argument for `(k-1) x k` ternary matrices,
//! and evaluates the associated dimension counts.

pub mod cli;
pub mod degmat;
pub mod dimcalc;
pub mod field;
pub mod formmat;
pub mod idealrank;
pub mod poly;
pub mod verify;

pub use degmat::{DegreeMatrix, NegativeClass, Transform};
pub use field::{CoefficientMatrix, IncrementalReducer, PrimeField};
pub use formmat::FormMatrix;
pub use idealrank::{GeneratorSet, RankReport};
pub use poly::{Form, PolyRing};
pub use verify::{CheckVerdict, Outcome, VerifyConfig};
