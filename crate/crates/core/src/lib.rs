//! Numerical verification of trace inequalities for products of matrix
//! powers.
//!
//! The crate provides a small dense complex linear-algebra substrate
//! ([`matrix`], [`eig`], [`calculus`]), one checker per inequality
//! ([`checkers`]), verifiers for the combinatorial facts behind the 2x2
//! chain bound ([`lemmas`]), seeded instance generators ([`sampling`]), a
//! falsification harness for the open chain conjectures ([`search`]) and a
//! property-suite driver ([`suite`]).
//!
//! ```
//! use trace_ineq::search::reproduce_counterexample;
//!
//! let z = reproduce_counterexample().unwrap();
//! assert!(z.im > 0.0026 && z.im < 0.0027);
//! ```

pub mod calculus;
pub mod checkers;
pub mod eig;
pub mod error;
pub mod lemmas;
pub mod matrix;
pub mod sampling;
pub mod search;
pub mod suite;

pub use calculus::{fractional_power, matrix_function, Domain, ScalarFunction};
pub use checkers::{trace_chain, InequalityReport, Verdict, WeightVector};
pub use eig::{hermitian_eig, SpectralDecomposition};
pub use error::{Error, Result};
pub use matrix::{matmul, trace, ComplexMatrix, HermitianMatrix, PsdMatrix};
pub use num_complex::Complex64;
pub use sampling::Seed;
