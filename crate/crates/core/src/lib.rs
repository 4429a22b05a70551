//! Inexact Uzawa iterations with variable relaxation parameters for
//! generalized saddle-point systems, together with the sparse kernels,
//! preconditioners, problem generators and convergence-theory checks they
//! rely on.

pub mod bench;
pub mod dense;
pub mod error;
pub mod precond;
pub mod problems;
pub mod saddle;
pub mod sparse;
pub mod theory;
pub mod uzawa;

pub use error::{Error, Result};
pub use saddle::{SaddleProblem, SchurOperator};
pub use sparse::CsrMatrix;
pub use uzawa::{solve, SolveReport, StopRule, Theta, UzawaConfig, Variant};
