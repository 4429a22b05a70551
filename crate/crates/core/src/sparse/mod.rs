//! Compressed sparse row matrices, vector kernels and Matrix Market I/O.

mod csr;
pub mod mtx;
pub mod vector;

pub use csr::CsrMatrix;
pub use vector::{axpy, axpy_in_place, dot, norm2};
