//! Dense complex linear algebra for the small operators in this crate.

mod eigen;
mod entropy;
mod matrix;

pub use eigen::{hermitian_eigen, EigenDecomposition};
pub use entropy::{entropy_of_spectrum, relative_entropy, von_neumann_entropy, DEFAULT_LOG_BASE};
pub use matrix::{c64, kron, partial_trace, ComplexMatrix, I, ONE, ZERO};
