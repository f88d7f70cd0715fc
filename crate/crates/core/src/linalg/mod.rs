//! Dense and sparse kernels shared by the solvers.
//!
//! All reductions run in a fixed order so that traces are reproducible run to run.

mod csr;
mod dense;
mod qr;
mod svd;
mod triangular;
pub mod vector;

pub use csr::SparseMatrixCsr;
pub use dense::DenseMatrix;
pub use qr::ThinQr;
pub use svd::svd_extrema;
pub use triangular::back_substitute;
