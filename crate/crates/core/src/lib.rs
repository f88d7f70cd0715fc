//! Preconditioned sketched GMRES.
//!
//! The crate implements the sketched GMRES cycle with truncated, sketch-and-select
//! and full modified Gram–Schmidt Arnoldi bases, the restarted driver, an adaptive
//! truncation strategy driven by the sketched stability estimate `τ̃`, and a classic
//! MGS-GMRES baseline. Every solver emits one [`IterationRecord`] per iteration with
//! the true normwise backward error, `τ̃`, and sketched condition numbers, so that
//! stagnation caused by ill-conditioned Krylov bases can be observed directly.
//!
//! ```
//! use sgmres::{restarted_sgmres, BasisKind, Preconditioner, SketchKind, SketchOperator,
//!              SolveConfig, SparseMatrixCsr};
//!
//! let n = 64;
//! let diag: Vec<f64> = (1..=n).map(|k| k as f64).collect();
//! let a = SparseMatrixCsr::from_diagonal(&diag);
//! let b = vec![1.0; n];
//! let config = SolveConfig { m: 10, t: 2, nrestarts: 20, tol_stop: 1e-14, ..SolveConfig::default() };
//! let sketch = SketchOperator::build(SketchKind::Srht, n, config.sketch_dim(n), 7).unwrap();
//! let id = Preconditioner::identity(n);
//! let result = restarted_sgmres(&a, &b, &config, &id, &id, &sketch).unwrap();
//! assert!(result.records.last().unwrap().backward_error < 1e-12);
//! ```

pub mod basis;
pub mod diagnostics;
mod error;
pub mod io;
pub mod linalg;
pub mod operator;
pub mod precond;
pub mod rng;
pub mod sketch;
pub mod solver;

pub use basis::{BasisKind, KrylovBasis, StepOutcome};
pub use diagnostics::{backward_error, bound_tracker, kappa_estimate, tau_tilde, BoundTrackerRow};
pub use error::{Error, Result};
pub use linalg::{back_substitute, svd_extrema, DenseMatrix, SparseMatrixCsr, ThinQr};
pub use operator::PreconditionedOperator;
pub use precond::{Preconditioner, PreconditionerKind};
pub use sketch::{embedding_distortion, SketchKind, SketchOperator};
pub use solver::{
    adaptive_sgmres_cycle, mgs_gmres, mgs_gmres_observed, restarted_gmres, restarted_sgmres,
    sgmres_cycle, sgmres_cycle_observed, sketched_ls_solve, AdaptiveTruncation, CycleResult,
    IterationRecord, IterationView, SolveConfig, Termination,
};

/// Unit roundoff of IEEE double precision, `2⁻⁵³`.
pub const UNIT_ROUNDOFF: f64 = 1.0 / 9_007_199_254_740_992.0;
