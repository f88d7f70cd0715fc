//! Solver drivers: the sketched GMRES cycle, its adaptive-truncation variant,
//! the restart loop, and the MGS-GMRES baseline.
//!
//! All drivers emit one [`IterationRecord`] per iteration. The restart loop
//! recomputes the true residual `b − A x` at the start of every cycle, so
//! restarting acts as iterative refinement.

mod adaptive;
mod gmres;
mod sketched;

use std::fmt;

pub use adaptive::AdaptiveTruncation;
pub use gmres::{mgs_gmres, mgs_gmres_observed, restarted_gmres};
pub use sketched::{adaptive_sgmres_cycle, restarted_sgmres, sgmres_cycle, sgmres_cycle_observed};

use crate::basis::{BasisKind, KrylovBasis};
use crate::diagnostics::backward_error;
use crate::error::{check_len, Error, Result};
use crate::linalg::{back_substitute, vector, SparseMatrixCsr, ThinQr};
use crate::operator::PreconditionedOperator;
use crate::precond::Preconditioner;
use crate::sketch::{SketchKind, SketchOperator};
use crate::UNIT_ROUNDOFF;

/// Parameters shared by all drivers.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveConfig {
    /// Maximum iterations per cycle.
    pub m: usize,
    /// Truncation parameter (initial value when `adaptive`).
    pub t: usize,
    /// Maximum number of restart cycles.
    pub nrestarts: usize,
    pub sketch_kind: SketchKind,
    /// Sketch dimension; `None` means `2(m+1)` (or `n` for the identity sketch).
    pub s: Option<usize>,
    pub seed: u64,
    pub basis: BasisKind,
    /// Stop a cycle once `‖g − C y‖ ≤ tol_stop·‖g‖`.
    pub tol_stop: f64,
    /// Adaptive trigger tolerance: doubling is considered when `tol_tau·τ̃ ≥ 1`.
    pub tol_tau: f64,
    pub adaptive: bool,
    /// Initial approximation; zero when `None`.
    pub x0: Option<Vec<f64>>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            m: 50,
            t: 2,
            nrestarts: 1,
            sketch_kind: SketchKind::Srht,
            s: None,
            seed: 0,
            basis: BasisKind::Truncated,
            tol_stop: 1e-10,
            tol_tau: UNIT_ROUNDOFF,
            adaptive: false,
            x0: None,
        }
    }
}

impl SolveConfig {
    /// Sketch dimension for an `n`-dimensional problem.
    pub fn sketch_dim(&self, n: usize) -> usize {
        match self.sketch_kind {
            SketchKind::Identity => n,
            _ => self.s.unwrap_or(2 * (self.m + 1)),
        }
    }

    /// Builds the sketch this configuration describes.
    pub fn build_sketch(&self, n: usize) -> Result<SketchOperator> {
        SketchOperator::build(self.sketch_kind, n, self.sketch_dim(n), self.seed)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.m == 0 {
            return bad("m must be at least 1".into());
        }
        if self.t == 0 || self.t > self.m {
            return bad(format!(
                "need 1 ≤ t ≤ m, got t = {}, m = {}",
                self.t, self.m
            ));
        }
        if self.nrestarts == 0 {
            return bad("nrestarts must be at least 1".into());
        }
        if self.tol_stop.is_nan() || self.tol_stop <= 0.0 {
            return bad("tol_stop must be positive".into());
        }
        if self.adaptive && (self.tol_tau.is_nan() || self.tol_tau <= 0.0) {
            return bad("tol_tau must be positive".into());
        }
        if let Some(x0) = &self.x0 {
            check_len(n, x0.len())?;
        }
        Ok(())
    }

    fn validate_sketch(&self, n: usize, sketch: &SketchOperator) -> Result<()> {
        check_len(n, sketch.n())?;
        if sketch.kind() != SketchKind::Identity && sketch.s() <= self.m {
            return Err(Error::InvalidConfig(format!(
                "sketch dimension s = {} must exceed m = {}",
                sketch.s(),
                self.m
            )));
        }
        Ok(())
    }

    fn initial_guess(&self, n: usize) -> Vec<f64> {
        self.x0.clone().unwrap_or_else(|| vec![0.0; n])
    }
}

/// One diagnostics row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationRecord {
    /// Restart cycle, starting at 1.
    pub cycle: usize,
    /// Iteration within the cycle, starting at 1.
    pub iter: usize,
    /// `‖g − C y‖` (for MGS-GMRES: the Givens least-squares residual).
    pub sketched_residual_norm: f64,
    pub backward_error: f64,
    pub tau_tilde: f64,
    pub kappa_sb: f64,
    pub kappa_sab: f64,
    /// Truncation parameter after this iteration's adaptive update.
    pub t_current: usize,
    pub y_norm: f64,
    /// `‖SB‖₂` (for MGS-GMRES: `‖V‖₂`). Not part of the CSV trace.
    pub basis_norm: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIter,
    Breakdown,
    SingularLs,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::Converged => "converged",
            Termination::MaxIter => "max_iter",
            Termination::Breakdown => "breakdown",
            Termination::SingularLs => "singular_ls",
        })
    }
}

#[derive(Clone, Debug)]
pub struct CycleResult {
    pub x: Vec<f64>,
    pub records: Vec<IterationRecord>,
    pub iterations_used: usize,
    /// Termination of the whole solve.
    pub termination: Termination,
    /// Termination of each cycle that ran, in order.
    pub cycle_terminations: Vec<Termination>,
}

impl CycleResult {
    pub fn final_backward_error(&self) -> Option<f64> {
        self.records
            .iter()
            .rev()
            .map(|r| r.backward_error)
            .find(|v| v.is_finite())
    }
}

/// What an observer sees after each iteration.
pub struct IterationView<'a> {
    pub record: &'a IterationRecord,
    pub basis: &'a KrylovBasis,
    pub y: &'a [f64],
    /// `C y` (sketched) or `M_L⁻¹ A Z y` (MGS-GMRES).
    pub d_tilde: &'a [f64],
    pub x: &'a [f64],
}

/// `y = T⁻¹ Uᵀ g`, the minimizer of `‖g − C y‖` for `C = U T`.
pub fn sketched_ls_solve(qr: &ThinQr, g: &[f64]) -> Result<Vec<f64>> {
    if qr.ncols() == 0 {
        return Err(Error::InvalidConfig("empty factorization".into()));
    }
    let rhs = qr.u().tr_matvec(g)?;
    back_substitute(qr.t(), &rhs)
}

/// Borrowed linear system plus its cached Frobenius norm.
pub(crate) struct System<'a> {
    pub a: &'a SparseMatrixCsr,
    pub b: &'a [f64],
    pub a_fro: f64,
    pub op: PreconditionedOperator<'a>,
}

impl<'a> System<'a> {
    pub fn new(
        a: &'a SparseMatrixCsr,
        b: &'a [f64],
        left: &'a Preconditioner,
        right: &'a Preconditioner,
    ) -> Result<Self> {
        let op = PreconditionedOperator::new(a, left, right)?;
        check_len(a.nrows(), b.len())?;
        Ok(Self {
            a,
            b,
            a_fro: a.frobenius_norm(),
            op,
        })
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        let ax = self.a.spmv(x).expect("validated dimensions");
        vector::sub(self.b, &ax)
    }

    pub fn backward_error(&self, x: &[f64]) -> f64 {
        backward_error(self.a_fro, self.b, self.a, x).expect("validated dimensions")
    }

    /// Restart loops stop once the backward error reaches this level.
    pub fn restart_tolerance(&self, tol_stop: f64) -> f64 {
        tol_stop.max(10.0 * self.n() as f64 * UNIT_ROUNDOFF)
    }
}

pub(crate) fn trivial_result(x: Vec<f64>) -> CycleResult {
    CycleResult {
        x,
        records: Vec::new(),
        iterations_used: 0,
        termination: Termination::Converged,
        cycle_terminations: vec![Termination::Converged],
    }
}

/// Runs `cycle` up to `nrestarts` times, feeding each result back as the next initial guess.
pub(crate) fn restart_loop(
    sys: &System<'_>,
    nrestarts: usize,
    tol_global: f64,
    x0: Vec<f64>,
    mut cycle: impl FnMut(usize, &[f64]) -> Result<CycleResult>,
) -> Result<CycleResult> {
    let mut x = x0;
    let mut records = Vec::new();
    let mut cycle_terminations = Vec::new();
    let mut reached_tolerance = false;
    for j in 1..=nrestarts {
        let res = cycle(j, &x)?;
        records.extend(res.records);
        cycle_terminations.push(res.termination);
        if !vector::all_finite(&res.x) {
            break;
        }
        x = res.x;
        if sys.backward_error(&x) <= tol_global {
            reached_tolerance = true;
            break;
        }
    }
    let termination = if reached_tolerance {
        Termination::Converged
    } else {
        *cycle_terminations.last().expect("at least one cycle")
    };
    Ok(CycleResult {
        x,
        iterations_used: records.len(),
        records,
        termination,
        cycle_terminations,
    })
}
