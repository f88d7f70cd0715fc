use crate::basis::{BasisKind, KrylovBasis, StepOutcome};
use crate::diagnostics::{kappa_estimate, kappa_from_extrema, tau_from_norms};
use crate::error::Result;
use crate::linalg::{back_substitute, svd_extrema, vector, DenseMatrix, SparseMatrixCsr};
use crate::precond::Preconditioner;
use crate::sketch::{SketchKind, SketchOperator};

use super::{
    restart_loop, trivial_result, CycleResult, IterationRecord, IterationView, SolveConfig, System,
    Termination,
};

/// One cycle of MGS-GMRES.
///
/// The small problem `min ‖βe₁ − H̲y‖` is reduced by Givens rotations applied as
/// columns arrive. Diagnostics use unsketched quantities: `kappa_sb = κ(V)`,
/// `kappa_sab = κ(H̲) = κ(M_L⁻¹ A Z)`, and `τ` uses `‖M_L⁻¹ A Z y‖`.
pub fn mgs_gmres(
    a: &SparseMatrixCsr,
    b: &[f64],
    config: &SolveConfig,
    left: &Preconditioner,
    right: &Preconditioner,
) -> Result<CycleResult> {
    mgs_gmres_observed(a, b, config, left, right, |_| {})
}

pub fn mgs_gmres_observed(
    a: &SparseMatrixCsr,
    b: &[f64],
    config: &SolveConfig,
    left: &Preconditioner,
    right: &Preconditioner,
    mut observer: impl FnMut(&IterationView<'_>),
) -> Result<CycleResult> {
    let sys = System::new(a, b, left, right)?;
    config.validate(sys.n())?;
    let ident = SketchOperator::build(SketchKind::Identity, sys.n(), sys.n(), 0)?;
    run_cycle(
        &sys,
        &ident,
        config,
        &config.initial_guess(sys.n()),
        1,
        &mut observer,
    )
}

/// Restarted MGS-GMRES, restarting every `m` iterations.
pub fn restarted_gmres(
    a: &SparseMatrixCsr,
    b: &[f64],
    config: &SolveConfig,
    left: &Preconditioner,
    right: &Preconditioner,
) -> Result<CycleResult> {
    let sys = System::new(a, b, left, right)?;
    config.validate(sys.n())?;
    let ident = SketchOperator::build(SketchKind::Identity, sys.n(), sys.n(), 0)?;
    let tol = sys.restart_tolerance(config.tol_stop);
    restart_loop(
        &sys,
        config.nrestarts,
        tol,
        config.initial_guess(sys.n()),
        |cycle, x0| run_cycle(&sys, &ident, config, x0, cycle, &mut |_| {}),
    )
}

/// Returns `(c, s, r)` with `[c s; −s c]·(a, b) = (r, 0)`.
fn givens(a: f64, b: f64) -> (f64, f64, f64) {
    if b == 0.0 {
        (1.0, 0.0, a)
    } else {
        let r = a.hypot(b);
        (a / r, b / r, r)
    }
}

fn run_cycle(
    sys: &System<'_>,
    ident: &SketchOperator,
    config: &SolveConfig,
    x0: &[f64],
    cycle: usize,
    observer: &mut dyn FnMut(&IterationView<'_>),
) -> Result<CycleResult> {
    let r0 = sys.residual(x0);
    if vector::norm2(&r0) == 0.0 {
        return Ok(trivial_result(x0.to_vec()));
    }
    let op = &sys.op;
    let v1 = op.left.apply_inverse(&r0);
    let beta = vector::norm2(&v1);
    let mut basis = KrylovBasis::new(BasisKind::Mgs, config.m, &v1, ident, op.right)?;

    let mut rotations: Vec<(f64, f64)> = Vec::with_capacity(config.m);
    let mut r = DenseMatrix::zeros(0, 0);
    let mut h_full = DenseMatrix::with_rows(config.m + 1);
    let mut gvec = vec![beta];
    let mut records = Vec::with_capacity(config.m);
    let mut x = x0.to_vec();
    let mut termination = Termination::MaxIter;

    for i in 1..=config.m {
        let w = op.apply_left(basis.z().column(i - 1));
        let outcome = basis.extend_from_image(w, ident, op.right)?;
        let mut h = basis.hessenberg()[i - 1].clone();
        if outcome == StepOutcome::Breakdown {
            h[i] = 0.0;
        }
        let mut padded = h.clone();
        padded.resize(config.m + 1, 0.0);
        h_full.push_column(&padded)?;

        for (k, &(c, s)) in rotations.iter().enumerate() {
            let (hk, hk1) = (h[k], h[k + 1]);
            h[k] = c * hk + s * hk1;
            h[k + 1] = -s * hk + c * hk1;
        }
        let (c, s, diag) = givens(h[i - 1], h[i]);
        rotations.push((c, s));
        h[i - 1] = diag;
        h[i] = 0.0;
        let g_last = gvec[i - 1];
        gvec[i - 1] = c * g_last;
        gvec.push(-s * g_last);
        r.grow_square();
        for (k, &hk) in h[..i].iter().enumerate() {
            r.set(k, i - 1, hk);
        }
        let residual = gvec[i].abs();

        // leading i×i block of R(V) gives ‖V_{1:i}‖ and κ(V_{1:i})
        let (v_hi, v_lo) = svd_extrema(&basis.sb_qr().t().leading_block(i, i));
        let z_norm = if op.right.is_identity() {
            v_hi
        } else {
            svd_extrema(&basis.sz_qr().t().leading_block(i, i)).0
        };
        let kappa_sab = kappa_estimate(&h_full.leading_block(i + 1, i));

        let y = match back_substitute(&r, &gvec[..i]) {
            Ok(y) if vector::all_finite(&y) => y,
            _ => {
                records.push(IterationRecord {
                    cycle,
                    iter: i,
                    sketched_residual_norm: residual,
                    backward_error: f64::NAN,
                    tau_tilde: f64::NAN,
                    kappa_sb: kappa_from_extrema(v_hi, v_lo),
                    kappa_sab,
                    t_current: config.m,
                    y_norm: f64::NAN,
                    basis_norm: v_hi,
                });
                termination = Termination::SingularLs;
                break;
            }
        };
        let d = basis.z().matvec_prefix(&y);
        let ad = op.apply_left(&d);
        let mut x_i = d;
        vector::axpy(1.0, x0, &mut x_i);
        let y_norm = vector::norm2(&y);
        let record = IterationRecord {
            cycle,
            iter: i,
            sketched_residual_norm: residual,
            backward_error: sys.backward_error(&x_i),
            tau_tilde: tau_from_norms(z_norm, sys.a_fro, y_norm, vector::norm2(&ad)),
            kappa_sb: kappa_from_extrema(v_hi, v_lo),
            kappa_sab,
            t_current: config.m,
            y_norm,
            basis_norm: v_hi,
        };
        observer(&IterationView {
            record: &record,
            basis: &basis,
            y: &y,
            d_tilde: &ad,
            x: &x_i,
        });
        records.push(record);
        x = x_i;
        if outcome == StepOutcome::Breakdown || residual <= config.tol_stop * beta {
            termination = Termination::Converged;
            break;
        }
    }

    Ok(CycleResult {
        x,
        iterations_used: records.len(),
        records,
        termination,
        cycle_terminations: vec![termination],
    })
}
