use crate::basis::{KrylovBasis, StepOutcome};
use crate::diagnostics::{kappa_from_extrema, tau_from_norms};
use crate::error::{Error, Result};
use crate::linalg::{svd_extrema, vector, DenseMatrix, SparseMatrixCsr, ThinQr};
use crate::precond::Preconditioner;
use crate::sketch::SketchOperator;

use super::{
    restart_loop, sketched_ls_solve, trivial_result, AdaptiveTruncation, CycleResult,
    IterationRecord, IterationView, SolveConfig, System, Termination,
};

/// One cycle of preconditioned sketched GMRES with a fixed truncation parameter.
pub fn sgmres_cycle(
    a: &SparseMatrixCsr,
    b: &[f64],
    config: &SolveConfig,
    left: &Preconditioner,
    right: &Preconditioner,
    sketch: &SketchOperator,
) -> Result<CycleResult> {
    single_cycle(a, b, config, left, right, sketch, false, &mut |_| {})
}

/// [`sgmres_cycle`] (or its adaptive variant when `config.adaptive`) with a callback
/// after every iteration, exposing the basis and the small least-squares solution.
pub fn sgmres_cycle_observed(
    a: &SparseMatrixCsr,
    b: &[f64],
    config: &SolveConfig,
    left: &Preconditioner,
    right: &Preconditioner,
    sketch: &SketchOperator,
    mut observer: impl FnMut(&IterationView<'_>),
) -> Result<CycleResult> {
    single_cycle(
        a,
        b,
        config,
        left,
        right,
        sketch,
        config.adaptive,
        &mut observer,
    )
}

#[allow(clippy::too_many_arguments)]
fn single_cycle(
    a: &SparseMatrixCsr,
    b: &[f64],
    config: &SolveConfig,
    left: &Preconditioner,
    right: &Preconditioner,
    sketch: &SketchOperator,
    adaptive: bool,
    observer: &mut dyn FnMut(&IterationView<'_>),
) -> Result<CycleResult> {
    let sys = System::new(a, b, left, right)?;
    config.validate(sys.n())?;
    config.validate_sketch(sys.n(), sketch)?;
    let mut t = config.t;
    let mut rule = adaptive.then(|| AdaptiveTruncation::new(config.tol_tau));
    run_cycle(
        &sys,
        sketch,
        config,
        &config.initial_guess(sys.n()),
        &mut t,
        rule.as_mut(),
        1,
        observer,
    )
}

/// One cycle with the adaptive truncation rule enabled.
pub fn adaptive_sgmres_cycle(
    a: &SparseMatrixCsr,
    b: &[f64],
    config: &SolveConfig,
    left: &Preconditioner,
    right: &Preconditioner,
    sketch: &SketchOperator,
) -> Result<CycleResult> {
    if !config.adaptive {
        return Err(Error::InvalidConfig(
            "adaptive cycle requested without the adaptive flag".into(),
        ));
    }
    single_cycle(a, b, config, left, right, sketch, true, &mut |_| {})
}

/// Restarted sketched GMRES. With `config.adaptive`, the adapted truncation
/// parameter carries over from one cycle to the next.
pub fn restarted_sgmres(
    a: &SparseMatrixCsr,
    b: &[f64],
    config: &SolveConfig,
    left: &Preconditioner,
    right: &Preconditioner,
    sketch: &SketchOperator,
) -> Result<CycleResult> {
    let sys = System::new(a, b, left, right)?;
    config.validate(sys.n())?;
    config.validate_sketch(sys.n(), sketch)?;
    let mut t = config.t;
    let mut rule = config
        .adaptive
        .then(|| AdaptiveTruncation::new(config.tol_tau));
    let tol = sys.restart_tolerance(config.tol_stop);
    restart_loop(
        &sys,
        config.nrestarts,
        tol,
        config.initial_guess(sys.n()),
        |cycle, x0| {
            run_cycle(
                &sys,
                sketch,
                config,
                x0,
                &mut t,
                rule.as_mut(),
                cycle,
                &mut |_| {},
            )
        },
    )
}

#[allow(clippy::too_many_arguments)]
fn run_cycle(
    sys: &System<'_>,
    sketch: &SketchOperator,
    config: &SolveConfig,
    x0: &[f64],
    t: &mut usize,
    mut rule: Option<&mut AdaptiveTruncation>,
    cycle: usize,
    observer: &mut dyn FnMut(&IterationView<'_>),
) -> Result<CycleResult> {
    let r0 = sys.residual(x0);
    if vector::norm2(&r0) == 0.0 {
        return Ok(trivial_result(x0.to_vec()));
    }
    let op = &sys.op;
    let r0 = op.left.apply_inverse(&r0);
    let g = sketch.apply(&r0)?;
    let g_norm = vector::norm2(&g);
    let mut basis = KrylovBasis::new(config.basis, *t, &r0, sketch, op.right)?;
    if let Some(rule) = rule.as_deref_mut() {
        rule.reset();
    }
    let same_sketched_basis = op.right.is_identity();

    let mut qr = ThinQr::new(sketch.s());
    let mut c = DenseMatrix::with_rows(sketch.s());
    let mut records = Vec::with_capacity(config.m);
    let mut x = x0.to_vec();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut pending_image: Option<Vec<f64>> = None;
    let mut termination = Termination::MaxIter;

    for i in 1..=config.m {
        if let Some(w) = pending_image.take() {
            if basis.extend_from_image(w, sketch, op.right)? == StepOutcome::Breakdown {
                termination = Termination::Breakdown;
                break;
            }
        }
        let w = op.apply_left(basis.z().column(i - 1));
        let c_col = sketch.apply(&w)?;
        qr.append(&c_col)?;
        c.push_column(&c_col)?;

        let (sb_hi, sb_lo) = svd_extrema(basis.sb_qr().t());
        let sz_norm = if same_sketched_basis {
            sb_hi
        } else {
            svd_extrema(basis.sz_qr().t()).0
        };
        let (c_hi, c_lo) = svd_extrema(qr.t());
        let kappa_sb = kappa_from_extrema(sb_hi, sb_lo);
        let kappa_sab = kappa_from_extrema(c_hi, c_lo);

        let y = match sketched_ls_solve(&qr, &g) {
            Ok(y) if vector::all_finite(&y) => y,
            _ => {
                records.push(IterationRecord {
                    cycle,
                    iter: i,
                    sketched_residual_norm: f64::NAN,
                    backward_error: f64::NAN,
                    tau_tilde: f64::NAN,
                    kappa_sb,
                    kappa_sab,
                    t_current: basis.t(),
                    y_norm: f64::NAN,
                    basis_norm: sb_hi,
                });
                termination = Termination::SingularLs;
                break;
            }
        };
        let d_tilde = c.matvec_prefix(&y);
        let residual = vector::norm2(&vector::sub(&g, &d_tilde));
        let mut x_i = basis.z().matvec_prefix(&y);
        vector::axpy(1.0, x0, &mut x_i);
        let y_norm = vector::norm2(&y);
        let tau = tau_from_norms(sz_norm, sys.a_fro, y_norm, vector::norm2(&d_tilde));
        let converged = residual <= config.tol_stop * g_norm;

        if !converged {
            if let Some(rule) = rule.as_deref_mut() {
                if let Some(new_t) = rule.observe(i, tau, basis.t()) {
                    basis.set_t(new_t);
                }
            }
        }

        let record = IterationRecord {
            cycle,
            iter: i,
            sketched_residual_norm: residual,
            backward_error: sys.backward_error(&x_i),
            tau_tilde: tau,
            kappa_sb,
            kappa_sab,
            t_current: basis.t(),
            y_norm,
            basis_norm: sb_hi,
        };
        observer(&IterationView {
            record: &record,
            basis: &basis,
            y: &y,
            d_tilde: &d_tilde,
            x: &x_i,
        });
        records.push(record);
        if best.as_ref().is_none_or(|(r, _)| residual < *r) {
            best = Some((residual, x_i.clone()));
        }
        x = x_i;
        if converged {
            termination = Termination::Converged;
            break;
        }
        pending_image = Some(w);
    }

    *t = basis.t();
    if matches!(
        termination,
        Termination::SingularLs | Termination::Breakdown
    ) {
        x = best.map_or_else(|| x0.to_vec(), |(_, x)| x);
    }
    Ok(CycleResult {
        x,
        iterations_used: records.len(),
        records,
        termination,
        cycle_terminations: vec![termination],
    })
}
