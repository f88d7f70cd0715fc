//! Observability quantities: normwise backward error, the stability estimate `τ̃`,
//! sketched condition numbers, and observational bound proxies.

use crate::error::{check_len, Result};
use crate::linalg::{svd_extrema, vector, DenseMatrix, SparseMatrixCsr};
use crate::UNIT_ROUNDOFF;

/// Finite stand-in for an infinite condition number, so traces stay serializable.
pub const KAPPA_CAP: f64 = 1e300;

/// `‖b − A x‖ / (‖A‖_F ‖x‖ + ‖b‖)` with a freshly computed residual.
///
/// The trivial system `b = 0`, `x = 0` has backward error 0.
pub fn backward_error(a_fro: f64, b: &[f64], a: &SparseMatrixCsr, x: &[f64]) -> Result<f64> {
    check_len(a.nrows(), b.len())?;
    let ax = a.spmv(x)?;
    let r = vector::sub(b, &ax);
    let denom = a_fro * vector::norm2(x) + vector::norm2(b);
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(vector::norm2(&r) / denom)
}

/// `τ̃ = ‖SZ‖₂ ‖A‖_F ‖y‖ / ‖d̃‖` with `d̃ = C y`.
///
/// Returns `+∞` when `‖d̃‖ = 0`.
pub fn tau_tilde(sz: &DenseMatrix, a_fro: f64, y: &[f64], d_tilde: &[f64]) -> f64 {
    let (sz_norm, _) = svd_extrema(sz);
    tau_from_norms(sz_norm, a_fro, vector::norm2(y), vector::norm2(d_tilde))
}

/// `τ` with unsketched quantities: `‖Z‖₂ ‖A‖_F ‖y‖ / ‖A Z y‖`.
pub fn tau_unsketched(z: &DenseMatrix, a_fro: f64, y: &[f64], azy: &[f64]) -> f64 {
    tau_tilde(z, a_fro, y, azy)
}

pub(crate) fn tau_from_norms(basis_norm: f64, a_fro: f64, y_norm: f64, d_norm: f64) -> f64 {
    if d_norm == 0.0 {
        return f64::INFINITY;
    }
    basis_norm * a_fro * y_norm / d_norm
}

/// `σ_max / σ_min` of a (small, sketched) matrix, capped at [`KAPPA_CAP`].
pub fn kappa_estimate(m: &DenseMatrix) -> f64 {
    let (hi, lo) = svd_extrema(m);
    kappa_from_extrema(hi, lo)
}

pub(crate) fn kappa_from_extrema(hi: f64, lo: f64) -> f64 {
    if hi.is_nan() || lo.is_nan() {
        return f64::NAN;
    }
    if lo == 0.0 {
        return if hi == 0.0 { f64::NAN } else { KAPPA_CAP };
    }
    (hi / lo).min(KAPPA_CAP)
}

/// Right-hand sides of the two backward-error bounds, with the unknown
/// polynomial constants set to one. They are reported, never enforced.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundTrackerRow {
    pub tau_exact: Option<f64>,
    pub tau_tilde: Option<f64>,
    /// `((1+ε)/(1−ε))·u·‖B‖‖y‖/‖x‖`
    pub lemma_bound_proxy: f64,
    /// `((1+ε)/(1−ε))·u·κ(B)`
    pub theorem_bound_proxy: f64,
    pub eps_used: f64,
}

impl BoundTrackerRow {
    pub fn with_tau_tilde(mut self, tau: f64) -> Self {
        self.tau_tilde = Some(tau);
        self
    }

    pub fn with_tau_exact(mut self, tau: f64) -> Self {
        self.tau_exact = Some(tau);
        self
    }
}

pub fn bound_tracker(
    basis_norm: f64,
    kappa_b: f64,
    y_norm: f64,
    x_norm: f64,
    eps: f64,
) -> BoundTrackerRow {
    debug_assert!((0.0..1.0).contains(&eps));
    let prefactor = (1.0 + eps) / (1.0 - eps) * UNIT_ROUNDOFF;
    BoundTrackerRow {
        tau_exact: None,
        tau_tilde: None,
        lemma_bound_proxy: prefactor * basis_norm * y_norm / x_norm,
        theorem_bound_proxy: prefactor * kappa_b,
        eps_used: eps,
    }
}


#[cfg(test)]
mod props {
    use super::*;
    use crate::linalg::ThinQr;
    use crate::rng::normal_vector;
    use crate::sketch::{embedding_distortion, SketchKind, SketchOperator};
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn tau_tilde_homogeneous(seed in any::<u64>(), i in 1usize..10, alpha in prop_oneof![-1e6f64..-1e-6, 1e-6f64..1e6]) {
            let sz = DenseMatrix::from_column_major(20, i, normal_vector(seed, 20 * i)).unwrap();
            let y = normal_vector(seed ^ 1, i);
            let d = sz.matvec(&y).unwrap();
            let ay: Vec<f64> = y.iter().map(|v| alpha * v).collect();
            let ad: Vec<f64> = d.iter().map(|v| alpha * v).collect();
            let t1 = tau_tilde(&sz, 3.0, &y, &d);
            let t2 = tau_tilde(&sz, 3.0, &ay, &ad);
            prop_assert!((t1 - t2).abs() <= 1e-12 * t1);
        }

        #[test]
        fn backward_error_scale_invariant(seed in any::<u64>(), n in 1usize..60, k in 0usize..3) {
            let alpha = [1e-3, 1.0, 1e3][k];
            let a = crate::io::gen::gen_sprand_dd(n, 0.2, seed).unwrap();
            let b = normal_vector(seed ^ 1, n);
            let x = normal_vector(seed ^ 2, n);
            let e1 = backward_error(a.frobenius_norm(), &b, &a, &x).unwrap();
            let sa = a.scaled(alpha);
            let sb: Vec<f64> = b.iter().map(|v| alpha * v).collect();
            let e2 = backward_error(sa.frobenius_norm(), &sb, &sa, &x).unwrap();
            prop_assert!((e1 - e2).abs() <= 1e-12 * e1);
        }

        #[test]
        fn sketched_condition_number_sandwich(seed in any::<u64>(), i in 1usize..10, srht in any::<bool>()) {
            let n = 200;
            // columns with widely different scales so κ(B) is not close to 1
            let mut b = DenseMatrix::from_column_major(n, i, normal_vector(seed, n * i)).unwrap();
            for j in 0..i {
                let s = 10f64.powi(j as i32 % 4);
                b.column_mut(j).iter_mut().for_each(|v| *v *= s);
            }
            let kind = if srht { SketchKind::Srht } else { SketchKind::Gaussian };
            let sk = SketchOperator::build(kind, n, 150, seed ^ 3).unwrap();
            let mut qr = ThinQr::new(n);
            for col in b.columns() {
                qr.append(col).unwrap();
            }
            let eps = embedding_distortion(&sk, qr.u()).unwrap();
            prop_assume!(eps < 1.0);
            let kb = kappa_estimate(&b);
            let ksb = kappa_estimate(&sk.apply_columns(&b).unwrap());
            let f = ((1.0 + eps) / (1.0 - eps)).sqrt();
            prop_assert!(ksb >= kb / f * (1.0 - 1e-10) && ksb <= kb * f * (1.0 + 1e-10),
                "κ(SB) = {ksb}, κ(B) = {kb}, ε̂ = {eps}");
        }
    }
}
