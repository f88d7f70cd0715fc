use super::DenseMatrix;

/// Largest and smallest singular values of a (tall or square) dense matrix.
///
/// Backed by a dense bidiagonalization SVD, so values down to about
/// `u·σ_max` are resolved; a Gram-matrix eigen-solve would lose everything
/// below `√u·σ_max`, which is exactly the range the diagnostics need.
/// Non-finite input yields `(NaN, NaN)`. For a wide matrix `σ_min` is 0.
pub fn svd_extrema(m: &DenseMatrix) -> (f64, f64) {
    if m.ncols() == 0 || m.nrows() == 0 {
        return (0.0, 0.0);
    }
    if m.as_slice().iter().any(|v| !v.is_finite()) {
        return (f64::NAN, f64::NAN);
    }
    let sv = m.to_nalgebra().singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = if m.nrows() < m.ncols() {
        0.0
    } else {
        sv.iter().copied().fold(f64::INFINITY, f64::min)
    };
    (max, min)
}
