//! Seeded test-problem generators.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, SparseMatrixCsr};
use crate::rng::{seeded, standard_normal, PortableRng};

/// A dense matrix with prescribed singular values, stored in CSR form.
#[derive(Clone, Debug)]
pub struct RandSvd {
    pub matrix: SparseMatrixCsr,
    pub singular_values: Vec<f64>,
    pub left_singular_vectors: DenseMatrix,
    /// Columns `v_j` with `A v_j = σ_j u_j`.
    pub right_singular_vectors: DenseMatrix,
}

impl RandSvd {
    /// The `k`-th right singular vector, counting from 1.
    pub fn right_singular_vector(&self, k: usize) -> Option<&[f64]> {
        (1..=self.right_singular_vectors.ncols())
            .contains(&k)
            .then(|| self.right_singular_vectors.column(k - 1))
    }
}

fn random_orthogonal(rng: &mut PortableRng, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_column_slice(n, n, &standard_normal(rng, n * n));
    let qr = g.qr();
    let mut q = qr.q();
    // sign fix so Q is Haar-distributed and independent of the QR convention
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// `A = Q₁ Σ Q₂ᵀ` with `σ_j = kappa^(−(j−1)/(n−1))`.
pub fn gen_randsvd(n: usize, kappa: f64, seed: u64) -> Result<RandSvd> {
    if n < 2 {
        return Err(Error::InvalidConfig(format!(
            "randsvd needs n ≥ 2, got {n}"
        )));
    }
    if kappa.is_nan() || kappa < 1.0 || !kappa.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "randsvd needs finite kappa ≥ 1, got {kappa}"
        )));
    }
    let mut rng = seeded(seed);
    let q1 = random_orthogonal(&mut rng, n);
    let q2 = random_orthogonal(&mut rng, n);
    let sigma: Vec<f64> = (0..n)
        .map(|j| kappa.powf(-(j as f64) / (n - 1) as f64))
        .collect();
    let mut us = q1.clone();
    for (j, s) in sigma.iter().enumerate() {
        us.column_mut(j).scale_mut(*s);
    }
    let a = us * q2.transpose();
    Ok(RandSvd {
        matrix: SparseMatrixCsr::from_dense(&DenseMatrix::from_nalgebra(&a)),
        singular_values: sigma,
        left_singular_vectors: DenseMatrix::from_nalgebra(&q1),
        right_singular_vectors: DenseMatrix::from_nalgebra(&q2),
    })
}

/// `diag(lo, …, hi)` with linearly spaced entries.
pub fn gen_diag_range(n: usize, lo: f64, hi: f64) -> Result<SparseMatrixCsr> {
    if n == 0 {
        return Err(Error::InvalidConfig("diag_range needs n ≥ 1".into()));
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidConfig(
            "diag_range bounds must be finite".into(),
        ));
    }
    let diag: Vec<f64> = if n == 1 {
        vec![lo]
    } else {
        (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect()
    };
    Ok(SparseMatrixCsr::from_diagonal(&diag))
}

/// Shape parameters of [`gen_sprand`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SprandOptions {
    /// Added to the off-diagonal row sum (before row scaling) to form the diagonal.
    /// A negative margin gives up strict dominance.
    pub margin: f64,
    /// Factor applied to entries above the diagonal.
    pub upper_weight: f64,
    /// Row `r` is scaled by `10^ρ_r` with `ρ_r ~ U(−d, d)`.
    pub row_scale_decades: f64,
}

impl Default for SprandOptions {
    fn default() -> Self {
        Self {
            margin: 1.0,
            upper_weight: 16.0,
            row_scale_decades: 0.6,
        }
    }
}

/// Random sparse, strictly row diagonally dominant matrix with the default
/// [`SprandOptions`]: nonsymmetric (upper entries weighted) and badly row-scaled,
/// so that Krylov bases lose conditioning quickly.
pub fn gen_sprand_dd(n: usize, density: f64, seed: u64) -> Result<SparseMatrixCsr> {
    gen_sprand(n, density, seed, &SprandOptions::default())
}

/// Off-diagonal pattern Bernoulli(`density`) with N(0,1) values (upper ones times
/// `upper_weight`); diagonal = row sum of `|a_ij|` + `margin`; then every row scaled.
pub fn gen_sprand(
    n: usize,
    density: f64,
    seed: u64,
    opts: &SprandOptions,
) -> Result<SparseMatrixCsr> {
    if n == 0 {
        return Err(Error::InvalidConfig("sprand needs n ≥ 1".into()));
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidConfig(format!(
            "density must lie in [0, 1], got {density}"
        )));
    }
    if opts.row_scale_decades.is_nan()
        || opts.row_scale_decades < 0.0
        || !opts.margin.is_finite()
        || !opts.upper_weight.is_finite()
    {
        return Err(Error::InvalidConfig(format!(
            "invalid sprand options {opts:?}"
        )));
    }
    let d = opts.row_scale_decades;
    let mut rng = seeded(seed);
    let mut triplets = Vec::new();
    for r in 0..n {
        let scale = if d > 0.0 {
            10f64.powf(rng.random_range(-d..d))
        } else {
            1.0
        };
        let mut row_sum = 0.0;
        for c in 0..n {
            if c == r || !rng.random_bool(density) {
                continue;
            }
            let mut v: f64 = rng.sample(rand_distr::StandardNormal);
            if c > r {
                v *= opts.upper_weight;
            }
            row_sum += v.abs();
            triplets.push((r, c, v * scale));
        }
        triplets.push((r, r, (row_sum + opts.margin) * scale));
    }
    SparseMatrixCsr::from_triplets(n, n, &triplets)
}
