//! Sketching operators `S ∈ ℝ^{s×n}`: identity, Gaussian, and the subsampled
//! randomized Hadamard transform (SRHT).
//!
//! The SRHT zero-pads to `n_pad = 2^⌈log₂ n⌉`, flips signs, applies the
//! orthonormal Walsh–Hadamard transform, keeps `s` rows sampled without
//! replacement and rescales by `√(n_pad/s)`, so that `E‖Sv‖² = ‖v‖²`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{check_len, Error, Result};
use crate::linalg::{svd_extrema, vector, DenseMatrix};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SketchKind {
    Identity,
    Gaussian,
    Srht,
}

impl fmt::Display for SketchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SketchKind::Identity => "identity",
            SketchKind::Gaussian => "gaussian",
            SketchKind::Srht => "srht",
        })
    }
}

impl FromStr for SketchKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(SketchKind::Identity),
            "gaussian" => Ok(SketchKind::Gaussian),
            "srht" => Ok(SketchKind::Srht),
            other => Err(Error::InvalidSketch(format!(
                "unknown sketch kind `{other}`"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Repr {
    Identity,
    /// `s × n`, entries `N(0,1)/√s`.
    Gaussian(DenseMatrix),
    Srht {
        n_pad: usize,
        sign_diagonal: Vec<f64>,
        row_sample: Vec<usize>,
    },
}

/// A frozen `s × n` sketching operator.
#[derive(Clone, Debug, PartialEq)]
pub struct SketchOperator {
    kind: SketchKind,
    n: usize,
    s: usize,
    seed: u64,
    repr: Repr,
}

impl SketchOperator {
    /// Deterministic in `(kind, n, s, seed)`.
    pub fn build(kind: SketchKind, n: usize, s: usize, seed: u64) -> Result<Self> {
        if s < 1 {
            return Err(Error::InvalidSketch(
                "sketch dimension must be at least 1".into(),
            ));
        }
        if s > n {
            return Err(Error::InvalidSketch(format!(
                "sketch dimension {s} exceeds ambient dimension {n}"
            )));
        }
        let repr = match kind {
            SketchKind::Identity => {
                if s != n {
                    return Err(Error::InvalidSketch(format!(
                        "identity sketch needs s = n, got s = {s}, n = {n}"
                    )));
                }
                Repr::Identity
            }
            SketchKind::Gaussian => {
                let mut r = rng::seeded(seed);
                let mut data = rng::standard_normal(&mut r, s * n);
                vector::scale(1.0 / (s as f64).sqrt(), &mut data);
                Repr::Gaussian(DenseMatrix::from_column_major(s, n, data)?)
            }
            SketchKind::Srht => {
                let n_pad = n.next_power_of_two();
                let mut r = rng::seeded(seed);
                let sign_diagonal: Vec<f64> = (0..n_pad)
                    .map(|_| if r.random::<bool>() { 1.0 } else { -1.0 })
                    .collect();
                // partial Fisher–Yates: the first s slots are a uniform sample without replacement
                let mut perm: Vec<usize> = (0..n_pad).collect();
                for k in 0..s {
                    let j = r.random_range(k..n_pad);
                    perm.swap(k, j);
                }
                perm.truncate(s);
                Repr::Srht {
                    n_pad,
                    sign_diagonal,
                    row_sample: perm,
                }
            }
        };
        Ok(Self {
            kind,
            n,
            s,
            seed,
            repr,
        })
    }

    /// SRHT with explicitly given signs (length `n_pad`) and sampled rows.
    pub fn srht_from_parts(
        n: usize,
        sign_diagonal: Vec<f64>,
        row_sample: Vec<usize>,
    ) -> Result<Self> {
        let n_pad = n.next_power_of_two();
        check_len(n_pad, sign_diagonal.len())?;
        if sign_diagonal.iter().any(|&d| d != 1.0 && d != -1.0) {
            return Err(Error::InvalidSketch(
                "sign diagonal entries must be ±1".into(),
            ));
        }
        let s = row_sample.len();
        if s < 1 || s > n {
            return Err(Error::InvalidSketch(format!(
                "{s} sampled rows for n = {n}"
            )));
        }
        let mut seen = vec![false; n_pad];
        for &r in &row_sample {
            if r >= n_pad || std::mem::replace(&mut seen[r], true) {
                return Err(Error::InvalidSketch(
                    "sampled rows must be distinct and < n_pad".into(),
                ));
            }
        }
        Ok(Self {
            kind: SketchKind::Srht,
            n,
            s,
            seed: 0,
            repr: Repr::Srht {
                n_pad,
                sign_diagonal,
                row_sample,
            },
        })
    }

    pub fn kind(&self) -> SketchKind {
        self.kind
    }

    /// Ambient dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Sketch dimension.
    pub fn s(&self) -> usize {
        self.s
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n_pad(&self) -> Option<usize> {
        match &self.repr {
            Repr::Srht { n_pad, .. } => Some(*n_pad),
            _ => None,
        }
    }

    pub fn sign_diagonal(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Srht { sign_diagonal, .. } => Some(sign_diagonal),
            _ => None,
        }
    }

    pub fn row_sample(&self) -> Option<&[usize]> {
        match &self.repr {
            Repr::Srht { row_sample, .. } => Some(row_sample),
            _ => None,
        }
    }

    /// `S·v`
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n, v.len())?;
        Ok(match &self.repr {
            Repr::Identity => v.to_vec(),
            Repr::Gaussian(g) => g.matvec_prefix(v),
            Repr::Srht {
                n_pad,
                sign_diagonal,
                row_sample,
            } => {
                let mut buf = vec![0.0; *n_pad];
                for ((b, &x), &d) in buf.iter_mut().zip(v).zip(sign_diagonal) {
                    *b = d * x;
                }
                fwht_normalized(&mut buf);
                let rescale = (*n_pad as f64 / self.s as f64).sqrt();
                row_sample.iter().map(|&r| rescale * buf[r]).collect()
            }
        })
    }

    /// Applies `S` to every column of `m`.
    pub fn apply_columns(&self, m: &DenseMatrix) -> Result<DenseMatrix> {
        let mut out = DenseMatrix::with_rows(self.s);
        for c in m.columns() {
            out.push_column(&self.apply(c)?)?;
        }
        Ok(out)
    }
}

/// In-place orthonormal fast Walsh–Hadamard transform (`H/√len`, Sylvester ordering).
pub fn fwht_normalized(x: &mut [f64]) {
    let len = x.len();
    assert!(len.is_power_of_two(), "FWHT length must be a power of two");
    let mut h = 1;
    while h < len {
        for block in x.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*a, *b);
                *a = u + v;
                *b = u - v;
            }
        }
        h *= 2;
    }
    vector::scale(1.0 / (len as f64).sqrt(), x);
}

/// `ε̂ = max(1 − σ_min(SQ)², σ_max(SQ)² − 1)` for orthonormal `Q`: the smallest `ε`
/// with `(1−ε)‖v‖² ≤ ‖Sv‖² ≤ (1+ε)‖v‖²` on `range(Q)`.
pub fn embedding_distortion(sketch: &SketchOperator, q: &DenseMatrix) -> Result<f64> {
    Ok(distortion_of_sketched_basis(&sketch.apply_columns(q)?))
}

/// Same as [`embedding_distortion`] given the already sketched basis `SQ`.
pub fn distortion_of_sketched_basis(sq: &DenseMatrix) -> f64 {
    let (hi, lo) = svd_extrema(sq);
    (1.0 - lo * lo).max(hi * hi - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_exact() {
        let s = SketchOperator::build(SketchKind::Identity, 8, 8, 3).unwrap();
        let v: Vec<f64> = (0..8).map(|k| k as f64 - 2.5).collect();
        assert_eq!(s.apply(&v).unwrap(), v);
        let s3 = SketchOperator::build(SketchKind::Identity, 3, 3, 0).unwrap();
        assert_eq!(s3.apply(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn srht_structure() {
        let s = SketchOperator::build(SketchKind::Srht, 6, 4, 1).unwrap();
        assert_eq!(s.n_pad(), Some(8));
        let rows = s.row_sample().unwrap();
        assert_eq!(rows.len(), 4);
        let mut sorted = rows.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 4);
        assert!(rows.iter().all(|&r| r < 8));
        assert!(s
            .sign_diagonal()
            .unwrap()
            .iter()
            .all(|&d| d == 1.0 || d == -1.0));
    }

    #[test]
    fn srht_two_by_two_by_hand() {
        let s = SketchOperator::srht_from_parts(2, vec![1.0, 1.0], vec![0, 1]).unwrap();
        let out = s.apply(&[1.0, 0.0]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out[0] - h).abs() < 1e-15 && (out[1] - h).abs() < 1e-15);
    }

    #[test]
    fn zero_maps_to_zero() {
        for kind in [SketchKind::Gaussian, SketchKind::Srht] {
            let s = SketchOperator::build(kind, 10, 4, 9).unwrap();
            assert!(s.apply(&[0.0; 10]).unwrap().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn dimension_errors() {
        assert!(SketchOperator::build(SketchKind::Srht, 4, 5, 0).is_err());
        assert!(SketchOperator::build(SketchKind::Gaussian, 4, 0, 0).is_err());
        assert!(SketchOperator::build(SketchKind::Identity, 4, 3, 0).is_err());
        let s = SketchOperator::build(SketchKind::Srht, 4, 2, 0).unwrap();
        assert!(s.apply(&[1.0; 3]).is_err());
    }

    #[test]
    fn distortion_examples() {
        let id = SketchOperator::build(SketchKind::Identity, 5, 5, 0).unwrap();
        let q =
            DenseMatrix::from_columns(5, &[[1.0, 0.0, 0.0, 0.0, 0.0], [0.0, 0.6, 0.8, 0.0, 0.0]])
                .unwrap();
        assert!(embedding_distortion(&id, &q).unwrap().abs() < 1e-12);
        // S = √2 × (selection of half the rows), Q = e₁ with row 1 selected: ‖Se₁‖² = 2
        let sq = DenseMatrix::from_columns(2, &[[2f64.sqrt(), 0.0]]).unwrap();
        assert!((distortion_of_sketched_basis(&sq) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fwht_is_involution() {
        let mut x = vec![1.0, -2.0, 3.5, 0.25];
        let orig = x.clone();
        fwht_normalized(&mut x);
        fwht_normalized(&mut x);
        for (a, b) in x.iter().zip(&orig) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
