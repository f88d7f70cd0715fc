use crate::error::{check_len, Result};

use super::{vector, DenseMatrix};

/// Incrementally maintained thin QR factorization `C = U·T`.
///
/// New columns are orthogonalized by modified Gram–Schmidt followed by one full
/// reorthogonalization pass. A numerically dependent column is accepted; its
/// diagonal entry in `T` is then tiny (or zero) and the caller decides what to do.
#[derive(Clone, Debug)]
pub struct ThinQr {
    u: DenseMatrix,
    t: DenseMatrix,
}

impl ThinQr {
    /// Empty factorization for columns of length `nrows`.
    pub fn new(nrows: usize) -> Self {
        Self {
            u: DenseMatrix::with_rows(nrows),
            t: DenseMatrix::zeros(0, 0),
        }
    }

    pub fn nrows(&self) -> usize {
        self.u.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.u.ncols()
    }

    pub fn u(&self) -> &DenseMatrix {
        &self.u
    }

    /// Upper triangular factor, `ncols × ncols`.
    pub fn t(&self) -> &DenseMatrix {
        &self.t
    }

    /// Appends column `c` and returns the new diagonal entry of `T`.
    pub fn append(&mut self, c: &[f64]) -> Result<f64> {
        check_len(self.nrows(), c.len())?;
        let k = self.ncols();
        let mut w = c.to_vec();
        let mut coeffs = vec![0.0; k];
        for _pass in 0..2 {
            for (j, coeff) in coeffs.iter_mut().enumerate() {
                let uj = self.u.column(j);
                let h = vector::dot(uj, &w);
                vector::axpy(-h, uj, &mut w);
                *coeff += h;
            }
        }
        let diag = vector::norm2(&w);
        if diag > 0.0 {
            vector::scale(1.0 / diag, &mut w);
        }
        self.u.push_column(&w)?;
        self.t.grow_square();
        for (j, &h) in coeffs.iter().enumerate() {
            self.t.set(j, k, h);
        }
        self.t.set(k, k, diag);
        Ok(diag)
    }

    /// Functional form of [`ThinQr::append`].
    pub fn appended(mut self, c: &[f64]) -> Result<Self> {
        self.append(c)?;
        Ok(self)
    }

    /// `U·T`
    pub fn reconstruct(&self) -> DenseMatrix {
        self.u.matmul(&self.t).expect("conforming factors")
    }
}
