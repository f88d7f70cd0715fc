use crate::error::{check_len, Error, Result};

use super::vector;

/// Column-major dense matrix.
///
/// Columns are contiguous, so Krylov bases grow by [`DenseMatrix::push_column`]
/// without any relayout.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            data: vec![0.0; nrows * ncols],
        }
    }

    /// A matrix with `nrows` rows and no columns yet.
    pub fn with_rows(nrows: usize) -> Self {
        Self::zeros(nrows, 0)
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for j in 0..n {
            m.set(j, j, 1.0);
        }
        m
    }

    pub fn from_column_major(nrows: usize, ncols: usize, data: Vec<f64>) -> Result<Self> {
        check_len(nrows * ncols, data.len())?;
        Ok(Self { nrows, ncols, data })
    }

    /// Builds a matrix from row slices; all rows must have equal length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(nrows, ncols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            check_len(ncols, row.len())?;
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    pub fn from_columns<C: AsRef<[f64]>>(nrows: usize, cols: &[C]) -> Result<Self> {
        let mut m = Self::with_rows(nrows);
        for c in cols {
            m.push_column(c.as_ref())?;
        }
        Ok(m)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.nrows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.nrows + i] = v;
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    pub fn column_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.ncols).map(move |j| self.column(j))
    }

    pub fn push_column(&mut self, col: &[f64]) -> Result<()> {
        check_len(self.nrows, col.len())?;
        self.data.extend_from_slice(col);
        self.ncols += 1;
        Ok(())
    }

    /// Grows a square matrix by one zero row and one zero column.
    pub(crate) fn grow_square(&mut self) {
        debug_assert_eq!(self.nrows, self.ncols);
        let n = self.nrows;
        let mut data = vec![0.0; (n + 1) * (n + 1)];
        for j in 0..n {
            data[j * (n + 1)..j * (n + 1) + n].copy_from_slice(self.column(j));
        }
        self.nrows = n + 1;
        self.ncols = n + 1;
        self.data = data;
    }

    /// The leading `rows × cols` block.
    pub fn leading_block(&self, rows: usize, cols: usize) -> DenseMatrix {
        assert!(rows <= self.nrows && cols <= self.ncols);
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            data.extend_from_slice(&self.column(j)[..rows]);
        }
        DenseMatrix {
            nrows: rows,
            ncols: cols,
            data,
        }
    }

    /// `M·x`, accumulated column by column.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.ncols, x.len())?;
        Ok(self.matvec_prefix(x))
    }

    /// `M[:, ..x.len()]·x`; uses only the first `x.len()` columns.
    pub fn matvec_prefix(&self, x: &[f64]) -> Vec<f64> {
        assert!(x.len() <= self.ncols);
        let mut y = vec![0.0; self.nrows];
        for (j, &xj) in x.iter().enumerate() {
            vector::axpy(xj, self.column(j), &mut y);
        }
        y
    }

    /// `Mᵀ·v`
    pub fn tr_matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_len(self.nrows, v.len())?;
        Ok(self.columns().map(|c| vector::dot(c, v)).collect())
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.ncols != other.nrows {
            return Err(Error::DimensionMismatch {
                expected: self.ncols,
                found: other.nrows,
            });
        }
        let mut out = DenseMatrix::with_rows(self.nrows);
        for c in other.columns() {
            out.push_column(&self.matvec_prefix(c))?;
        }
        Ok(out)
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.ncols, self.nrows);
        for j in 0..self.ncols {
            for i in 0..self.nrows {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn frobenius_norm(&self) -> f64 {
        vector::norm2(&self.data)
    }

    pub(crate) fn to_nalgebra(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_column_slice(self.nrows, self.ncols, &self.data)
    }

    pub(crate) fn from_nalgebra(m: &nalgebra::DMatrix<f64>) -> Self {
        Self {
            nrows: m.nrows(),
            ncols: m.ncols(),
            data: m.as_slice().to_vec(),
        }
    }
}
