use crate::error::{check_len, Error, Result};

use super::DenseMatrix;

/// Compressed-sparse-row matrix with strictly increasing column indices per row.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrixCsr {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrixCsr {
    /// Validates and wraps raw CSR arrays.
    pub fn new(
        nrows: usize,
        ncols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidMatrix(msg));
        if row_ptr.len() != nrows + 1 {
            return bad(format!(
                "row_ptr has length {}, expected {}",
                row_ptr.len(),
                nrows + 1
            ));
        }
        if row_ptr[0] != 0 {
            return bad("row_ptr[0] must be 0".into());
        }
        if col_idx.len() != values.len() || row_ptr[nrows] != col_idx.len() {
            return bad(format!(
                "row_ptr[nrows] = {}, col_idx has {} entries, values has {}",
                row_ptr[nrows],
                col_idx.len(),
                values.len()
            ));
        }
        for r in 0..nrows {
            if row_ptr[r] > row_ptr[r + 1] {
                return bad(format!("row_ptr decreases at row {r}"));
            }
            let cols = &col_idx[row_ptr[r]..row_ptr[r + 1]];
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return bad(format!(
                    "column indices of row {r} are not strictly increasing"
                ));
            }
            if cols.last().is_some_and(|&c| c >= ncols) {
                return bad(format!("column index out of range in row {r}"));
            }
        }
        Ok(Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Assembles from 0-based `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        for &(r, c, _) in &sorted {
            if r >= nrows || c >= ncols {
                return Err(Error::InvalidMatrix(format!(
                    "entry ({r}, {c}) outside {nrows}×{ncols}"
                )));
            }
        }
        // stable sort keeps the summation order of duplicates equal to input order
        sorted.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in sorted {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self::new(nrows, ncols, row_ptr, col_idx, values)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: diag.to_vec(),
        }
    }

    /// Stores every entry of `m`, zeros included.
    pub fn from_dense(m: &DenseMatrix) -> Self {
        let (nrows, ncols) = (m.nrows(), m.ncols());
        let mut values = Vec::with_capacity(nrows * ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                values.push(m.get(i, j));
            }
        }
        Self {
            nrows,
            ncols,
            row_ptr: (0..=nrows).map(|r| r * ncols).collect(),
            col_idx: (0..nrows).flat_map(|_| 0..ncols).collect(),
            values,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `r`.
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        (&self.col_idx[span.clone()], &self.values[span])
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        cols.binary_search(&c).map_or(0.0, |k| vals[k])
    }

    /// Position of the stored diagonal entry of each row, if any.
    pub(crate) fn diagonal_positions(&self) -> Vec<Option<usize>> {
        (0..self.nrows.min(self.ncols))
            .map(|r| {
                let (cols, _) = self.row(r);
                cols.binary_search(&r).ok().map(|k| self.row_ptr[r] + k)
            })
            .collect()
    }

    /// `y = A·x`, each row accumulated in ascending column order.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.ncols, x.len())?;
        let mut y = vec![0.0; self.nrows];
        self.spmv_into(x, &mut y);
        Ok(y)
    }

    pub(crate) fn spmv_into(&self, x: &[f64], y: &mut [f64]) {
        for (r, yr) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(r);
            *yr = cols
                .iter()
                .zip(vals)
                .fold(0.0, |acc, (&c, &v)| acc + v * x[c]);
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc + v * v).sqrt()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.nrows, self.ncols);
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                m.set(r, c, v);
            }
        }
        m
    }

    /// `alpha·A` with the same pattern.
    pub fn scaled(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= alpha);
        out
    }

    /// `A + shift·I`; the diagonal is inserted into the pattern where missing.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut triplets: Vec<(usize, usize, f64)> = Vec::with_capacity(self.nnz() + self.nrows);
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            triplets.extend(cols.iter().zip(vals).map(|(&c, &v)| (r, c, v)));
            if r < self.ncols {
                triplets.push((r, r, shift));
            }
        }
        Self::from_triplets(self.nrows, self.ncols, &triplets).expect("pattern of a valid matrix")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two() -> SparseMatrixCsr {
        SparseMatrixCsr::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 2.0), (1, 0, 3.0), (1, 1, 4.0)])
            .unwrap()
    }

    #[test]
    fn spmv_examples() {
        let d = SparseMatrixCsr::from_diagonal(&[2.0, 3.0]);
        assert_eq!(d.spmv(&[1.0, 1.0]).unwrap(), vec![2.0, 3.0]);
        let id = SparseMatrixCsr::identity(4);
        assert_eq!(
            id.spmv(&[1.0, 2.0, 3.0, 4.0]).unwrap(),
            vec![1.0, 2.0, 3.0, 4.0]
        );
        assert_eq!(two_by_two().spmv(&[1.0, 1.0]).unwrap(), vec![3.0, 7.0]);
    }

    #[test]
    fn spmv_dimension_mismatch() {
        assert!(matches!(
            two_by_two().spmv(&[1.0]),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 1
            })
        ));
    }

    #[test]
    fn frobenius_examples() {
        assert_eq!(
            SparseMatrixCsr::from_triplets(3, 3, &[])
                .unwrap()
                .frobenius_norm(),
            0.0
        );
        assert_eq!(SparseMatrixCsr::identity(9).frobenius_norm(), 3.0);
        assert!((two_by_two().frobenius_norm() - 30f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn duplicates_are_summed() {
        let a = SparseMatrixCsr::from_triplets(2, 2, &[(0, 1, 5.0), (0, 1, 3.0)]).unwrap();
        assert_eq!(a.nnz(), 1);
        assert_eq!(a.get(0, 1), 8.0);
    }

    #[test]
    fn invalid_structures_rejected() {
        assert!(SparseMatrixCsr::new(1, 2, vec![0, 2], vec![1, 0], vec![1.0, 1.0]).is_err());
        assert!(SparseMatrixCsr::new(1, 2, vec![0, 1], vec![2], vec![1.0]).is_err());
        assert!(SparseMatrixCsr::new(2, 2, vec![0, 1, 0], vec![0], vec![1.0]).is_err());
        assert!(SparseMatrixCsr::new(1, 1, vec![1, 1], vec![0], vec![1.0]).is_err());
    }

    #[test]
    fn shift_inserts_missing_diagonal() {
        let a = SparseMatrixCsr::from_triplets(2, 2, &[(0, 1, 1.0)])
            .unwrap()
            .shifted(2.0);
        assert_eq!(a.get(0, 0), 2.0);
        assert_eq!(a.get(1, 1), 2.0);
        assert_eq!(a.get(0, 1), 1.0);
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use crate::rng::seeded;
    use proptest::prelude::*;
    use rand::Rng;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn spmv_matches_dense(seed in any::<u64>(), n in 1usize..=200, density in 0.0f64..0.3) {
            let mut rng = seeded(seed);
            let mut triplets = Vec::new();
            for r in 0..n {
                for c in 0..n {
                    if rng.random_bool(density) {
                        triplets.push((r, c, rng.random_range(-1.0..1.0)));
                    }
                }
            }
            let a = SparseMatrixCsr::from_triplets(n, n, &triplets).unwrap();
            let x = crate::rng::normal_vector(seed ^ 7, n);
            let y = a.spmv(&x).unwrap();
            // oracle: row-by-row sum over the dense expansion
            let d = a.to_dense();
            for (r, &yr) in y.iter().enumerate() {
                let mut exact = 0.0;
                let mut scale = 0.0;
                for (c, xc) in x.iter().enumerate() {
                    exact += d.get(r, c) * xc;
                    scale += (d.get(r, c) * xc).abs();
                }
                prop_assert!((yr - exact).abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE));
            }
        }
    }
}
