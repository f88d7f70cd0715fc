//! Preconditioners applied through their inverse action `M⁻¹v`.

use std::fmt;
use std::str::FromStr;

use crate::error::{check_len, Error, Result};
use crate::linalg::SparseMatrixCsr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PreconditionerKind {
    Identity,
    Jacobi,
    Ilu0,
}

impl fmt::Display for PreconditionerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PreconditionerKind::Identity => "identity",
            PreconditionerKind::Jacobi => "jacobi",
            PreconditionerKind::Ilu0 => "ilu0",
        })
    }
}

impl FromStr for PreconditionerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" | "none" => Ok(Self::Identity),
            "jacobi" => Ok(Self::Jacobi),
            "ilu0" => Ok(Self::Ilu0),
            other => Err(Error::InvalidConfig(format!(
                "unknown preconditioner `{other}`"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
enum Repr {
    Identity,
    Jacobi {
        inv_diag: Vec<f64>,
    },
    /// `L` is unit lower triangular (unit diagonal stored), `U` upper triangular.
    Ilu0 {
        l: SparseMatrixCsr,
        u: SparseMatrixCsr,
    },
}

#[derive(Clone, Debug)]
pub struct Preconditioner {
    n: usize,
    repr: Repr,
}

impl Preconditioner {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            repr: Repr::Identity,
        }
    }

    pub fn build(kind: PreconditionerKind, a: &SparseMatrixCsr) -> Result<Self> {
        match kind {
            PreconditionerKind::Identity => Ok(Self::identity(a.nrows())),
            PreconditionerKind::Jacobi => Self::build_jacobi(a),
            PreconditionerKind::Ilu0 => Self::build_ilu0(a),
        }
    }

    /// Stores `1/A[j,j]`.
    pub fn build_jacobi(a: &SparseMatrixCsr) -> Result<Self> {
        check_square(a)?;
        let inv_diag = (0..a.nrows())
            .map(|j| {
                let d = a.get(j, j);
                let inv = 1.0 / d;
                if d == 0.0 || !inv.is_finite() {
                    Err(Error::ZeroDiagonal { index: j })
                } else {
                    Ok(inv)
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self {
            n: a.nrows(),
            repr: Repr::Jacobi { inv_diag },
        })
    }

    /// Zero-fill incomplete LU in IKJ order, restricted to the pattern of `A`.
    ///
    /// A zero pivot is an error; no perturbation is applied.
    pub fn build_ilu0(a: &SparseMatrixCsr) -> Result<Self> {
        check_square(a)?;
        let n = a.nrows();
        let row_ptr = a.row_ptr();
        let col_idx = a.col_idx();
        let diag_pos = a
            .diagonal_positions()
            .into_iter()
            .enumerate()
            .map(|(i, p)| p.ok_or(Error::ZeroDiagonal { index: i }))
            .collect::<Result<Vec<usize>>>()?;
        let mut vals = a.values().to_vec();
        // position of column j in the current row, or usize::MAX
        let mut marker = vec![usize::MAX; n];

        for i in 0..n {
            let span = row_ptr[i]..row_ptr[i + 1];
            for p in span.clone() {
                marker[col_idx[p]] = p;
            }
            for p in row_ptr[i]..diag_pos[i] {
                let k = col_idx[p];
                let pivot = vals[diag_pos[k]];
                if pivot == 0.0 {
                    return Err(Error::ZeroPivot { row: k });
                }
                vals[p] /= pivot;
                let lik = vals[p];
                for q in diag_pos[k] + 1..row_ptr[k + 1] {
                    let target = marker[col_idx[q]];
                    if target != usize::MAX {
                        vals[target] -= lik * vals[q];
                    }
                }
            }
            if vals[diag_pos[i]] == 0.0 || !vals[diag_pos[i]].is_finite() {
                return Err(Error::ZeroPivot { row: i });
            }
            for p in span {
                marker[col_idx[p]] = usize::MAX;
            }
        }

        let mut l_trip = Vec::new();
        let mut u_trip = Vec::new();
        for i in 0..n {
            for p in row_ptr[i]..row_ptr[i + 1] {
                let j = col_idx[p];
                if j < i {
                    l_trip.push((i, j, vals[p]));
                } else {
                    u_trip.push((i, j, vals[p]));
                }
            }
            l_trip.push((i, i, 1.0));
        }
        Ok(Self {
            n,
            repr: Repr::Ilu0 {
                l: SparseMatrixCsr::from_triplets(n, n, &l_trip)?,
                u: SparseMatrixCsr::from_triplets(n, n, &u_trip)?,
            },
        })
    }

    pub fn kind(&self) -> PreconditionerKind {
        match self.repr {
            Repr::Identity => PreconditionerKind::Identity,
            Repr::Jacobi { .. } => PreconditionerKind::Jacobi,
            Repr::Ilu0 { .. } => PreconditionerKind::Ilu0,
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.repr, Repr::Identity)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn inverse_diagonal(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Jacobi { inv_diag } => Some(inv_diag),
            _ => None,
        }
    }

    /// The `(L, U)` factors of an ILU(0) preconditioner.
    pub fn ilu_factors(&self) -> Option<(&SparseMatrixCsr, &SparseMatrixCsr)> {
        match &self.repr {
            Repr::Ilu0 { l, u } => Some((l, u)),
            _ => None,
        }
    }

    /// `M⁻¹v`.
    ///
    /// # Panics
    /// If `v.len()` differs from the dimension the preconditioner was built for.
    pub fn apply_inverse(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n, "preconditioner dimension mismatch");
        match &self.repr {
            Repr::Identity => v.to_vec(),
            Repr::Jacobi { inv_diag } => v.iter().zip(inv_diag).map(|(x, d)| x * d).collect(),
            Repr::Ilu0 { l, u } => {
                let mut y = v.to_vec();
                for i in 0..self.n {
                    let (cols, vals) = l.row(i);
                    let mut acc = y[i];
                    for (&j, &lij) in cols.iter().zip(vals) {
                        if j < i {
                            acc -= lij * y[j];
                        }
                    }
                    y[i] = acc;
                }
                for i in (0..self.n).rev() {
                    let (cols, vals) = u.row(i);
                    // first stored entry of a U row is its diagonal
                    let mut acc = y[i];
                    for (&j, &uij) in cols.iter().zip(vals).skip(1) {
                        acc -= uij * y[j];
                    }
                    y[i] = acc / vals[0];
                }
                y
            }
        }
    }
}

fn check_square(a: &SparseMatrixCsr) -> Result<()> {
    check_len(a.nrows(), a.ncols())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(a: &SparseMatrixCsr) -> Vec<Vec<f64>> {
        (0..a.nrows())
            .map(|i| (0..a.ncols()).map(|j| a.get(i, j)).collect())
            .collect()
    }

    #[test]
    fn jacobi_examples() {
        let p = Preconditioner::build_jacobi(&SparseMatrixCsr::from_diagonal(&[2.0, 4.0])).unwrap();
        assert_eq!(p.inverse_diagonal().unwrap(), &[0.5, 0.25]);
        assert_eq!(p.apply_inverse(&[2.0, 4.0]), vec![1.0, 1.0]);
        let p = Preconditioner::build_jacobi(&SparseMatrixCsr::identity(3)).unwrap();
        assert_eq!(p.apply_inverse(&[1.0, -2.0, 3.0]), vec![1.0, -2.0, 3.0]);
        let singular = SparseMatrixCsr::from_diagonal(&[1.0, 1.0, 1.0, 0.0]);
        assert!(matches!(
            Preconditioner::build_jacobi(&singular),
            Err(Error::ZeroDiagonal { index: 3 })
        ));
    }

    #[test]
    fn identity_passthrough() {
        assert_eq!(
            Preconditioner::identity(2).apply_inverse(&[3.0, 4.0]),
            vec![3.0, 4.0]
        );
    }

    #[test]
    fn ilu0_of_diagonal() {
        let a = SparseMatrixCsr::from_diagonal(&[2.0, 5.0, -1.0]);
        let p = Preconditioner::build_ilu0(&a).unwrap();
        let (l, u) = p.ilu_factors().unwrap();
        assert_eq!(l, &SparseMatrixCsr::identity(3));
        assert_eq!(u, &a);
    }

    #[test]
    fn ilu0_of_unit_lower() {
        let a = SparseMatrixCsr::from_triplets(
            3,
            3,
            &[
                (0, 0, 1.0),
                (1, 0, 2.0),
                (1, 1, 1.0),
                (2, 0, -1.0),
                (2, 1, 3.0),
                (2, 2, 1.0),
            ],
        )
        .unwrap();
        let p = Preconditioner::build_ilu0(&a).unwrap();
        let (l, u) = p.ilu_factors().unwrap();
        assert_eq!(dense(l), dense(&a));
        assert_eq!(u, &SparseMatrixCsr::identity(3));
    }

    #[test]
    fn ilu0_full_two_by_two() {
        let a = SparseMatrixCsr::from_triplets(
            2,
            2,
            &[(0, 0, 4.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 4.0)],
        )
        .unwrap();
        let p = Preconditioner::build_ilu0(&a).unwrap();
        let (l, u) = p.ilu_factors().unwrap();
        assert_eq!(dense(l), vec![vec![1.0, 0.0], vec![0.25, 1.0]]);
        assert_eq!(dense(u), vec![vec![4.0, 1.0], vec![0.0, 3.75]]);
        let x = p.apply_inverse(&[5.0, 5.0]);
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
        assert_eq!(l.nnz() + u.nnz() - 2, a.nnz());
    }

    #[test]
    fn ilu0_zero_pivot_fails() {
        let a = SparseMatrixCsr::from_triplets(
            2,
            2,
            &[(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)],
        )
        .unwrap();
        assert!(matches!(
            Preconditioner::build_ilu0(&a),
            Err(Error::ZeroPivot { row: 1 })
        ));
        let missing =
            SparseMatrixCsr::from_triplets(2, 2, &[(0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)]).unwrap();
        assert!(matches!(
            Preconditioner::build_ilu0(&missing),
            Err(Error::ZeroDiagonal { index: 0 })
        ));
    }

    #[test]
    fn ilu0_matches_jacobi_on_diagonal() {
        let a = SparseMatrixCsr::from_diagonal(&[3.0, -7.0, 0.5, 11.0]);
        let v = [1.0, 2.0, 3.0, 4.0];
        let ilu = Preconditioner::build_ilu0(&a).unwrap().apply_inverse(&v);
        let jac = Preconditioner::build_jacobi(&a).unwrap().apply_inverse(&v);
        assert_eq!(ilu, jac);
    }
}
