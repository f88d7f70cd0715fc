use crate::error::{check_len, Error, Result};
use crate::UNIT_ROUNDOFF;

use super::DenseMatrix;

/// Solves `T·y = rhs` for upper triangular `T`.
///
/// A diagonal entry with `|T[j,j]| < u·‖T‖_F` makes the system numerically
/// singular; the lowest such index is reported.
pub fn back_substitute(t: &DenseMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = t.ncols();
    check_len(n, t.nrows())?;
    check_len(n, rhs.len())?;
    let threshold = UNIT_ROUNDOFF * t.frobenius_norm();
    if let Some(index) = (0..n)
        .find(|&j| t.get(j, j).is_nan() || t.get(j, j).abs() < threshold || t.get(j, j) == 0.0)
    {
        return Err(Error::SingularSystem { index });
    }
    let mut y = rhs.to_vec();
    for j in (0..n).rev() {
        y[j] /= t.get(j, j);
        let yj = y[j];
        let col = t.column(j);
        for (yi, tij) in y[..j].iter_mut().zip(col) {
            *yi -= tij * yj;
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_system() {
        assert_eq!(
            back_substitute(&DenseMatrix::identity(2), &[5.0, 7.0]).unwrap(),
            vec![5.0, 7.0]
        );
    }

    #[test]
    fn two_by_two() {
        let t = DenseMatrix::from_rows(&[[2.0, 1.0], [0.0, 4.0]]).unwrap();
        assert_eq!(back_substitute(&t, &[4.0, 8.0]).unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn zero_diagonal_is_singular() {
        let t = DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 0.0]]).unwrap();
        assert!(matches!(
            back_substitute(&t, &[1.0, 1.0]),
            Err(Error::SingularSystem { index: 1 })
        ));
    }

    #[test]
    fn sub_threshold_diagonal_is_singular() {
        let t = DenseMatrix::from_rows(&[[1.0, 1.0], [0.0, 1e-17]]).unwrap();
        assert!(matches!(
            back_substitute(&t, &[1.0, 1.0]),
            Err(Error::SingularSystem { index: 1 })
        ));
    }

    #[test]
    fn nan_diagonal_is_singular() {
        let t = DenseMatrix::from_rows(&[[f64::NAN]]).unwrap();
        assert!(back_substitute(&t, &[1.0]).is_err());
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use crate::rng::{seeded, standard_normal};
    use proptest::prelude::*;
    use rand::Rng;

    /// Upper-triangular with diagonal in ±[1, 2] and small off-diagonal part, so κ stays below 10³.
    fn well_conditioned(seed: u64, i: usize) -> DenseMatrix {
        let mut rng = seeded(seed);
        let off = standard_normal(&mut rng, i * i);
        let mut t = DenseMatrix::zeros(i, i);
        for j in 0..i {
            for r in 0..j {
                t.set(r, j, off[j * i + r] / (4.0 * (i as f64).sqrt()));
            }
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            t.set(j, j, sign * rng.random_range(1.0..2.0));
        }
        t
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn round_trip(seed in any::<u64>(), i in 1usize..=200) {
            let t = well_conditioned(seed, i);
            let (hi, lo) = crate::linalg::svd_extrema(&t);
            prop_assume!(hi / lo <= 1e3);
            let rhs = crate::rng::normal_vector(seed ^ 1, i);
            let y = back_substitute(&t, &rhs).unwrap();
            let back = t.matvec(&y).unwrap();
            let err: Vec<f64> = back.iter().zip(&rhs).map(|(a, b)| a - b).collect();
            prop_assert!(crate::linalg::vector::norm2(&err) <= 1e-12 * crate::linalg::vector::norm2(&rhs));
        }
    }
}
