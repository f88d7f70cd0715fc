use crate::error::{check_len, Result};
use crate::linalg::SparseMatrixCsr;
use crate::precond::Preconditioner;

/// The preconditioned operator `M_L⁻¹ A M_R⁻¹` together with its pieces.
#[derive(Clone, Copy, Debug)]
pub struct PreconditionedOperator<'a> {
    pub a: &'a SparseMatrixCsr,
    pub left: &'a Preconditioner,
    pub right: &'a Preconditioner,
}

impl<'a> PreconditionedOperator<'a> {
    pub fn new(
        a: &'a SparseMatrixCsr,
        left: &'a Preconditioner,
        right: &'a Preconditioner,
    ) -> Result<Self> {
        check_len(a.nrows(), a.ncols())?;
        check_len(a.nrows(), left.dim())?;
        check_len(a.nrows(), right.dim())?;
        Ok(Self { a, left, right })
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// `M_L⁻¹ A z`, i.e. the operator applied to an already right-preconditioned vector.
    pub fn apply_left(&self, z: &[f64]) -> Vec<f64> {
        let mut az = vec![0.0; self.dim()];
        self.a.spmv_into(z, &mut az);
        self.left.apply_inverse(&az)
    }

    /// `M_R⁻¹ v`
    pub fn apply_right_inverse(&self, v: &[f64]) -> Vec<f64> {
        self.right.apply_inverse(v)
    }

    /// `M_L⁻¹ A M_R⁻¹ v`
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.apply_left(&self.apply_right_inverse(v))
    }
}
