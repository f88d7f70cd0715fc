//! Krylov basis generation.
//!
//! Three ways to produce the next basis column from the image `w` of the last
//! one under `M_L⁻¹ A M_R⁻¹`:
//!
//! * truncated Arnoldi: orthogonalize `w` against the previous `t` columns;
//! * sketch-and-select (pinv): pick the `t` previous columns with the largest
//!   coefficients in the sketched least-squares fit of `Sw` by `SB`, and
//!   orthogonalize against those;
//! * full modified Gram–Schmidt Arnoldi, which also records the Hessenberg matrix.
//!
//! Every column is normalized; `Z = M_R⁻¹B` and the sketches `SB`, `SZ` are kept
//! column-aligned with `B`, along with incremental QR factorizations of `SB` and
//! `SZ` that the diagnostics reuse.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{back_substitute, vector, DenseMatrix, ThinQr};
use crate::operator::PreconditionedOperator;
use crate::precond::Preconditioner;
use crate::sketch::SketchOperator;
use crate::UNIT_ROUNDOFF;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasisKind {
    Truncated,
    SketchSelect,
    Mgs,
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisKind::Truncated => "trunc",
            BasisKind::SketchSelect => "ssa",
            BasisKind::Mgs => "mgs",
        })
    }
}

impl FromStr for BasisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trunc" | "truncated" => Ok(BasisKind::Truncated),
            "ssa" | "ssa-pinv" => Ok(BasisKind::SketchSelect),
            "mgs" => Ok(BasisKind::Mgs),
            other => Err(Error::InvalidConfig(format!(
                "unknown basis kind `{other}`"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Extended,
    /// The orthogonalized image fell below `u·‖w‖`; the basis was not extended.
    Breakdown,
}

#[derive(Clone, Debug)]
pub struct KrylovBasis {
    kind: BasisKind,
    t: usize,
    b: DenseMatrix,
    sb: DenseMatrix,
    z: Option<DenseMatrix>,
    sz: Option<DenseMatrix>,
    sb_qr: ThinQr,
    sz_qr: Option<ThinQr>,
    hessenberg: Vec<Vec<f64>>,
    last_selection: Vec<usize>,
}

impl KrylovBasis {
    /// Starts a basis with `B₁ = start/‖start‖`.
    pub fn new(
        kind: BasisKind,
        t: usize,
        start: &[f64],
        sketch: &SketchOperator,
        right: &Preconditioner,
    ) -> Result<Self> {
        if t == 0 {
            return Err(Error::InvalidConfig(
                "truncation parameter must be at least 1".into(),
            ));
        }
        let norm = vector::norm2(start);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidConfig(
                "starting vector must be nonzero and finite".into(),
            ));
        }
        let n = start.len();
        let s = sketch.s();
        let preconditioned = !right.is_identity();
        let mut basis = Self {
            kind,
            t,
            b: DenseMatrix::with_rows(n),
            sb: DenseMatrix::with_rows(s),
            z: preconditioned.then(|| DenseMatrix::with_rows(n)),
            sz: preconditioned.then(|| DenseMatrix::with_rows(s)),
            sb_qr: ThinQr::new(s),
            sz_qr: preconditioned.then(|| ThinQr::new(s)),
            hessenberg: Vec::new(),
            last_selection: Vec::new(),
        };
        let mut v = start.to_vec();
        vector::scale(1.0 / norm, &mut v);
        basis.push(v, sketch, right)?;
        Ok(basis)
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    /// Number of columns.
    pub fn len(&self) -> usize {
        self.b.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn set_t(&mut self, t: usize) {
        assert!(t >= 1);
        self.t = t;
    }

    pub fn b(&self) -> &DenseMatrix {
        &self.b
    }

    pub fn sb(&self) -> &DenseMatrix {
        &self.sb
    }

    /// `Z = M_R⁻¹B` (the same storage as `B` without right preconditioning).
    pub fn z(&self) -> &DenseMatrix {
        self.z.as_ref().unwrap_or(&self.b)
    }

    pub fn sz(&self) -> &DenseMatrix {
        self.sz.as_ref().unwrap_or(&self.sb)
    }

    /// Incremental QR of `SB`.
    pub fn sb_qr(&self) -> &ThinQr {
        &self.sb_qr
    }

    /// Incremental QR of `SZ`.
    pub fn sz_qr(&self) -> &ThinQr {
        self.sz_qr.as_ref().unwrap_or(&self.sb_qr)
    }

    /// Hessenberg columns of the MGS mode: column `j` holds `h_{0..=j+1, j}`.
    pub fn hessenberg(&self) -> &[Vec<f64>] {
        &self.hessenberg
    }

    /// Columns the most recent step orthogonalized against (ascending).
    pub fn last_selection(&self) -> &[usize] {
        &self.last_selection
    }

    /// Image of the newest column under the preconditioned operator.
    pub fn image_of_last(&self, op: &PreconditionedOperator<'_>) -> Vec<f64> {
        op.apply_left(self.z().column(self.len() - 1))
    }

    /// One step of the configured kind.
    pub fn step(
        &mut self,
        op: &PreconditionedOperator<'_>,
        sketch: &SketchOperator,
    ) -> Result<StepOutcome> {
        let w = self.image_of_last(op);
        self.extend_from_image(w, sketch, op.right)
    }

    pub fn truncated_arnoldi_step(
        &mut self,
        op: &PreconditionedOperator<'_>,
        sketch: &SketchOperator,
    ) -> Result<StepOutcome> {
        let w = self.image_of_last(op);
        self.extend_truncated(w, sketch, op.right)
    }

    pub fn ssa_pinv_step(
        &mut self,
        op: &PreconditionedOperator<'_>,
        sketch: &SketchOperator,
    ) -> Result<StepOutcome> {
        let w = self.image_of_last(op);
        self.extend_sketch_select(w, sketch, op.right)
    }

    pub fn mgs_arnoldi_step(
        &mut self,
        op: &PreconditionedOperator<'_>,
        sketch: &SketchOperator,
    ) -> Result<StepOutcome> {
        let w = self.image_of_last(op);
        self.extend_mgs(w, sketch, op.right)
    }

    /// Extends the basis from `w`, the image of the newest column, using the configured kind.
    pub fn extend_from_image(
        &mut self,
        w: Vec<f64>,
        sketch: &SketchOperator,
        right: &Preconditioner,
    ) -> Result<StepOutcome> {
        match self.kind {
            BasisKind::Truncated => self.extend_truncated(w, sketch, right),
            BasisKind::SketchSelect => self.extend_sketch_select(w, sketch, right),
            BasisKind::Mgs => self.extend_mgs(w, sketch, right),
        }
    }

    fn extend_truncated(
        &mut self,
        w: Vec<f64>,
        sketch: &SketchOperator,
        right: &Preconditioner,
    ) -> Result<StepOutcome> {
        let k = self.len();
        let window: Vec<usize> = (k.saturating_sub(self.t)..k).collect();
        self.orthogonalize_and_push(w, window, sketch, right)
            .map(|(o, _)| o)
    }

    fn extend_mgs(
        &mut self,
        w: Vec<f64>,
        sketch: &SketchOperator,
        right: &Preconditioner,
    ) -> Result<StepOutcome> {
        let k = self.len();
        let (outcome, column) = self.orthogonalize_and_push(w, (0..k).collect(), sketch, right)?;
        self.hessenberg.push(column);
        Ok(outcome)
    }

    fn extend_sketch_select(
        &mut self,
        w: Vec<f64>,
        sketch: &SketchOperator,
        right: &Preconditioner,
    ) -> Result<StepOutcome> {
        let k = self.len();
        let selection = if self.t >= k {
            (0..k).collect()
        } else {
            let sw = sketch.apply(&w)?;
            let coeffs = self.sketched_coefficients(&sw)?;
            select_largest(&coeffs, self.t)
        };
        self.orthogonalize_and_push(w, selection, sketch, right)
            .map(|(o, _)| o)
    }

    /// `argmin_c ‖SB·c − Sw‖` through the maintained QR of `SB`, falling back to an
    /// SVD pseudoinverse when the triangular factor is numerically singular.
    fn sketched_coefficients(&self, sw: &[f64]) -> Result<Vec<f64>> {
        let qty = self.sb_qr.u().tr_matvec(sw)?;
        match back_substitute(self.sb_qr.t(), &qty) {
            Ok(c) if vector::all_finite(&c) => Ok(c),
            _ => {
                let sb = self.sb.to_nalgebra();
                let (rows, cols) = sb.shape();
                let sigma_max = sb.clone().singular_values().max();
                let tol = rows.max(cols) as f64 * f64::EPSILON * sigma_max;
                let pinv = sb
                    .pseudo_inverse(tol)
                    .map_err(|e| Error::InvalidConfig(e.to_string()))?;
                Ok((pinv * nalgebra::DVector::from_column_slice(sw))
                    .as_slice()
                    .to_vec())
            }
        }
    }

    /// Orthogonalizes `w` against `against` (ascending, one MGS pass), normalizes, and
    /// appends. Returns the outcome and the coefficient column (including the
    /// pre-normalization norm as the last entry).
    fn orthogonalize_and_push(
        &mut self,
        mut w: Vec<f64>,
        against: Vec<usize>,
        sketch: &SketchOperator,
        right: &Preconditioner,
    ) -> Result<(StepOutcome, Vec<f64>)> {
        let k = self.len();
        let w_norm = vector::norm2(&w);
        let mut column = vec![0.0; k + 1];
        for &l in &against {
            let bl = self.b.column(l);
            let h = vector::dot(bl, &w);
            vector::axpy(-h, bl, &mut w);
            column[l] = h;
        }
        let norm = vector::norm2(&w);
        column[k] = norm;
        self.last_selection = against;
        if norm.is_nan() || norm < UNIT_ROUNDOFF * w_norm || norm == 0.0 {
            return Ok((StepOutcome::Breakdown, column));
        }
        vector::scale(1.0 / norm, &mut w);
        self.push(w, sketch, right)?;
        Ok((StepOutcome::Extended, column))
    }

    fn push(
        &mut self,
        b_col: Vec<f64>,
        sketch: &SketchOperator,
        right: &Preconditioner,
    ) -> Result<()> {
        let sb_col = sketch.apply(&b_col)?;
        self.sb_qr.append(&sb_col)?;
        self.sb.push_column(&sb_col)?;
        if let (Some(z), Some(sz), Some(sz_qr)) =
            (self.z.as_mut(), self.sz.as_mut(), self.sz_qr.as_mut())
        {
            let z_col = right.apply_inverse(&b_col);
            let sz_col = sketch.apply(&z_col)?;
            sz_qr.append(&sz_col)?;
            sz.push_column(&sz_col)?;
            z.push_column(&z_col)?;
        }
        self.b.push_column(&b_col)
    }
}

/// Indices of the `t` largest `|c_l|`; ties go to the most recent column, then to the
/// lowest index. Returned in ascending order.
pub fn select_largest(coeffs: &[f64], t: usize) -> Vec<usize> {
    let last = coeffs.len().saturating_sub(1);
    let mag = |l: usize| {
        if coeffs[l].is_finite() {
            coeffs[l].abs()
        } else {
            0.0
        }
    };
    let mut order: Vec<usize> = (0..coeffs.len()).collect();
    order.sort_by(|&p, &q| {
        mag(q)
            .total_cmp(&mag(p))
            .then_with(|| (q == last).cmp(&(p == last)))
            .then_with(|| p.cmp(&q))
    });
    order.truncate(t);
    order.sort_unstable();
    order
}
