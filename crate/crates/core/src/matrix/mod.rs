//! Matrix constructions in `M_d(C)`: projection rounding and cutting,
//! orthogonalization of almost-projections, polar correction, permutation
//! extraction from approximate microstates, and the Berg projection on a
//! periodized orbit.

pub mod berg;
pub mod extract;
pub mod projection;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use berg::{berg_projection, BergReport, OrbitRepresentation};
pub use extract::{
    encode_action, extract_finite_action, match_labels, match_permutation, permutation_matrix, threshold_value,
    Extraction, MatrixTuple,
};
pub use projection::{cut_projection, orthogonalize_family, polar_unitary, round_to_projection, CutReport, FamilyReport, Polar};

pub type CMatrix = DMatrix<Complex64>;

/// Numerical tolerances shared by the matrix routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Output projections and unitaries.
    pub output: f64,
    /// Inputs claimed to be projections or to sum to one.
    pub input: f64,
    /// Forbidden band around 1/2 when rounding spectra.
    pub gap: f64,
    /// Trace comparison slack.
    pub trace: f64,
    /// Relative floor for singular values.
    pub singular: f64,
    /// Slack added to asserted inequalities.
    pub slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { output: 1e-10, input: 1e-8, gap: 0.1, trace: 0.4, singular: 1e-12, slack: 1e-12 }
    }
}

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn from_real(d: usize, entries: &[f64]) -> CMatrix {
    CMatrix::from_row_iterator(d, d, entries.iter().map(|&x| c(x)))
}

/// Operator norm (largest singular value), computed on the nonzero rows and columns.
pub fn op_norm(m: &CMatrix) -> f64 {
    let rows: Vec<usize> = (0..m.nrows()).filter(|&i| m.row(i).iter().any(|z| *z != Complex64::default())).collect();
    let cols: Vec<usize> = (0..m.ncols()).filter(|&j| m.column(j).iter().any(|z| *z != Complex64::default())).collect();
    if rows.is_empty() || cols.is_empty() {
        return 0.0;
    }
    let sub = CMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])]);
    sub.singular_values().max()
}

/// `min(||m||_F, sqrt(||m||_1 ||m||_inf))`, an upper bound for the operator norm.
pub fn norm_bound(m: &CMatrix) -> f64 {
    let fro = m.norm();
    let l1 = (0..m.ncols()).map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
    let linf = (0..m.nrows()).map(|i| m.row(i).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
    fro.min((l1 * linf).sqrt())
}

pub fn is_projection(q: &CMatrix, tol: f64) -> bool {
    op_norm(&(q * q - q)) <= tol && op_norm(&(q - q.adjoint())) <= tol
}

pub fn is_unitary(v: &CMatrix, tol: f64) -> bool {
    op_norm(&(v * v.adjoint() - identity(v.nrows()))) <= tol
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}
