//! Spectral rounding, cutting a projection into a compression, and the
//! cascade producing an exact partition of unity.

use super::{identity, is_projection, norm_bound, op_norm, CMatrix, Tolerances};
use crate::error::{Error, Result};
use nalgebra::SymmetricEigen;

fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * super::c(0.5)
}

/// Eigenvectors of a self-adjoint matrix with eigenvalue above 1/2, as columns.
fn upper_eigenvectors(a: &CMatrix, gap: f64) -> Result<(CMatrix, f64)> {
    let eig = SymmetricEigen::new(hermitian_part(a));
    let mut cols = Vec::new();
    let mut deviation: f64 = 0.0;
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if (l - 0.5).abs() < gap {
            return Err(Error::SpectralGap(l));
        }
        deviation = deviation.max(l.abs().min((l - 1.0).abs()));
        if l > 0.5 {
            cols.push(eig.eigenvectors.column(i).into_owned());
        }
    }
    let d = a.nrows();
    let basis = if cols.is_empty() { CMatrix::zeros(d, 0) } else { CMatrix::from_columns(&cols) };
    Ok((basis, deviation))
}

/// Spectral projection onto eigenvalues above 1/2, with
/// `||q - a|| = max distance of the spectrum to {0, 1}`.
pub fn round_to_projection(a: &CMatrix, gap_tol: f64) -> Result<(CMatrix, f64)> {
    let (b, deviation) = upper_eigenvectors(a, gap_tol)?;
    let q = &b * b.adjoint();
    Ok((q, deviation))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutReport {
    pub q_prime: CMatrix,
    pub pq_norm: f64,
    pub q_minus_a: f64,
    pub a_sq_minus_a: f64,
    pub q_prime_minus_q: f64,
}

/// Projection `q'` inside `(1 - p) M_d (1 - p)` close to `q`, obtained by
/// rounding `a = (1 - p) q (1 - p)` within the compression.
pub fn cut_projection(p: &CMatrix, q: &CMatrix, delta_cap: f64, tol: &Tolerances) -> Result<CutReport> {
    let d = q.nrows();
    if p.shape() != q.shape() || d != q.ncols() {
        return Err(Error::Dimension("p and q must be square of the same size".into()));
    }
    if !is_projection(p, tol.input) || !is_projection(q, tol.input) {
        return Err(Error::HypothesisError("p and q must be projections".into()));
    }
    let delta = op_norm(&(p * q));
    if delta >= delta_cap {
        return Err(Error::DeltaExceeded { norm: delta, cap: delta_cap });
    }
    if delta == 0.0 {
        return Ok(CutReport { q_prime: q.clone(), pq_norm: 0.0, q_minus_a: 0.0, a_sq_minus_a: 0.0, q_prime_minus_q: 0.0 });
    }
    let one_minus_p = identity(d) - p;
    let a = &one_minus_p * q * &one_minus_p;
    let q_minus_a = op_norm(&(q - &a));
    let a_sq_minus_a = op_norm(&(&a * &a - &a));
    let slack = tol.slack;
    if q_minus_a > 3.0 * delta + slack {
        return Err(Error::BoundViolated(format!("||q - a|| = {q_minus_a:e} > 3||pq|| = {:e}", 3.0 * delta)));
    }
    if a_sq_minus_a > 9.0 * delta + slack {
        return Err(Error::BoundViolated(format!("||a^2 - a|| = {a_sq_minus_a:e} > 9||pq|| = {:e}", 9.0 * delta)));
    }
    // orthonormal basis of the range of 1 - p
    let (b, _) = upper_eigenvectors(&one_minus_p, tol.gap)?;
    let compressed = b.adjoint() * q * &b;
    let (qc, _) = round_to_projection(&compressed, tol.gap)?;
    let q_prime = &b * qc * b.adjoint();
    let q_prime_minus_q = op_norm(&(&q_prime - q));
    if q_prime_minus_q > 6.0 * delta + slack {
        return Err(Error::BoundViolated(format!("||q' - q|| = {q_prime_minus_q:e} > 6||pq|| = {:e}", 6.0 * delta)));
    }
    Ok(CutReport { q_prime, pq_norm: delta, q_minus_a, a_sq_minus_a, q_prime_minus_q })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyReport {
    pub projections: Vec<CMatrix>,
    /// `max_i ||p_i - a_i||`.
    pub max_deviation: f64,
    /// Per-stage `||(p_1 + ... + p_k) q_{k+1}||`.
    pub cascade: Vec<f64>,
    /// Bound on `max_i ||p_i - a_i||` assembled from the measured stages.
    pub bound: f64,
}

/// Input threshold for an `n`-member family: `4 n eta < 1`.
pub fn cascade_threshold(n: usize) -> f64 {
    1.0 / (4.0 * n as f64)
}

/// Pairwise orthogonal projections summing to one, close to `a_1, ..., a_n`.
pub fn orthogonalize_family(a: &[CMatrix], tol: &Tolerances) -> Result<FamilyReport> {
    let n = a.len();
    let Some(first) = a.first() else {
        return Err(Error::CascadeExceeded("empty family".into()));
    };
    let d = first.nrows();
    if a.iter().any(|x| x.shape() != (d, d)) {
        return Err(Error::Dimension("family members differ in shape".into()));
    }
    let total = a.iter().fold(CMatrix::zeros(d, d), |s, x| s + x);
    let sum_defect = op_norm(&(total - identity(d)));
    if sum_defect > tol.input {
        return Err(Error::CascadeExceeded(format!("||sum a_i - 1|| = {sum_defect:e} > {:e}", tol.input)));
    }
    let mut eta: f64 = 0.0;
    for (i, x) in a.iter().enumerate() {
        eta = eta.max(op_norm(&(x * x - x)));
        for y in &a[i + 1..] {
            eta = eta.max(norm_bound(&(x * y))).max(norm_bound(&(y * x)));
        }
    }
    let tau = cascade_threshold(n);
    if eta >= tau {
        return Err(Error::CascadeExceeded(format!(
            "max(||a_i^2 - a_i||, ||a_i a_j||) = {eta:e} >= 1/(4n) = {tau:e}"
        )));
    }
    let mut projections: Vec<CMatrix> = Vec::with_capacity(n);
    let mut bounds = Vec::with_capacity(n);
    let mut cascade = Vec::new();
    let mut acc = CMatrix::zeros(d, d);
    for (k, x) in a.iter().enumerate().take(n - 1) {
        let (q, dev) = round_to_projection(x, tol.gap)?;
        let p = if k == 0 {
            cascade.push(0.0);
            bounds.push(dev);
            q
        } else {
            let cut = cut_projection(&acc, &q, 0.25, tol).map_err(|e| match e {
                Error::DeltaExceeded { norm, cap } => Error::CascadeExceeded(format!(
                    "stage {}: ||(p_1 + ... + p_{k}) q_{}|| = {norm:e} >= {cap}",
                    k + 1,
                    k + 1
                )),
                other => other,
            })?;
            cascade.push(cut.pq_norm);
            bounds.push(dev + 6.0 * cut.pq_norm);
            cut.q_prime
        };
        acc += &p;
        projections.push(p);
    }
    let last = identity(d) - &acc;
    if !is_projection(&last, tol.output) {
        return Err(Error::CascadeExceeded("1 - (p_1 + ... + p_{n-1}) is not a projection".into()));
    }
    bounds.push(bounds.iter().sum::<f64>() + sum_defect);
    projections.push(last);
    let deviations: Vec<f64> = projections.iter().zip(a).map(|(p, x)| op_norm(&(p - x))).collect();
    let max_deviation = deviations.iter().copied().fold(0.0, f64::max);
    for (i, (&dev, &b)) in deviations.iter().zip(&bounds).enumerate() {
        if dev > b + 1e-9 {
            return Err(Error::CascadeExceeded(format!("member {}: ||p_i - a_i|| = {dev:e} above the cascade bound {b:e}", i + 1)));
        }
    }
    let bound = bounds.into_iter().fold(0.0, f64::max);
    Ok(FamilyReport { projections, max_deviation, cascade, bound })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polar {
    pub unitary: CMatrix,
    /// `||v - v_raw||`.
    pub deviation: f64,
    /// `||v_raw v_raw^* - 1||`.
    pub delta_prime: f64,
}

/// Unitary factor of the polar decomposition.
pub fn polar_unitary(v_raw: &CMatrix, tol: &Tolerances) -> Result<Polar> {
    let d = v_raw.nrows();
    if v_raw.ncols() != d {
        return Err(Error::Dimension("polar decomposition needs a square matrix".into()));
    }
    let svd = v_raw.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= tol.singular * smax.max(1.0) {
        return Err(Error::Singular(smin));
    }
    let u = svd.u.expect("left vectors requested");
    let vt = svd.v_t.expect("right vectors requested");
    let unitary = u * vt;
    let deviation = op_norm(&(&unitary - v_raw));
    let delta_prime = op_norm(&(v_raw * v_raw.adjoint() - identity(d)));
    if deviation > delta_prime + tol.slack {
        return Err(Error::BoundViolated(format!("||v - v_raw|| = {deviation:e} > {delta_prime:e}")));
    }
    Ok(Polar { unitary, deviation, delta_prime })
}

#[cfg(test)]
mod tests {
    use super::super::{c, from_real, is_unitary};
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn rounding() {
        let (q, dev) = round_to_projection(&from_real(2, &[0.9, 0.0, 0.0, 0.1]), 0.1).unwrap();
        assert!(op_norm(&(q - from_real(2, &[1.0, 0.0, 0.0, 0.0]))) < 1e-12);
        assert!((dev - 0.1).abs() < 1e-12);
        assert!(matches!(round_to_projection(&from_real(2, &[0.5, 0.0, 0.0, 1.0]), 0.1), Err(Error::SpectralGap(_))));
        let p = from_real(2, &[0.5, 0.5, 0.5, 0.5]);
        assert!(op_norm(&(round_to_projection(&p, 0.1).unwrap().0 - &p)) < 1e-12);
    }

    #[test]
    fn two_dimensional_cut() {
        // p = e1 e1^*, q = u u^* with u at angle theta from e2
        let s: f64 = 0.01;
        let co = (1.0 - s * s).sqrt();
        let p = from_real(2, &[1.0, 0.0, 0.0, 0.0]);
        let q = from_real(2, &[s * s, s * co, s * co, co * co]);
        let tol = Tolerances::default();
        let r = cut_projection(&p, &q, 0.1, &tol).unwrap();
        // oracle: q' = e2 e2^*, ||q' - q|| = sin(theta), ||pq|| = sin(theta)
        assert!((r.pq_norm - s).abs() < 1e-12);
        assert!((r.q_prime_minus_q - s).abs() < 1e-12);
        assert!(op_norm(&(r.q_prime - from_real(2, &[0.0, 0.0, 0.0, 1.0]))) < 1e-12);
        let zero = CMatrix::zeros(2, 2);
        assert_eq!(cut_projection(&zero, &q, 0.1, &tol).unwrap().q_prime, q);
        let big = cut_projection(&p, &from_real(2, &[0.5, 0.5, 0.5, 0.5]), 0.1, &tol);
        assert!(matches!(big, Err(Error::DeltaExceeded { .. })));
    }

    #[test]
    fn polar() {
        let tol = Tolerances::default();
        let r = polar_unitary(&from_real(2, &[1.01, 0.0, 0.0, 0.99]), &tol).unwrap();
        assert!(op_norm(&(r.unitary - identity(2))) < 1e-12);
        assert!((r.deviation - 0.01).abs() < 1e-12);
        let rot = CMatrix::from_row_slice(2, 2, &[c(0.0), Complex64::new(0.0, 1.0), c(1.0), c(0.0)]);
        let r = polar_unitary(&rot, &tol).unwrap();
        assert!(is_unitary(&r.unitary, 1e-12) && op_norm(&(r.unitary - rot)) < 1e-12);
        assert!(matches!(polar_unitary(&from_real(2, &[1.0, 0.0, 0.0, 0.0]), &tol), Err(Error::Singular(_))));
    }

    #[test]
    fn exact_family_unchanged() {
        let a: Vec<CMatrix> = (0..3)
            .map(|i| CMatrix::from_fn(3, 3, |r, s| if r == i && s == i { c(1.0) } else { c(0.0) }))
            .collect();
        let rep = orthogonalize_family(&a, &Tolerances::default()).unwrap();
        assert!(rep.max_deviation < 1e-12);
        let mut bad = a.clone();
        bad[0] *= c(2.0);
        assert!(matches!(orthogonalize_family(&bad, &Tolerances::default()), Err(Error::CascadeExceeded(_))));
    }
}
