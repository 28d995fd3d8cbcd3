//! Berg's technique on a periodized orbit: a unitary `v` close to the shift
//! that closes the orbit segment into a finite cycle, and the projection onto
//! that cycle.

use super::{c, commutator, op_norm, CMatrix};
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Values `f(T^j x)` for `j` in `start .. start + len`, one row per test function.
/// The shift acts cyclically on the window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRepresentation {
    pub start: i64,
    pub values: Vec<Vec<Complex64>>,
}

impl OrbitRepresentation {
    pub fn len(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Orbit of `x` under rotation by `alpha` (in turns), with test functions
    /// `e^{2 pi i m x}` for each mode `m`.
    pub fn rotation(alpha: f64, x: f64, start: i64, len: usize, modes: &[i64]) -> Self {
        let values = modes
            .iter()
            .map(|&m| {
                (0..len as i64)
                    .map(|j| {
                        let t = (x + (start + j) as f64 * alpha).rem_euclid(1.0);
                        Complex64::from_polar(1.0, 2.0 * PI * m as f64 * t)
                    })
                    .collect()
            })
            .collect();
        Self { start, values }
    }

    fn index(&self, j: i64) -> usize {
        (j - self.start).rem_euclid(self.len() as i64) as usize
    }

    /// The cyclic shift `xi_j -> xi_{j+1}`.
    pub fn shift(&self) -> CMatrix {
        let l = self.len();
        CMatrix::from_fn(l, l, |i, j| if i == (j + 1) % l { c(1.0) } else { c(0.0) })
    }

    /// `pi(f)` for the `which`-th test function.
    pub fn multiplier(&self, which: usize) -> CMatrix {
        CMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.values[which].clone()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BergReport {
    pub v: CMatrix,
    pub p: CMatrix,
    pub shift_minus_v: f64,
    pub p_v_commutator: f64,
    pub p_shift_commutator: f64,
    /// `||[p, pi(f)]||` per test function.
    pub p_f_commutators: Vec<f64>,
    pub n: usize,
}

impl BergReport {
    /// `||pi(u) - v|| < 4/n`, `||[p, v]|| <= 1e-12`, `||[p, pi(u)]|| < 8/n`, `||[p, pi(f)]|| < 2/n`.
    pub fn bounds_hold(&self) -> bool {
        let n = self.n as f64;
        self.shift_minus_v < 4.0 / n
            && self.p_v_commutator <= 1e-12
            && self.p_shift_commutator < 8.0 / n
            && self.p_f_commutators.iter().all(|&x| x < 2.0 / n)
    }
}

/// Rotates `xi_{r+k}` into `xi_{s+k}` over `k = 0..n` in steps of `pi / 2n`.
/// `p` projects onto `xi_{s+n}, ..., xi_{r-1}, zeta_0, ..., zeta_{n-1}`,
/// which `v` permutes cyclically and which contains `xi_{-n}, ..., xi_n`.
pub fn berg_projection(orbit: &OrbitRepresentation, n: usize, r: i64, s: i64) -> Result<BergReport> {
    let ni = n as i64;
    let len = orbit.len() as i64;
    if n == 0 || r <= ni || s >= -2 * ni {
        return Err(Error::PlacementError(format!("need r > n and s < -2n (n = {n}, r = {r}, s = {s})")));
    }
    if len < 4 * (r - s) {
        return Err(Error::PlacementError(format!("window of {len} indices is shorter than 4(r - s) = {}", 4 * (r - s))));
    }
    // seam strictly outside [s, r + n]
    if orbit.start >= s || orbit.start + len - 1 <= r + ni {
        return Err(Error::PlacementError(format!(
            "window {}..{} must contain {s}..={} with room for the seam",
            orbit.start,
            orbit.start + len,
            r + ni
        )));
    }
    for (fi, row) in orbit.values.iter().enumerate() {
        for k in 0..ni {
            let gap = (row[orbit.index(r + k)] - row[orbit.index(s + k)]).norm();
            if gap >= 1.0 / n as f64 {
                return Err(Error::HypothesisError(format!(
                    "|f_{fi}(T^(r+{k}) x) - f_{fi}(T^(s+{k}) x)| = {gap:e} >= 1/n"
                )));
            }
        }
    }
    let l = orbit.len();
    let unit = |j: i64| -> nalgebra::DVector<Complex64> {
        let mut v = nalgebra::DVector::zeros(l);
        v[orbit.index(j)] = c(1.0);
        v
    };
    let theta = |k: i64| k as f64 * PI / (2.0 * n as f64);
    let zeta = |k: i64| unit(r + k) * c(theta(k).cos()) + unit(s + k) * c(theta(k).sin());
    let eta = |k: i64| unit(r + k) * c(theta(k).sin()) - unit(s + k) * c(theta(k).cos());
    let shift = orbit.shift();
    let mut v = shift.clone();
    for k in 0..ni {
        for j in [r + k, s + k] {
            v.column_mut(orbit.index(j)).fill(c(0.0));
        }
    }
    for k in 0..ni {
        v += zeta(k + 1) * zeta(k).adjoint() + eta(k + 1) * eta(k).adjoint();
    }
    let mut p = CMatrix::zeros(l, l);
    for j in s + ni..r {
        p[(orbit.index(j), orbit.index(j))] = c(1.0);
    }
    for k in 0..ni {
        p += zeta(k) * zeta(k).adjoint();
    }
    let shift_minus_v = op_norm(&(&shift - &v));
    let p_v_commutator = op_norm(&commutator(&p, &v));
    let p_shift_commutator = op_norm(&commutator(&p, &shift));
    let p_f_commutators = (0..orbit.values.len()).map(|f| op_norm(&commutator(&p, &orbit.multiplier(f)))).collect();
    let report = BergReport { v, p, shift_minus_v, p_v_commutator, p_shift_commutator, p_f_commutators, n };
    if !report.bounds_hold() {
        return Err(Error::BoundViolated(format!(
            "Berg norms {:e}, {:e}, {:e}, {:?} at n = {n}",
            report.shift_minus_v, report.p_v_commutator, report.p_shift_commutator, report.p_f_commutators
        )));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::super::is_unitary;
    use super::*;

    #[test]
    fn constant_function() {
        let orbit = OrbitRepresentation { start: -30, values: vec![vec![c(1.0); 90]] };
        let rep = berg_projection(&orbit, 4, 10, -9).unwrap();
        assert_eq!(rep.p_f_commutators[0], 0.0);
        assert!(is_unitary(&rep.v, 1e-12));
        assert!(rep.p_v_commutator <= 1e-12);
        // p dominates xi_{-n..n}
        for j in -4..=4 {
            let i = orbit.index(j);
            assert!((rep.p[(i, i)].re - 1.0).abs() < 1e-12);
        }
        assert!(matches!(berg_projection(&orbit, 4, 4, -9), Err(Error::PlacementError(_))));
    }

    #[test]
    fn golden_rotation() {
        let alpha = (5f64.sqrt() - 1.0) / 2.0;
        // 21 alpha is within 0.012 of an integer; r - s = 21
        let orbit = OrbitRepresentation::rotation(alpha, 0.0, -60, 100, &[1]);
        let rep = berg_projection(&orbit, 4, 11, -10).unwrap();
        assert!(rep.bounds_hold());
        let far = OrbitRepresentation::rotation(alpha, 0.0, -60, 100, &[1]);
        assert!(matches!(berg_projection(&far, 4, 11, -9), Err(Error::HypothesisError(_))));
    }
}
