//! Recovering a finite action from approximate matrix images of a partition
//! of unity and of generator unitaries.

use super::projection::{orthogonalize_family, polar_unitary};
use super::{c, identity, norm_bound, op_norm, CMatrix, Tolerances};
use crate::action::FiniteAction;
use crate::error::{Error, Result};
use nalgebra::SymmetricEigen;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixTuple {
    pub dimension: usize,
    /// Approximate images of a partition of unity.
    pub projections: Vec<CMatrix>,
    /// Approximate images of the generators.
    pub unitaries: Vec<CMatrix>,
    /// Named tolerances carried with the tuple (`delta` is honoured by extraction).
    pub tolerances: BTreeMap<String, f64>,
}

impl MatrixTuple {
    pub fn new(projections: Vec<CMatrix>, unitaries: Vec<CMatrix>) -> Result<Self> {
        let d = projections.first().or(unitaries.first()).map_or(0, CMatrix::nrows);
        if d == 0 || projections.iter().chain(&unitaries).any(|m| m.shape() != (d, d)) {
            return Err(Error::Dimension("tuple members must be nonempty and share one square shape".into()));
        }
        Ok(Self { dimension: d, projections, unitaries, tolerances: BTreeMap::new() })
    }

    /// `||a^2 - a||`, `||a - a^*||` per projection and `||v v^* - 1||` per unitary.
    pub fn role_defects(&self) -> (Vec<f64>, Vec<f64>) {
        let p = self
            .projections
            .iter()
            .map(|a| op_norm(&(a * a - a)).max(op_norm(&(a - a.adjoint()))))
            .collect();
        let u = self.unitaries.iter().map(|v| op_norm(&(v * v.adjoint() - identity(self.dimension)))).collect();
        (p, u)
    }
}

/// Point projections `e_z e_z^*` and permutation unitaries `u_k e_z = e_{s_k z}`.
pub fn encode_action(action: &FiniteAction) -> MatrixTuple {
    let d = action.size();
    let projections = (0..d).map(|z| CMatrix::from_fn(d, d, |i, j| if i == z && j == z { c(1.0) } else { c(0.0) })).collect();
    let unitaries = action.tables().iter().map(|t| permutation_matrix(t)).collect();
    MatrixTuple { dimension: d, projections, unitaries, tolerances: BTreeMap::new() }
}

/// `w e_j = e_{sigma(j)}`.
pub fn permutation_matrix(sigma: &[usize]) -> CMatrix {
    let d = sigma.len();
    CMatrix::from_fn(d, d, |i, j| if sigma[j] == i { c(1.0) } else { c(0.0) })
}

/// Lexicographically least `sigma` with `label_q[sigma(j)] = label_p[j]`.
/// Trace mismatches are reported 1-based.
pub fn match_labels(label_p: &[usize], label_q: &[usize], members: usize) -> Result<Vec<usize>> {
    if label_p.len() != label_q.len() {
        return Err(Error::Dimension("families act on different dimensions".into()));
    }
    for i in 0..members {
        let tp = label_p.iter().filter(|&&l| l == i).count();
        let tq = label_q.iter().filter(|&&l| l == i).count();
        if tp != tq {
            return Err(Error::TraceMismatch(i + 1));
        }
    }
    let mut used = vec![false; label_q.len()];
    let mut sigma = Vec::with_capacity(label_p.len());
    for &l in label_p {
        let j = (0..label_q.len()).find(|&j| !used[j] && label_q[j] == l).expect("traces agree");
        used[j] = true;
        sigma.push(j);
    }
    Ok(sigma)
}

fn diagonal_labels(family: &[CMatrix], tol: f64) -> Result<Vec<usize>> {
    let d = family.first().map_or(0, CMatrix::nrows);
    let mut labels = vec![usize::MAX; d];
    for (i, p) in family.iter().enumerate() {
        if p.shape() != (d, d) {
            return Err(Error::Dimension("family members differ in shape".into()));
        }
        for r in 0..d {
            for s in 0..d {
                let z = p[(r, s)];
                let want = if r == s && (z.re - 1.0).abs() <= tol { 1.0 } else { 0.0 };
                if (z - c(want)).norm() > tol {
                    return Err(Error::HypothesisError(format!("member {} is not a diagonal projection", i + 1)));
                }
            }
            if (p[(r, r)].re - 1.0).abs() <= tol {
                if labels[r] != usize::MAX {
                    return Err(Error::HypothesisError("family members overlap".into()));
                }
                labels[r] = i;
            }
        }
    }
    if labels.contains(&usize::MAX) {
        return Err(Error::HypothesisError("family does not sum to the identity".into()));
    }
    Ok(labels)
}

/// Permutation `sigma` with `w P_i w^* = Q_i` for `w = permutation_matrix(sigma)`.
pub fn match_permutation(p: &[CMatrix], q: &[CMatrix], tol: &Tolerances) -> Result<Vec<usize>> {
    if p.len() != q.len() {
        return Err(Error::Dimension("families have different lengths".into()));
    }
    let lp = diagonal_labels(p, tol.input)?;
    let lq = diagonal_labels(q, tol.input)?;
    match_labels(&lp, &lq, p.len())
}

/// `((1 + d)^2 + (1 + d) + 1) d`.
pub fn threshold_value(delta: f64) -> f64 {
    ((1.0 + delta).powi(2) + (1.0 + delta) + 1.0) * delta
}

fn check_threshold(delta: f64) -> Result<()> {
    let v = threshold_value(delta);
    if v >= 0.25 {
        return Err(Error::ThresholdExceeded(format!(
            "((1+d)^2 + (1+d) + 1) d = {v:.6} >= 1/4 at d = {delta:e}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub action: FiniteAction,
    /// Projection index of each pure state of the diagonal.
    pub labels: Vec<usize>,
    pub delta: f64,
    pub threshold: f64,
    pub permutations: Vec<Vec<usize>>,
}

/// Round the family, polar-correct the unitaries, conjugate, round again in
/// the diagonal basis, match traces and read off permutations.
pub fn extract_finite_action(tuple: &MatrixTuple, tol: &Tolerances) -> Result<Extraction> {
    let d = tuple.dimension;
    let n = tuple.projections.len();
    if n == 0 || tuple.projections.iter().chain(&tuple.unitaries).any(|m| m.shape() != (d, d)) {
        return Err(Error::Dimension("tuple members must share the declared dimension".into()));
    }
    // self-adjoint parts, with the sum defect spread evenly
    let mut a: Vec<CMatrix> = tuple.projections.iter().map(|x| (x + x.adjoint()) * c(0.5)).collect();
    let total = a.iter().fold(CMatrix::zeros(d, d), |s, x| s + x);
    let spread = (total - identity(d)) * c(1.0 / n as f64);
    for x in a.iter_mut() {
        *x -= &spread;
    }
    let mut delta = tuple.tolerances.get("delta").copied().unwrap_or(0.0);
    for (i, x) in a.iter().enumerate() {
        delta = delta.max(op_norm(&(x * x - x)));
        for y in &a[i + 1..] {
            delta = delta.max(norm_bound(&(x * y)));
        }
    }
    for v in &tuple.unitaries {
        delta = delta.max(op_norm(&(v * v.adjoint() - identity(d))));
    }
    check_threshold(delta)?;
    let family = orthogonalize_family(&a, tol)?;
    delta = delta.max(family.max_deviation);
    // diagonalizing basis: ranges of p_1, ..., p_n in order
    let mut columns = Vec::with_capacity(d);
    let mut labels = Vec::with_capacity(d);
    for (i, p) in family.projections.iter().enumerate() {
        let eig = SymmetricEigen::new(p.clone());
        for (j, &l) in eig.eigenvalues.iter().enumerate() {
            if l > 0.5 {
                columns.push(eig.eigenvectors.column(j).into_owned());
                labels.push(i);
            }
        }
    }
    if columns.len() != d {
        return Err(Error::HypothesisError("rounded family does not span the space".into()));
    }
    let basis = CMatrix::from_columns(&columns);
    let mut permutations = Vec::with_capacity(tuple.unitaries.len());
    for u in &tuple.unitaries {
        let polar = polar_unitary(u, tol)?;
        delta = delta.max(polar.deviation);
        let w = basis.adjoint() * &polar.unitary * &basis;
        // weight of state j in the conjugated member i: sum over the block of |w_{j,l}|^2
        let mut weight = vec![vec![0.0; n]; d];
        for (l, &i) in labels.iter().enumerate() {
            for (j, row) in weight.iter_mut().enumerate() {
                row[i] += w[(j, l)].norm_sqr();
            }
        }
        let label_q: Vec<usize> = weight
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .max_by(|x, y| x.1.total_cmp(y.1).then(y.0.cmp(&x.0)))
                    .map(|(i, _)| i)
                    .expect("nonempty family")
            })
            .collect();
        for i in 0..n {
            let traced: f64 = weight.iter().map(|row| row[i]).sum();
            let rounded = label_q.iter().filter(|&&l| l == i).count() as f64;
            if (traced - rounded).abs() > tol.trace {
                return Err(Error::TraceMismatch(i + 1));
            }
        }
        permutations.push(match_labels(&labels, &label_q, n)?);
    }
    check_threshold(delta)?;
    let action = FiniteAction::new(d, permutations.clone())?;
    Ok(Extraction { action, labels, delta, threshold: threshold_value(delta), permutations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_family(labels: &[usize], members: usize) -> Vec<CMatrix> {
        let d = labels.len();
        (0..members)
            .map(|i| CMatrix::from_fn(d, d, |r, s| if r == s && labels[r] == i { c(1.0) } else { c(0.0) }))
            .collect()
    }

    #[test]
    fn permutation_matching() {
        let tol = Tolerances::default();
        let p = diag_family(&[0, 0, 0, 1, 1, 2], 3);
        assert_eq!(match_permutation(&p, &p, &tol).unwrap(), (0..6).collect::<Vec<_>>());
        let q = diag_family(&[1, 0, 2, 0, 1, 0], 3);
        let sigma = match_permutation(&p, &q, &tol).unwrap();
        let w = permutation_matrix(&sigma);
        for (pi, qi) in p.iter().zip(&q) {
            assert_eq!(&w * pi * w.adjoint(), *qi);
        }
        let r = diag_family(&[0, 0, 1, 1, 1, 2], 3);
        assert_eq!(match_permutation(&p, &r, &tol).unwrap_err(), Error::TraceMismatch(1));
    }

    #[test]
    fn exact_round_trip() {
        let action = FiniteAction::new(5, vec![vec![1, 2, 0, 4, 3], vec![0, 3, 2, 4, 1]]).unwrap();
        let got = extract_finite_action(&encode_action(&action), &Tolerances::default()).unwrap();
        assert_eq!(got.action, action);
        assert_eq!(got.labels, (0..5).collect::<Vec<_>>());
    }

    #[test]
    fn threshold() {
        assert!((threshold_value(0.2) - 0.728).abs() < 1e-12);
        let mut t = encode_action(&FiniteAction::cycle(3));
        t.tolerances.insert("delta".into(), 0.2);
        assert!(matches!(extract_finite_action(&t, &Tolerances::default()), Err(Error::ThresholdExceeded(_))));
    }
}
