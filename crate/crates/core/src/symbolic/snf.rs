//! Smith normal form of integer matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IMatrix = Vec<Vec<BigInt>>;

/// `D = U A V` with `U`, `V` unimodular and `D` diagonal, `d_i | d_{i+1}`,
/// `d_i >= 0`. Only `V` is kept.
#[derive(Debug, Clone, PartialEq)]
pub struct SmithForm {
    pub diagonal: Vec<BigInt>,
    pub right: IMatrix,
}

pub fn circulant(coeffs: &[i64]) -> IMatrix {
    // row k: (A x)_k = sum_j c_j x_{k+j}
    let n = coeffs.len();
    (0..n)
        .map(|k| (0..n).map(|i| BigInt::from(coeffs[(i + n - k) % n])).collect())
        .collect()
}

fn swap_cols(m: &mut IMatrix, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

// col_b -= f * col_a
fn sub_col(m: &mut IMatrix, a: usize, b: usize, f: &BigInt) {
    for row in m.iter_mut() {
        let v = &row[a] * f;
        row[b] -= v;
    }
}

fn sub_row(m: &mut IMatrix, a: usize, b: usize, f: &BigInt) {
    let ra = m[a].clone();
    for (x, y) in m[b].iter_mut().zip(ra) {
        *x -= y * f;
    }
}

pub fn smith_normal_form(a: &IMatrix) -> SmithForm {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m = a.clone();
    let mut v: IMatrix = (0..cols)
        .map(|i| (0..cols).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let steps = rows.min(cols);
    let mut t = 0;
    while t < steps {
        // pivot: least nonzero absolute value in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !m[i][j].is_zero() && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        m.swap(t, pi);
        swap_cols(&mut m, t, pj);
        swap_cols(&mut v, t, pj);
        let mut clean = true;
        for i in t + 1..rows {
            if !m[i][t].is_zero() {
                let f = m[i][t].div_floor(&m[t][t]);
                sub_row(&mut m, t, i, &f);
                clean &= m[i][t].is_zero();
            }
        }
        for j in t + 1..cols {
            if !m[t][j].is_zero() {
                let f = m[t][j].div_floor(&m[t][t]);
                sub_col(&mut m, t, j, &f);
                sub_col(&mut v, t, j, &f);
                clean &= m[t][j].is_zero();
            }
        }
        if !clean {
            continue;
        }
        // divisibility: fold an offending row into row t and retry
        let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&m[i][j] % &m[t][t]).is_zero()));
        if let Some(i) = bad {
            let one = -BigInt::one();
            sub_row(&mut m, i, t, &one);
            continue;
        }
        t += 1;
    }
    for k in 0..steps {
        if m[k][k].is_negative() {
            for row in m.iter_mut() {
                row[k] = -row[k].clone();
            }
            for row in v.iter_mut() {
                row[k] = -row[k].clone();
            }
        }
    }
    SmithForm { diagonal: (0..steps).map(|k| m[k][k].clone()).collect(), right: v }
}

/// `|det|` by fraction-free elimination (Bareiss).
pub fn abs_determinant(a: &IMatrix) -> BigInt {
    let n = a.len();
    let mut m = a.clone();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else { return BigInt::zero() };
            m.swap(k, p);
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    if n == 0 {
        BigInt::one()
    } else {
        m[n - 1][n - 1].abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn im(rows: &[&[i64]]) -> IMatrix {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn mul(a: &IMatrix, b: &IMatrix) -> IMatrix {
        a.iter()
            .map(|r| (0..b[0].len()).map(|j| r.iter().zip(b).map(|(x, br)| x * &br[j]).sum()).collect())
            .collect()
    }

    #[test]
    fn known_forms() {
        let s = smith_normal_form(&im(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]));
        assert_eq!(s.diagonal, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        let s = smith_normal_form(&circulant(&[3, -1, -1]));
        assert_eq!(s.diagonal, vec![BigInt::from(1), BigInt::from(4), BigInt::from(4)]);
        // A V has the same column lattice image shape: columns k with d_k = 0 lie in ker A
        let a = im(&[&[1, 1], &[1, 1]]);
        let s = smith_normal_form(&a);
        assert_eq!(s.diagonal[1], BigInt::zero());
        let av = mul(&a, &s.right);
        assert!(av.iter().all(|r| r[1].is_zero()));
    }

    #[test]
    fn determinant_matches_diagonal() {
        for c in [vec![2, 0, 0, 0, 0], vec![3, -1, 0, -1], vec![1, 2, 3], vec![5, 1, 0, 0, 1, 0]] {
            let a = circulant(&c);
            let s = smith_normal_form(&a);
            let prod: BigInt = s.diagonal.iter().product();
            assert_eq!(prod, abs_determinant(&a));
        }
    }
}
