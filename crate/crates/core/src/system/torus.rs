//! Periodic points of the algebraic Z-action on `X_f`, the subgroup of
//! `(R/Z)^Z` annihilated by an integer Laurent polynomial `f`.

use crate::error::{Error, Result};
use crate::rational::{circle_dist, frac, pow2_neg, Rational};
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

/// Finitely supported integer combination `sum c_j t^j` over Z.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupRingElement {
    terms: Vec<(i64, i64)>,
}

impl GroupRingElement {
    /// Merges equal exponents and drops zero coefficients.
    pub fn new(terms: impl IntoIterator<Item = (i64, i64)>) -> Self {
        let mut map = std::collections::BTreeMap::new();
        for (e, c) in terms {
            *map.entry(e).or_insert(0i64) += c;
        }
        Self { terms: map.into_iter().filter(|&(_, c)| c != 0).collect() }
    }

    pub fn constant(c: i64) -> Self {
        Self::new([(0, c)])
    }

    pub fn terms(&self) -> &[(i64, i64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// First column of the `n x n` circulant of the image in `Z[Z/n]`.
    pub fn reduced(&self, n: usize) -> Vec<i64> {
        let mut c = vec![0i64; n];
        for &(e, k) in &self.terms {
            c[e.rem_euclid(n as i64) as usize] += k;
        }
        c
    }

    /// `|f^(theta)|` for `theta` in turns.
    pub fn fourier_abs(&self, theta: f64) -> f64 {
        let (mut re, mut im) = (0.0, 0.0);
        for &(e, c) in &self.terms {
            let a = 2.0 * std::f64::consts::PI * theta * e as f64;
            re += c as f64 * a.cos();
            im += c as f64 * a.sin();
        }
        re.hypot(im)
    }
}

/// An `n`-periodic point `x_k = values[k mod n]` of `(R/Z)^Z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TorusPoint {
    #[serde(with = "crate::rational::serde_rational::vec")]
    values: Vec<Rational>,
}

impl TorusPoint {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidPoint("periodic point needs a period".into()));
        }
        Ok(Self { values: values.iter().map(frac).collect() })
    }

    pub fn zero() -> Self {
        Self { values: vec![Rational::zero()] }
    }

    pub fn period(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn at(&self, k: i64) -> &Rational {
        &self.values[k.rem_euclid(self.values.len() as i64) as usize]
    }

    /// `(T x)_k = x_{k - steps}`.
    pub fn shifted(&self, steps: i64) -> Self {
        let n = self.values.len() as i64;
        Self { values: (0..n).map(|k| self.at(k - steps).clone()).collect() }
    }

    /// `sum_j c_j x_{k+j}` is an integer for every `k`.
    pub fn annihilated_by(&self, f: &GroupRingElement) -> bool {
        let n = self.values.len() as i64;
        (0..n).all(|k| {
            let s: Rational = f.terms().iter().map(|&(e, c)| self.at(k + e) * Rational::from_integer(c.into())).sum();
            s.is_integer()
        })
    }

    pub fn distance(&self, other: &Self) -> Rational {
        let span = self.period().lcm(&other.period()) as i64;
        let mut best = Rational::zero();
        for k in -span..=span {
            let d = circle_dist(self.at(k), other.at(k));
            if d.is_zero() {
                continue;
            }
            let v = pow2_neg(k.unsigned_abs() as usize) * d;
            if v > best {
                best = v;
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn membership_and_shift() {
        let f = GroupRingElement::new([(0, 3), (1, -1), (-1, -1)]);
        assert_eq!(f.reduced(3), vec![3, -1, -1]);
        // x = (1/4, 1/4, 1/2): 3x_k - x_{k+1} - x_{k-1}
        let x = TorusPoint::new(vec![q(1, 4), q(1, 4), q(1, 2)]).unwrap();
        assert!(x.annihilated_by(&f));
        assert!(x.shifted(1).annihilated_by(&f));
        assert_eq!(x.shifted(1).values()[0], q(1, 2));
        assert!(!TorusPoint::new(vec![q(1, 3)]).unwrap().annihilated_by(&GroupRingElement::constant(2)));
    }

    #[test]
    fn distance_weights_far_coordinates() {
        let a = TorusPoint::new(vec![q(0, 1), q(1, 2)]).unwrap();
        let b = TorusPoint::zero();
        // differs first at k = +-1 by 1/2
        assert_eq!(a.distance(&b), q(1, 4));
        assert_eq!(a.distance(&a), Rational::zero());
    }
}
