//! Models of measure spaces and of single affine maps with a fixed point.

use crate::action::FiniteAction;
use crate::error::{Error, Result};
use crate::linalg::mat_vec;
use crate::rational::{int, Rational};
use crate::system::{Point, Polytope, Resolution, SystemDescriptor};
use crate::witness::{check_witness, omega_defect, DiscreteMeasure, TestFunction, Witness};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftedWitness {
    pub action: FiniteAction,
    /// Counts `m c_y` per base element; they sum to `m`.
    pub combinations: Vec<Vec<usize>>,
    pub measures: Vec<DiscreteMeasure>,
    pub m: usize,
    #[serde(with = "crate::rational::serde_rational")]
    pub base_defect: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub lift_defect: Rational,
}

fn binomial(n: usize, k: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

fn compositions(parts: usize, total: usize) -> Vec<Vec<usize>> {
    // lexicographically decreasing in the first coordinate
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut rest in compositions(parts - 1, total - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All `m`-quantized convex combinations of the base model, acted on by
/// push-forward, with `zeta` the push-forward of the base `zeta`.
pub fn affine_lift(
    system: &SystemDescriptor,
    base: &Witness,
    m: usize,
    omega: &[TestFunction],
    size_cap: usize,
) -> Result<LiftedWitness> {
    if m == 0 {
        return Err(Error::InvalidPoint("quantization m must be positive".into()));
    }
    let e = base.size();
    let n = binomial(e + m - 1, m).filter(|&n| n <= size_cap).ok_or_else(|| {
        Error::SizeOverflow(format!("C({}, {m}) combinations exceed cap {size_cap}", e + m - 1))
    })?;
    let combos = compositions(e, m);
    debug_assert_eq!(combos.len(), n);
    let index: HashMap<&[usize], usize> = combos.iter().enumerate().map(|(i, c)| (c.as_slice(), i)).collect();
    let tables: Vec<Vec<usize>> = (0..base.action.rank())
        .map(|s| {
            combos
                .iter()
                .map(|c| {
                    let mut moved = vec![0; e];
                    for (y, &k) in c.iter().enumerate() {
                        moved[base.action.apply(s, y)] += k;
                    }
                    index[moved.as_slice()]
                })
                .collect()
        })
        .collect();
    let action = FiniteAction::new(n, tables)?;
    let mi = int(m as i64);
    let measures: Vec<DiscreteMeasure> = combos
        .iter()
        .map(|c| {
            let (support, weights) = c
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(y, &k)| (base.zeta[y].clone(), int(k as i64) / &mi))
                .unzip();
            DiscreteMeasure { support, weights }
        })
        .collect();
    let base_defect = omega_defect(system, &base.action, &base.zeta, &base.scope, omega)?;
    // d_Omega(zeta(s c), s_* zeta(c)) with integrals taken termwise
    let mut lift_defect = Rational::zero();
    for f in omega {
        let at: Vec<Rational> = base.zeta.iter().map(|p| f.eval(system, p)).collect::<Result<_>>()?;
        for &s in &base.scope {
            let after: Vec<Rational> = base.zeta.iter().map(|p| f.eval_after(system, s, p)).collect::<Result<_>>()?;
            for (ci, c) in combos.iter().enumerate() {
                let image = &combos[action.apply(s, ci)];
                let lhs: Rational = image.iter().zip(&at).map(|(&k, v)| int(k as i64) * v).sum::<Rational>() / &mi;
                let rhs: Rational = c.iter().zip(&after).map(|(&k, v)| int(k as i64) * v).sum::<Rational>() / &mi;
                let d = if lhs > rhs { lhs - rhs } else { rhs - lhs };
                if d > lift_defect {
                    lift_defect = d;
                }
            }
        }
    }
    Ok(LiftedWitness { action, combinations: combos, measures, m, base_defect, lift_defect })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointModel {
    pub witness: Witness,
    /// `(v, k)` per element.
    pub labels: Vec<(usize, i64)>,
    #[serde(with = "crate::rational::serde_rational")]
    pub omega_defect: Rational,
    /// `(2/m) max ||f||`.
    #[serde(with = "crate::rational::serde_rational")]
    pub bound: Rational,
}

/// `E = V × {-m..m}` with the cyclic successor and
/// `zeta(v, k) = (1 - |k|/m) T^k v + (|k|/m) w`.
pub fn fixed_point_model(
    polytope: &Polytope,
    sample: &[Vec<Rational>],
    w: &[Rational],
    m: usize,
    omega: &[TestFunction],
    epsilon: &Rational,
    res: &Resolution,
) -> Result<FixedPointModel> {
    if m == 0 || sample.is_empty() {
        return Err(Error::InvalidPoint("need m > 0 and a nonempty sample".into()));
    }
    polytope.check_point(w)?;
    if !polytope.is_fixed(w) {
        return Err(Error::NotFixed);
    }
    for v in sample {
        polytope.check_point(v)?;
    }
    let (inv, inv_off) = polytope.inverse_map()?;
    let apply_inv = |x: &[Rational]| -> Vec<Rational> { mat_vec(&inv, x).into_iter().zip(&inv_off).map(|(a, b)| a + b).collect() };
    let mi = int(m as i64);
    let span = 2 * m + 1;
    let mut zeta = Vec::with_capacity(sample.len() * span);
    let mut labels = Vec::with_capacity(sample.len() * span);
    for (vi, v) in sample.iter().enumerate() {
        // orbit T^k v for k = -m..m
        let mut back = vec![v.clone()];
        for _ in 0..m {
            back.push(apply_inv(back.last().expect("nonempty")));
        }
        let mut fwd = vec![v.clone()];
        for _ in 0..m {
            fwd.push(polytope.apply(fwd.last().expect("nonempty")));
        }
        for k in -(m as i64)..=(m as i64) {
            let tk = if k < 0 { &back[(-k) as usize] } else { &fwd[k as usize] };
            let t = int(k.abs()) / &mi;
            let s = Rational::one() - &t;
            let p: Vec<Rational> = tk.iter().zip(w).map(|(a, b)| &s * a + &t * b).collect();
            zeta.push(Point::Vector(p));
            labels.push((vi, k));
        }
    }
    let succ: Vec<usize> = (0..zeta.len()).map(|i| if i % span == span - 1 { i + 1 - span } else { i + 1 }).collect();
    let action = FiniteAction::new(zeta.len(), vec![succ])?;
    let system = SystemDescriptor::Polytope(polytope.clone());
    let witness = check_witness(&system, &action, &zeta, &[0], epsilon, res)?;
    let defect = omega_defect(&system, &action, &witness.zeta, &[0], omega)?;
    let mut norm = Rational::zero();
    for f in omega {
        let s = f.sup_norm(&system, epsilon, res)?;
        if s > norm {
            norm = s;
        }
    }
    let bound = int(2) / &mi * norm;
    if defect > bound {
        return Err(Error::BoundViolated(format!("defect {defect} exceeds (2/m) max ||f|| = {bound}")));
    }
    Ok(FixedPointModel { witness, labels, omega_defect: defect, bound })
}

/// `sum_i w_i x_i`; when `polytope` is given, the measure is checked for
/// invariance under its map first.
pub fn barycentre(points: &[Vec<Rational>], weights: &[Rational], polytope: Option<&Polytope>) -> Result<Vec<Rational>> {
    if points.is_empty() || points.len() != weights.len() {
        return Err(Error::InvalidPoint("support and weights must match and be nonempty".into()));
    }
    if weights.iter().any(|w| *w < Rational::zero()) || weights.iter().sum::<Rational>() != Rational::one() {
        return Err(Error::InvalidPoint("weights must form a probability vector".into()));
    }
    let d = points[0].len();
    if points.iter().any(|p| p.len() != d) {
        return Err(Error::Dimension("support points differ in dimension".into()));
    }
    if let Some(k) = polytope {
        for p in points {
            k.check_point(p)?;
        }
        // invariance: the pushed-forward measure has the same mass at every point
        let mass_at = |x: &Vec<Rational>, pts: &[Vec<Rational>]| -> Rational {
            pts.iter().zip(weights).filter(|(p, _)| *p == x).map(|(_, w)| w.clone()).sum()
        };
        let moved: Vec<Vec<Rational>> = points.iter().map(|p| k.apply(p)).collect();
        if points.iter().chain(&moved).any(|x| mass_at(x, points) != mass_at(x, &moved)) {
            return Err(Error::InvalidPoint("measure is not invariant under the map".into()));
        }
    }
    Ok((0..d).map(|i| points.iter().zip(weights).map(|(p, w)| &p[i] * w).sum()).collect())
}
