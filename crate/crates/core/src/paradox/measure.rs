//! Finite models from invariant measures on a clopen partition.

use crate::action::FiniteAction;
use crate::error::{Error, Result};
use crate::linalg::{rref, solve, QMatrix};
use crate::rational::{abs, int, lcm_of_denominators, round_to_denominator, Rational};
use crate::system::{PeriodicConfig, Point, Resolution, ShiftSpace, SystemDescriptor};
use crate::witness::{check_witness, Witness};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// An atom `Q` of the join of `P` with its translates `s P`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JoinAtom {
    #[serde(with = "crate::rational::serde_rational")]
    pub mass: Rational,
    /// Cell of `P` containing `Q`.
    pub cell: usize,
    /// Per generator `s`, the cell `p` with `Q ⊆ s p`.
    pub translated: Vec<usize>,
    pub representative: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasuredJoin {
    pub cells: usize,
    pub atoms: Vec<JoinAtom>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureModel {
    pub witness: Witness,
    /// Normalized rational solution, one entry per join atom.
    #[serde(with = "crate::rational::serde_rational::vec")]
    pub weights: Vec<Rational>,
    pub multiplier: usize,
    pub denominator: u64,
    /// `max_Q |x_Q - mu(Q)|`.
    #[serde(with = "crate::rational::serde_rational")]
    pub perturbation: Rational,
    /// Element ranges `E_Q` in atom order.
    pub blocks: Vec<std::ops::Range<usize>>,
}

impl MeasuredJoin {
    /// Join of the coordinate-`e` partition of a full shift with its
    /// generator translates, under a product measure.
    pub fn bernoulli(space: &ShiftSpace, weights: &[Rational]) -> Result<Self> {
        if !space.is_full() {
            return Err(Error::InvalidSystem("product measures need a full shift".into()));
        }
        let (k, r) = (space.alphabet(), space.rank());
        if weights.len() != k || weights.iter().any(|w| !w.is_positive()) || weights.iter().sum::<Rational>() != Rational::one()
        {
            return Err(Error::InvalidPoint("weights must be a positive probability vector".into()));
        }
        // star Schreier graph: vertex 0 at e, vertex i+1 at s_i
        let perms: Vec<Vec<usize>> = (0..r)
            .map(|i| (0..=r).map(|v| if v == 0 { i + 1 } else if v == i + 1 { 0 } else { v }).collect())
            .collect();
        let total = k.checked_pow(r as u32 + 1).ok_or_else(|| Error::SizeOverflow("join too large".into()))?;
        let mut atoms = Vec::with_capacity(total);
        for code in 0..total {
            let mut c = code;
            let mut colors = vec![0; r + 1];
            for slot in colors.iter_mut().rev() {
                *slot = c % k;
                c /= k;
            }
            let mass = colors.iter().map(|&a| weights[a].clone()).product();
            atoms.push(JoinAtom {
                mass,
                cell: colors[0],
                translated: colors[1..].to_vec(),
                representative: Point::Config(PeriodicConfig::new(perms.clone(), 0, colors)?),
            });
        }
        Ok(Self { cells: k, atoms })
    }

    fn constraints(&self, rank: usize) -> QMatrix {
        let n = self.atoms.len();
        let mut rows = Vec::new();
        for s in 0..rank {
            for p in 0..self.cells {
                let mut row = vec![Rational::zero(); n];
                for (i, a) in self.atoms.iter().enumerate() {
                    if a.cell == p {
                        row[i] += Rational::one();
                    }
                    if a.translated[s] == p {
                        row[i] -= Rational::one();
                    }
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
        rows
    }

    fn check(&self, rank: usize) -> Result<()> {
        if self.atoms.is_empty() {
            return Err(Error::InvalidPoint("partition has no atoms".into()));
        }
        for a in &self.atoms {
            if a.cell >= self.cells || a.translated.len() != rank || a.translated.iter().any(|&p| p >= self.cells) {
                return Err(Error::InvalidPoint("join atom refers to a missing cell".into()));
            }
            if !a.mass.is_positive() {
                return Err(Error::InvalidPoint("join atoms must have positive mass".into()));
            }
        }
        Ok(())
    }
}

/// Orthogonal projection of `mu` onto `{x : A x = 0}`.
fn project(a: &QMatrix, mu: &[Rational]) -> Vec<Rational> {
    if a.is_empty() {
        return mu.to_vec();
    }
    // x = mu - A^T (A A^T)^+ A mu ; rows of A reduced to a basis first
    let mut basis = a.clone();
    let pivots = rref(&mut basis);
    basis.truncate(pivots.len());
    let gram: QMatrix = basis
        .iter()
        .map(|r| basis.iter().map(|s| r.iter().zip(s).map(|(x, y)| x * y).sum()).collect())
        .collect();
    let rhs: Vec<Rational> = basis.iter().map(|r| r.iter().zip(mu).map(|(x, y)| x * y).sum()).collect();
    let lambda = solve(&gram, &rhs).expect("gram matrix of a basis is invertible");
    mu.iter()
        .enumerate()
        .map(|(j, m)| m - basis.iter().zip(&lambda).map(|(r, l)| &r[j] * l).sum::<Rational>())
        .collect()
}

/// Smallest denominator `d <= max_den` for which rounding the free
/// coordinates of the projection gives an all-positive solution within
/// `radius` of `mu` (after normalization).
fn rational_solution(a: &QMatrix, mu: &[Rational], radius: &Rational, max_den: u64) -> Result<(Vec<Rational>, u64)> {
    let n = mu.len();
    let target = project(a, mu);
    let mut red = a.clone();
    let pivots = rref(&mut red);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    for d in 1..=max_den {
        let mut x = vec![Rational::zero(); n];
        for &f in &free {
            x[f] = round_to_denominator(&target[f], d);
        }
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = -free.iter().map(|&f| &red[r][f] * &x[f]).sum::<Rational>();
        }
        if x.iter().any(|v| !v.is_positive()) {
            continue;
        }
        let total: Rational = x.iter().sum();
        let x: Vec<Rational> = x.into_iter().map(|v| v / &total).collect();
        if x.iter().zip(mu).all(|(v, m)| abs(&(v - m)) <= *radius) {
            return Ok((x, d));
        }
    }
    Err(Error::NoPositiveRationalSolution(max_den))
}

/// Witness built from `E = ⊔ E_Q` with `|E_Q| = M x_Q`; generator `s` maps
/// the elements over cell `p` onto those over `s p` in lexicographic order,
/// and `zeta` sends `E_Q` to the representative of `Q`.
pub fn measure_to_model(
    system: &SystemDescriptor,
    join: &MeasuredJoin,
    epsilon: &Rational,
    radius: &Rational,
    max_den: u64,
    res: &Resolution,
) -> Result<MeasureModel> {
    let rank = system.rank();
    join.check(rank)?;
    let mu: Vec<Rational> = join.atoms.iter().map(|a| a.mass.clone()).collect();
    let (x, denominator) = rational_solution(&join.constraints(rank), &mu, radius, max_den)?;
    let m = lcm_of_denominators(&x);
    let multiplier = m.to_usize().ok_or_else(|| Error::SizeOverflow(format!("model size {m}")))?;
    let sizes: Vec<usize> = x
        .iter()
        .map(|v| (v * Rational::from_integer(m.clone())).to_integer().to_usize().expect("block fits"))
        .collect();
    let mut blocks = Vec::with_capacity(sizes.len());
    let mut start = 0;
    for &s in &sizes {
        blocks.push(start..start + s);
        start += s;
    }
    let over = |pick: &dyn Fn(&JoinAtom) -> usize, p: usize| -> Vec<usize> {
        join.atoms
            .iter()
            .zip(&blocks)
            .filter(|(a, _)| pick(a) == p)
            .flat_map(|(_, b)| b.clone())
            .collect()
    };
    let mut tables = Vec::with_capacity(rank);
    for s in 0..rank {
        let mut table = vec![usize::MAX; multiplier];
        for p in 0..join.cells {
            let from = over(&|a: &JoinAtom| a.cell, p);
            let to = over(&|a: &JoinAtom| a.translated[s], p);
            debug_assert_eq!(from.len(), to.len());
            for (i, j) in from.into_iter().zip(to) {
                table[i] = j;
            }
        }
        tables.push(table);
    }
    let action = FiniteAction::new(multiplier, tables)?;
    let zeta: Vec<Point> = join
        .atoms
        .iter()
        .zip(&sizes)
        .flat_map(|(a, &s)| std::iter::repeat_n(a.representative.clone(), s))
        .collect();
    let scope: Vec<usize> = (0..rank).collect();
    let witness = check_witness(system, &action, &zeta, &scope, epsilon, res)?;
    let perturbation = x.iter().zip(&mu).map(|(v, m)| abs(&(v - m))).max().unwrap_or_else(Rational::zero);
    Ok(MeasureModel { witness, weights: x, multiplier, denominator, perturbation, blocks })
}

/// Mass of each block under the uniform measure on `E`.
pub fn block_masses(model: &MeasureModel) -> Vec<Rational> {
    let n = int(model.multiplier as i64);
    model.blocks.iter().map(|b| int(b.len() as i64) / &n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{from_f64, q};

    #[test]
    fn fair_coin_join() {
        let space = ShiftSpace::full(2, 1);
        let join = MeasuredJoin::bernoulli(&space, &[q(1, 2), q(1, 2)]).unwrap();
        assert!(join.atoms.iter().all(|a| a.mass == q(1, 4)));
        let sys = SystemDescriptor::Shift(space);
        let model = measure_to_model(&sys, &join, &q(1, 1), &q(1, 100), 1000, &Resolution::default()).unwrap();
        assert_eq!(model.multiplier, 4);
        assert_eq!(model.weights, vec![q(1, 4); 4]);
        assert_eq!(model.perturbation, Rational::zero());
        assert!(model.witness.equivariance_defect <= q(1, 2));
    }

    #[test]
    fn one_atom_partition() {
        let space = ShiftSpace::full(1, 1);
        let join = MeasuredJoin::bernoulli(&space, &[q(1, 1)]).unwrap();
        let model = measure_to_model(&SystemDescriptor::Shift(space), &join, &q(1, 2), &q(1, 100), 10, &Resolution::default())
            .unwrap();
        assert_eq!((model.multiplier, model.denominator), (1, 1));
    }

    #[test]
    fn float_masses_round() {
        let p = (2f64).sqrt() - 1.0;
        let w = [from_f64((p * 1e6).round() / 1e6), Rational::one() - from_f64((p * 1e6).round() / 1e6)];
        let space = ShiftSpace::full(2, 1);
        let join = MeasuredJoin::bernoulli(&space, &w).unwrap();
        let model =
            measure_to_model(&SystemDescriptor::Shift(space), &join, &q(1, 1), &q(1, 1000), 10_000, &Resolution::default())
                .unwrap();
        assert!(model.denominator <= 10_000);
        assert!(model.perturbation <= q(1, 1000));
        for (m, x) in block_masses(&model).iter().zip(&model.weights) {
            assert_eq!(m, x);
        }
    }
}
