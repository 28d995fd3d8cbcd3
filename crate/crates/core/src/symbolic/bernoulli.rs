//! Finite models of Bernoulli shifts pulled back from finite quotients of `F_r`.

use crate::action::FiniteAction;
use crate::error::{Error, Result};
use crate::free_group::Letter;
use crate::rational::Rational;
use crate::system::{PeriodicConfig, Point, Resolution, ShiftSpace, SystemDescriptor};
use crate::witness::{check_witness, Witness};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// A finite group `Q` given by the right regular action of the images of the
/// free generators: `perms[s][v] = v * pi(s)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteQuotient {
    pub perms: Vec<Vec<usize>>,
    pub identity: usize,
}

impl FiniteQuotient {
    pub fn new(perms: Vec<Vec<usize>>, identity: usize) -> Result<Self> {
        let n = perms.first().map_or(0, Vec::len);
        let action = FiniteAction::new(n, perms.clone())?;
        if identity >= n {
            return Err(Error::InvalidAction("identity element out of range".into()));
        }
        if action.orbits().len() != 1 {
            return Err(Error::InvalidAction("quotient action is not transitive".into()));
        }
        // regular: group order equals the number of elements
        if action.generated_group_order(n)? != n {
            return Err(Error::InvalidAction("quotient action is not regular".into()));
        }
        Ok(Self { perms, identity })
    }

    /// `Z / n`.
    pub fn cyclic(n: usize) -> Self {
        Self::new(vec![(0..n).map(|i| (i + 1) % n).collect()], 0).expect("cyclic group")
    }

    /// Trivial quotient of `F_r`.
    pub fn trivial(rank: usize) -> Self {
        Self::new(vec![vec![0]; rank], 0).expect("trivial group")
    }

    pub fn order(&self) -> usize {
        self.perms[0].len()
    }

    pub fn rank(&self) -> usize {
        self.perms.len()
    }

    fn step(&self, v: usize, l: Letter) -> usize {
        if l.inverse {
            self.perms[l.gen].iter().position(|&w| w == v).expect("permutation")
        } else {
            self.perms[l.gen][v]
        }
    }

    /// For each element `v`, a word `w` with `identity . w = v`.
    fn paths(&self) -> Vec<Vec<Letter>> {
        let n = self.order();
        let mut path: Vec<Option<Vec<Letter>>> = vec![None; n];
        path[self.identity] = Some(Vec::new());
        let mut queue = VecDeque::from([self.identity]);
        while let Some(v) = queue.pop_front() {
            for l in Letter::all(self.rank()) {
                let w = self.step(v, l);
                if path[w].is_none() {
                    let mut p = path[v].clone().expect("visited");
                    p.push(l);
                    path[w] = Some(p);
                    queue.push_back(w);
                }
            }
        }
        path.into_iter().map(|p| p.expect("transitive")).collect()
    }

    /// Left multiplication table `v -> u * v`.
    pub fn left_mul(&self, u: usize) -> Vec<usize> {
        self.paths().iter().map(|w| w.iter().fold(u, |x, &l| self.step(x, l))).collect()
    }

    /// Image of a letter in `Q`.
    pub fn image(&self, l: Letter) -> usize {
        self.step(self.identity, l)
    }
}

pub fn bernoulli_model(
    alphabet: usize,
    quotient: &FiniteQuotient,
    epsilon: &Rational,
    size_cap: usize,
    res: &Resolution,
) -> Result<Witness> {
    if alphabet == 0 {
        return Err(Error::InvalidSystem("alphabet must be nonempty".into()));
    }
    let q = quotient.order();
    let size = alphabet
        .checked_pow(q as u32)
        .filter(|&s| s <= size_cap)
        .ok_or_else(|| Error::SizeOverflow(format!("{alphabet}^{q} colourings exceed cap {size_cap}")))?;
    let decode = |mut m: usize| -> Vec<usize> {
        (0..q)
            .map(|_| {
                let d = m % alphabet;
                m /= alphabet;
                d
            })
            .collect()
    };
    let encode = |c: &[usize]| c.iter().rev().fold(0usize, |acc, &d| acc * alphabet + d);
    // (s . x)_g = x_{s^-1 g}: the colouring c becomes c o L_{pi(s)^-1}
    let tables: Vec<Vec<usize>> = (0..quotient.rank())
        .map(|s| {
            let shift = quotient.left_mul(quotient.image(Letter::new(s, true)));
            (0..size)
                .map(|m| {
                    let c = decode(m);
                    let moved: Vec<usize> = shift.iter().map(|&v| c[v]).collect();
                    encode(&moved)
                })
                .collect()
        })
        .collect();
    let action = FiniteAction::new(size, tables)?;
    let zeta: Vec<Point> = (0..size)
        .map(|m| PeriodicConfig::new(quotient.perms.clone(), quotient.identity, decode(m)).map(Point::Config))
        .collect::<Result<_>>()?;
    let system = SystemDescriptor::Shift(ShiftSpace::full(alphabet, quotient.rank()));
    let scope: Vec<usize> = (0..quotient.rank()).collect();
    check_witness(&system, &action, &zeta, &scope, epsilon, res)
}
