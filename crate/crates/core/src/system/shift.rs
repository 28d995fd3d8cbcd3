//! Shift spaces `A^{F_r}` (rank 1 is the usual two-sided shift over Z) with
//! nearest-neighbour forbidden pairs, and periodic configurations as exact
//! point representations.
//!
//! A periodic configuration is a finite set `V` with a right action of the
//! generators, a base vertex and a colouring: `x_g = colour(base . g)`. The
//! shift `(s x)_t = x_{s^-1 t}` only moves the base vertex to `base . s^-1`.

use crate::error::{Error, Result};
use crate::free_group::{ball, Letter, Word};
use crate::rational::{pow2_neg, Rational};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashSet, VecDeque};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftSpace {
    alphabet: usize,
    rank: usize,
    /// `(gen, a, b)`: the pattern `x_g = a, x_{g s_gen} = b` is forbidden.
    forbidden: BTreeSet<(usize, usize, usize)>,
    #[serde(skip)]
    essential: Vec<bool>,
}

impl ShiftSpace {
    pub fn new(alphabet: usize, rank: usize, forbidden: impl IntoIterator<Item = (usize, usize, usize)>) -> Result<Self> {
        if alphabet == 0 {
            return Err(Error::InvalidSystem("alphabet size must be at least 1".into()));
        }
        if rank == 0 {
            return Err(Error::InvalidSystem("rank must be at least 1".into()));
        }
        let forbidden: BTreeSet<_> = forbidden.into_iter().collect();
        for &(g, a, b) in &forbidden {
            if g >= rank || a >= alphabet || b >= alphabet {
                return Err(Error::InvalidSystem(format!("forbidden pattern ({g},{a},{b}) out of range")));
            }
        }
        let mut s = Self { alphabet, rank, forbidden, essential: Vec::new() };
        s.essential = s.compute_essential();
        if !s.essential.iter().any(|&e| e) {
            return Err(Error::InvalidSystem("shift space is empty".into()));
        }
        Ok(s)
    }

    pub fn full(alphabet: usize, rank: usize) -> Self {
        Self::new(alphabet, rank, []).expect("full shift is valid")
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn forbidden(&self) -> &BTreeSet<(usize, usize, usize)> {
        &self.forbidden
    }

    pub fn is_full(&self) -> bool {
        self.forbidden.is_empty()
    }

    /// Whether `b` may sit at `g.l` when `a` sits at `g`.
    pub fn allowed(&self, a: usize, l: Letter, b: usize) -> bool {
        if l.inverse {
            !self.forbidden.contains(&(l.gen, b, a))
        } else {
            !self.forbidden.contains(&(l.gen, a, b))
        }
    }

    // Letters that occur in some point: prune letters lacking an allowed
    // essential neighbour in some direction. On a tree this is exact.
    fn compute_essential(&self) -> Vec<bool> {
        let mut ess = vec![true; self.alphabet];
        loop {
            let mut changed = false;
            for a in 0..self.alphabet {
                if !ess[a] {
                    continue;
                }
                let ok = Letter::all(self.rank).all(|l| (0..self.alphabet).any(|b| ess[b] && self.allowed(a, l, b)));
                if !ok {
                    ess[a] = false;
                    changed = true;
                }
            }
            if !changed {
                return ess;
            }
        }
    }

    pub fn is_essential(&self, a: usize) -> bool {
        self.essential.get(a).copied().unwrap_or(false)
    }

    /// Recomputes derived data after deserialization.
    pub fn revalidate(self) -> Result<Self> {
        Self::new(self.alphabet, self.rank, self.forbidden)
    }

    /// Number of patterns on the ball of radius `radius` that extend to
    /// points of the space (saturating).
    pub fn admissible_ball_patterns(&self, radius: usize) -> u128 {
        // f[d][a][in] = fillings of a depth-d subtree below a node coloured `a`
        // reached by letter `in` (index), excluding the backwards direction.
        let k = 2 * self.rank;
        let letters: Vec<Letter> = Letter::all(self.rank).collect();
        let mut f = vec![vec![1u128; k]; self.alphabet];
        for _ in 0..radius.saturating_sub(1) {
            let mut next = vec![vec![0u128; k]; self.alphabet];
            for a in 0..self.alphabet {
                for (ii, &incoming) in letters.iter().enumerate() {
                    let mut prod: u128 = 1;
                    for &dir in &letters {
                        if dir == incoming.inv() {
                            continue;
                        }
                        let sum = (0..self.alphabet)
                            .filter(|&b| self.essential[b] && self.allowed(a, dir, b))
                            .fold(0u128, |acc, b| acc.saturating_add(f[b][dir.index()]));
                        prod = prod.saturating_mul(sum);
                    }
                    next[a][ii] = prod;
                }
            }
            f = next;
        }
        let mut total: u128 = 0;
        for a in (0..self.alphabet).filter(|&a| self.essential[a]) {
            let mut prod: u128 = 1;
            if radius > 0 {
                for &dir in &letters {
                    let sum = (0..self.alphabet)
                        .filter(|&b| self.essential[b] && self.allowed(a, dir, b))
                        .fold(0u128, |acc, b| acc.saturating_add(f[b][dir.index()]));
                    prod = prod.saturating_mul(sum);
                }
            }
            total = total.saturating_add(prod);
        }
        total
    }
}

/// A configuration `x_g = colour(base . g)` on a finite Schreier graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PeriodicConfig {
    perms: Vec<Vec<usize>>,
    base: usize,
    colors: Vec<usize>,
    #[serde(skip)]
    inverses: Vec<Vec<usize>>,
}

impl PeriodicConfig {
    pub fn new(perms: Vec<Vec<usize>>, base: usize, colors: Vec<usize>) -> Result<Self> {
        let n = colors.len();
        if n == 0 || base >= n {
            return Err(Error::InvalidPoint("periodic configuration needs a base vertex".into()));
        }
        let mut inverses = Vec::with_capacity(perms.len());
        for (g, p) in perms.iter().enumerate() {
            if p.len() != n {
                return Err(Error::InvalidPoint(format!("permutation {g} has wrong length")));
            }
            let mut inv = vec![usize::MAX; n];
            for (i, &j) in p.iter().enumerate() {
                if j >= n || inv[j] != usize::MAX {
                    return Err(Error::InvalidPoint(format!("table {g} is not a permutation")));
                }
                inv[j] = i;
            }
            inverses.push(inv);
        }
        Ok(Self { perms, base, colors, inverses })
    }

    /// `n`-periodic point of the Z-shift: `x_k = word[k mod n]`.
    pub fn periodic(word: &[usize]) -> Result<Self> {
        let n = word.len();
        Self::new(vec![(0..n).map(|i| (i + 1) % n).collect()], 0, word.to_vec())
    }

    /// Constant configuration.
    pub fn constant(rank: usize, letter: usize) -> Self {
        Self::new(vec![vec![0]; rank], 0, vec![letter]).expect("constant config")
    }

    pub fn rank(&self) -> usize {
        self.perms.len()
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn perms(&self) -> &[Vec<usize>] {
        &self.perms
    }

    pub fn revalidate(self) -> Result<Self> {
        Self::new(self.perms, self.base, self.colors)
    }

    fn step(&self, v: usize, l: Letter) -> usize {
        if l.inverse {
            self.inverses[l.gen][v]
        } else {
            self.perms[l.gen][v]
        }
    }

    /// Vertex `base . g`.
    pub fn vertex(&self, g: &Word) -> usize {
        g.letters().iter().fold(self.base, |v, &l| self.step(v, l))
    }

    pub fn value_at(&self, g: &Word) -> usize {
        self.colors[self.vertex(g)]
    }

    /// `s . x` for a signed generator.
    pub fn translated(&self, l: Letter) -> Self {
        let mut out = self.clone();
        out.base = self.step(self.base, l.inv());
        out
    }

    pub fn translated_by(&self, g: &Word) -> Self {
        let mut out = self.clone();
        out.base = self.vertex(&g.inverse());
        out
    }

    /// Values on a list of group elements (usually a ball).
    pub fn pattern(&self, support: &[Word]) -> Vec<usize> {
        support.iter().map(|g| self.value_at(g)).collect()
    }

    /// Checks that the configuration is a point of `space`.
    pub fn check_in(&self, space: &ShiftSpace) -> Result<()> {
        if self.rank() != space.rank() {
            return Err(Error::InvalidPoint(format!(
                "configuration has rank {}, space has rank {}",
                self.rank(),
                space.rank()
            )));
        }
        // every vertex reachable from the base
        let mut seen = vec![false; self.colors.len()];
        let mut queue = VecDeque::from([self.base]);
        seen[self.base] = true;
        while let Some(v) = queue.pop_front() {
            let a = self.colors[v];
            if a >= space.alphabet() {
                return Err(Error::InvalidPoint(format!("letter {a} outside the alphabet")));
            }
            for l in Letter::all(self.rank()) {
                let w = self.step(v, l);
                if !l.inverse && !space.allowed(a, l, self.colors[w]) {
                    return Err(Error::InvalidPoint(format!(
                        "forbidden pattern ({}, {a}, {}) occurs",
                        l.gen, self.colors[w]
                    )));
                }
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        Ok(())
    }

    /// Least `|g|` with `x_g != y_g`, or `None` if the configurations agree.
    pub fn first_difference(&self, other: &Self) -> Option<usize> {
        let rank = self.rank();
        let mut seen = HashSet::from([(self.base, other.base)]);
        let mut frontier = vec![(self.base, other.base)];
        let mut depth = 0;
        while !frontier.is_empty() {
            if frontier.iter().any(|&(u, v)| self.colors[u] != other.colors[v]) {
                return Some(depth);
            }
            let mut next = Vec::new();
            for &(u, v) in &frontier {
                for l in Letter::all(rank) {
                    let pair = (self.step(u, l), other.step(v, l));
                    if seen.insert(pair) {
                        next.push(pair);
                    }
                }
            }
            frontier = next;
            depth += 1;
        }
        None
    }

    /// `2^{-min{|g| : x_g != y_g}}`, zero when equal.
    pub fn distance(&self, other: &Self) -> Rational {
        match self.first_difference(other) {
            Some(k) => pow2_neg(k),
            None => Rational::zero(),
        }
    }
}

/// Configuration of the shift determined by a finite quotient `pi: F_r -> Q`
/// given as a right-regular permutation representation, and a colouring of `Q`:
/// `x_g = colour(pi(g))`.
pub fn quotient_config(perms: Vec<Vec<usize>>, identity: usize, colors: Vec<usize>) -> Result<PeriodicConfig> {
    PeriodicConfig::new(perms, identity, colors)
}

/// Least ball radius needed so that `2^-r <= eps`.
pub fn resolution_radius(eps: &Rational) -> usize {
    let mut r = 0;
    while pow2_neg(r) > *eps {
        r += 1;
    }
    r
}

/// Density defect of a finite set of configurations in a shift space:
/// `2^-R` for the least radius `R` at which some admissible ball pattern is
/// missing. When every pattern is present up to the search limit the
/// certified upper bound `2^-(R+1)` is returned.
pub fn shift_density(space: &ShiftSpace, points: &[PeriodicConfig], eps: &Rational, ball_cap: usize) -> Result<Rational> {
    let needed = resolution_radius(eps);
    let limit = needed + 8;
    let mut radius = 0;
    loop {
        let admissible = space.admissible_ball_patterns(radius);
        if admissible > points.len() as u128 {
            return Ok(pow2_neg(radius));
        }
        let support = ball(space.rank(), radius);
        if support.len() > ball_cap {
            if radius <= needed {
                return Err(Error::ResolutionOverflow(format!(
                    "ball of radius {radius} has {} elements (cap {ball_cap})",
                    support.len()
                )));
            }
            return Ok(pow2_neg(radius));
        }
        let realized: HashSet<Vec<usize>> = points.iter().map(|p| p.pattern(&support)).collect();
        if (realized.len() as u128) < admissible {
            return Ok(pow2_neg(radius));
        }
        if radius >= limit {
            return Ok(pow2_neg(radius + 1));
        }
        radius += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn all_words(n: usize, k: usize) -> Vec<Vec<usize>> {
        (0..n.pow(k as u32))
            .map(|mut m| {
                (0..k)
                    .map(|_| {
                        let d = m % n;
                        m /= n;
                        d
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn admissible_counts_full_and_golden_mean() {
        let full = ShiftSpace::full(2, 1);
        assert_eq!(full.admissible_ball_patterns(0), 2);
        assert_eq!(full.admissible_ball_patterns(1), 8);
        assert_eq!(full.admissible_ball_patterns(2), 32);
        let f2 = ShiftSpace::full(2, 2);
        assert_eq!(f2.admissible_ball_patterns(1), 32);
        assert_eq!(f2.admissible_ball_patterns(2), 1 << 17);
        // golden mean: no "11"; oracle by brute force over words of length 2r+1
        let gm = ShiftSpace::new(2, 1, [(0, 1, 1)]).unwrap();
        for r in 0..4 {
            let len = 2 * r + 1;
            let brute = all_words(2, len).into_iter().filter(|w| w.windows(2).all(|p| !(p[0] == 1 && p[1] == 1))).count();
            assert_eq!(gm.admissible_ball_patterns(r), brute as u128);
        }
    }

    #[test]
    fn periodic_points_density_example() {
        // all points of period <= 2 in the full 2-shift
        let pts: Vec<_> = [vec![0], vec![1], vec![0, 1], vec![1, 0]]
            .iter()
            .map(|w| PeriodicConfig::periodic(w).unwrap())
            .collect();
        // oracle: which length-3 windows occur?
        let mut windows = std::collections::BTreeSet::new();
        for w in [vec![0], vec![1], vec![0, 1], vec![1, 0]] {
            let n = w.len();
            windows.insert((0..3).map(|k| w[(k + n - 1) % n]).collect::<Vec<_>>());
        }
        assert!(!windows.contains(&vec![0, 0, 1]));
        let d = shift_density(&ShiftSpace::full(2, 1), &pts, &q(1, 2), 1 << 16).unwrap();
        assert_eq!(d, q(1, 2));
    }

    #[test]
    fn distance_and_translation() {
        let x = PeriodicConfig::periodic(&[0, 1]).unwrap();
        let y = PeriodicConfig::periodic(&[0, 0]).unwrap();
        assert_eq!(x.distance(&y), q(1, 2));
        assert_eq!(x.distance(&x), Rational::zero());
        let tx = x.translated(Letter::new(0, false));
        // (Tx)_k = x_{k-1}
        assert_eq!(tx.value_at(&Word::identity()), 1);
        assert_eq!(tx.translated(Letter::new(0, true)), x);
    }

    #[test]
    fn forbidden_pattern_detected() {
        let gm = ShiftSpace::new(2, 1, [(0, 1, 1)]).unwrap();
        assert!(PeriodicConfig::periodic(&[0, 1]).unwrap().check_in(&gm).is_ok());
        assert!(PeriodicConfig::periodic(&[1, 1, 0]).unwrap().check_in(&gm).is_err());
    }
}
