//! Actions of a free group (or of Z, the rank-one case) on a finite set.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashSet, VecDeque};

/// A finite set `{0, .., size-1}` with one bijection per free generator.
///
/// Inverse tables are computed once at validation time.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteAction {
    size: usize,
    generators: Vec<Vec<usize>>,
    #[serde(skip)]
    inverses: Vec<Vec<usize>>,
}

/// Validates `size` and one permutation table per generator.
pub fn validate_action_description(size: usize, generator_tables: Vec<Vec<usize>>) -> Result<FiniteAction> {
    FiniteAction::new(size, generator_tables)
}

impl FiniteAction {
    pub fn new(size: usize, generators: Vec<Vec<usize>>) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidAction("size must be at least 1".into()));
        }
        if generators.is_empty() {
            return Err(Error::InvalidAction("at least one generator table is required".into()));
        }
        let mut inverses = Vec::with_capacity(generators.len());
        for (g, table) in generators.iter().enumerate() {
            if table.len() != size {
                return Err(Error::InvalidAction(format!(
                    "generator {g} has {} entries, expected {size}",
                    table.len()
                )));
            }
            let mut inv = vec![usize::MAX; size];
            for (i, &j) in table.iter().enumerate() {
                if j >= size || inv[j] != usize::MAX {
                    return Err(Error::NonBijective(g));
                }
                inv[j] = i;
            }
            inverses.push(inv);
        }
        Ok(Self { size, generators, inverses })
    }

    /// Identity action of rank `rank` on `size` points.
    pub fn trivial(size: usize, rank: usize) -> Self {
        Self::new(size, vec![(0..size).collect(); rank]).expect("identity tables are bijective")
    }

    /// Single cycle `i -> i+1 mod size`.
    pub fn cycle(size: usize) -> Self {
        Self::new(size, vec![(0..size).map(|i| (i + 1) % size).collect()]).expect("cycle is bijective")
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn tables(&self) -> &[Vec<usize>] {
        &self.generators
    }

    /// Image of `z` under generator `gen`.
    pub fn apply(&self, gen: usize, z: usize) -> usize {
        self.generators[gen][z]
    }

    pub fn apply_inverse(&self, gen: usize, z: usize) -> usize {
        self.inverses[gen][z]
    }

    /// Applies a signed letter (`+g` / `-g` encoded as in [`crate::free_group::Letter`]).
    pub fn apply_letter(&self, letter: crate::free_group::Letter, z: usize) -> usize {
        if letter.inverse {
            self.apply_inverse(letter.gen, z)
        } else {
            self.apply(letter.gen, z)
        }
    }

    /// Acts by a word, rightmost letter first (left action: `(gh)z = g(hz)`).
    pub fn apply_word(&self, word: &crate::free_group::Word, z: usize) -> usize {
        word.letters().iter().rev().fold(z, |acc, &l| self.apply_letter(l, acc))
    }

    /// Disjoint union; elements of `other` are shifted by `self.size()`.
    pub fn disjoint_union(&self, other: &FiniteAction) -> Result<FiniteAction> {
        if self.rank() != other.rank() {
            return Err(Error::Mismatch(format!("ranks {} and {}", self.rank(), other.rank())));
        }
        let offset = self.size;
        let tables = self
            .generators
            .iter()
            .zip(&other.generators)
            .map(|(a, b)| a.iter().copied().chain(b.iter().map(|&j| j + offset)).collect())
            .collect();
        FiniteAction::new(self.size + other.size, tables)
    }

    /// Orbits under the generated group, each sorted, listed by least element.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.size];
        let mut out = Vec::new();
        for start in 0..self.size {
            if seen[start] {
                continue;
            }
            let mut orbit = BTreeSet::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(z) = queue.pop_front() {
                orbit.insert(z);
                for g in 0..self.rank() {
                    for next in [self.apply(g, z), self.apply_inverse(g, z)] {
                        if !seen[next] {
                            seen[next] = true;
                            queue.push_back(next);
                        }
                    }
                }
            }
            out.push(orbit.into_iter().collect());
        }
        out
    }

    /// Order of the permutation group generated by the tables, by closure.
    /// Intended for small sets; the caller bounds `limit`.
    pub fn generated_group_order(&self, limit: usize) -> Result<usize> {
        let identity: Vec<usize> = (0..self.size).collect();
        let mut seen: HashSet<Vec<usize>> = HashSet::from([identity.clone()]);
        let mut queue = VecDeque::from([identity]);
        while let Some(p) = queue.pop_front() {
            for g in &self.generators {
                let next: Vec<usize> = p.iter().map(|&i| g[i]).collect();
                if seen.insert(next.clone()) {
                    if seen.len() > limit {
                        return Err(Error::SizeOverflow(format!("group order exceeds {limit}")));
                    }
                    queue.push_back(next);
                }
            }
        }
        Ok(seen.len())
    }

    /// Restores the inverse tables after deserialization.
    pub fn revalidate(self) -> Result<Self> {
        Self::new(self.size, self.generators)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_cycle_is_valid() {
        let a = validate_action_description(3, vec![vec![1, 2, 0]]).unwrap();
        assert_eq!(a.apply(0, 2), 0);
        assert_eq!(a.apply_inverse(0, 0), 2);
        assert_eq!(a.orbits(), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn non_injective_table_rejected() {
        assert_eq!(validate_action_description(2, vec![vec![0, 0]]), Err(Error::NonBijective(0)));
        assert_eq!(
            validate_action_description(2, vec![vec![0, 1], vec![1, 2]]),
            Err(Error::NonBijective(1))
        );
    }

    #[test]
    fn klein_four_action() {
        let a = validate_action_description(4, vec![vec![1, 0, 3, 2], vec![2, 3, 0, 1]]).unwrap();
        // Oracle: enumerate the group by closure independently of the method.
        let gens = [vec![1usize, 0, 3, 2], vec![2usize, 3, 0, 1]];
        let mut elems = vec![vec![0usize, 1, 2, 3]];
        let mut i = 0;
        while i < elems.len() {
            for g in &gens {
                let n: Vec<usize> = elems[i].iter().map(|&x| g[x]).collect();
                if !elems.contains(&n) {
                    elems.push(n);
                }
            }
            i += 1;
        }
        assert_eq!(elems.len(), 4);
        assert_eq!(a.generated_group_order(100).unwrap(), 4);
    }

    #[test]
    fn union_shifts_indices() {
        let u = FiniteAction::cycle(2).disjoint_union(&FiniteAction::cycle(3)).unwrap();
        assert_eq!(u.size(), 5);
        assert_eq!(u.apply(0, 4), 2);
        assert_eq!(u.orbits().len(), 2);
    }
}
