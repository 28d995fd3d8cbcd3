//! Search for clopen sets `U` with `T(U)` a proper subset of `U`.

use crate::error::{Error, Result};
use crate::system::{End, SystemDescriptor};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Atom {
    Point(usize),
    Int { copy: usize, n: i64 },
    /// Union of the tails `|n| >= window` converging to one end class, with its point.
    Tail { ends: Vec<(usize, End)> },
    /// Cylinder `x_0 .. x_{w-1} = word`.
    Word(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClopenSet {
    pub window: usize,
    pub atoms: Vec<Atom>,
}

/// Atoms of a clopen partition together with, for each atom, the atoms met by
/// its forward image and (for homeomorphisms) by its backward image.
pub struct AtomAlgebra {
    pub atoms: Vec<Atom>,
    pub forward: Vec<BTreeSet<usize>>,
    pub backward: Option<Vec<BTreeSet<usize>>>,
}

pub const DEFAULT_ATOM_CAP: usize = 20;

pub fn atom_algebra(system: &SystemDescriptor, window: usize) -> Result<AtomAlgebra> {
    match system {
        SystemDescriptor::FiniteSample(s) => {
            if s.rank() != 1 {
                return Err(Error::InvalidSystem("compressibility needs a single map".into()));
            }
            let t = s
                .exact_table(0)
                .ok_or_else(|| Error::InvalidSystem("finite map must land on sample points".into()))?;
            let n = t.len();
            let forward = t.iter().map(|&j| BTreeSet::from([j])).collect();
            let backward = s.inverse_table(0).map(|inv| inv.iter().map(|&j| BTreeSet::from([j])).collect());
            Ok(AtomAlgebra { atoms: (0..n).map(Atom::Point).collect(), forward, backward })
        }
        SystemDescriptor::CompactifiedZ(c) => {
            let w = window.max(1) as i64;
            let mut atoms = Vec::new();
            let mut class_of = std::collections::BTreeMap::new();
            for copy in 0..c.copies() {
                for end in [End::Minus, End::Plus] {
                    let key = c.canonical(crate::system::CompactPoint::End { copy, end });
                    let next = class_of.len();
                    class_of.entry(key).or_insert(next);
                }
            }
            let mut tails: Vec<Vec<(usize, End)>> = vec![Vec::new(); class_of.len()];
            for copy in 0..c.copies() {
                for end in [End::Minus, End::Plus] {
                    let key = c.canonical(crate::system::CompactPoint::End { copy, end });
                    tails[class_of[&key]].push((copy, end));
                }
            }
            let tail_of = |copy: usize, end: End| {
                let key = c.canonical(crate::system::CompactPoint::End { copy, end });
                class_of[&key]
            };
            // layout: per copy [tail-, ints, tail+] in first appearance order
            let mut index = std::collections::BTreeMap::new();
            let mut tail_index = vec![usize::MAX; tails.len()];
            for copy in 0..c.copies() {
                let tm = tail_of(copy, End::Minus);
                if tail_index[tm] == usize::MAX {
                    tail_index[tm] = atoms.len();
                    atoms.push(Atom::Tail { ends: tails[tm].clone() });
                }
                for n in -w + 1..w {
                    index.insert((copy, n), atoms.len());
                    atoms.push(Atom::Int { copy, n });
                }
                let tp = tail_of(copy, End::Plus);
                if tail_index[tp] == usize::MAX {
                    tail_index[tp] = atoms.len();
                    atoms.push(Atom::Tail { ends: tails[tp].clone() });
                }
            }
            let locate = |copy: usize, n: i64| -> usize {
                if n >= w {
                    tail_index[tail_of(copy, End::Plus)]
                } else if n <= -w {
                    tail_index[tail_of(copy, End::Minus)]
                } else {
                    index[&(copy, n)]
                }
            };
            let image = |a: &Atom, step: i64| -> BTreeSet<usize> {
                match a {
                    Atom::Int { copy, n } => BTreeSet::from([locate(*copy, n + step)]),
                    Atom::Tail { ends } => {
                        let mut out = BTreeSet::new();
                        for &(copy, end) in ends {
                            out.insert(tail_index[tail_of(copy, end)]);
                            // the innermost tail integer crosses into the window
                            match (end, step > 0) {
                                (End::Minus, true) => out.insert(locate(copy, -w + 1)),
                                (End::Plus, false) => out.insert(locate(copy, w - 1)),
                                _ => false,
                            };
                        }
                        out
                    }
                    _ => unreachable!(),
                }
            };
            let forward = atoms.iter().map(|a| image(a, 1)).collect();
            let backward = atoms.iter().map(|a| image(a, -1)).collect();
            Ok(AtomAlgebra { atoms, forward, backward: Some(backward) })
        }
        SystemDescriptor::Shift(space) if space.rank() == 1 => {
            let w = window.max(1);
            let k = space.alphabet();
            let allowed = |a: usize, b: usize| space.allowed(a, crate::free_group::Letter::new(0, false), b);
            let mut words: Vec<Vec<usize>> = (0..k).filter(|&a| space.is_essential(a)).map(|a| vec![a]).collect();
            for _ in 1..w {
                words = words
                    .iter()
                    .flat_map(|wd| {
                        let last = *wd.last().expect("nonempty");
                        (0..k)
                            .filter(move |&b| space.is_essential(b) && allowed(last, b))
                            .map(move |b| {
                                let mut v = wd.clone();
                                v.push(b);
                                v
                            })
                    })
                    .collect();
            }
            let pos = |wd: &[usize]| words.iter().position(|x| x == wd);
            // (T x)_k = x_{k-1}: T(C[a]) sits on positions 1..w
            let forward = words
                .iter()
                .map(|a| {
                    (0..k)
                        .filter(|&b| space.is_essential(b) && allowed(b, a[0]))
                        .filter_map(|b| {
                            let mut v = vec![b];
                            v.extend_from_slice(&a[..w - 1]);
                            pos(&v)
                        })
                        .collect()
                })
                .collect();
            let backward = words
                .iter()
                .map(|a| {
                    (0..k)
                        .filter(|&b| space.is_essential(b) && allowed(a[w - 1], b))
                        .filter_map(|b| {
                            let mut v = a[1..].to_vec();
                            v.push(b);
                            pos(&v)
                        })
                        .collect()
                })
                .collect();
            Ok(AtomAlgebra { atoms: words.into_iter().map(Atom::Word).collect(), forward, backward: Some(backward) })
        }
        _ => Err(Error::InvalidSystem(format!("no compressibility search for {} systems", system.kind()))),
    }
}

fn is_compressed(alg: &AtomAlgebra, u: &[usize]) -> bool {
    let inside: BTreeSet<usize> = u.iter().copied().collect();
    let forward_in = u.iter().all(|&a| alg.forward[a].is_subset(&inside));
    if !forward_in {
        return false;
    }
    match &alg.backward {
        Some(back) => !u.iter().all(|&a| back[a].is_subset(&inside)),
        None => {
            let image: BTreeSet<usize> = u.iter().flat_map(|&a| alg.forward[a].iter().copied()).collect();
            image != inside
        }
    }
}

fn search(alg: &AtomAlgebra, current: &mut Vec<usize>, start: usize) -> bool {
    for a in start..alg.atoms.len() {
        current.push(a);
        if is_compressed(alg, current) || search(alg, current, a + 1) {
            return true;
        }
        current.pop();
    }
    false
}

/// Lexicographically least atom union `U` (as a sorted index list) with
/// `T(U)` a proper subset of `U`.
pub fn find_compressible_clopen(system: &SystemDescriptor, window: usize, atom_cap: usize) -> Result<Option<ClopenSet>> {
    let alg = atom_algebra(system, window)?;
    if alg.atoms.len() > atom_cap {
        return Err(Error::ResolutionOverflow(format!("{} atoms at window {window} exceed cap {atom_cap}", alg.atoms.len())));
    }
    let mut u = Vec::new();
    if search(&alg, &mut u, 0) {
        Ok(Some(ClopenSet { window, atoms: u.iter().map(|&i| alg.atoms[i].clone()).collect() }))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::system::{CompactifiedZ, FiniteSample, SampleMetric, ShiftSpace};

    #[test]
    fn compactified_z_half_line() {
        let sys = SystemDescriptor::CompactifiedZ(CompactifiedZ::standard());
        let u = find_compressible_clopen(&sys, 1, DEFAULT_ATOM_CAP).unwrap().unwrap();
        assert_eq!(u.atoms, vec![Atom::Int { copy: 0, n: 0 }, Atom::Tail { ends: vec![(0, End::Plus)] }]);
    }

    #[test]
    fn full_shift_incompressible() {
        let sys = SystemDescriptor::Shift(ShiftSpace::full(2, 1));
        for w in 1..=3 {
            assert_eq!(find_compressible_clopen(&sys, w, DEFAULT_ATOM_CAP).unwrap(), None);
        }
    }

    #[test]
    fn finite_systems() {
        let perm = FiniteSample::exact(SampleMetric::Line((0..4).map(|k| q(k, 1)).collect()), vec![vec![1, 2, 3, 0]]).unwrap();
        assert_eq!(find_compressible_clopen(&SystemDescriptor::FiniteSample(perm), 1, 20).unwrap(), None);
        // 0 -> 1 -> 1: U = {0, 1} maps onto {1}
        let fold = FiniteSample::exact(SampleMetric::Line(vec![q(0, 1), q(1, 1)]), vec![vec![1, 1]]).unwrap();
        let u = find_compressible_clopen(&SystemDescriptor::FiniteSample(fold), 1, 20).unwrap().unwrap();
        assert_eq!(u.atoms, vec![Atom::Point(0), Atom::Point(1)]);
    }
}
