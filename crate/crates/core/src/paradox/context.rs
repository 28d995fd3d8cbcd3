//! Bounded-resolution contexts: a clopen partition (domain atoms), a finer
//! partition on which translates are evaluated, and a finite set of
//! translators whose images of domain atoms are exact unions of evaluation atoms.

use crate::action::FiniteAction;
use crate::error::{Error, Result};
use crate::free_group::{ball, sphere, BoundarySet, Word};
use crate::system::{CompactifiedZ, End, SystemDescriptor};
use crate::zsystems::compress::{atom_algebra, Atom};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ContextAtom {
    Point(usize),
    Cylinder(Word),
    Compact(Atom),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextCaps {
    pub max_atoms: usize,
    pub max_translators: usize,
    pub max_nodes: usize,
}

impl Default for ContextCaps {
    fn default() -> Self {
        Self { max_atoms: 4096, max_translators: 256, max_nodes: 2_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionContext {
    pub description: String,
    pub domain: Vec<ContextAtom>,
    pub eval: Vec<ContextAtom>,
    /// Evaluation atoms inside each domain atom.
    pub refine: Vec<Vec<usize>>,
    /// Translators as words; `Word` over one generator for Z-systems.
    pub translators: Vec<Word>,
    /// `image[t][a]`: evaluation atoms making up `translators[t] . domain[a]`.
    pub image: Vec<Vec<Vec<usize>>>,
    pub hash: String,
}

impl ActionContext {
    fn finish(
        description: String,
        domain: Vec<ContextAtom>,
        eval: Vec<ContextAtom>,
        refine: Vec<Vec<usize>>,
        translators: Vec<Word>,
        image: Vec<Vec<Vec<usize>>>,
        caps: &ContextCaps,
    ) -> Result<Self> {
        if eval.len() > caps.max_atoms {
            return Err(Error::ContextOverflow(format!("{} atoms exceed cap {}", eval.len(), caps.max_atoms)));
        }
        if translators.len() > caps.max_translators {
            return Err(Error::ContextOverflow(format!(
                "{} translators exceed cap {}",
                translators.len(),
                caps.max_translators
            )));
        }
        let mut ctx = Self { description, domain, eval, refine, translators, image, hash: String::new() };
        ctx.hash = ctx.content_hash();
        Ok(ctx)
    }

    pub fn content_hash(&self) -> String {
        let body = serde_json::to_vec(&(&self.domain, &self.eval, &self.refine, &self.translators, &self.image))
            .expect("context serializes");
        hex::encode(Sha256::digest(&body))
    }

    pub fn is_live(&self) -> bool {
        self.hash == self.content_hash()
    }

    /// Points of a finite action with translators from the ball of radius `radius`.
    pub fn finite(action: &FiniteAction, radius: usize, caps: &ContextCaps) -> Result<Self> {
        let n = action.size();
        let translators = ball(action.rank(), radius);
        if n > caps.max_atoms {
            return Err(Error::ContextOverflow(format!("{n} points exceed cap {}", caps.max_atoms)));
        }
        let image = translators
            .iter()
            .map(|t| (0..n).map(|a| vec![action.apply_word(t, a)]).collect())
            .collect();
        let atoms: Vec<ContextAtom> = (0..n).map(ContextAtom::Point).collect();
        Self::finish(
            format!("finite action on {n} points, translators |g| <= {radius}"),
            atoms.clone(),
            atoms,
            (0..n).map(|a| vec![a]).collect(),
            translators,
            image,
            caps,
        )
    }

    /// Boundary of `F_r`: cylinders of length `length`, translators of length `<= radius`.
    pub fn boundary(rank: usize, length: usize, radius: usize, caps: &ContextCaps) -> Result<Self> {
        if length == 0 {
            return Err(Error::InvalidSystem("boundary context needs cylinders of length >= 1".into()));
        }
        let fine = length + radius;
        let domain_words = sphere(rank, length);
        let eval_words = sphere(rank, fine);
        if eval_words.len() > caps.max_atoms {
            return Err(Error::ContextOverflow(format!("{} atoms exceed cap {}", eval_words.len(), caps.max_atoms)));
        }
        let pos = |w: &Word| eval_words.binary_search(w).expect("refined cylinder is an atom");
        let to_eval = |s: &BoundarySet| -> Vec<usize> {
            let mut v: Vec<usize> = s.refined(fine).prefixes.iter().map(pos).collect();
            v.sort_unstable();
            v
        };
        let translators = ball(rank, radius);
        let refine = domain_words.iter().map(|w| to_eval(&BoundarySet::cylinder(rank, w.clone()))).collect();
        let image = translators
            .iter()
            .map(|t| {
                domain_words
                    .iter()
                    .map(|w| to_eval(&BoundarySet::cylinder(rank, w.clone()).translate(t)))
                    .collect()
            })
            .collect();
        Self::finish(
            format!("boundary of F_{rank}: cylinders of length {length}, translators |g| <= {radius}"),
            domain_words.into_iter().map(ContextAtom::Cylinder).collect(),
            eval_words.into_iter().map(ContextAtom::Cylinder).collect(),
            refine,
            translators,
            image,
            caps,
        )
    }

    /// Compactified Z: atoms at `window`, translations `T^j` with `|j| <= radius`.
    pub fn compactified(c: &CompactifiedZ, window: usize, radius: usize, caps: &ContextCaps) -> Result<Self> {
        let w = window.max(1) as i64;
        let fine = w + radius as i64;
        let sys = SystemDescriptor::CompactifiedZ(c.clone());
        let domain = atom_algebra(&sys, w as usize)?.atoms;
        let eval = atom_algebra(&sys, fine as usize)?.atoms;
        let int_pos = |copy: usize, n: i64| {
            eval.iter()
                .position(|a| *a == Atom::Int { copy, n })
                .expect("integer inside the fine window")
        };
        let tail_pos = |copy: usize, end: End| {
            eval.iter()
                .position(|a| matches!(a, Atom::Tail { ends } if ends.contains(&(copy, end))))
                .expect("every end has a tail atom")
        };
        let shifted = |a: &Atom, j: i64| -> Vec<usize> {
            let mut out = BTreeSet::new();
            match a {
                Atom::Int { copy, n } => {
                    out.insert(int_pos(*copy, n + j));
                }
                Atom::Tail { ends } => {
                    for &(copy, end) in ends {
                        out.insert(tail_pos(copy, end));
                        match end {
                            End::Plus => out.extend((w + j..fine).map(|n| int_pos(copy, n))),
                            End::Minus => out.extend((-fine + 1..=-w + j).map(|n| int_pos(copy, n))),
                        }
                    }
                }
                _ => unreachable!("compactified atoms"),
            }
            out.into_iter().collect()
        };
        let steps: Vec<i64> = (0..=radius as i64).flat_map(|j| if j == 0 { vec![0] } else { vec![j, -j] }).collect();
        let translators = steps
            .iter()
            .map(|&j| Word::from_letters(std::iter::repeat_n(crate::free_group::Letter::new(0, j < 0), j.unsigned_abs() as usize)))
            .collect();
        let refine = domain.iter().map(|a| shifted(a, 0)).collect();
        let image = steps.iter().map(|&j| domain.iter().map(|a| shifted(a, j)).collect()).collect();
        Self::finish(
            format!("compactified Z ({} copies): window {window}, translations |j| <= {radius}", c.copies()),
            domain.into_iter().map(ContextAtom::Compact).collect(),
            eval.into_iter().map(ContextAtom::Compact).collect(),
            refine,
            translators,
            image,
            caps,
        )
    }

    /// Evaluation atoms of a union of domain atoms.
    pub fn eval_set(&self, atoms: &[usize]) -> BTreeSet<usize> {
        atoms.iter().flat_map(|&a| self.refine[a].iter().copied()).collect()
    }

    pub fn domain_index(&self, atom: &ContextAtom) -> Option<usize> {
        self.domain.iter().position(|a| a == atom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_context_shape() {
        let ctx = ActionContext::boundary(2, 2, 2, &ContextCaps::default()).unwrap();
        assert_eq!(ctx.domain.len(), 12);
        assert_eq!(ctx.eval.len(), 108);
        assert_eq!(ctx.translators.len(), 17);
        // every translate has the measure-free size check: images are nonempty
        assert!(ctx.image.iter().all(|row| row.iter().all(|s| !s.is_empty())));
        assert!(ctx.is_live());
    }

    #[test]
    fn compactified_context_images() {
        let c = CompactifiedZ::standard();
        let ctx = ActionContext::compactified(&c, 1, 2, &ContextCaps::default()).unwrap();
        // domain: tail-, {0}, tail+ ; eval window 3: tail-, -2..2, tail+
        assert_eq!(ctx.domain.len(), 3);
        assert_eq!(ctx.eval.len(), 7);
        assert_eq!(ctx.refine[2], vec![4, 5, 6]);
        // T . {0} = {1}
        assert_eq!(ctx.image[1][1], vec![4]);
        // T^-1 . tail+ = {0, 1, 2} and tail
        assert_eq!(ctx.image[2][2], vec![3, 4, 5, 6]);
    }

    #[test]
    fn hash_detects_edits() {
        let mut ctx = ActionContext::finite(&FiniteAction::cycle(3), 1, &ContextCaps::default()).unwrap();
        ctx.image[1][0] = vec![2];
        assert!(!ctx.is_live());
    }
}
