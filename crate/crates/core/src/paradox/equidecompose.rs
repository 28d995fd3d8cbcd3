//! Equidecomposability of labeled unions of atoms at a fixed context.

use super::context::{ActionContext, ContextCaps};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// A labeled union of domain atoms: `(atom, label)` pairs.
pub type LabeledSet = Vec<(usize, u32)>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchedPiece {
    pub translator: usize,
    pub from_label: u32,
    pub to_label: u32,
    pub atoms: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Equidecomposition {
    pub context_hash: String,
    pub source: LabeledSet,
    pub target: LabeledSet,
    pub pieces: Vec<MatchedPiece>,
}

type QElem = (usize, u32);

struct Problem {
    /// per source element: options (translator, target label, target elements)
    options: Vec<Vec<(usize, u32, Vec<QElem>)>>,
    targets: BTreeSet<QElem>,
}

fn normalize(ctx: &ActionContext, set: &[(usize, u32)]) -> Result<LabeledSet> {
    if let Some(&(a, _)) = set.iter().find(|(a, _)| *a >= ctx.domain.len()) {
        return Err(Error::StaleContext(format!("atom {a} is not in the context")));
    }
    let out: BTreeSet<(usize, u32)> = set.iter().copied().collect();
    if out.len() != set.len() {
        return Err(Error::InvalidPoint("labeled set repeats an element".into()));
    }
    Ok(out.into_iter().collect())
}

fn build(ctx: &ActionContext, p: &[(usize, u32)], q: &[(usize, u32)]) -> Problem {
    let targets: BTreeSet<QElem> = q.iter().flat_map(|&(b, m)| ctx.refine[b].iter().map(move |&e| (e, m))).collect();
    let labels: BTreeSet<u32> = q.iter().map(|&(_, m)| m).collect();
    let options = p
        .iter()
        .map(|&(a, _)| {
            let mut opts = Vec::new();
            for t in 0..ctx.translators.len() {
                for &m in &labels {
                    let img: Vec<QElem> = ctx.image[t][a].iter().map(|&e| (e, m)).collect();
                    if img.iter().all(|x| targets.contains(x)) {
                        opts.push((t, m, img));
                    }
                }
            }
            opts
        })
        .collect();
    Problem { options, targets }
}

fn kuhn(prob: &Problem) -> Option<Vec<usize>> {
    let order: Vec<QElem> = prob.targets.iter().copied().collect();
    let pos: BTreeMap<QElem, usize> = order.iter().enumerate().map(|(i, x)| (*x, i)).collect();
    let adj: Vec<Vec<(usize, usize)>> = prob
        .options
        .iter()
        .map(|o| o.iter().enumerate().map(|(k, (_, _, img))| (k, pos[&img[0]])).collect())
        .collect();
    let mut owner: Vec<Option<(usize, usize)>> = vec![None; order.len()];
    fn augment(
        u: usize,
        adj: &[Vec<(usize, usize)>],
        seen: &mut [bool],
        owner: &mut [Option<(usize, usize)>],
    ) -> bool {
        for &(k, v) in &adj[u] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if owner[v].is_none_or(|(w, _)| augment(w, adj, seen, owner)) {
                owner[v] = Some((u, k));
                return true;
            }
        }
        false
    }
    for u in 0..adj.len() {
        let mut seen = vec![false; order.len()];
        if !augment(u, &adj, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut choice = vec![usize::MAX; adj.len()];
    for (u, k) in owner.into_iter().flatten() {
        choice[u] = k;
    }
    choice.iter().all(|&k| k != usize::MAX).then_some(choice)
}

struct Cover<'a> {
    prob: &'a Problem,
    covered: BTreeSet<QElem>,
    used: Vec<bool>,
    choice: Vec<usize>,
    nodes: usize,
    max_nodes: usize,
}

impl Cover<'_> {
    fn live(&self, u: usize, k: usize) -> bool {
        !self.used[u] && self.prob.options[u][k].2.iter().all(|x| !self.covered.contains(x))
    }

    fn run(&mut self) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(Error::ContextOverflow(format!("exact cover exceeded {} nodes", self.max_nodes)));
        }
        if self.covered.len() == self.prob.targets.len() {
            return Ok(self.used.iter().all(|&b| b));
        }
        // unused sources must still have somewhere to go
        for u in 0..self.used.len() {
            if !self.used[u] && !(0..self.prob.options[u].len()).any(|k| self.live(u, k)) {
                return Ok(false);
            }
        }
        // uncovered element with fewest candidates
        let mut best: Option<(usize, Vec<(usize, usize)>)> = None;
        for x in self.prob.targets.iter().filter(|x| !self.covered.contains(x)) {
            let cands: Vec<(usize, usize)> = (0..self.used.len())
                .flat_map(|u| (0..self.prob.options[u].len()).map(move |k| (u, k)))
                .filter(|&(u, k)| self.prob.options[u][k].2.contains(x) && self.live(u, k))
                .collect();
            if best.as_ref().is_none_or(|(n, _)| cands.len() < *n) {
                let n = cands.len();
                best = Some((n, cands));
                if n <= 1 {
                    break;
                }
            }
        }
        let (_, cands) = best.expect("some element is uncovered");
        for (u, k) in cands {
            let img = &self.prob.options[u][k].2;
            self.used[u] = true;
            self.choice[u] = k;
            self.covered.extend(img.iter().copied());
            if self.run()? {
                return Ok(true);
            }
            for x in img {
                self.covered.remove(x);
            }
            self.used[u] = false;
        }
        Ok(false)
    }
}

/// Pieces `C_i` (unions of source atoms) and translators `s_i` with
/// `P = ⊔ C_i × {n_i}` and `Q = ⊔ s_i C_i × {m_i}`, or `None` at this context.
pub fn equidecompose(
    ctx: &ActionContext,
    source: &[(usize, u32)],
    target: &[(usize, u32)],
    caps: &ContextCaps,
) -> Result<Option<Equidecomposition>> {
    let p = normalize(ctx, source)?;
    let q = normalize(ctx, target)?;
    let prob = build(ctx, &p, &q);
    let single = prob.options.iter().all(|o| o.iter().all(|(_, _, img)| img.len() == 1));
    let choice = if prob.options.iter().any(Vec::is_empty) {
        None
    } else if single {
        (p.len() == prob.targets.len()).then(|| kuhn(&prob)).flatten()
    } else {
        let mut cover = Cover {
            prob: &prob,
            covered: BTreeSet::new(),
            used: vec![false; p.len()],
            choice: vec![usize::MAX; p.len()],
            nodes: 0,
            max_nodes: caps.max_nodes,
        };
        cover.run()?.then_some(cover.choice)
    };
    let Some(choice) = choice else {
        return Ok(None);
    };
    let mut groups: BTreeMap<(usize, u32, u32), Vec<usize>> = BTreeMap::new();
    for (i, &(a, n)) in p.iter().enumerate() {
        let (t, m, _) = &prob.options[i][choice[i]];
        groups.entry((*t, n, *m)).or_default().push(a);
    }
    let pieces = groups
        .into_iter()
        .map(|((translator, from_label, to_label), atoms)| MatchedPiece { translator, from_label, to_label, atoms })
        .collect();
    Ok(Some(Equidecomposition { context_hash: ctx.hash.clone(), source: p, target: q, pieces }))
}

/// Pointwise recheck on evaluation atoms: pieces partition the source and
/// their translates partition the target.
pub fn verify_equidecomposition(ctx: &ActionContext, eq: &Equidecomposition) -> Result<bool> {
    if eq.context_hash != ctx.hash || !ctx.is_live() {
        return Err(Error::StaleContext("matching refers to a different context".into()));
    }
    let p = normalize(ctx, &eq.source)?;
    let q = normalize(ctx, &eq.target)?;
    let mut from: Vec<(usize, u32)> = Vec::new();
    let mut to: Vec<QElem> = Vec::new();
    for piece in &eq.pieces {
        if piece.translator >= ctx.translators.len() || piece.atoms.iter().any(|&a| a >= ctx.domain.len()) {
            return Err(Error::StaleContext("piece is not a union of context atoms".into()));
        }
        for &a in &piece.atoms {
            from.push((a, piece.from_label));
            to.extend(ctx.image[piece.translator][a].iter().map(|&e| (e, piece.to_label)));
        }
    }
    from.sort_unstable();
    to.sort_unstable();
    let want: Vec<QElem> = q
        .iter()
        .flat_map(|&(b, m)| ctx.refine[b].iter().map(move |&e| (e, m)))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    Ok(from == p && to == want)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::FiniteAction;
    use crate::free_group::{Letter, Word};

    #[test]
    fn identity_matching() {
        let caps = ContextCaps::default();
        let action = FiniteAction::new(3, vec![vec![1, 2, 0]]).unwrap();
        let ctx = ActionContext::finite(&action, 1, &caps).unwrap();
        let p = vec![(0, 0), (2, 0)];
        let eq = equidecompose(&ctx, &p, &p, &caps).unwrap().unwrap();
        assert_eq!(eq.pieces, vec![MatchedPiece { translator: 0, from_label: 0, to_label: 0, atoms: vec![0, 2] }]);
        assert!(verify_equidecomposition(&ctx, &eq).unwrap());
        assert_eq!(equidecompose(&ctx, &[(0, 0)], &[(1, 0), (2, 0)], &caps).unwrap(), None);
    }

    #[test]
    fn boundary_half_translate() {
        let caps = ContextCaps::default();
        let ctx = ActionContext::boundary(2, 2, 1, &caps).unwrap();
        let a = Letter::new(0, false);
        let starts = |l: Letter| -> Vec<(usize, u32)> {
            ctx.domain
                .iter()
                .enumerate()
                .filter(|(_, atom)| matches!(atom, super::super::ContextAtom::Cylinder(w) if w.first() == Some(l)))
                .map(|(i, _)| (i, 0))
                .collect()
        };
        let q = starts(a);
        let p: Vec<(usize, u32)> = (0..ctx.domain.len()).map(|i| (i, 0)).filter(|x| !starts(a.inv()).contains(x)).collect();
        let eq = equidecompose(&ctx, &p, &q, &caps).unwrap().unwrap();
        assert!(verify_equidecomposition(&ctx, &eq).unwrap());
        let ta = ctx.translators.iter().position(|w| *w == Word::letter(a)).unwrap();
        assert_eq!(eq.pieces.len(), 1);
        assert_eq!(eq.pieces[0].translator, ta);
    }
}
