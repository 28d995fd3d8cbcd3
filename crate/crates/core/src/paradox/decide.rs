//! Paradoxical decompositions and invariant measures at a fixed context.

use super::context::{ActionContext, ContextCaps};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::rational::{int, Rational};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    /// Domain atoms of the piece.
    pub atoms: Vec<usize>,
    /// Index into the context's translators.
    pub translator: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParadoxCertificate {
    pub context_hash: String,
    pub target: Vec<usize>,
    pub pieces: Vec<Piece>,
    pub k: u32,
    pub l: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantMeasureCertificate {
    pub context_hash: String,
    pub target: Vec<usize>,
    /// Weight per evaluation atom.
    #[serde(with = "crate::rational::serde_rational::vec")]
    pub weights: Vec<Rational>,
}

fn check_target(ctx: &ActionContext, target: &[usize]) -> Result<BTreeSet<usize>> {
    if target.is_empty() {
        return Err(Error::InvalidPoint("target set is empty".into()));
    }
    if let Some(a) = target.iter().find(|&&a| a >= ctx.domain.len()) {
        return Err(Error::StaleContext(format!("atom {a} is not in the context")));
    }
    Ok(ctx.eval_set(target))
}

/// Translators usable on atom `a`: those mapping it inside the target.
fn usable(ctx: &ActionContext, inside: &BTreeSet<usize>, a: usize) -> Vec<usize> {
    (0..ctx.translators.len()).filter(|&t| ctx.image[t][a].iter().all(|e| inside.contains(e))).collect()
}

/// LP relaxation: `sum_t m[a,t] >= k` per atom of the target,
/// `sum m[a,t] [e in t.a] <= l` per evaluation atom.
fn relaxation_feasible(ctx: &ActionContext, target: &[usize], options: &[Vec<usize>], k: u32, l: u32) -> bool {
    let mut var = Vec::new();
    for (i, opts) in options.iter().enumerate() {
        for &t in opts {
            var.push((i, t));
        }
    }
    let mut lp = LinearProgram::new(var.len());
    for i in 0..target.len() {
        let terms: Vec<(usize, Rational)> =
            var.iter().enumerate().filter(|(_, &(j, _))| j == i).map(|(v, _)| (v, Rational::one())).collect();
        lp.add_sparse(&terms, Relation::Ge, int(k.into()));
    }
    let mut cover: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); ctx.eval.len()];
    for (v, &(i, t)) in var.iter().enumerate() {
        for &e in &ctx.image[t][target[i]] {
            cover[e].push((v, Rational::one()));
        }
    }
    for terms in cover.into_iter().filter(|c| !c.is_empty()) {
        lp.add_sparse(&terms, Relation::Le, int(l.into()));
    }
    lp.feasible_point().is_some()
}

struct Search<'a> {
    ctx: &'a ActionContext,
    target: &'a [usize],
    options: &'a [Vec<usize>],
    k: usize,
    l: u32,
    load: Vec<u32>,
    choice: Vec<Vec<usize>>,
    nodes: usize,
    max_nodes: usize,
}

impl Search<'_> {
    fn place(&mut self, t: usize, a: usize, delta: i64) -> bool {
        let mut ok = true;
        for &e in &self.ctx.image[t][a] {
            self.load[e] = (self.load[e] as i64 + delta) as u32;
            ok &= self.load[e] <= self.l;
        }
        ok
    }

    // multisets of size k over options[i], nondecreasing, lexicographic
    fn atom(&mut self, i: usize) -> Result<bool> {
        if i == self.target.len() {
            return Ok(true);
        }
        self.choice[i].clear();
        self.multiset(i, 0)
    }

    fn multiset(&mut self, i: usize, from: usize) -> Result<bool> {
        if self.choice[i].len() == self.k {
            return self.atom(i + 1);
        }
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(Error::ContextOverflow(format!("search exceeded {} nodes", self.max_nodes)));
        }
        let a = self.target[i];
        for j in from..self.options[i].len() {
            let t = self.options[i][j];
            let fits = self.place(t, a, 1);
            if fits {
                self.choice[i].push(t);
                if self.multiset(i, j)? {
                    return Ok(true);
                }
                self.choice[i].pop();
            }
            self.place(t, a, -1);
        }
        Ok(false)
    }
}

/// Pieces that are unions of domain atoms inside `target`, translators from the
/// context; `None` means no certificate at this context.
pub fn decide_paradoxical(
    ctx: &ActionContext,
    target: &[usize],
    k: u32,
    l: u32,
    caps: &ContextCaps,
) -> Result<Option<ParadoxCertificate>> {
    if !(k > l && l > 0) {
        return Err(Error::InvalidPoint("need k > l > 0".into()));
    }
    let inside = check_target(ctx, target)?;
    let target: Vec<usize> = target.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let options: Vec<Vec<usize>> = target.iter().map(|&a| usable(ctx, &inside, a)).collect();
    if options.iter().any(Vec::is_empty) || !relaxation_feasible(ctx, &target, &options, k, l) {
        return Ok(None);
    }
    let mut search = Search {
        ctx,
        target: &target,
        options: &options,
        k: k as usize,
        l,
        load: vec![0; ctx.eval.len()],
        choice: vec![Vec::new(); target.len()],
        nodes: 0,
        max_nodes: caps.max_nodes,
    };
    if !search.atom(0)? {
        return Ok(None);
    }
    // piece j of translator t holds the atoms using t at least j times
    let mut pieces = Vec::new();
    for t in 0..ctx.translators.len() {
        for j in 1..=k as usize {
            let atoms: Vec<usize> = target
                .iter()
                .zip(&search.choice)
                .filter(|(_, c)| c.iter().filter(|&&x| x == t).count() >= j)
                .map(|(&a, _)| a)
                .collect();
            if !atoms.is_empty() {
                pieces.push(Piece { atoms, translator: t });
            }
        }
    }
    Ok(Some(ParadoxCertificate { context_hash: ctx.hash.clone(), target, pieces, k, l }))
}

/// Recomputes both multiplicity inequalities on evaluation atoms.
pub fn verify_certificate(ctx: &ActionContext, cert: &ParadoxCertificate) -> Result<bool> {
    if cert.context_hash != ctx.hash || !ctx.is_live() {
        return Err(Error::StaleContext("certificate refers to a different context".into()));
    }
    let inside = check_target(ctx, &cert.target)?;
    let mut covered = vec![0u32; ctx.eval.len()];
    let mut moved = vec![0u32; ctx.eval.len()];
    for p in &cert.pieces {
        if p.translator >= ctx.translators.len() || p.atoms.iter().any(|&a| a >= ctx.domain.len()) {
            return Err(Error::StaleContext("piece is not a union of context atoms".into()));
        }
        let atoms: BTreeSet<usize> = p.atoms.iter().copied().collect();
        for &a in &atoms {
            for &e in &ctx.refine[a] {
                covered[e] += 1;
            }
            for &e in &ctx.image[p.translator][a] {
                moved[e] += 1;
            }
        }
    }
    Ok((0..ctx.eval.len()).all(|e| {
        let in_a = inside.contains(&e);
        let need = if in_a { cert.k } else { 0 };
        let cap = if in_a { cert.l } else { 0 };
        covered[e] >= need && moved[e] <= cap
    }))
}

/// Weights on evaluation atoms with `mu(t . a) = mu(a)` for every translator and
/// domain atom, and `mu(target) = 1`. Among solutions the least weight is
/// maximized, which gives the uniform measure on transitive finite actions.
pub fn invariant_measure_lp(ctx: &ActionContext, target: &[usize]) -> Result<Option<InvariantMeasureCertificate>> {
    let inside = check_target(ctx, target)?;
    let n = ctx.eval.len();
    let mut lp = LinearProgram::new(n + 1);
    let mut seen = BTreeSet::new();
    for t in 0..ctx.translators.len() {
        for a in 0..ctx.domain.len() {
            let mut row = vec![Rational::zero(); n + 1];
            for &e in &ctx.image[t][a] {
                row[e] += Rational::one();
            }
            for &e in &ctx.refine[a] {
                row[e] -= Rational::one();
            }
            if row.iter().any(|x| !x.is_zero()) && seen.insert(row.clone()) {
                lp.add(row, Relation::Eq, Rational::zero());
            }
        }
    }
    let mut norm = vec![Rational::zero(); n + 1];
    for &e in &inside {
        norm[e] = Rational::one();
    }
    lp.add(norm, Relation::Eq, Rational::one());
    for e in 0..n {
        let mut row = vec![Rational::zero(); n + 1];
        row[n] = Rational::one();
        row[e] = -Rational::one();
        lp.add(row, Relation::Le, Rational::zero());
    }
    lp.objective[n] = Rational::one();
    match lp.solve() {
        LpOutcome::Optimal { x, .. } => Ok(Some(InvariantMeasureCertificate {
            context_hash: ctx.hash.clone(),
            target: target.to_vec(),
            weights: x[..n].to_vec(),
        })),
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => unreachable!("weights are bounded by the normalization"),
    }
}

/// Exact recheck of an invariant-measure certificate.
pub fn verify_measure(ctx: &ActionContext, cert: &InvariantMeasureCertificate) -> Result<bool> {
    if cert.context_hash != ctx.hash || cert.weights.len() != ctx.eval.len() {
        return Err(Error::StaleContext("measure refers to a different context".into()));
    }
    let inside = check_target(ctx, &cert.target)?;
    let mass = |s: &mut dyn Iterator<Item = usize>| -> Rational { s.map(|e| cert.weights[e].clone()).sum() };
    if cert.weights.iter().any(|w| *w < Rational::zero()) || mass(&mut inside.iter().copied()) != Rational::one() {
        return Ok(false);
    }
    for t in 0..ctx.translators.len() {
        for a in 0..ctx.domain.len() {
            if mass(&mut ctx.image[t][a].iter().copied()) != mass(&mut ctx.refine[a].iter().copied()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::FiniteAction;
    use crate::rational::q;
    use crate::system::CompactifiedZ;

    #[test]
    fn boundary_is_paradoxical() {
        let caps = ContextCaps::default();
        let ctx = ActionContext::boundary(2, 2, 2, &caps).unwrap();
        let all: Vec<usize> = (0..ctx.domain.len()).collect();
        let cert = decide_paradoxical(&ctx, &all, 2, 1, &caps).unwrap().expect("Tarski pieces exist");
        assert!(verify_certificate(&ctx, &cert).unwrap());
        assert!(invariant_measure_lp(&ctx, &all).unwrap().is_none());
        let mut weaker = cert.clone();
        weaker.pieces.pop();
        assert!(!verify_certificate(&ctx, &weaker).unwrap());
        let mut broken = cert;
        broken.pieces[0].atoms.push(999);
        assert!(matches!(verify_certificate(&ctx, &broken), Err(Error::StaleContext(_))));
    }

    #[test]
    fn finite_action_uniform() {
        let caps = ContextCaps::default();
        let action = FiniteAction::new(4, vec![vec![1, 2, 3, 0], vec![1, 0, 3, 2]]).unwrap();
        let ctx = ActionContext::finite(&action, 2, &caps).unwrap();
        let all = vec![0, 1, 2, 3];
        assert_eq!(decide_paradoxical(&ctx, &all, 2, 1, &caps).unwrap(), None);
        let mu = invariant_measure_lp(&ctx, &all).unwrap().unwrap();
        assert_eq!(mu.weights, vec![q(1, 4); 4]);
        assert!(verify_measure(&ctx, &mu).unwrap());
    }

    #[test]
    fn compactified_not_paradoxical() {
        let caps = ContextCaps::default();
        let ctx = ActionContext::compactified(&CompactifiedZ::standard(), 2, 5, &caps).unwrap();
        let all: Vec<usize> = (0..ctx.domain.len()).collect();
        assert_eq!(decide_paradoxical(&ctx, &all, 2, 1, &caps).unwrap(), None);
        let mu = invariant_measure_lp(&ctx, &all).unwrap().unwrap();
        assert!(verify_measure(&ctx, &mu).unwrap());
        // all mass sits on the two ends
        let ends: Rational = [0, ctx.eval.len() - 1].iter().map(|&e| mu.weights[e].clone()).sum();
        assert_eq!(ends, Rational::one());
    }
}
