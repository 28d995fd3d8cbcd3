//! Copies of Z, each compactified by two fixed points at `-inf` and `+inf`,
//! with endpoints optionally glued across copies. Translation acts on every copy.
//!
//! Each copy is placed on `[-1, 1]` by `n -> n / (|n| + 1)`; the metric is the
//! path metric of the resulting graph of segments with glued endpoints.

use crate::error::{Error, Result};
use crate::rational::{int, q, Rational};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum End {
    Minus,
    Plus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CompactPoint {
    Int { copy: usize, n: i64 },
    End { copy: usize, end: End },
}

impl CompactPoint {
    pub fn int(n: i64) -> Self {
        CompactPoint::Int { copy: 0, n }
    }

    pub fn plus_inf() -> Self {
        CompactPoint::End { copy: 0, end: End::Plus }
    }

    pub fn minus_inf() -> Self {
        CompactPoint::End { copy: 0, end: End::Minus }
    }

    pub fn copy(&self) -> usize {
        match *self {
            CompactPoint::Int { copy, .. } | CompactPoint::End { copy, .. } => copy,
        }
    }

    /// Position on `[-1, 1]` inside its copy.
    pub fn coordinate(&self) -> Rational {
        match *self {
            CompactPoint::Int { n, .. } => q(n, n.abs() + 1),
            CompactPoint::End { end: End::Minus, .. } => int(-1),
            CompactPoint::End { end: End::Plus, .. } => int(1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompactifiedZ {
    copies: usize,
    gluing: Vec<((usize, End), (usize, End))>,
    #[serde(skip)]
    class: Vec<usize>,
    #[serde(skip)]
    class_dist: Vec<Vec<Rational>>,
}

impl CompactifiedZ {
    pub fn new(copies: usize, gluing: Vec<((usize, End), (usize, End))>) -> Result<Self> {
        if copies == 0 {
            return Err(Error::InvalidSystem("need at least one copy of Z".into()));
        }
        let slot = |(c, e): (usize, End)| 2 * c + usize::from(e == End::Plus);
        // union-find over the 2*copies endpoints
        let mut parent: Vec<usize> = (0..2 * copies).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for &(a, b) in &gluing {
            if a.0 >= copies || b.0 >= copies {
                return Err(Error::InvalidSystem(format!("gluing refers to copy beyond {copies}")));
            }
            let (ra, rb) = (find(&mut parent, slot(a)), find(&mut parent, slot(b)));
            parent[ra.max(rb)] = ra.min(rb);
        }
        let roots: Vec<usize> = (0..2 * copies).map(|i| find(&mut parent, i)).collect();
        let mut labels: Vec<usize> = roots.clone();
        labels.sort_unstable();
        labels.dedup();
        let class: Vec<usize> = roots.iter().map(|r| labels.binary_search(r).unwrap()).collect();
        let k = labels.len();
        // Floyd-Warshall: each copy is a segment of length 2 between its ends
        let mut d: Vec<Vec<Option<Rational>>> = vec![vec![None; k]; k];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = Some(Rational::zero());
        }
        for c in 0..copies {
            let (a, b) = (class[2 * c], class[2 * c + 1]);
            if a != b {
                let two = int(2);
                if d[a][b].as_ref().is_none_or(|x| *x > two) {
                    d[a][b] = Some(two.clone());
                    d[b][a] = Some(two);
                }
            }
        }
        for m in 0..k {
            for i in 0..k {
                for j in 0..k {
                    if let (Some(x), Some(y)) = (&d[i][m], &d[m][j]) {
                        let s = x + y;
                        if d[i][j].as_ref().is_none_or(|z| *z > s) {
                            d[i][j] = Some(s);
                        }
                    }
                }
            }
        }
        // disconnected components are kept at distance 4 (above any path)
        let class_dist = d.into_iter().map(|row| row.into_iter().map(|x| x.unwrap_or_else(|| int(4))).collect()).collect();
        Ok(Self { copies, gluing, class, class_dist })
    }

    /// A single copy with its two fixed ends.
    pub fn standard() -> Self {
        Self::new(1, Vec::new()).expect("one copy")
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn gluing(&self) -> &[((usize, End), (usize, End))] {
        &self.gluing
    }

    pub fn revalidate(self) -> Result<Self> {
        Self::new(self.copies, self.gluing)
    }

    fn end_class(&self, copy: usize, end: End) -> usize {
        self.class[2 * copy + usize::from(end == End::Plus)]
    }

    /// Canonical representative: glued ends map to the least `(copy, end)`.
    pub fn canonical(&self, p: CompactPoint) -> CompactPoint {
        match p {
            CompactPoint::End { copy, end } => {
                let c = self.end_class(copy, end);
                let slot = (0..2 * self.copies).find(|&s| self.class[s] == c).unwrap();
                CompactPoint::End { copy: slot / 2, end: if slot % 2 == 1 { End::Plus } else { End::Minus } }
            }
            other => other,
        }
    }

    pub fn check_point(&self, p: &CompactPoint) -> Result<()> {
        if p.copy() >= self.copies {
            return Err(Error::InvalidPoint(format!("copy {} does not exist", p.copy())));
        }
        Ok(())
    }

    pub fn distance(&self, x: &CompactPoint, y: &CompactPoint) -> Rational {
        let (x, y) = (self.canonical(*x), self.canonical(*y));
        if x == y {
            return Rational::zero();
        }
        let (cx, cy) = (x.coordinate(), y.coordinate());
        let mut best = if x.copy() == y.copy() { Some((&cx - &cy).abs()) } else { None };
        for ex in [End::Minus, End::Plus] {
            let tx = CompactPoint::End { copy: x.copy(), end: ex }.coordinate();
            for ey in [End::Minus, End::Plus] {
                let ty = CompactPoint::End { copy: y.copy(), end: ey }.coordinate();
                let via = (&cx - &tx).abs()
                    + &self.class_dist[self.end_class(x.copy(), ex)][self.end_class(y.copy(), ey)]
                    + (&ty - &cy).abs();
                if best.as_ref().is_none_or(|b| *b > via) {
                    best = Some(via);
                }
            }
        }
        best.expect("some route")
    }

    /// Translation by `k`.
    pub fn shift(&self, p: &CompactPoint, k: i64) -> CompactPoint {
        match *p {
            CompactPoint::Int { copy, n } => CompactPoint::Int { copy, n: n + k },
            end => self.canonical(end),
        }
    }

    /// Integer radius of the density grid at `eps`: tails beyond it are within
    /// `eps / 2` of their end.
    pub fn grid_radius(eps: &Rational) -> i64 {
        let r = int(2) / eps;
        let c = r.ceil().to_integer();
        i64::try_from(c).unwrap_or(i64::MAX / 4)
    }

    /// `{-N..N}` on every copy plus the end classes.
    pub fn grid(&self, eps: &Rational) -> Vec<CompactPoint> {
        let n = Self::grid_radius(eps);
        let mut out = Vec::new();
        for copy in 0..self.copies {
            out.extend((-n..=n).map(|k| CompactPoint::Int { copy, n: k }));
        }
        for copy in 0..self.copies {
            for end in [End::Minus, End::Plus] {
                let p = self.canonical(CompactPoint::End { copy, end });
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_copy_metric() {
        let x = CompactifiedZ::standard();
        assert_eq!(x.distance(&CompactPoint::int(0), &CompactPoint::int(1)), q(1, 2));
        assert_eq!(x.distance(&CompactPoint::int(3), &CompactPoint::plus_inf()), q(1, 4));
        assert_eq!(x.distance(&CompactPoint::minus_inf(), &CompactPoint::plus_inf()), int(2));
        assert_eq!(x.shift(&CompactPoint::plus_inf(), 5), CompactPoint::plus_inf());
    }

    #[test]
    fn glued_copies_shortcut() {
        // two copies, +inf of each glued to -inf of the other: a circle of length 4
        let x = CompactifiedZ::new(
            2,
            vec![((0, End::Plus), (1, End::Minus)), ((1, End::Plus), (0, End::Minus))],
        )
        .unwrap();
        let a = CompactPoint::Int { copy: 0, n: 0 };
        let b = CompactPoint::Int { copy: 1, n: 0 };
        assert_eq!(x.distance(&a, &b), int(2));
        let e = CompactPoint::End { copy: 1, end: End::Minus };
        assert_eq!(x.canonical(e), CompactPoint::End { copy: 0, end: End::Plus });
        assert_eq!(x.distance(&CompactPoint::minus_inf(), &CompactPoint::plus_inf()), int(2));
    }

    #[test]
    fn metric_triangle_on_grid() {
        let x = CompactifiedZ::new(3, vec![((0, End::Plus), (1, End::Minus)), ((0, End::Plus), (2, End::Minus)), ((0, End::Minus), (1, End::Plus)), ((0, End::Minus), (2, End::Plus))]).unwrap();
        let g = x.grid(&q(1, 1));
        for a in &g {
            for b in &g {
                assert_eq!(x.distance(a, b), x.distance(b, a));
                for c in &g {
                    assert!(x.distance(a, c) <= x.distance(a, b) + x.distance(b, c));
                }
            }
        }
    }
}
