//! Reduced words in the free group `F_r`, balls in its Cayley graph, and the
//! prepend-and-reduce action on the boundary (infinite reduced words).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// A generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub gen: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(gen: usize, inverse: bool) -> Self {
        Self { gen, inverse }
    }

    pub fn inv(self) -> Self {
        Self { gen: self.gen, inverse: !self.inverse }
    }

    /// Index in `0..2r`: `a, a^-1, b, b^-1, ...`.
    pub fn index(self) -> usize {
        2 * self.gen + usize::from(self.inverse)
    }

    pub fn from_index(i: usize) -> Self {
        Self { gen: i / 2, inverse: i % 2 == 1 }
    }

    /// All `2r` letters in index order.
    pub fn all(rank: usize) -> impl Iterator<Item = Letter> {
        (0..2 * rank).map(Letter::from_index)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // `e` is reserved for the identity
        let base = if self.gen < 4 {
            ((b'a' + self.gen as u8) as char).to_string()
        } else if self.gen < 25 {
            ((b'a' + self.gen as u8 + 1) as char).to_string()
        } else {
            format!("s{}", self.gen)
        };
        if self.inverse {
            write!(f, "{base}'")
        } else {
            write!(f, "{base}")
        }
    }
}

/// A reduced word. Construction always reduces.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Self(Vec::new())
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Self(out)
    }

    pub fn letter(l: Letter) -> Self {
        Self(vec![l])
    }

    /// Parses words like `"a b' a"` or `"ab'a"`; `'` or `-` after a letter
    /// marks an inverse, `e` or the empty string is the identity.
    pub fn parse(s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        if chars == ['e'] || chars.is_empty() {
            return Ok(Self::identity());
        }
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if !c.is_ascii_lowercase() || c == 'e' {
                return Err(Error::InvalidSystem(format!("bad letter {c:?} in word {s:?}")));
            }
            let gen = (c as u8 - b'a') as usize;
            // `e` is reserved for the identity, so generators skip it
            let gen = if gen > 4 { gen - 1 } else { gen };
            let inverse = matches!(chars.get(i + 1), Some('\'') | Some('-'));
            letters.push(Letter::new(gen, inverse));
            i += if inverse { 2 } else { 1 };
        }
        Ok(Self::from_letters(letters))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    pub fn mul(&self, other: &Word) -> Word {
        Word::from_letters(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn max_gen(&self) -> Option<usize> {
        self.0.iter().map(|l| l.gen).max()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// All reduced words of length at most `radius`, ordered by length and then
/// by letter index. The identity comes first.
pub fn ball(rank: usize, radius: usize) -> Vec<Word> {
    let mut out = vec![Word::identity()];
    let mut frontier = vec![Word::identity()];
    for _ in 0..radius {
        let mut next = Vec::new();
        for w in &frontier {
            for l in Letter::all(rank) {
                if w.last() != Some(l.inv()) {
                    let mut v = w.0.clone();
                    v.push(l);
                    next.push(Word(v));
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Number of reduced words of length exactly `len`.
pub fn sphere_size(rank: usize, len: usize) -> usize {
    if len == 0 {
        1
    } else {
        2 * rank * (2 * rank - 1).pow(len as u32 - 1)
    }
}

/// Reduced words of length exactly `len` (cylinder labels at that length).
pub fn sphere(rank: usize, len: usize) -> Vec<Word> {
    ball(rank, len).into_iter().filter(|w| w.len() == len).collect()
}

/// A clopen subset of the boundary, stored as a set of cylinders of one common
/// prefix length. Length 0 with the empty word denotes the whole boundary.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BoundarySet {
    pub rank: usize,
    pub length: usize,
    pub prefixes: BTreeSet<Word>,
}

impl BoundarySet {
    pub fn whole(rank: usize) -> Self {
        Self { rank, length: 0, prefixes: BTreeSet::from([Word::identity()]) }
    }

    pub fn empty(rank: usize) -> Self {
        Self { rank, length: 0, prefixes: BTreeSet::new() }
    }

    /// The cylinder `C(w)` of infinite reduced words starting with `w`.
    pub fn cylinder(rank: usize, w: Word) -> Self {
        Self { rank, length: w.len(), prefixes: BTreeSet::from([w]) }
    }

    /// Union of cylinders of arbitrary lengths.
    pub fn from_cylinders(rank: usize, cylinders: impl IntoIterator<Item = Word>) -> Self {
        let cyl: Vec<Word> = cylinders.into_iter().collect();
        let len = cyl.iter().map(Word::len).max().unwrap_or(0);
        let mut out = Self { rank, length: len, prefixes: BTreeSet::new() };
        for w in cyl {
            out.prefixes.extend(Self::cylinder(rank, w).refined(len).prefixes);
        }
        out
    }

    /// Same set described by cylinders of length `len >= self.length`.
    pub fn refined(&self, len: usize) -> Self {
        assert!(len >= self.length, "cannot coarsen a boundary set");
        let mut current: BTreeSet<Word> = self.prefixes.clone();
        for _ in self.length..len {
            let mut next = BTreeSet::new();
            for w in &current {
                for l in Letter::all(self.rank) {
                    if w.last() != Some(l.inv()) {
                        let mut v = w.0.clone();
                        v.push(l);
                        next.insert(Word(v));
                    }
                }
            }
            current = next;
        }
        Self { rank: self.rank, length: len, prefixes: current }
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        let len = self.length.max(other.length);
        (self.refined(len), other.refined(len))
    }

    pub fn union(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        Self { rank: a.rank, length: a.length, prefixes: a.prefixes.union(&b.prefixes).cloned().collect() }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        Self {
            rank: a.rank,
            length: a.length,
            prefixes: a.prefixes.intersection(&b.prefixes).cloned().collect(),
        }
    }

    pub fn complement(&self) -> Self {
        let all = Self::whole(self.rank).refined(self.length);
        Self {
            rank: self.rank,
            length: self.length,
            prefixes: all.prefixes.difference(&self.prefixes).cloned().collect(),
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        let (a, b) = self.aligned(other);
        a.prefixes.is_subset(&b.prefixes)
    }

    pub fn same_set(&self, other: &Self) -> bool {
        let (a, b) = self.aligned(other);
        a.prefixes == b.prefixes
    }

    pub fn is_empty(&self) -> bool {
        self.prefixes.is_empty()
    }

    /// Image under left multiplication by `g`.
    pub fn translate(&self, g: &Word) -> Self {
        let mut out = Self::empty(self.rank);
        for w in &self.prefixes {
            out = out.union(&translate_cylinder(self.rank, g, w));
        }
        out
    }

    /// Coarsest equivalent description (merges full sibling families).
    pub fn simplified(&self) -> Vec<Word> {
        let mut cur: BTreeSet<Word> = self.prefixes.clone();
        loop {
            let mut changed = false;
            let parents: BTreeSet<Word> = cur
                .iter()
                .filter(|w| !w.is_empty())
                .map(|w| Word(w.0[..w.len() - 1].to_vec()))
                .collect();
            for p in parents {
                let children = Self::cylinder(self.rank, p.clone()).refined(p.len() + 1).prefixes;
                if children.iter().all(|c| cur.contains(c)) {
                    for c in &children {
                        cur.remove(c);
                    }
                    cur.insert(p);
                    changed = true;
                }
            }
            if !changed {
                return cur.into_iter().collect();
            }
        }
    }
}

/// `g . C(w)` for a single cylinder as an exact finite union of cylinders.
fn translate_cylinder(rank: usize, g: &Word, w: &Word) -> BoundarySet {
    // cancellation length between the end of g and the start of w
    let gl = g.letters();
    let wl = w.letters();
    let mut k = 0;
    while k < gl.len() && k < wl.len() && gl[gl.len() - 1 - k] == wl[k].inv() {
        k += 1;
    }
    if k < wl.len() {
        return BoundarySet::cylinder(rank, g.mul(w));
    }
    // w is completely absorbed: g = h w^{-1}, and g.C(w) = h.(boundary minus C(w_last^{-1}))
    // which is the complement of C(h w_last^{-1}).
    let h = g.mul(w);
    match w.last() {
        None => BoundarySet::whole(rank),
        Some(last) => {
            let excluded = h.mul(&Word::letter(last.inv()));
            BoundarySet::cylinder(rank, excluded).complement()
        }
    }
}

/// `g . C(c)` as a clopen set.
pub fn boundary_translate(g: &Word, c: &BoundarySet) -> BoundarySet {
    c.translate(g)
}

/// An eventually periodic point of the boundary: `prefix` followed by the
/// cycle repeated forever. The concatenation must be reduced everywhere.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub prefix: Vec<Letter>,
    pub cycle: Vec<Letter>,
}

impl BoundaryPoint {
    pub fn new(prefix: Vec<Letter>, cycle: Vec<Letter>) -> Result<Self> {
        let p = Self { prefix, cycle };
        p.validate()?;
        Ok(p.normalized())
    }

    pub fn validate(&self) -> Result<()> {
        if self.cycle.is_empty() {
            return Err(Error::InvalidPoint("boundary point needs a nonempty cycle".into()));
        }
        let n = self.prefix.len() + 2 * self.cycle.len();
        for i in 0..n {
            if self.letter_at(i) == self.letter_at(i + 1).inv() {
                return Err(Error::InvalidPoint(format!("boundary word is not reduced at position {i}")));
            }
        }
        Ok(())
    }

    pub fn letter_at(&self, i: usize) -> Letter {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    pub fn first(&self, n: usize) -> Word {
        Word((0..n).map(|i| self.letter_at(i)).collect())
    }

    /// Canonical form: shortest prefix, primitive cycle.
    pub fn normalized(&self) -> Self {
        let mut prefix = self.prefix.clone();
        let mut cycle = self.cycle.clone();
        // primitive cycle
        let n = cycle.len();
        for d in 1..=n {
            if n.is_multiple_of(d) && (0..n).all(|i| cycle[i] == cycle[i % d]) {
                cycle.truncate(d);
                break;
            }
        }
        // absorb prefix tail into the cycle
        while let Some(&last) = prefix.last() {
            if last == *cycle.last().expect("nonempty cycle") {
                prefix.pop();
                cycle.rotate_right(1);
            } else {
                break;
            }
        }
        Self { prefix, cycle }
    }

    /// `g . x` by prepending `g` and reducing.
    pub fn translate(&self, g: &Word) -> Self {
        let mut prefix = self.prefix.clone();
        let mut cycle = self.cycle.clone();
        for &l in g.letters().iter().rev() {
            match prefix.first() {
                Some(&f) if f == l.inv() => {
                    prefix.remove(0);
                }
                Some(_) => prefix.insert(0, l),
                None => {
                    if cycle[0] == l.inv() {
                        cycle.rotate_left(1);
                    } else {
                        prefix.insert(0, l);
                    }
                }
            }
        }
        Self { prefix, cycle }.normalized()
    }

    /// Length of the longest common prefix, or `None` if equal.
    pub fn agreement(&self, other: &Self) -> Option<usize> {
        let a = self.normalized();
        let b = other.normalized();
        if a == b {
            return None;
        }
        // two distinct eventually periodic words differ before this bound
        let bound = a.prefix.len().max(b.prefix.len()) + a.cycle.len() * b.cycle.len() + a.cycle.len() + b.cycle.len();
        (0..=bound).find(|&i| a.letter_at(i) != b.letter_at(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn reduction_and_parse() {
        assert_eq!(w("aa'b"), w("b"));
        assert_eq!(w("ab").inverse(), w("b'a'"));
        assert!(w("aa'").is_empty());
        assert_eq!(w("ab'").to_string(), "ab'");
    }

    #[test]
    fn ball_sizes() {
        assert_eq!(ball(2, 1).len(), 5);
        assert_eq!(ball(2, 2).len(), 17);
        assert_eq!(ball(1, 3).len(), 7);
        assert_eq!(sphere_size(2, 3), 36);
        assert_eq!(sphere(2, 3).len(), 36);
    }

    #[test]
    fn translate_examples() {
        let a = w("a");
        assert!(boundary_translate(&a, &BoundarySet::cylinder(2, w("a"))).same_set(&BoundarySet::cylinder(2, w("aa"))));
        let expected = BoundarySet::from_cylinders(2, [w("a'"), w("b"), w("b'")]);
        let got = boundary_translate(&a, &BoundarySet::cylinder(2, w("a'")));
        assert!(got.same_set(&expected));
        assert!(got.same_set(&BoundarySet::cylinder(2, w("a")).complement()));
        let cb = BoundarySet::cylinder(2, w("b"));
        assert!(boundary_translate(&w("a'"), &boundary_translate(&a, &cb)).same_set(&cb));
    }

    // Oracle for translate: act on finite prefixes of concrete eventually
    // periodic points drawn from each cylinder.
    #[test]
    fn translate_matches_pointwise_action() {
        let rank = 2;
        let points: Vec<BoundaryPoint> = ball(rank, 3)
            .into_iter()
            .flat_map(|p| {
                Letter::all(rank)
                    .filter_map(|c| BoundaryPoint::new(p.letters().to_vec(), vec![c]).ok())
                    .collect::<Vec<_>>()
            })
            .collect();
        for g in ball(rank, 2) {
            for c in sphere(rank, 2) {
                let set = BoundarySet::cylinder(rank, c.clone());
                let image = set.translate(&g);
                for x in &points {
                    let inside = x.first(2) == c;
                    let gx = x.translate(&g);
                    let gx_in_image = image.prefixes.contains(&gx.first(image.length));
                    assert_eq!(inside, gx_in_image, "g={g} c={c} x={x:?}");
                }
            }
        }
    }

    #[test]
    fn point_translation_and_agreement() {
        let a = Letter::new(0, false);
        let b = Letter::new(1, false);
        let x = BoundaryPoint::new(vec![], vec![a]).unwrap();
        let y = x.translate(&w("a'"));
        assert_eq!(y, x);
        let z = x.translate(&w("b"));
        assert_eq!(z.first(3), w("baa"));
        assert_eq!(x.agreement(&z), Some(0));
        let bx = BoundaryPoint::new(vec![b], vec![b]).unwrap();
        assert_eq!(bx, BoundaryPoint::new(vec![], vec![b]).unwrap());
    }
}
