//! Convex polytopes given by vertices, with an affine self-map `x -> A x + b`.

use crate::error::{Error, Result};
use crate::linalg::{inverse, mat_vec, QMatrix};
use crate::lp::{LinearProgram, Relation};
use crate::rational::{int, Rational};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polytope {
    #[serde(with = "crate::rational::serde_rational::vec2")]
    vertices: Vec<Vec<Rational>>,
    #[serde(with = "crate::rational::serde_rational::vec2")]
    matrix: QMatrix,
    #[serde(with = "crate::rational::serde_rational::vec")]
    offset: Vec<Rational>,
}

/// Whether `x` is a convex combination of `vertices`.
pub fn in_hull(vertices: &[Vec<Rational>], x: &[Rational]) -> bool {
    barycentric_coordinates(vertices, x).is_some()
}

/// Some convex weights expressing `x`, if it lies in the hull.
pub fn barycentric_coordinates(vertices: &[Vec<Rational>], x: &[Rational]) -> Option<Vec<Rational>> {
    let k = vertices.len();
    let mut lp = LinearProgram::new(k);
    for (i, xi) in x.iter().enumerate() {
        let row: Vec<Rational> = vertices.iter().map(|v| v[i].clone()).collect();
        lp.add(row, Relation::Eq, xi.clone());
    }
    lp.add(vec![Rational::one(); k], Relation::Eq, Rational::one());
    lp.feasible_point()
}

pub fn linf(x: &[Rational], y: &[Rational]) -> Rational {
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(Rational::zero(), |m, d| if d > m { d } else { m })
}

impl Polytope {
    pub fn new(vertices: Vec<Vec<Rational>>, matrix: QMatrix, offset: Vec<Rational>) -> Result<Self> {
        let Some(d) = vertices.first().map(Vec::len) else {
            return Err(Error::InvalidSystem("polytope needs a vertex".into()));
        };
        if vertices.iter().any(|v| v.len() != d)
            || matrix.len() != d
            || matrix.iter().any(|r| r.len() != d)
            || offset.len() != d
        {
            return Err(Error::Dimension(format!("polytope data must all have dimension {d}")));
        }
        let p = Self { vertices, matrix, offset };
        for (i, v) in p.vertices.iter().enumerate() {
            if !in_hull(&p.vertices, &p.apply(v)) {
                return Err(Error::InvalidSystem(format!("image of vertex {i} leaves the polytope")));
            }
        }
        Ok(p)
    }

    /// Standard simplex in `R^d` (origin and unit vectors) with the given map.
    pub fn simplex_vertices(d: usize) -> Vec<Vec<Rational>> {
        let mut vs = vec![vec![Rational::zero(); d]];
        for i in 0..d {
            let mut v = vec![Rational::zero(); d];
            v[i] = Rational::one();
            vs.push(v);
        }
        vs
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn vertices(&self) -> &[Vec<Rational>] {
        &self.vertices
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.matrix
    }

    pub fn offset(&self) -> &[Rational] {
        &self.offset
    }

    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        mat_vec(&self.matrix, x).into_iter().zip(&self.offset).map(|(a, b)| a + b).collect()
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.dim() && in_hull(&self.vertices, x)
    }

    pub fn check_point(&self, x: &[Rational]) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::InvalidPoint("point is not in the polytope".into()))
        }
    }

    /// The inverse map, when `T` is a homeomorphism of the polytope.
    pub fn inverse_map(&self) -> Result<(QMatrix, Vec<Rational>)> {
        let inv = inverse(&self.matrix).ok_or_else(|| Error::NonInvertible("linear part is singular".into()))?;
        let off: Vec<Rational> = mat_vec(&inv, &self.offset).into_iter().map(|v| -v).collect();
        for (i, v) in self.vertices.iter().enumerate() {
            let pre: Vec<Rational> = mat_vec(&inv, v).into_iter().zip(&off).map(|(a, b)| a + b).collect();
            if !in_hull(&self.vertices, &pre) {
                return Err(Error::NonInvertible(format!("vertex {i} has no preimage in the polytope")));
            }
        }
        Ok((inv, off))
    }

    pub fn apply_inverse(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        let (inv, off) = self.inverse_map()?;
        Ok(mat_vec(&inv, x).into_iter().zip(&off).map(|(a, b)| a + b).collect())
    }

    pub fn is_fixed(&self, w: &[Rational]) -> bool {
        self.apply(w) == w
    }

    /// Vertices plus all barycentric combinations with weights in `(1/g) Z`.
    pub fn grid(&self, g: usize) -> Vec<Vec<Rational>> {
        let g = g.max(1);
        let k = self.vertices.len();
        let mut out: Vec<Vec<Rational>> = Vec::new();
        let mut weights = vec![0usize; k];
        compositions(g, 0, &mut weights, &mut |w| {
            let x: Vec<Rational> = (0..self.dim())
                .map(|i| {
                    w.iter()
                        .zip(&self.vertices)
                        .map(|(&c, v)| &v[i] * int(c as i64))
                        .sum::<Rational>()
                        / int(g as i64)
                })
                .collect();
            if !out.contains(&x) {
                out.push(x);
            }
        });
        out
    }
}

fn compositions(remaining: usize, idx: usize, w: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if idx + 1 == w.len() {
        w[idx] = remaining;
        f(w);
        return;
    }
    for c in (0..=remaining).rev() {
        w[idx] = c;
        compositions(remaining - c, idx + 1, w, f);
    }
    w[idx] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn halving() -> Polytope {
        Polytope::new(vec![vec![int(0)], vec![int(1)]], vec![vec![q(1, 2)]], vec![int(0)]).unwrap()
    }

    #[test]
    fn membership_and_map() {
        let p = halving();
        assert!(p.contains(&[q(1, 3)]));
        assert!(!p.contains(&[q(3, 2)]));
        assert_eq!(p.apply(&[int(1)]), vec![q(1, 2)]);
        assert!(p.is_fixed(&[int(0)]));
        // x/2 is not onto [0,1]
        assert!(matches!(p.inverse_map(), Err(Error::NonInvertible(_))));
    }

    #[test]
    fn map_leaving_hull_rejected() {
        let r = Polytope::new(vec![vec![int(0)], vec![int(1)]], vec![vec![int(2)]], vec![int(0)]);
        assert!(matches!(r, Err(Error::InvalidSystem(_))));
    }

    #[test]
    fn grid_counts() {
        // triangle, denominator 2: C(4,2) = 6 points
        let p = Polytope::new(Polytope::simplex_vertices(2), crate::linalg::identity(2), vec![int(0), int(0)]).unwrap();
        assert_eq!(p.grid(2).len(), 6);
        assert!(p.grid(2).iter().all(|x| p.contains(x)));
        assert_eq!(linf(&[int(0), int(1)], &[q(1, 2), int(0)]), int(1));
    }
}
