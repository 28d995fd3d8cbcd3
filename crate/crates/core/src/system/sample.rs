//! Finite metric samples with a map per generator.

use crate::error::{Error, Result};
use crate::rational::{circle_dist, render, Rational};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

/// How distances between sample points are given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SampleMetric {
    /// Explicit symmetric distance table.
    Table(#[serde(with = "crate::rational::serde_rational::vec2")] Vec<Vec<Rational>>),
    /// Points on the circle `R/Z` (coordinates in turns), arc distance.
    Circle(#[serde(with = "crate::rational::serde_rational::vec")] Vec<Rational>),
    /// Points on the real line.
    Line(#[serde(with = "crate::rational::serde_rational::vec")] Vec<Rational>),
}

/// Image of a sample point under a generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SampleImage {
    /// Lands exactly on another sample point.
    Index(usize),
    /// Off-sample image given by a coordinate (circle or line metrics).
    Coordinate(#[serde(with = "crate::rational::serde_rational")] Rational),
    /// Off-sample image given by its distances to every sample point.
    Distances(#[serde(with = "crate::rational::serde_rational::vec")] Vec<Rational>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteSample {
    metric: SampleMetric,
    maps: Vec<Vec<SampleImage>>,
}

impl FiniteSample {
    pub fn new(metric: SampleMetric, maps: Vec<Vec<SampleImage>>) -> Result<Self> {
        let s = Self { metric, maps };
        s.validate()?;
        Ok(s)
    }

    /// Sample with an exact map given as index tables.
    pub fn exact(metric: SampleMetric, tables: Vec<Vec<usize>>) -> Result<Self> {
        let maps = tables
            .into_iter()
            .map(|t| t.into_iter().map(SampleImage::Index).collect())
            .collect();
        Self::new(metric, maps)
    }

    fn validate(&self) -> Result<()> {
        let n = self.len();
        if n == 0 {
            return Err(Error::InvalidSystem("sample is empty".into()));
        }
        match &self.metric {
            SampleMetric::Table(t) => {
                if t.iter().any(|row| row.len() != n) {
                    return Err(Error::InvalidSystem("distance table is not square".into()));
                }
                for i in 0..n {
                    for j in 0..n {
                        let d = &t[i][j];
                        if d.is_negative() {
                            return Err(Error::InvalidSystem(format!("negative distance d({i},{j})")));
                        }
                        if (i == j) != d.is_zero() {
                            return Err(Error::InvalidSystem(format!(
                                "d({i},{j}) = {} violates zero iff equal",
                                render(d)
                            )));
                        }
                        if t[j][i] != *d {
                            return Err(Error::InvalidSystem(format!("distance table not symmetric at ({i},{j})")));
                        }
                    }
                }
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            if t[i][k] > &t[i][j] + &t[j][k] {
                                return Err(Error::InvalidSystem(format!(
                                    "triangle inequality fails for ({i},{j},{k})"
                                )));
                            }
                        }
                    }
                }
            }
            SampleMetric::Circle(c) => {
                for (i, x) in c.iter().enumerate() {
                    if x.is_negative() || *x >= Rational::from_integer(1.into()) {
                        return Err(Error::InvalidSystem(format!("circle coordinate {i} outside [0,1)")));
                    }
                }
                let mut sorted = c.clone();
                sorted.sort();
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::InvalidSystem("repeated sample point".into()));
                }
            }
            SampleMetric::Line(c) => {
                let mut sorted = c.clone();
                sorted.sort();
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::InvalidSystem("repeated sample point".into()));
                }
            }
        }
        if self.maps.is_empty() {
            return Err(Error::InvalidSystem("at least one map is required".into()));
        }
        for (g, map) in self.maps.iter().enumerate() {
            if map.len() != n {
                return Err(Error::InvalidSystem(format!("map {g} has {} entries, expected {n}", map.len())));
            }
            for (i, img) in map.iter().enumerate() {
                match (img, &self.metric) {
                    (SampleImage::Index(j), _) if *j >= n => {
                        return Err(Error::InvalidSystem(format!("map {g} sends {i} to missing point {j}")))
                    }
                    (SampleImage::Index(_), _) => {}
                    (SampleImage::Coordinate(_), SampleMetric::Table(_)) => {
                        return Err(Error::InvalidSystem("coordinate image needs a circle or line metric".into()))
                    }
                    (SampleImage::Coordinate(_), _) => {}
                    (SampleImage::Distances(row), _) => {
                        if row.len() != n || row.iter().any(|d| d.is_negative()) {
                            return Err(Error::InvalidSystem(format!("bad distance row for image of {i} under {g}")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        match &self.metric {
            SampleMetric::Table(t) => t.len(),
            SampleMetric::Circle(c) | SampleMetric::Line(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rank(&self) -> usize {
        self.maps.len()
    }

    pub fn metric(&self) -> &SampleMetric {
        &self.metric
    }

    pub fn maps(&self) -> &[Vec<SampleImage>] {
        &self.maps
    }

    fn coord_dist(&self, a: &Rational, b: &Rational) -> Rational {
        match &self.metric {
            SampleMetric::Circle(_) => circle_dist(a, b),
            _ => (a - b).abs(),
        }
    }

    pub fn dist(&self, i: usize, j: usize) -> Rational {
        match &self.metric {
            SampleMetric::Table(t) => t[i][j].clone(),
            SampleMetric::Circle(c) | SampleMetric::Line(c) => self.coord_dist(&c[i], &c[j]),
        }
    }

    /// `d(s x_i, x_j)` for generator `gen`.
    pub fn image_dist(&self, gen: usize, i: usize, j: usize) -> Rational {
        match &self.maps[gen][i] {
            SampleImage::Index(k) => self.dist(*k, j),
            SampleImage::Coordinate(x) => match &self.metric {
                SampleMetric::Circle(c) | SampleMetric::Line(c) => self.coord_dist(x, &c[j]),
                SampleMetric::Table(_) => unreachable!("validated"),
            },
            SampleImage::Distances(row) => row[j].clone(),
        }
    }

    pub fn image_index(&self, gen: usize, i: usize) -> Option<usize> {
        match self.maps[gen][i] {
            SampleImage::Index(k) => Some(k),
            _ => None,
        }
    }

    /// Index table of an exact map, if every image is a sample point.
    pub fn exact_table(&self, gen: usize) -> Option<Vec<usize>> {
        (0..self.len()).map(|i| self.image_index(gen, i)).collect()
    }

    /// Inverse index table when the map is an exact bijection of the sample.
    pub fn inverse_table(&self, gen: usize) -> Option<Vec<usize>> {
        let t = self.exact_table(gen)?;
        let mut inv = vec![usize::MAX; t.len()];
        for (i, &j) in t.iter().enumerate() {
            if inv[j] != usize::MAX {
                return None;
            }
            inv[j] = i;
        }
        Some(inv)
    }

    pub fn diameter(&self) -> Rational {
        let n = self.len();
        let mut best = Rational::zero();
        for i in 0..n {
            for j in 0..n {
                let d = self.dist(i, j);
                if d > best {
                    best = d;
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, q};

    #[test]
    fn triangle_violation_names_triple() {
        let t = vec![
            vec![int(0), int(1), int(5)],
            vec![int(1), int(0), int(1)],
            vec![int(5), int(1), int(0)],
        ];
        let err = FiniteSample::exact(SampleMetric::Table(t), vec![vec![0, 1, 2]]).unwrap_err();
        assert!(err.to_string().contains("(0,1,2)"), "{err}");
    }

    #[test]
    fn circle_distances_and_images() {
        let pts = (0..4).map(|k| q(k, 4)).collect();
        let s = FiniteSample::new(
            SampleMetric::Circle(pts),
            vec![vec![
                SampleImage::Index(0),
                SampleImage::Coordinate(q(1, 8)),
                SampleImage::Index(2),
                SampleImage::Coordinate(q(7, 8)),
            ]],
        )
        .unwrap();
        assert_eq!(s.dist(0, 3), q(1, 4));
        assert_eq!(s.image_dist(0, 1, 0), q(1, 8));
        assert_eq!(s.image_dist(0, 3, 0), q(1, 8));
        assert!(s.inverse_table(0).is_none());
    }
}
