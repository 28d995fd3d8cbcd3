//! Presentations of compact systems and their point representations.

pub mod compact;
pub mod polytope;
pub mod sample;
pub mod shift;
pub mod torus;

use crate::error::{Error, Result};
use crate::free_group::{sphere_size, BoundaryPoint, Letter, Word};
use crate::rational::{pow2_neg, Rational};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

pub use compact::{CompactPoint, CompactifiedZ, End};
pub use polytope::Polytope;
pub use sample::{FiniteSample, SampleImage, SampleMetric};
pub use shift::{PeriodicConfig, ShiftSpace};
pub use torus::{GroupRingElement, TorusPoint};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SystemDescriptor {
    FiniteSample(FiniteSample),
    /// Rank 1 is the Z-shift; higher ranks are shifts over `F_r`.
    Shift(ShiftSpace),
    FrBoundary { rank: usize },
    CompactifiedZ(CompactifiedZ),
    Polytope(Polytope),
    /// `X_f` inside `(R/Z)^Z`; densities are measured against the points of
    /// period `grid_period`.
    Algebraic { f: GroupRingElement, grid_period: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "kebab-case")]
pub enum Point {
    Sample(usize),
    Config(PeriodicConfig),
    Boundary(BoundaryPoint),
    Compact(CompactPoint),
    Vector(#[serde(with = "crate::rational::serde_rational::vec")] Vec<Rational>),
    Torus(TorusPoint),
}

/// Caps and grid sizes used when measuring densities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub ball_cap: usize,
    pub polytope_denominator: usize,
    pub torus_points_cap: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Self { ball_cap: 1 << 16, polytope_denominator: 4, torus_points_cap: 1 << 12 }
    }
}

impl SystemDescriptor {
    pub fn kind(&self) -> &'static str {
        match self {
            SystemDescriptor::FiniteSample(_) => "finite-sample",
            SystemDescriptor::Shift(s) if s.rank() == 1 => "z-shift",
            SystemDescriptor::Shift(_) => "fr-shift",
            SystemDescriptor::FrBoundary { .. } => "fr-boundary",
            SystemDescriptor::CompactifiedZ(_) => "compactified-z",
            SystemDescriptor::Polytope(_) => "polytope",
            SystemDescriptor::Algebraic { .. } => "algebraic",
        }
    }

    /// Number of free generators acting.
    pub fn rank(&self) -> usize {
        match self {
            SystemDescriptor::FiniteSample(s) => s.rank(),
            SystemDescriptor::Shift(s) => s.rank(),
            SystemDescriptor::FrBoundary { rank } => *rank,
            _ => 1,
        }
    }

    /// Restores derived data after deserialization and rechecks invariants.
    pub fn revalidate(self) -> Result<Self> {
        Ok(match self {
            SystemDescriptor::FiniteSample(s) => {
                SystemDescriptor::FiniteSample(FiniteSample::new(s.metric().clone(), s.maps().to_vec())?)
            }
            SystemDescriptor::Shift(s) => SystemDescriptor::Shift(s.revalidate()?),
            SystemDescriptor::FrBoundary { rank } => {
                if rank == 0 {
                    return Err(Error::InvalidSystem("rank must be at least 1".into()));
                }
                SystemDescriptor::FrBoundary { rank }
            }
            SystemDescriptor::CompactifiedZ(c) => SystemDescriptor::CompactifiedZ(c.revalidate()?),
            SystemDescriptor::Polytope(p) => SystemDescriptor::Polytope(Polytope::new(
                p.vertices().to_vec(),
                p.matrix().clone(),
                p.offset().to_vec(),
            )?),
            SystemDescriptor::Algebraic { f, grid_period } => {
                if f.is_zero() || grid_period == 0 {
                    return Err(Error::InvalidSystem("algebraic system needs nonzero f and grid period".into()));
                }
                SystemDescriptor::Algebraic { f, grid_period }
            }
        })
    }

    /// Restores derived data inside a point and checks it belongs to the system.
    pub fn validate_point(&self, p: &Point) -> Result<Point> {
        match (self, p) {
            (SystemDescriptor::FiniteSample(s), Point::Sample(i)) => {
                if *i < s.len() {
                    Ok(p.clone())
                } else {
                    Err(Error::InvalidPoint(format!("sample index {i} out of range")))
                }
            }
            (SystemDescriptor::Shift(s), Point::Config(c)) => {
                let c = c.clone().revalidate()?;
                c.check_in(s)?;
                Ok(Point::Config(c))
            }
            (SystemDescriptor::FrBoundary { rank }, Point::Boundary(b)) => {
                b.validate()?;
                if b.prefix.iter().chain(&b.cycle).any(|l| l.gen >= *rank) {
                    return Err(Error::InvalidPoint("boundary letter beyond the rank".into()));
                }
                Ok(Point::Boundary(b.normalized()))
            }
            (SystemDescriptor::CompactifiedZ(c), Point::Compact(x)) => {
                c.check_point(x)?;
                Ok(Point::Compact(c.canonical(*x)))
            }
            (SystemDescriptor::Polytope(poly), Point::Vector(x)) => {
                poly.check_point(x)?;
                Ok(p.clone())
            }
            (SystemDescriptor::Algebraic { f, .. }, Point::Torus(t)) => {
                let t = TorusPoint::new(t.values().to_vec())?;
                if !t.annihilated_by(f) {
                    return Err(Error::InvalidPoint("point is not annihilated by f".into()));
                }
                Ok(Point::Torus(t))
            }
            _ => Err(Error::InvalidPoint(format!("point type does not fit a {} system", self.kind()))),
        }
    }

    pub fn distance(&self, x: &Point, y: &Point) -> Result<Rational> {
        match (self, x, y) {
            (SystemDescriptor::FiniteSample(s), Point::Sample(i), Point::Sample(j)) => Ok(s.dist(*i, *j)),
            (SystemDescriptor::Shift(_), Point::Config(a), Point::Config(b)) => Ok(a.distance(b)),
            (SystemDescriptor::FrBoundary { .. }, Point::Boundary(a), Point::Boundary(b)) => {
                Ok(a.agreement(b).map_or_else(Rational::zero, pow2_neg))
            }
            (SystemDescriptor::CompactifiedZ(c), Point::Compact(a), Point::Compact(b)) => Ok(c.distance(a, b)),
            (SystemDescriptor::Polytope(_), Point::Vector(a), Point::Vector(b)) => Ok(polytope::linf(a, b)),
            (SystemDescriptor::Algebraic { .. }, Point::Torus(a), Point::Torus(b)) => Ok(a.distance(b)),
            _ => Err(Error::InvalidPoint(format!("point types do not fit a {} system", self.kind()))),
        }
    }

    /// `d(s . x, y)` for a generator `s`; defined even when `s . x` is off-sample.
    pub fn image_distance(&self, gen: usize, x: &Point, y: &Point) -> Result<Rational> {
        match (self, x, y) {
            (SystemDescriptor::FiniteSample(s), Point::Sample(i), Point::Sample(j)) => Ok(s.image_dist(gen, *i, *j)),
            _ => {
                let sx = self.act(Letter::new(gen, false), x)?;
                self.distance(&sx, y)
            }
        }
    }

    /// `l . x` for a signed generator.
    pub fn act(&self, l: Letter, x: &Point) -> Result<Point> {
        if l.gen >= self.rank() {
            return Err(Error::InvalidAction(format!("generator {} beyond rank {}", l.gen, self.rank())));
        }
        match (self, x) {
            (SystemDescriptor::FiniteSample(s), Point::Sample(i)) => {
                let table = if l.inverse { s.inverse_table(l.gen) } else { s.exact_table(l.gen) };
                table
                    .map(|t| Point::Sample(t[*i]))
                    .ok_or_else(|| Error::NonInvertible("sample map does not permute the sample".into()))
            }
            (SystemDescriptor::Shift(_), Point::Config(c)) => Ok(Point::Config(c.translated(l))),
            (SystemDescriptor::FrBoundary { .. }, Point::Boundary(b)) => Ok(Point::Boundary(b.translate(&Word::letter(l)))),
            (SystemDescriptor::CompactifiedZ(c), Point::Compact(p)) => {
                Ok(Point::Compact(c.shift(p, if l.inverse { -1 } else { 1 })))
            }
            (SystemDescriptor::Polytope(poly), Point::Vector(v)) => {
                if l.inverse {
                    Ok(Point::Vector(poly.apply_inverse(v)?))
                } else {
                    Ok(Point::Vector(poly.apply(v)))
                }
            }
            (SystemDescriptor::Algebraic { .. }, Point::Torus(t)) => Ok(Point::Torus(t.shifted(if l.inverse { -1 } else { 1 }))),
            _ => Err(Error::InvalidPoint(format!("point type does not fit a {} system", self.kind()))),
        }
    }

    /// Applies `T^k` for rank-one systems (`k` may be negative).
    pub fn iterate(&self, x: &Point, k: i64) -> Result<Point> {
        let l = Letter::new(0, k < 0);
        let mut p = x.clone();
        for _ in 0..k.unsigned_abs() {
            p = self.act(l, &p)?;
        }
        Ok(p)
    }

    /// Supremum over the resolution grid of the distance to `points`.
    pub fn density_defect(&self, points: &[Point], eps: &Rational, res: &Resolution) -> Result<Rational> {
        if points.is_empty() {
            return Err(Error::InvalidPoint("density of an empty set".into()));
        }
        match self {
            SystemDescriptor::Shift(space) => {
                let configs: Vec<PeriodicConfig> = points
                    .iter()
                    .map(|p| match p {
                        Point::Config(c) => Ok(c.clone()),
                        _ => Err(Error::InvalidPoint("expected a configuration".into())),
                    })
                    .collect::<Result<_>>()?;
                shift::shift_density(space, &configs, eps, res.ball_cap)
            }
            SystemDescriptor::FrBoundary { rank } => {
                let bps: Vec<&BoundaryPoint> = points
                    .iter()
                    .map(|p| match p {
                        Point::Boundary(b) => Ok(b),
                        _ => Err(Error::InvalidPoint("expected a boundary point".into())),
                    })
                    .collect::<Result<_>>()?;
                boundary_density(*rank, &bps, eps, res.ball_cap)
            }
            _ => {
                let grid = self.grid(eps, res)?;
                let mut worst = Rational::zero();
                for g in &grid {
                    let mut best: Option<Rational> = None;
                    for p in points {
                        let d = self.distance(g, p)?;
                        if best.as_ref().is_none_or(|b| d < *b) {
                            best = Some(d);
                        }
                    }
                    let best = best.expect("nonempty");
                    if best > worst {
                        worst = best;
                    }
                }
                Ok(worst)
            }
        }
    }

    /// Deterministic finite grid for non-symbolic kinds.
    pub fn grid(&self, eps: &Rational, res: &Resolution) -> Result<Vec<Point>> {
        Ok(match self {
            SystemDescriptor::FiniteSample(s) => (0..s.len()).map(Point::Sample).collect(),
            SystemDescriptor::CompactifiedZ(c) => c.grid(eps).into_iter().map(Point::Compact).collect(),
            SystemDescriptor::Polytope(p) => p.grid(res.polytope_denominator).into_iter().map(Point::Vector).collect(),
            SystemDescriptor::Algebraic { f, grid_period } => {
                crate::symbolic::algebraic::periodic_points(f, *grid_period, res.torus_points_cap)?
                    .into_iter()
                    .map(Point::Torus)
                    .collect()
            }
            SystemDescriptor::Shift(space) if space.rank() == 1 => shift_grid(space, eps, res)?,
            _ => return Err(Error::InvalidSystem(format!("{} systems have no point grid", self.kind()))),
        })
    }
}

/// Admissible periodic points of period `2R + 1`, `R` the resolution radius of `eps`.
fn shift_grid(space: &ShiftSpace, eps: &Rational, res: &Resolution) -> Result<Vec<Point>> {
    let len = 2 * shift::resolution_radius(eps) + 1;
    let a = space.alphabet();
    let total = u32::try_from(len).ok().and_then(|l| a.checked_pow(l)).filter(|&t| t <= res.torus_points_cap);
    let total = total.ok_or_else(|| {
        Error::ResolutionOverflow(format!("{a}^{len} periodic words exceed cap {}", res.torus_points_cap))
    })?;
    let mut out = Vec::new();
    for code in 0..total {
        let word: Vec<usize> = (0..len).map(|i| code / a.pow(i as u32) % a).collect();
        let config = PeriodicConfig::periodic(&word)?;
        if config.check_in(space).is_ok() {
            out.push(Point::Config(config));
        }
    }
    Ok(out)
}

/// `2^-(L-1)` for the least cylinder length `L` with a cylinder missed by `points`.
fn boundary_density(rank: usize, points: &[&BoundaryPoint], eps: &Rational, cap: usize) -> Result<Rational> {
    let needed = shift::resolution_radius(eps);
    let mut len = 1;
    loop {
        let total = sphere_size(rank, len);
        if total > cap {
            if len <= needed {
                return Err(Error::ResolutionOverflow(format!("{total} cylinders of length {len} exceed cap {cap}")));
            }
            return Ok(pow2_neg(len));
        }
        let hit: HashSet<Word> = points.iter().map(|b| b.first(len)).collect();
        if hit.len() < total {
            return Ok(pow2_neg(len - 1));
        }
        len += 1;
    }
}
