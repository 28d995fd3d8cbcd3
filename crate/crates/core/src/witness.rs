//! Finite models of a system: verification, merging, empirical measures and
//! the defects of the induced diagonal matrix model.

use crate::action::FiniteAction;
use crate::error::{Error, Result};
use crate::free_group::{ball, Letter, Word};
use crate::rational::{circle_dist, int, Rational};
use crate::system::{CompactPoint, Point, Resolution, SystemDescriptor};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub action: FiniteAction,
    pub zeta: Vec<Point>,
    #[serde(with = "crate::rational::serde_rational")]
    pub epsilon: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub density_defect: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub equivariance_defect: Rational,
    /// Generators whose equivariance was measured.
    pub scope: Vec<usize>,
}

impl Witness {
    pub fn passes(&self) -> bool {
        self.density_defect < self.epsilon && self.equivariance_defect < self.epsilon
    }

    pub fn passes_at(&self, eps: &Rational) -> bool {
        self.density_defect < *eps && self.equivariance_defect < *eps
    }

    pub fn size(&self) -> usize {
        self.action.size()
    }
}

/// `max_{z, s in scope} d(zeta(s z), s zeta(z))`.
pub fn equivariance_defect(
    system: &SystemDescriptor,
    action: &FiniteAction,
    zeta: &[Point],
    scope: &[usize],
) -> Result<Rational> {
    let mut worst = Rational::zero();
    for &s in scope {
        for z in 0..action.size() {
            let d = system.image_distance(s, &zeta[z], &zeta[action.apply(s, z)])?;
            if d > worst {
                worst = d;
            }
        }
    }
    Ok(worst)
}

pub fn check_witness(
    system: &SystemDescriptor,
    action: &FiniteAction,
    zeta: &[Point],
    scope: &[usize],
    epsilon: &Rational,
    res: &Resolution,
) -> Result<Witness> {
    if !epsilon.is_positive() {
        return Err(Error::InvalidPoint("epsilon must be positive".into()));
    }
    if zeta.len() != action.size() {
        return Err(Error::InvalidPoint(format!("zeta has {} entries for {} elements", zeta.len(), action.size())));
    }
    if action.rank() != system.rank() {
        return Err(Error::Mismatch(format!("action rank {} vs system rank {}", action.rank(), system.rank())));
    }
    if let Some(&s) = scope.iter().find(|&&s| s >= system.rank()) {
        return Err(Error::InvalidAction(format!("generator {s} outside the rank")));
    }
    let zeta: Vec<Point> = zeta.iter().map(|p| system.validate_point(p)).collect::<Result<_>>()?;
    let equivariance_defect = equivariance_defect(system, action, &zeta, scope)?;
    let density_defect = system.density_defect(&zeta, epsilon, res)?;
    Ok(Witness {
        action: action.clone(),
        zeta,
        epsilon: epsilon.clone(),
        density_defect,
        equivariance_defect,
        scope: scope.to_vec(),
    })
}

/// Disjoint union of witnesses over one system and scope.
pub fn merge_local_witnesses(system: &SystemDescriptor, witnesses: &[Witness], res: &Resolution) -> Result<Witness> {
    let first = witnesses.first().ok_or_else(|| Error::Mismatch("nothing to merge".into()))?;
    let mut action = first.action.clone();
    let mut zeta = first.zeta.clone();
    let mut equivariance = first.equivariance_defect.clone();
    for w in &witnesses[1..] {
        if w.scope != first.scope || w.epsilon != first.epsilon {
            return Err(Error::Mismatch("witnesses differ in scope or epsilon".into()));
        }
        action = action.disjoint_union(&w.action)?;
        zeta.extend(w.zeta.iter().cloned());
        if w.equivariance_defect > equivariance {
            equivariance = w.equivariance_defect.clone();
        }
    }
    for p in &zeta {
        system
            .validate_point(p)
            .map_err(|_| Error::Mismatch("witness points belong to a different system".into()))?;
    }
    let density_defect = system.density_defect(&zeta, &first.epsilon, res)?;
    Ok(Witness {
        action,
        zeta,
        epsilon: first.epsilon.clone(),
        density_defect,
        equivariance_defect: equivariance,
        scope: first.scope.clone(),
    })
}

/// Bounded rational test functions on a system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TestFunction {
    /// Indicator of a ball pattern: `x_g = values[i]` for `g = support[i]`.
    ShiftCylinder { support: Vec<Word>, values: Vec<usize> },
    BoundaryCylinder(Word),
    /// Indicator of an isolated integer point of a compactified system.
    CompactIndicator(CompactPoint),
    /// `i`-th coordinate of a polytope point.
    Coordinate(usize),
    /// Circle distance of `x_k` from zero on an algebraic system.
    TorusCoordinate(i64),
    /// `d(x, x_i)` on a finite sample.
    SampleDistance(usize),
}

impl TestFunction {
    /// All radius-`r` ball patterns of a shift, admissible or not.
    pub fn shift_cylinders(alphabet: usize, rank: usize, r: usize) -> Vec<TestFunction> {
        let support = ball(rank, r);
        let n = support.len();
        let total = alphabet.checked_pow(n as u32).unwrap_or(usize::MAX);
        (0..total)
            .map(|mut m| {
                let values = (0..n)
                    .map(|_| {
                        let d = m % alphabet;
                        m /= alphabet;
                        d
                    })
                    .collect();
                TestFunction::ShiftCylinder { support: support.clone(), values }
            })
            .collect()
    }

    pub fn eval(&self, system: &SystemDescriptor, x: &Point) -> Result<Rational> {
        let bool_q = |b: bool| if b { Rational::one() } else { Rational::zero() };
        match (self, x) {
            (TestFunction::ShiftCylinder { support, values }, Point::Config(c)) => {
                Ok(bool_q(support.iter().zip(values).all(|(g, &v)| c.value_at(g) == v)))
            }
            (TestFunction::BoundaryCylinder(w), Point::Boundary(b)) => Ok(bool_q(b.first(w.len()) == *w)),
            (TestFunction::CompactIndicator(p), Point::Compact(c)) => Ok(bool_q(p == c)),
            (TestFunction::Coordinate(i), Point::Vector(v)) => {
                v.get(*i).cloned().ok_or_else(|| Error::NonEvaluable(format!("no coordinate {i}")))
            }
            (TestFunction::TorusCoordinate(k), Point::Torus(t)) => Ok(circle_dist(t.at(*k), &Rational::zero())),
            (TestFunction::SampleDistance(i), Point::Sample(_)) => system.distance(x, &Point::Sample(*i)),
            _ => Err(Error::NonEvaluable(format!("{self:?} cannot be evaluated at {x:?}"))),
        }
    }

    /// `f(s . x)`, evaluated without leaving the sample when possible.
    pub fn eval_after(&self, system: &SystemDescriptor, gen: usize, x: &Point) -> Result<Rational> {
        if let (TestFunction::SampleDistance(i), SystemDescriptor::FiniteSample(_)) = (self, system) {
            return system.image_distance(gen, x, &Point::Sample(*i));
        }
        let sx = system
            .act(Letter::new(gen, false), x)
            .map_err(|e| Error::NonEvaluable(format!("cannot move the point: {e}")))?;
        self.eval(system, &sx)
    }

    /// Lipschitz constant for the system metric.
    pub fn lipschitz(&self, system: &SystemDescriptor) -> Rational {
        match (self, system) {
            (TestFunction::ShiftCylinder { support, .. }, _) => {
                let r = support.iter().map(Word::len).max().unwrap_or(0);
                int(2).pow(r as i32)
            }
            (TestFunction::BoundaryCylinder(w), _) => int(2).pow(w.len().saturating_sub(1) as i32),
            (TestFunction::CompactIndicator(p), SystemDescriptor::CompactifiedZ(c)) => match *p {
                CompactPoint::Int { copy, n } => {
                    let near = [n - 1, n + 1]
                        .iter()
                        .map(|&m| c.distance(p, &CompactPoint::Int { copy, n: m }))
                        .min()
                        .expect("two neighbours");
                    Rational::one() / near
                }
                CompactPoint::End { .. } => Rational::zero(),
            },
            (TestFunction::TorusCoordinate(k), _) => int(2).pow(k.unsigned_abs() as i32),
            _ => Rational::one(),
        }
    }

    /// Sup norm over the system; grid-based for continuous coordinates.
    pub fn sup_norm(&self, system: &SystemDescriptor, eps: &Rational, res: &Resolution) -> Result<Rational> {
        match (self, system) {
            (TestFunction::ShiftCylinder { support, values }, SystemDescriptor::Shift(space)) => {
                let ok = support.len() == values.len()
                    && values.iter().all(|&v| space.is_essential(v))
                    && support.iter().enumerate().all(|(i, g)| {
                        Letter::all(space.rank()).all(|l| {
                            let h = g.mul(&Word::letter(l));
                            match support.iter().position(|w| *w == h) {
                                Some(j) => space.allowed(values[i], l, values[j]),
                                None => true,
                            }
                        })
                    });
                Ok(if ok { Rational::one() } else { Rational::zero() })
            }
            (TestFunction::BoundaryCylinder(_), _) | (TestFunction::CompactIndicator(_), _) => Ok(Rational::one()),
            (TestFunction::Coordinate(i), SystemDescriptor::Polytope(p)) => {
                Ok(p.vertices().iter().map(|v| v[*i].abs()).max().unwrap_or_else(Rational::zero))
            }
            _ => {
                let mut best = Rational::zero();
                for g in system.grid(eps, res)? {
                    let v = self.eval(system, &g)?.abs();
                    if v > best {
                        best = v;
                    }
                }
                Ok(best)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    pub support: Vec<Point>,
    #[serde(with = "crate::rational::serde_rational::vec")]
    pub weights: Vec<Rational>,
}

impl DiscreteMeasure {
    pub fn integrate(&self, f: impl Fn(&Point) -> Result<Rational>) -> Result<Rational> {
        let mut s = Rational::zero();
        for (p, w) in self.support.iter().zip(&self.weights) {
            s += f(p)? * w;
        }
        Ok(s)
    }
}

/// Push-forward of the uniform measure on `E`, and
/// `max_{s, f} |mu(f o s) - mu(f)|`.
pub fn empirical_measure(
    system: &SystemDescriptor,
    witness: &Witness,
    tests: &[TestFunction],
) -> Result<(DiscreteMeasure, Rational)> {
    let n = int(witness.size() as i64);
    let mut counts: Vec<(Point, usize)> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    for p in &witness.zeta {
        let key = serde_json::to_string(p).expect("points serialize");
        match index.get(&key) {
            Some(&i) => counts[i].1 += 1,
            None => {
                index.insert(key, counts.len());
                counts.push((p.clone(), 1));
            }
        }
    }
    let measure = DiscreteMeasure {
        weights: counts.iter().map(|(_, c)| int(*c as i64) / &n).collect(),
        support: counts.into_iter().map(|(p, _)| p).collect(),
    };
    let mut worst = Rational::zero();
    for f in tests {
        let base = measure.integrate(|p| f.eval(system, p))?;
        for &s in &witness.scope {
            let moved = measure.integrate(|p| f.eval_after(system, s, p))?;
            let d = (moved - &base).abs();
            if d > worst {
                worst = d;
            }
        }
    }
    Ok((measure, worst))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UcpDefects {
    #[serde(with = "crate::rational::serde_rational")]
    pub mult_defect: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub norm_defect: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub equivariance_defect: Rational,
}

/// Defects of `phi(f) = diag(f(zeta(z)))` on the family `omega`, with the
/// action `(gamma_s h)(z) = h(s z)`.
pub fn ucp_defects(
    system: &SystemDescriptor,
    witness: &Witness,
    omega: &[TestFunction],
    res: &Resolution,
) -> Result<UcpDefects> {
    let values: Vec<Vec<Rational>> = omega
        .iter()
        .map(|f| witness.zeta.iter().map(|p| f.eval(system, p)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let mut mult = Rational::zero();
    for (fi, f) in omega.iter().enumerate() {
        for (gi, g) in omega.iter().enumerate() {
            for (z, p) in witness.zeta.iter().enumerate() {
                let fg = f.eval(system, p)? * g.eval(system, p)?;
                let d = (fg - &values[fi][z] * &values[gi][z]).abs();
                if d > mult {
                    mult = d;
                }
            }
        }
    }
    let mut norm = Rational::zero();
    for (fi, f) in omega.iter().enumerate() {
        let sup = f.sup_norm(system, &witness.epsilon, res)?;
        let on_e = values[fi].iter().map(Rational::abs).max().unwrap_or_else(Rational::zero);
        let d = sup - on_e;
        if d > norm {
            norm = d;
        }
    }
    let equiv = omega_defect(system, &witness.action, &witness.zeta, &witness.scope, omega)?;
    Ok(UcpDefects { mult_defect: mult, norm_defect: norm, equivariance_defect: equiv })
}

/// `max_{f, s, z} |f(s zeta(z)) - f(zeta(s z))|`.
pub fn omega_defect(
    system: &SystemDescriptor,
    action: &FiniteAction,
    zeta: &[Point],
    scope: &[usize],
    omega: &[TestFunction],
) -> Result<Rational> {
    let mut worst = Rational::zero();
    for f in omega {
        let values: Vec<Rational> = zeta.iter().map(|p| f.eval(system, p)).collect::<Result<_>>()?;
        for &s in scope {
            for (z, p) in zeta.iter().enumerate() {
                let d = (f.eval_after(system, s, p)? - &values[action.apply(s, z)]).abs();
                if d > worst {
                    worst = d;
                }
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::system::{FiniteSample, PeriodicConfig, SampleImage, SampleMetric, ShiftSpace};

    fn period_two() -> (SystemDescriptor, FiniteAction, Vec<Point>) {
        let sys = SystemDescriptor::Shift(ShiftSpace::full(2, 1));
        // E = {0^inf, 1^inf, (01), (10)}; shift swaps the last two
        let action = FiniteAction::new(4, vec![vec![0, 1, 3, 2]]).unwrap();
        let zeta = [vec![0], vec![1], vec![0, 1], vec![1, 0]]
            .iter()
            .map(|w| Point::Config(PeriodicConfig::periodic(w).unwrap()))
            .collect();
        (sys, action, zeta)
    }

    #[test]
    fn one_point_system() {
        let sys = SystemDescriptor::FiniteSample(
            FiniteSample::exact(SampleMetric::Table(vec![vec![int(0)]]), vec![vec![0]]).unwrap(),
        );
        let w = check_witness(&sys, &FiniteAction::trivial(1, 1), &[Point::Sample(0)], &[0], &q(1, 1000), &Resolution::default())
            .unwrap();
        assert!(w.density_defect.is_zero() && w.equivariance_defect.is_zero() && w.passes());
    }

    #[test]
    fn period_two_shift_model() {
        let (sys, action, zeta) = period_two();
        let w = check_witness(&sys, &action, &zeta, &[0], &q(1, 2), &Resolution::default()).unwrap();
        assert_eq!(w.equivariance_defect, Rational::zero());
        assert_eq!(w.density_defect, q(1, 2));
        assert!(!w.passes());
        assert!(w.passes_at(&q(3, 5)));
    }

    #[test]
    fn north_south_two_fixed_points() {
        // 16 circle points, north pole at 0, south at 1/2; map pushes toward south
        let pts: Vec<Rational> = (0..16).map(|k| q(k, 16)).collect();
        let maps = vec![(0..16)
            .map(|k| match k {
                0 | 8 => SampleImage::Index(k),
                k if k < 8 => SampleImage::Index(k + 1),
                k => SampleImage::Index(k - 1),
            })
            .collect()];
        let sys = SystemDescriptor::FiniteSample(FiniteSample::new(SampleMetric::Circle(pts), maps).unwrap());
        let action = FiniteAction::trivial(2, 1);
        let w = check_witness(&sys, &action, &[Point::Sample(0), Point::Sample(8)], &[0], &q(1, 3), &Resolution::default())
            .unwrap();
        assert_eq!(w.equivariance_defect, Rational::zero());
        // farthest sample point from both poles is a quarter turn away
        assert_eq!(w.density_defect, q(1, 4));
        assert!(w.passes());
    }

    #[test]
    fn merge_and_ucp() {
        let (sys, action, zeta) = period_two();
        let w = check_witness(&sys, &action, &zeta, &[0], &q(1, 2), &Resolution::default()).unwrap();
        let m = merge_local_witnesses(&sys, &[w.clone(), w.clone()], &Resolution::default()).unwrap();
        assert_eq!(m.size(), 8);
        assert_eq!(m.density_defect, w.density_defect);
        let omega = TestFunction::shift_cylinders(2, 1, 1);
        let u = ucp_defects(&sys, &w, &omega, &Resolution::default()).unwrap();
        assert!(u.mult_defect.is_zero());
        assert_eq!(u.norm_defect, Rational::one());
        assert!(u.equivariance_defect.is_zero());
        let (mu, inv) = empirical_measure(&sys, &w, &omega).unwrap();
        assert_eq!(mu.weights, vec![q(1, 4); 4]);
        assert!(inv.is_zero());
    }
}
