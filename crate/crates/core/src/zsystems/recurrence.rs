//! Bounded-horizon search for `d(T^n x, T^-m x) < eps`.

use crate::error::{Error, Result};
use crate::free_group::Letter;
use crate::rational::Rational;
use crate::system::{Point, SystemDescriptor};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recurrence {
    pub n: usize,
    pub m: usize,
}

/// Least `(n, m)` in lexicographic order with `lower <= n, m <= horizon`.
/// `None` is a verdict about this horizon only.
pub fn recurrence_scan(
    system: &SystemDescriptor,
    x: &Point,
    epsilon: &Rational,
    lower: usize,
    horizon: usize,
) -> Result<Option<Recurrence>> {
    if lower > horizon {
        return Err(Error::InvalidPoint(format!("lower bound {lower} exceeds horizon {horizon}")));
    }
    if system.rank() != 1 {
        return Err(Error::InvalidSystem("recurrence scan needs a single map".into()));
    }
    let x = system.validate_point(x)?;
    let orbit = |inverse: bool| -> Result<Vec<Point>> {
        let l = Letter::new(0, inverse);
        let mut out = Vec::with_capacity(horizon + 1);
        let mut p = x.clone();
        out.push(p.clone());
        for _ in 0..horizon {
            p = system.act(l, &p)?;
            out.push(p.clone());
        }
        Ok(out)
    };
    let backward = orbit(true)?;
    let forward = orbit(false)?;
    for n in lower..=horizon {
        for m in lower..=horizon {
            if system.distance(&forward[n], &backward[m])? < *epsilon {
                return Ok(Some(Recurrence { n, m }));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::system::{CompactPoint, CompactifiedZ, FiniteSample, SampleMetric};

    /// Rotation by 144/233 on 233 equally spaced circle points.
    fn golden() -> FiniteSample {
        FiniteSample::exact(
            SampleMetric::Circle((0..233).map(|k| q(k, 233)).collect()),
            vec![(0..233).map(|k| (k + 144) % 233).collect()],
        )
        .unwrap()
    }

    #[test]
    fn golden_rotation_recurs() {
        let sys = SystemDescriptor::FiniteSample(golden());
        // oracle: (n + m) * 144 / 233 must be within 0.05 of an integer
        let oracle = (1..=200usize)
            .flat_map(|n| (1..=200usize).map(move |m| (n, m)))
            .find(|&(n, m)| {
                let r = ((n + m) * 144) % 233;
                r.min(233 - r) * 20 < 233
            })
            .unwrap();
        let got = recurrence_scan(&sys, &Point::Sample(0), &q(1, 20), 1, 200).unwrap().unwrap();
        assert_eq!((got.n, got.m), oracle);
        assert_eq!((got.n, got.m), (1, 12));
    }

    #[test]
    fn fixed_point_and_translation() {
        let sys = SystemDescriptor::CompactifiedZ(CompactifiedZ::standard());
        let fixed = recurrence_scan(&sys, &Point::Compact(CompactPoint::plus_inf()), &q(1, 4), 3, 10).unwrap();
        assert_eq!(fixed, Some(Recurrence { n: 3, m: 3 }));
        let x = Point::Compact(CompactPoint::int(0));
        assert_eq!(recurrence_scan(&sys, &x, &q(1, 4), 1, 100).unwrap(), None);
    }

    #[test]
    fn non_invertible_sample() {
        let s = FiniteSample::exact(SampleMetric::Line(vec![q(0, 1), q(1, 1)]), vec![vec![1, 1]]).unwrap();
        let r = recurrence_scan(&SystemDescriptor::FiniteSample(s), &Point::Sample(0), &q(1, 2), 1, 5);
        assert!(matches!(r, Err(Error::NonInvertible(_))));
    }
}
