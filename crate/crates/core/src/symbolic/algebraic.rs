//! Algebraic Z-actions `X_f` and their finite models by periodic points.

use super::snf::{circulant, smith_normal_form};
use crate::action::FiniteAction;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::system::{GroupRingElement, Point, Resolution, SystemDescriptor, TorusPoint};
use crate::witness::{check_witness, Witness};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::HashMap;

/// Points of period `n`: `|det|` of the circulant and its invariant factors
/// (factors equal to one omitted).
pub fn algebraic_fixed_points(f: &GroupRingElement, n: usize) -> Result<(BigInt, Vec<BigInt>)> {
    if n == 0 {
        return Err(Error::InvalidSystem("quotient index must be positive".into()));
    }
    let snf = smith_normal_form(&circulant(&f.reduced(n)));
    if snf.diagonal.iter().any(Zero::is_zero) {
        return Err(Error::Infinite);
    }
    let order = snf.diagonal.iter().product();
    let factors = snf.diagonal.into_iter().filter(|d| !d.is_one()).collect();
    Ok((order, factors))
}

/// All `n`-periodic points of `X_f`, sorted.
pub fn periodic_points(f: &GroupRingElement, n: usize, cap: usize) -> Result<Vec<TorusPoint>> {
    if n == 0 {
        return Err(Error::InvalidSystem("period must be positive".into()));
    }
    let snf = smith_normal_form(&circulant(&f.reduced(n)));
    if snf.diagonal.iter().any(Zero::is_zero) {
        return Err(Error::Infinite);
    }
    let d: Vec<u64> = snf
        .diagonal
        .iter()
        .map(|x| x.to_u64().ok_or_else(|| Error::SizeOverflow("invariant factor too large".into())))
        .collect::<Result<_>>()?;
    let total = d.iter().try_fold(1usize, |acc, &x| acc.checked_mul(x as usize));
    let total = match total {
        Some(t) if t <= cap => t,
        _ => return Err(Error::SizeOverflow(format!("more than {cap} periodic points of period {n}"))),
    };
    let v: Vec<Vec<Rational>> = snf.right.iter().map(|r| r.iter().cloned().map(Rational::from_integer).collect()).collect();
    let mut out = Vec::with_capacity(total);
    for mut m in 0..total {
        // y_i = k_i / d_i, x = V y mod 1
        let y: Vec<Rational> = d
            .iter()
            .map(|&di| {
                let k = m % di as usize;
                m /= di as usize;
                Rational::new(BigInt::from(k), BigInt::from(di))
            })
            .collect();
        let x: Vec<Rational> = v.iter().map(|row| row.iter().zip(&y).map(|(a, b)| a * b).sum()).collect();
        out.push(TorusPoint::new(x)?);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Minimum of `|f^|` on `2^10` equally spaced angles.
pub fn fourier_minimum(f: &GroupRingElement) -> f64 {
    (0..1024).map(|k| f.fourier_abs(k as f64 / 1024.0)).fold(f64::INFINITY, f64::min)
}

pub const FOURIER_MARGIN: f64 = 1e-3;

/// Finite model of `X_f` by its `n`-periodic points with the shift.
pub fn algebraic_model_witness(
    f: &GroupRingElement,
    n: usize,
    epsilon: &Rational,
    grid_period: usize,
    res: &Resolution,
) -> Result<Witness> {
    let min = fourier_minimum(f);
    if min <= 1e-12 {
        return Err(Error::NotInvertible(min));
    }
    if min < FOURIER_MARGIN {
        return Err(Error::Inconclusive(min));
    }
    let points = periodic_points(f, n, res.torus_points_cap)?;
    let index: HashMap<&TorusPoint, usize> = points.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let table: Vec<usize> = points.iter().map(|p| index[&p.shifted(1)]).collect();
    let action = FiniteAction::new(points.len(), vec![table])?;
    let system = SystemDescriptor::Algebraic { f: f.clone(), grid_period };
    let zeta: Vec<Point> = points.into_iter().map(Point::Torus).collect();
    check_witness(&system, &action, &zeta, &[0], epsilon, res)
}
