//! Exact rationals. Everything combinatorial in this crate is computed over
//! `BigRational`; floats only appear in the matrix module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::str::FromStr;

pub type Rational = BigRational;

/// `n/d` as an exact rational.
pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `2^-k`.
pub fn pow2_neg(k: usize) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << k)
}

/// Parses `"p/q"`, `"p"` or a plain decimal such as `"0.25"`.
pub fn parse(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((int_part, frac)) = s.split_once('.') {
        if s.contains('/') {
            return None;
        }
        let neg = int_part.starts_with('-');
        let digits = format!("{}{}", int_part.trim_start_matches(['-', '+']), frac);
        let num = BigInt::from_str(&digits).ok()?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rational::new(num, den);
        return Some(if neg { -r } else { r });
    }
    let r = Rational::from_str(s).ok()?;
    Some(r)
}

/// Canonical `"p/q"` (or `"p"` for integers) rendering.
pub fn render(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact binary value of a finite float.
pub fn from_f64(x: f64) -> Rational {
    Rational::from_float(x).expect("finite float")
}

/// Closest rational with denominator `den` (ties rounded away from zero).
pub fn round_to_denominator(x: &Rational, den: u64) -> Rational {
    let d = BigInt::from(den);
    let scaled = x * Rational::from_integer(d.clone());
    Rational::new(scaled.round().to_integer(), d)
}

/// Distance on the circle `R/Z` between two representatives.
pub fn circle_dist(a: &Rational, b: &Rational) -> Rational {
    let diff = frac(&(a - b));
    let other = Rational::one() - &diff;
    if diff < other {
        diff
    } else {
        other
    }
}

/// Fractional part in `[0, 1)`.
pub fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

pub fn lcm_of_denominators<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

pub fn abs(x: &Rational) -> Rational {
    x.abs()
}

pub fn max_of<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> Rational {
    xs.into_iter()
        .fold(Rational::zero(), |acc, x| if *x > acc { x.clone() } else { acc })
}

pub mod serde_rational {
    //! Serialize rationals as `"p/q"` strings.
    use super::*;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&render(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}")))
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&render(r))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
            let v = Vec::<String>::deserialize(d)?;
            v.iter()
                .map(|s| parse(s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}"))))
                .collect()
        }
    }

    pub mod vec2 {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Vec<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
            let rows: Vec<Vec<String>> = v.iter().map(|r| r.iter().map(render).collect()).collect();
            serde::Serialize::serialize(&rows, s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<Rational>>, D::Error> {
            let v = Vec::<Vec<String>>::deserialize(d)?;
            v.iter()
                .map(|row| {
                    row.iter()
                        .map(|s| parse(s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}"))))
                        .collect()
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse("3/6"), Some(q(1, 2)));
        assert_eq!(parse("-2"), Some(int(-2)));
        assert_eq!(parse("0.25"), Some(q(1, 4)));
        assert_eq!(parse("-1.5"), Some(q(-3, 2)));
        assert_eq!(parse("x"), None);
        assert_eq!(render(&q(6, 4)), "3/2");
        assert_eq!(render(&int(5)), "5");
    }

    #[test]
    fn circle() {
        assert_eq!(circle_dist(&q(1, 10), &q(9, 10)), q(1, 5));
        assert_eq!(circle_dist(&q(0, 1), &q(1, 2)), q(1, 2));
        assert_eq!(round_to_denominator(&q(1, 3), 10), q(3, 10));
    }
}
