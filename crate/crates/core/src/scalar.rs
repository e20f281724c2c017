//! Exact rational and binary64 scalars behind one trait.

use std::fmt::{Debug, Display};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub type Rat = BigRational;

/// Absolute tolerance used for every float-mode zero test.
pub const FLOAT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NumericMode {
    Rational,
    Float,
}

impl Display for NumericMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NumericMode::Rational => f.write_str("rational"),
            NumericMode::Float => f.write_str("float"),
        }
    }
}

pub trait Scalar:
    Num + Signed + Clone + PartialOrd + Debug + Display + Send + Sync + 'static
{
    const MODE: NumericMode;

    fn from_i64(v: i64) -> Self;

    fn from_ratio(n: i64, d: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Zero test: exact for rationals, `|x| <= 1e-9` for floats.
    fn negligible(&self) -> bool;

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }

    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }
}

impl Scalar for Rat {
    const MODE: NumericMode = NumericMode::Rational;

    fn from_i64(v: i64) -> Self {
        Rat::from_integer(BigInt::from(v))
    }

    fn from_ratio(n: i64, d: i64) -> Self {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn negligible(&self) -> bool {
        self.is_zero()
    }
}

impl Scalar for f64 {
    const MODE: NumericMode = NumericMode::Float;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(n: i64, d: i64) -> Self {
        n as f64 / d as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn negligible(&self) -> bool {
        self.abs() <= FLOAT_TOL
    }
}

/// Converts a float to the nearest rational with denominator at most `max_den`,
/// provided that rational lies within `tol`.
pub fn snap_rational(x: f64, max_den: i64, tol: f64) -> Option<Rat> {
    if !x.is_finite() {
        return None;
    }
    // continued fraction convergents
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        if (x - h1 as f64 / k1 as f64).abs() <= tol {
            return Some(Rat::new(BigInt::from(h1), BigInt::from(k1)));
        }
        let frac = r - a;
        if frac.abs() < 1e-300 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

/// Parses `"p/q"`, `"p"` or a decimal literal into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rat::new(p, q));
    }
    if let Ok(p) = s.parse::<BigInt>() {
        return Some(Rat::from_integer(p));
    }
    // finite decimal such as 0.3 or -1.25e-2
    let v: f64 = s.parse().ok()?;
    let (mant, exp) = match s.to_ascii_lowercase().split_once('e') {
        Some((m, e)) => (m.to_string(), e.parse::<i32>().ok()?),
        None => (s.to_string(), 0),
    };
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((&mant, ""));
    let digits: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        Rat::from_integer(digits * num::pow(ten, scale as usize))
    } else {
        Rat::new(digits, num::pow(ten, (-scale) as usize))
    };
    debug_assert!((ToPrimitive::to_f64(&r).unwrap() - v).abs() <= 1e-12 * v.abs().max(1.0));
    Some(r)
}

/// Canonical `p/q` (or `p`) rendering of a reduced rational.
pub fn format_rational(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::from_ratio(n, d)
}

pub fn rat_from_f64(x: f64) -> Option<Rat> {
    Rat::from_f64(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_are_reduced() {
        let r = rat(6, -4);
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(format_rational(&r), "-3/2");
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/10"), Some(rat(3, 10)));
        assert_eq!(parse_rational("0.3"), Some(rat(3, 10)));
        assert_eq!(parse_rational("-2"), Some(rat(-2, 1)));
        assert_eq!(parse_rational("1.5e-1"), Some(rat(3, 20)));
        assert_eq!(parse_rational("1/0"), None);
    }

    #[test]
    fn snapping() {
        assert_eq!(snap_rational(7.0 / 27.0, 10_000, 1e-10), Some(rat(7, 27)));
        assert_eq!(snap_rational(-0.5, 10_000, 1e-10), Some(rat(-1, 2)));
        assert_eq!(snap_rational(5.0, 10_000, 1e-10), Some(rat(5, 1)));
        assert_eq!(snap_rational(2f64.sqrt(), 10_000, 1e-10), None);
    }

    #[test]
    fn float_negligible() {
        assert!(1e-10f64.negligible());
        assert!(!1e-8f64.negligible());
        assert!(!rat(1, 1_000_000_000_000).negligible());
    }
}
