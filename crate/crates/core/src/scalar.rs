//! Numeric scalars shared by the exact (rational) and floating-point code paths.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};

/// Exact rational numbers used for tree geometry and rank-one coordinates.
pub type Rational = Ratio<i64>;

/// The arithmetic a metric-tree or rank-one computation needs.
///
/// Implemented for `f64` and [`Rational`], so the same tree and
/// Coxeter-complex code can run either exactly or in floating point.
pub trait Scalar:
    Copy
    + Debug
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn from_i64(v: i64) -> Self;
    fn to_f64(self) -> f64;
    fn floor(self) -> Self;
    fn ceil(self) -> Self;
    /// Whether the value is an integer. Floating-point values within
    /// [`SNAP`] of an integer count as integers.
    fn is_integer(self) -> bool;
    /// Exact equality for rationals, `|a - b| <= SNAP * scale` for floats.
    fn near(self, other: Self) -> bool;
    /// The exact value, when the scalar is exact.
    fn as_rational(self) -> Option<Rational>;

    fn one() -> Self {
        Self::from_i64(1)
    }

    fn half(self) -> Self {
        self / Self::from_i64(2)
    }

    fn abs(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn is_zero_ish(self) -> bool {
        self.near(Self::zero())
    }

    /// Floor that treats floats within [`SNAP`] of the next integer as that integer.
    fn snapped_floor(self) -> Self {
        let f = self.floor();
        if (f + Self::one()).near(self) {
            f + Self::one()
        } else {
            f
        }
    }
}

/// Absolute tolerance used to snap floating-point positions onto vertices and walls.
pub const SNAP: f64 = 1e-12;

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn to_f64(self) -> f64 {
        self
    }

    fn floor(self) -> Self {
        f64::floor(self)
    }

    fn ceil(self) -> Self {
        f64::ceil(self)
    }

    fn is_integer(self) -> bool {
        (self - self.round()).abs() <= SNAP * self.abs().max(1.0)
    }

    fn near(self, other: Self) -> bool {
        (self - other).abs() <= SNAP * self.abs().max(other.abs()).max(1.0)
    }

    fn as_rational(self) -> Option<Rational> {
        None
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }

    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(v)
    }

    fn to_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    fn floor(self) -> Self {
        Ratio::floor(&self)
    }

    fn ceil(self) -> Self {
        Ratio::ceil(&self)
    }

    fn is_integer(self) -> bool {
        Ratio::is_integer(&self)
    }

    fn near(self, other: Self) -> bool {
        self == other
    }

    fn as_rational(self) -> Option<Rational> {
        Some(self)
    }

    fn abs(self) -> Self {
        Signed::abs(&self)
    }
}

/// Parses `"3"`, `"-3/4"` or a finite decimal such as `"0.25"` into a rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num: i64 = num.trim().parse().ok()?;
        let den: i64 = den.trim().parse().ok()?;
        if den == 0 {
            return None;
        }
        return Some(Ratio::new(num, den));
    }
    if let Ok(v) = text.parse::<i64>() {
        return Some(Ratio::from_integer(v));
    }
    let (int_part, frac_part) = text.split_once('.')?;
    let negative = int_part.starts_with('-');
    let int_digits = int_part.trim_start_matches(['-', '+']);
    if frac_part.len() > 15 || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let den = 10i64.checked_pow(frac_part.len() as u32)?;
    let whole: i64 = if int_digits.is_empty() { 0 } else { int_digits.parse().ok()? };
    let frac: i64 = if frac_part.is_empty() { 0 } else { frac_part.parse().ok()? };
    let num = whole.checked_mul(den)?.checked_add(frac)?;
    Some(Ratio::new(if negative { -num } else { num }, den))
}

/// Converts a float to the exact dyadic rational it represents, if that fits in `i64`.
pub fn rational_from_f64(v: f64) -> Option<Rational> {
    if !v.is_finite() {
        return None;
    }
    let mut den: i64 = 1;
    let mut x = v;
    for _ in 0..40 {
        if x.fract() == 0.0 && x.abs() < 9.0e15 {
            return Some(Ratio::new(x as i64, den));
        }
        x *= 2.0;
        den = den.checked_mul(2)?;
    }
    None
}

/// Formats a rational as `"p/q"` (or `"p"` for integers).
pub fn format_rational(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Serde adapter storing rationals as strings or plain numbers.
pub mod rational_serde {
    use super::{format_rational, parse_rational, rational_from_f64, Rational};
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match &v {
            serde_json::Value::String(s) => {
                parse_rational(s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}")))
            }
            serde_json::Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Rational::from_integer(i))
                } else {
                    let f = n.as_f64().unwrap_or(f64::NAN);
                    parse_rational(&n.to_string())
                        .or_else(|| rational_from_f64(f))
                        .ok_or_else(|| D::Error::custom(format!("bad rational {n}")))
                }
            }
            other => Err(D::Error::custom(format!("expected rational, got {other}"))),
        }
    }
}
