//! Coefficient types.
//!
//! Two backends implement [`Coeff`]: exact rationals ([`Rational`]) for every
//! identity check and `f64` for trajectory work. Generic code is written once
//! against the trait, so the two modes can never meet inside one computation.
//! The dynamically tagged [`Scalar`] exists for configuration input, where
//! the mode is only known at run time and mixing has to be reported.

use std::fmt;
use std::ops::Neg;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::PolyError;

/// Arbitrary precision rational, the exact backend.
pub type Rational = BigRational;

/// Which arithmetic backend a value belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarMode {
    Exact,
    Float,
}

impl fmt::Display for ScalarMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarMode::Exact => f.write_str("exact"),
            ScalarMode::Float => f.write_str("float"),
        }
    }
}

impl FromStr for ScalarMode {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(ScalarMode::Exact),
            "float" => Ok(ScalarMode::Float),
            other => Err(PolyError::Parse(format!("unknown scalar mode `{other}`"))),
        }
    }
}

/// Field of polynomial coefficients.
pub trait Coeff:
    Num + Neg<Output = Self> + Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    const MODE: ScalarMode;

    fn from_i64(v: i64) -> Self;

    /// `num / den`; `den` must be nonzero.
    fn from_ratio(num: i64, den: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Parse `"p/q"`, an integer, or a decimal literal (with optional exponent).
    fn parse_coeff(s: &str) -> Result<Self, PolyError>;

    /// Text form used in the exchange format; parses back to the same value.
    fn to_exchange_string(&self) -> String;

    fn abs_f64(&self) -> f64 {
        self.to_f64().abs()
    }
}

impl Coeff for Rational {
    const MODE: ScalarMode = ScalarMode::Exact;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn parse_coeff(s: &str) -> Result<Self, PolyError> {
        parse_rational(s)
    }

    fn to_exchange_string(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

impl Coeff for f64 {
    const MODE: ScalarMode = ScalarMode::Float;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn parse_coeff(s: &str) -> Result<Self, PolyError> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: f64 = n.trim().parse().map_err(|_| bad_literal(s))?;
            let d: f64 = d.trim().parse().map_err(|_| bad_literal(s))?;
            if d == 0.0 {
                return Err(PolyError::Parse(format!("zero denominator in `{s}`")));
            }
            Ok(n / d)
        } else {
            s.parse().map_err(|_| bad_literal(s))
        }
    }

    fn to_exchange_string(&self) -> String {
        // `{:?}` is the shortest representation that round-trips.
        format!("{self:?}")
    }
}

fn bad_literal(s: &str) -> PolyError {
    PolyError::Parse(format!("invalid scalar literal `{s}`"))
}

fn parse_rational(s: &str) -> Result<Rational, PolyError> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return Err(PolyError::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(n / d);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..].parse().map_err(|_| bad_literal(s))?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad_literal(s));
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad_literal(s));
    }
    let joined = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str_radix(if joined.is_empty() { "0" } else { &joined }, 10)
        .map_err(|_| bad_literal(s))?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

/// Run-time tagged scalar, as read from configuration files.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(Rational),
    Float(f64),
}

impl Scalar {
    pub fn parse(mode: ScalarMode, s: &str) -> Result<Self, PolyError> {
        Ok(match mode {
            ScalarMode::Exact => Scalar::Exact(Rational::parse_coeff(s)?),
            ScalarMode::Float => Scalar::Float(f64::parse_coeff(s)?),
        })
    }

    pub fn mode(&self) -> ScalarMode {
        match self {
            Scalar::Exact(_) => ScalarMode::Exact,
            Scalar::Float(_) => ScalarMode::Float,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => Coeff::to_f64(r),
            Scalar::Float(v) => *v,
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar, PolyError> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(a + b)),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(a + b)),
            _ => Err(PolyError::ModeMismatch),
        }
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar, PolyError> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(a * b)),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(a * b)),
            _ => Err(PolyError::ModeMismatch),
        }
    }

    /// Extract the value as backend `C`, failing if the modes differ.
    pub fn into_coeff<C: Coeff>(self) -> Result<C, PolyError> {
        let text = match (&self, C::MODE) {
            (Scalar::Exact(r), ScalarMode::Exact) => r.to_exchange_string(),
            (Scalar::Float(v), ScalarMode::Float) => v.to_exchange_string(),
            _ => return Err(PolyError::ModeMismatch),
        };
        C::parse_coeff(&text)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => f.write_str(&r.to_exchange_string()),
            Scalar::Float(v) => f.write_str(&v.to_exchange_string()),
        }
    }
}

/// Exact square root of a perfect-square rational, if there is one.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}
