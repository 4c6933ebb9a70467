//! Exact rational scalars.
//!
//! Every finite binary float converts exactly (a float is a dyadic
//! rational), so the cone and multiplier algebra downstream of the
//! differentiation layer carries no rounding at all.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational scalar.
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse `{text}` as a rational number: {reason}")]
pub struct ParseRatError {
    pub text: String,
    pub reason: String,
}

/// Rational from an integer.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Rational `num / den`. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Exact conversion of a finite float; `None` for NaN or infinities.
pub fn rat_from_f64(x: f64) -> Option<Rat> {
    Rat::from_float(x)
}

/// Nearest-float rendering of a rational (for display alongside the exact form).
pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Canonical string form: `p/q`, or just `p` when the denominator is one.
pub fn format_rat(r: &Rat) -> String {
    r.to_string()
}

/// Parse `p/q`, an integer, or a decimal literal such as `-2.5` or `1.25e-3`.
///
/// Decimal literals convert exactly as written (`0.1` becomes `1/10`, not the
/// nearest binary float).
pub fn parse_rat(text: &str) -> Result<Rat, ParseRatError> {
    let s = text.trim();
    let err = |reason: &str| ParseRatError {
        text: s.to_string(),
        reason: reason.to_string(),
    };
    if s.is_empty() {
        return Err(err("empty string"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| err("numerator is not an integer"))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| err("denominator is not an integer"))?;
        if d.is_zero() {
            return Err(err("denominator is zero"));
        }
        return Ok(Rat::new(n, d));
    }
    parse_decimal(s).ok_or_else(|| err("expected `p/q`, an integer, or a decimal literal"))
}

fn parse_decimal(s: &str) -> Option<Rat> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = s[pos + 1..].parse().ok()?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let mut value: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    value *= BigInt::from(sign);
    let scale = frac_part.len() as i64 - exponent;
    let ten = BigInt::from(10);
    let mut result = Rat::from_integer(value);
    if scale > 0 {
        result /= Rat::from_integer(ten.pow(scale as u32));
    } else if scale < 0 {
        result *= Rat::from_integer(ten.pow((-scale) as u32));
    }
    Some(result)
}

/// Max-norm of a rational vector.
pub fn max_norm(v: &[Rat]) -> Rat {
    v.iter()
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(Rat::zero)
}
