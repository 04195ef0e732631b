//! Exact rational helpers shared by the parameter and determinant paths.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Exact binary expansion of a finite double.
pub fn from_f64(field: &'static str, x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| Error::InvalidParameter {
        field,
        reason: format!("{x} is not finite"),
    })
}

/// Parses `"8/5"`, `"-3"`, `"0.25"` or `"1.5e-3"` into an exact rational.
///
/// Decimal strings are read digit by digit, so `"0.3"` becomes `3/10` and not
/// the nearest double.
pub fn parse_rational(input: &str) -> Result<Rational> {
    let s = input.trim();
    let err = |reason: &str| Error::RationalParse {
        input: input.to_string(),
        reason: reason.to_string(),
    };
    if s.is_empty() {
        return Err(err("empty string"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| err("bad numerator"))?;
        let den: BigInt = den.trim().parse().map_err(|_| err("bad denominator"))?;
        if den.is_zero() {
            return Err(err("zero denominator"));
        }
        return Ok(Rational::new(num, den));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..].parse().map_err(|_| err("bad exponent"))?;
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
        return Err(err("no digits"));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err("unexpected character"));
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(all_digits.parse::<BigInt>().map_err(|_| err("bad digits"))?);
    let scale = exponent - frac_part.len() as i32;
    let ten = int(10);
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    if negative {
        value = -value;
    }
    Ok(value)
}

/// How a user-supplied value was turned into the exact number used downstream.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Rationalization {
    pub field: String,
    pub input: String,
    pub exact: String,
    /// `true` when the input was already an exact rational or finite decimal.
    pub lossless: bool,
}

impl Rationalization {
    pub fn new(field: impl Into<String>, input: impl Into<String>, exact: &Rational, lossless: bool) -> Self {
        Self {
            field: field.into(),
            input: input.into(),
            exact: exact.to_string(),
            lossless,
        }
    }
}

/// Serde adapter writing rationals as their exact `p/q` string.
pub mod as_string {
    use super::Rational;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("8/5").unwrap(), frac(8, 5));
        assert_eq!(parse_rational("-3/10").unwrap(), frac(-3, 10));
        assert_eq!(parse_rational("0.3").unwrap(), frac(3, 10));
        assert_eq!(parse_rational("2").unwrap(), int(2));
        assert_eq!(parse_rational("-.5").unwrap(), frac(-1, 2));
        assert_eq!(parse_rational("1.5e-3").unwrap(), frac(3, 2000));
        assert_eq!(parse_rational("25E2").unwrap(), int(2500));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "1/0", "abc", "1.2.3", "e5", "3/x"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn float_conversion_is_exact() {
        let x = from_f64("x", 0.1).unwrap();
        assert_eq!(to_f64(&x), 0.1);
        assert_ne!(x, frac(1, 10));
        assert!(from_f64("x", f64::NAN).is_err());
    }
}
