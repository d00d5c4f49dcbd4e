//! Exact rational arithmetic and parsing.
//!
//! Every quantity in this crate (balance, capacity, flow value) is a
//! [`Rational`]: arbitrary precision, no rounding anywhere. The text
//! formats accept integers, decimals and `p/q` fractions; all three are
//! converted exactly.

use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

/// Arbitrary-precision rational number.
pub type Rational = num_rational::BigRational;

/// Shorthand for an integral rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for the rational `p/q`. Panics if `q == 0`.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseRationalError {
    Empty,
    InvalidDigit,
    ZeroDenominator,
}

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseRationalError::Empty => write!(f, "empty number"),
            ParseRationalError::InvalidDigit => write!(f, "invalid digit in number"),
            ParseRationalError::ZeroDenominator => write!(f, "zero denominator"),
        }
    }
}

/// Parses a rational from one of three forms: `-12`, `3.25`, `-7/3`.
///
/// Decimals are converted exactly (`0.1` becomes `1/10`, not a float).
/// Fractions are reduced and may carry a sign on either side of the
/// slash. Anything else (exponents, stray characters, empty parts) is
/// rejected.
pub fn parse_rational(input: &str) -> Result<Rational, ParseRationalError> {
    let s = input.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    if let Some((numer, denom)) = s.split_once('/') {
        let n = parse_signed(numer)?;
        let d = parse_signed(denom)?;
        if d.is_zero() {
            return Err(ParseRationalError::ZeroDenominator);
        }
        return Ok(Rational::new(n, d));
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let value = match body.split_once('.') {
        Some((whole, frac)) => {
            let w = parse_unsigned(whole)?;
            let f = parse_unsigned(frac)?;
            let scale = num_traits::pow(BigInt::from(10), frac.len());
            Rational::new(w * &scale + f, scale)
        }
        None => Rational::from_integer(parse_unsigned(body)?),
    };
    Ok(if negative { -value } else { value })
}

fn parse_signed(s: &str) -> Result<BigInt, ParseRationalError> {
    match s.strip_prefix('-') {
        Some(rest) => Ok(-parse_unsigned(rest)?),
        None => parse_unsigned(s),
    }
}

fn parse_unsigned(s: &str) -> Result<BigInt, ParseRationalError> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseRationalError::InvalidDigit);
    }
    Ok(BigInt::from_str(s).expect("all-digit string parses"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn parses_integers() {
        assert_eq!(parse_rational("3"), Ok(rat(3)));
        assert_eq!(parse_rational("-14"), Ok(rat(-14)));
        assert_eq!(parse_rational("0"), Ok(rat(0)));
        assert_eq!(parse_rational(" 42 "), Ok(rat(42)));
    }

    #[test]
    fn parses_fractions() {
        assert_eq!(parse_rational("3/2"), Ok(ratio(3, 2)));
        assert_eq!(parse_rational("-7/3"), Ok(ratio(-7, 3)));
        assert_eq!(parse_rational("6/4"), Ok(ratio(3, 2)));
        assert_eq!(parse_rational("1/-2"), Ok(ratio(-1, 2)));
        assert_eq!(parse_rational("0/9"), Ok(rat(0)));
    }

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_rational("1.25"), Ok(ratio(5, 4)));
        assert_eq!(parse_rational("-0.5"), Ok(ratio(-1, 2)));
        assert_eq!(parse_rational("0.1"), Ok(ratio(1, 10)));
        assert_eq!(parse_rational("2.000"), Ok(rat(2)));
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in [
            "", "  ", "abc", "1.2.3", "1/", "/2", "1/0", ".5", "1.", "- 1", "+1", "1e3", "3 /2",
        ] {
            assert!(parse_rational(bad).is_err(), "accepted {:?}", bad);
        }
    }

    #[test]
    fn display_uses_slash_form() {
        assert_eq!(ratio(7, 3).to_string(), "7/3");
        assert_eq!(rat(5).to_string(), "5");
        assert_eq!(ratio(-6, 4).to_string(), "-3/2");
    }
}
