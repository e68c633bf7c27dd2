//! Rational coefficients.
//!
//! Every coefficient in the crate is an arbitrary-precision rational kept in
//! lowest terms with a positive denominator; `num_rational::BigRational`
//! guarantees both on construction, so the alias is used directly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Scalar = BigRational;

pub fn scalar(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Scalar {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Canonical text form: `p` for integers, `p/q` otherwise, lowest terms,
/// sign on the numerator. Used by printers and JSON reports.
pub fn format_scalar(s: &Scalar) -> String {
    if s.denom().is_one() {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

/// Parses `p` or `p/q` with an optional leading sign. Returns `None` on
/// malformed input or a zero denominator.
pub fn parse_scalar(text: &str) -> Option<Scalar> {
    let text = text.trim();
    match text.split_once('/') {
        None => {
            let n: BigInt = text.parse().ok()?;
            Some(BigRational::from_integer(n))
        }
        Some((num, den)) => {
            let n: BigInt = num.trim().parse().ok()?;
            let d: BigInt = den.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(BigRational::new(n, d))
            }
        }
    }
}

/// `(-1)^k` as a scalar.
pub fn sign_pow(k: usize) -> Scalar {
    if k % 2 == 0 {
        Scalar::one()
    } else {
        -Scalar::one()
    }
}

/// Formats a coefficient for use inside a polynomial printout, eliding
/// unit coefficients: `(true, "…")` means the magnitude should be printed
/// joined with `*` to the monomial, `(false, _)` means it is ±1.
pub fn coefficient_display(s: &Scalar) -> (bool, String) {
    let a = s.abs();
    if a.is_one() {
        (false, String::new())
    } else {
        (true, format_scalar(&a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_formatting() {
        assert_eq!(format_scalar(&ratio(-3, 2)), "-3/2");
        assert_eq!(format_scalar(&ratio(4, 2)), "2");
        assert_eq!(format_scalar(&ratio(3, -6)), "-1/2");
        assert_eq!(format_scalar(&scalar(0)), "0");
    }

    #[test]
    fn parse_roundtrip() {
        for text in ["0", "7", "-3/2", "22/7"] {
            let s = parse_scalar(text).unwrap();
            assert_eq!(format_scalar(&s), text);
        }
        assert!(parse_scalar("1/0").is_none());
        assert!(parse_scalar("a/b").is_none());
    }
}
