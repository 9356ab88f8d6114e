//! Exact rational arithmetic and deterministic decimal rendering.
//!
//! Every quantity in this crate (weights, centroids, distortion errors) is a
//! rational whose denominator divides a power of 2 times a power of 3, so
//! arbitrary-precision rationals represent all of them exactly. Arithmetic is
//! delegated to [`num`]; this module adds the text formats used everywhere
//! else: `"p/q"` strings and decimal approximations to 12 significant digits.

use num::bigint::BigInt;
use num::{One, Signed, Zero};
use std::str::FromStr;

use crate::error::{Error, Result};

pub type Rational = num::BigRational;

/// Significant digits used by [`decimal_approx`].
pub const DECIMAL_DIGITS: u32 = 12;

/// Shorthand for small constants: `ratio(5, 648)` is 5/648.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn from_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// 2^-exp as an exact rational.
pub fn pow2_inv(exp: u64) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(2u32).pow(exp_u32(exp)))
}

/// 3^-exp as an exact rational.
pub fn pow3_inv(exp: u64) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(3u32).pow(exp_u32(exp)))
}

/// 18^-exp as an exact rational.
pub fn pow18_inv(exp: u64) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(18u32).pow(exp_u32(exp)))
}

fn exp_u32(exp: u64) -> u32 {
    u32::try_from(exp).expect("exponent exceeds u32; letter sums this large are unsupported")
}

/// Canonical `"p/q"` rendering; the denominator is always present so the
/// format round-trips through [`parse_rational`] unambiguously.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"p/q"` or a bare integer `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let err = || Error::ParseRational {
        input: s.to_string(),
    };
    let s = s.trim();
    let (numer, denom) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let numer = BigInt::from_str(numer).map_err(|_| err())?;
    let denom = match denom {
        Some(d) => BigInt::from_str(d).map_err(|_| err())?,
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(numer, denom))
}

pub fn to_f64(r: &Rational) -> f64 {
    num::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

/// Decimal approximation to [`DECIMAL_DIGITS`] significant digits with
/// round-half-even, rendered in fixed notation for moderate magnitudes and
/// scientific notation otherwise. The output is a pure function of the value,
/// independent of platform or locale.
pub fn decimal_approx(r: &Rational) -> String {
    decimal_approx_digits(r, DECIMAL_DIGITS)
}

pub fn decimal_approx_digits(r: &Rational, digits: u32) -> String {
    assert!(digits >= 1);
    if r.is_zero() {
        return format!("0.{}", "0".repeat(digits as usize - 1));
    }
    let neg = r.is_negative();
    let abs = r.abs();
    let (mantissa, exponent) = round_significant(&abs, digits);
    let mantissa = mantissa.to_string();
    debug_assert_eq!(mantissa.len(), digits as usize);

    // Fixed notation while the decimal point stays within a readable span.
    let body = if exponent >= -5 && exponent < digits as i64 + 6 {
        if exponent >= digits as i64 - 1 {
            // Integer with trailing zeros.
            let zeros = (exponent - (digits as i64 - 1)) as usize;
            format!("{}{}", mantissa, "0".repeat(zeros))
        } else if exponent >= 0 {
            let point = exponent as usize + 1;
            format!("{}.{}", &mantissa[..point], &mantissa[point..])
        } else {
            let zeros = (-exponent - 1) as usize;
            format!("0.{}{}", "0".repeat(zeros), mantissa)
        }
    } else {
        let head = &mantissa[..1];
        let tail = &mantissa[1..];
        format!("{head}.{tail}e{exponent}")
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// Rounds `r > 0` to `digits` significant digits, returning the mantissa as an
/// integer with exactly `digits` decimal digits plus the power-of-ten exponent
/// of the leading digit.
fn round_significant(r: &Rational, digits: u32) -> (BigInt, i64) {
    let ten = BigInt::from(10u32);
    // Decimal exponent e with 10^e <= r < 10^{e+1}, found from digit counts
    // and corrected by at most one step in each direction.
    let mut e = digit_count(r.numer()) - digit_count(r.denom());
    while pow10_le(r, e + 1) {
        e += 1;
    }
    while !pow10_le(r, e) {
        e -= 1;
    }

    // mantissa = round_half_even(r * 10^{digits-1-e})
    let shift = digits as i64 - 1 - e;
    let (mut scaled_numer, scaled_denom) = if shift >= 0 {
        (r.numer() * ten.pow(shift as u32), r.denom().clone())
    } else {
        (r.numer().clone(), r.denom() * ten.pow((-shift) as u32))
    };
    let quotient = &scaled_numer / &scaled_denom;
    scaled_numer -= &quotient * &scaled_denom;
    let twice_rem: BigInt = scaled_numer * 2;
    let mut mantissa = quotient;
    match twice_rem.cmp(&scaled_denom) {
        std::cmp::Ordering::Greater => mantissa += 1,
        std::cmp::Ordering::Equal => {
            if num::Integer::is_odd(&mantissa) {
                mantissa += 1;
            }
        }
        std::cmp::Ordering::Less => {}
    }
    // Rounding may carry into an extra digit (e.g. 9.99… -> 10.0…).
    if mantissa == ten.pow(digits) {
        mantissa /= 10;
        e += 1;
    }
    (mantissa, e)
}

fn digit_count(n: &BigInt) -> i64 {
    n.magnitude().to_string().len() as i64
}

/// True iff 10^e <= r, exactly.
fn pow10_le(r: &Rational, e: i64) -> bool {
    let ten = BigInt::from(10u32);
    if e >= 0 {
        r.numer() >= &(r.denom() * ten.pow(e as u32))
    } else {
        &(r.numer() * ten.pow((-e) as u32)) >= r.denom()
    }
}

/// Sign-aware `10^e <= r < 10^{e+1}` helper used by tests.
#[cfg(test)]
fn leading_exponent(r: &Rational) -> i64 {
    round_significant(&r.abs(), 1).1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_and_parses_back() {
        let v = ratio(5, 648);
        assert_eq!(format_rational(&v), "5/648");
        assert_eq!(parse_rational("5/648").unwrap(), v);
        assert_eq!(parse_rational("7").unwrap(), from_int(7));
        assert_eq!(parse_rational(" -3/9 ").unwrap(), ratio(-1, 3));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn decimal_rendering_golden_values() {
        assert_eq!(decimal_approx(&ratio(5, 648)), "0.00771604938272");
        assert_eq!(decimal_approx(&ratio(1, 2)), "0.500000000000");
        assert_eq!(decimal_approx(&ratio(1, 8)), "0.125000000000");
        assert_eq!(decimal_approx(&ratio(1, 3)), "0.333333333333");
        assert_eq!(decimal_approx(&ratio(2, 3)), "0.666666666667");
        assert_eq!(decimal_approx(&ratio(17, 18)), "0.944444444444");
        assert_eq!(decimal_approx(&from_int(1)), "1.00000000000");
        assert_eq!(decimal_approx(&from_int(0)), "0.00000000000");
        assert_eq!(decimal_approx(&ratio(-1, 72)), "-0.0138888888889");
    }

    #[test]
    fn decimal_rendering_extreme_magnitudes() {
        // 18^-13 is far below the fixed-notation window.
        let tiny = pow18_inv(13);
        assert_eq!(decimal_approx(&tiny), "4.80239008446e-17");
        let huge = Rational::from_integer(BigInt::from(10u32).pow(30));
        assert_eq!(decimal_approx(&huge), "1.00000000000e30");
    }

    #[test]
    fn round_half_even_at_the_last_digit() {
        let base = BigInt::from(10u32).pow(13);
        // ...0125 -> tie, previous digit even, stays.
        let r = Rational::new(BigInt::from(1234567890125i64), base.clone());
        assert_eq!(decimal_approx(&r), "0.123456789012");
        // ...0135 -> tie, previous digit odd, bumps up.
        let r = Rational::new(BigInt::from(1234567890135i64), base);
        assert_eq!(decimal_approx(&r), "0.123456789014");
    }

    #[test]
    fn leading_exponent_brackets_value() {
        for (num, den, e) in [(1i64, 2i64, -1i64), (5, 648, -3), (1, 1, 0), (42, 1, 1)] {
            assert_eq!(leading_exponent(&ratio(num, den)), e);
        }
        // Rounding 99 to one digit carries into the next decade.
        assert_eq!(leading_exponent(&from_int(99)), 2);
    }

    #[test]
    fn power_helpers() {
        assert_eq!(pow2_inv(3), ratio(1, 8));
        assert_eq!(pow3_inv(2), ratio(1, 9));
        assert_eq!(pow18_inv(2), ratio(1, 324));
        assert_eq!(pow2_inv(0), from_int(1));
    }
}
