//! Arbitrary-precision rationals and the few helpers the rest of the crate
//! needs on top of `num-rational`: parsing, exact decimal rendering and the
//! simplest rational inside an interval.

use alloc::string::{String, ToString};
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

/// `n / d` as a reduced rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {0:?} as a rational (expected \"p/q\", an integer, or a decimal)")]
pub struct ParseRationalError(pub String);

/// Parses `"p/q"`, `"-7"`, `"0.125"` or `"1.5e-3"` exactly.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim();
    let err = || ParseRationalError(text.to_string());
    if s.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = s[i + 1..].parse().map_err(|_| err())?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let mut all = String::with_capacity(whole.len() + frac.len());
    all.push_str(whole);
    all.push_str(frac);
    let n: BigInt = all.parse().map_err(|_| err())?;
    let mut value = Rational::new(n, pow10(frac.len() as u32));
    match exponent.cmp(&0) {
        Ordering::Greater => value *= Rational::from_integer(pow10(exponent as u32)),
        Ordering::Less => value /= Rational::from_integer(pow10(exponent.unsigned_abs())),
        Ordering::Equal => {}
    }
    Ok(if negative { -value } else { value })
}

fn pow10(e: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), e as usize)
}

/// Decimal rendering rounded half-away-from-zero to `sig` significant digits,
/// with trailing zeros trimmed. Exact inputs with short expansions print
/// exactly (`5/2` → `2.5`).
pub fn to_decimal(value: &Rational, sig: usize) -> String {
    assert!(sig > 0);
    if value.is_zero() {
        return "0".to_string();
    }
    let negative = value.is_negative();
    let abs = value.abs();
    // exponent e with 10^e <= abs < 10^(e+1)
    let mut e: i64 = (abs.numer().bits() as i64 - abs.denom().bits() as i64) * 3 / 10;
    loop {
        let lo = pow10_rational(e);
        if abs < lo {
            e -= 1;
            continue;
        }
        if abs >= pow10_rational(e + 1) {
            e += 1;
            continue;
        }
        break;
    }
    let shift = sig as i64 - 1 - e;
    let scaled = abs * pow10_rational(shift);
    let mut digits = round_half_up(&scaled);
    let mut point = e + 1; // digits before the decimal point
    if digits == pow10(sig as u32) {
        digits = pow10(sig as u32 - 1);
        point += 1;
    }
    let mut text = digits.to_string();
    // text has exactly `sig` digits
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if point <= 0 {
        out.push_str("0.");
        for _ in 0..(-point) {
            out.push('0');
        }
        out.push_str(&text);
    } else if point as usize >= text.len() {
        out.push_str(&text);
        for _ in 0..(point as usize - text.len()) {
            out.push('0');
        }
        return out;
    } else {
        let frac = text.split_off(point as usize);
        out.push_str(&text);
        out.push('.');
        out.push_str(&frac);
    }
    while out.ends_with('0') {
        out.pop();
    }
    if out.ends_with('.') {
        out.pop();
    }
    out
}

fn pow10_rational(e: i64) -> Rational {
    if e >= 0 {
        Rational::from_integer(pow10(e as u32))
    } else {
        Rational::new(BigInt::one(), pow10((-e) as u32))
    }
}

fn round_half_up(x: &Rational) -> BigInt {
    let (q, r) = x.numer().div_rem(x.denom());
    if r.clone() * 2 >= *x.denom() {
        q + 1
    } else {
        q
    }
}

/// The rational with the smallest denominator in the closed interval
/// `[lo, hi]` (ties towards zero). Requires `lo <= hi`.
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    debug_assert!(lo <= hi);
    if hi.is_negative() {
        return -simplest_nonneg(&-hi.clone(), &-lo.clone());
    }
    if !lo.is_positive() {
        return Rational::zero();
    }
    simplest_nonneg(lo, hi)
}

fn simplest_nonneg(lo: &Rational, hi: &Rational) -> Rational {
    let floor = lo.floor();
    if &floor == lo {
        return floor;
    }
    let next = floor.clone() + Rational::one();
    if &next <= hi {
        return next;
    }
    // lo and hi share the integer part; recurse on the reciprocals of the fractional parts
    let inner = simplest_nonneg(&(hi.clone() - &floor).recip(), &(lo.clone() - &floor).recip());
    floor + inner.recip()
}

pub fn midpoint(a: &Rational, b: &Rational) -> Rational {
    (a + b) / int(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-7").unwrap(), int(-7));
        assert_eq!(parse_rational("0.125").unwrap(), rat(1, 8));
        assert_eq!(parse_rational("-.5").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("1.5e-3").unwrap(), rat(3, 2000));
        assert_eq!(parse_rational("2E2").unwrap(), int(200));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal(&rat(5, 2), 15), "2.5");
        assert_eq!(to_decimal(&int(3), 15), "3");
        assert_eq!(to_decimal(&int(0), 15), "0");
        assert_eq!(to_decimal(&rat(8, 3), 15), "2.66666666666667");
        assert_eq!(to_decimal(&rat(-1, 3), 4), "-0.3333");
        assert_eq!(to_decimal(&rat(1, 1000), 3), "0.001");
        assert_eq!(to_decimal(&rat(9999, 10), 3), "1000");
        assert_eq!(to_decimal(&int(12345), 2), "12000");
    }

    #[test]
    fn simplest_rational() {
        assert_eq!(simplest_between(&rat(1, 3), &rat(1, 2)), rat(1, 2));
        assert_eq!(simplest_between(&rat(3, 10), &rat(34, 100)), rat(1, 3));
        assert_eq!(simplest_between(&rat(-1, 2), &rat(1, 2)), int(0));
        assert_eq!(simplest_between(&rat(-34, 100), &rat(-3, 10)), rat(-1, 3));
        assert_eq!(simplest_between(&rat(7, 5), &rat(7, 5)), rat(7, 5));
    }
}
