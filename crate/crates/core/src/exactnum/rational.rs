//! Helpers over arbitrary-precision rationals.
//!
//! The engine uses [`num_rational::BigRational`] directly as its rational type; it is kept
//! in canonical form (positive denominator, reduced) by every constructor and operation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::NumError;

pub type Rational = BigRational;

/// `n / d` as a canonical rational. Panics if `d == 0`; use [`checked_div`] for fallible input.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn checked_div(a: &Rational, b: &Rational) -> Result<Rational, NumError> {
    if b.is_zero() {
        return Err(NumError::DivisionByZero);
    }
    Ok(a / b)
}

/// `floor(a / b)` for `b > 0`.
pub fn floor_div(a: &Rational, b: &Rational) -> Result<BigInt, NumError> {
    if b.is_zero() {
        return Err(NumError::DivisionByZero);
    }
    if b.is_negative() {
        return Err(NumError::Domain("floor_div requires a positive divisor".into()));
    }
    let q = a / b;
    Ok(q.numer().div_floor(q.denom()))
}

/// Parses `"p"`, `"p/q"` or a finite decimal such as `"-1.25"`.
pub fn parse_rational(s: &str) -> Result<Rational, NumError> {
    let t = s.trim();
    if t.is_empty() {
        return Err(NumError::Parse(format!("empty rational in {s:?}")));
    }
    let bad = || NumError::Parse(format!("malformed rational {s:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(NumError::DivisionByZero);
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        let neg = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rational::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal rendering rounded to nearest at `places` digits. Display only.
pub fn to_decimal(r: &Rational, places: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), places);
    let scaled = r * Rational::from_integer(scale.clone());
    let neg = scaled.is_negative();
    let abs = scaled.abs();
    // round half away from zero
    let twice = &abs * int(2);
    let rounded = (twice.numer() + twice.denom()).div_floor(&(twice.denom() * BigInt::from(2)));
    let (ip, fp) = rounded.div_rem(&scale);
    let sign = if neg && !rounded.is_zero() { "-" } else { "" };
    if places == 0 {
        format!("{sign}{ip}")
    } else {
        format!("{sign}{ip}.{:0>width$}", fp.to_string(), width = places)
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational conversion of a finite `f64`.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn pow(r: &Rational, e: u32) -> Rational {
    num_traits::pow(r.clone(), e as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_after_ops() {
        let a = rat(6, -8);
        assert_eq!(a.numer(), &BigInt::from(-3));
        assert_eq!(a.denom(), &BigInt::from(4));
        let s = &a + rat(3, 4);
        assert!(s.is_zero());
        assert!(s.denom().is_one());
    }

    #[test]
    fn certificate_scale_times_dual_sum() {
        let x = parse_rational("4410/338989303").unwrap();
        assert_eq!(x * int(129199), rat(569767590, 338989303));
    }

    #[test]
    fn floor_div_row_capacity() {
        assert_eq!(floor_div(&int(419), &int(20)).unwrap(), BigInt::from(20));
        assert_eq!(floor_div(&rat(-1, 2), &int(1)).unwrap(), BigInt::from(-1));
        assert!(matches!(floor_div(&int(1), &int(0)), Err(NumError::DivisionByZero)));
    }

    #[test]
    fn additive_identity() {
        let a = rat(7, 9);
        assert_eq!(&a + Rational::zero(), a);
    }

    #[test]
    fn division_by_zero_rejected() {
        assert!(checked_div(&int(1), &int(0)).is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational(" -3/6 ").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("1.25").unwrap(), rat(5, 4));
        assert_eq!(parse_rational("-0.5").unwrap(), rat(-1, 2));
        assert_eq!(format_rational(&rat(10, 5)), "2");
        assert_eq!(format_rational(&rat(-1, 3)), "-1/3");
        assert!(parse_rational("1/x").is_err());
    }

    #[test]
    fn decimal_rendering_rounds_to_nearest() {
        assert_eq!(to_decimal(&rat(569767590, 338989303), 7), "1.6807834");
        assert_eq!(to_decimal(&rat(768, 413), 4), "1.8596");
        assert_eq!(to_decimal(&rat(-1, 3), 2), "-0.33");
        assert_eq!(to_decimal(&rat(5, 2), 0), "3");
    }
}
