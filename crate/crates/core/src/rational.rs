//! Exact rational scalars and their `"p/q"` text form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub const DEFAULT_PRECISION: u32 = 50;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Serializes as `p/q` in lowest terms, always with an explicit denominator.
pub fn format(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Accepts `p/q` or a bare integer `p`.
pub fn parse(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("invalid rational `{text}`"));
    match text.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{text}`")));
            }
            Ok(Rational::new(p, q))
        }
        None => {
            let p: BigInt = text.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(p))
        }
    }
}

/// `floor(sqrt(x) * 10^digits)` for `x >= 0`.
fn scaled_sqrt_floor(x: &Rational, digits: u32) -> BigInt {
    assert!(!x.is_negative(), "square root of a negative rational");
    let scale = BigInt::from(10u32).pow(2 * digits);
    let scaled = (x.numer() * scale).div_floor(x.denom());
    scaled.sqrt()
}

/// Decimal expansion of `sqrt(x)` truncated to `digits` fractional digits.
pub fn decimal_sqrt(x: &Rational, digits: u32) -> String {
    let root = scaled_sqrt_floor(x, digits);
    render_fixed(&root, digits)
}

/// Rational lower bound `floor(sqrt(x) * 10^d) / 10^d`.
pub fn sqrt_lower(x: &Rational, digits: u32) -> Rational {
    let root = scaled_sqrt_floor(x, digits);
    Rational::new(root, BigInt::from(10u32).pow(digits))
}

/// Rational upper bound on `sqrt(x)` within `10^-digits`.
pub fn sqrt_upper(x: &Rational, digits: u32) -> Rational {
    let lower = sqrt_lower(x, digits);
    if &(&lower * &lower) == x {
        lower
    } else {
        lower + Rational::new(BigInt::one(), BigInt::from(10u32).pow(digits))
    }
}

fn render_fixed(scaled: &BigInt, digits: u32) -> String {
    let mut text = scaled.to_string();
    let digits = digits as usize;
    if digits == 0 {
        return text;
    }
    if text.len() <= digits {
        text = format!("{}{}", "0".repeat(digits + 1 - text.len()), text);
    }
    let split = text.len() - digits;
    format!("{}.{}", &text[..split], &text[split..])
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Rewrites `value` as an integer numerator over `denom`; `denom` must be a multiple of its
/// denominator.
pub fn scale_to(value: &Rational, denom: &BigInt) -> BigInt {
    value.numer() * (denom / value.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_always_has_denominator() {
        assert_eq!(format(&int(5)), "5/1");
        assert_eq!(format(&ratio(-6, 4)), "-3/2");
        assert_eq!(format(&int(0)), "0/1");
    }

    #[test]
    fn parse_accepts_both_forms() {
        assert_eq!(parse("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse("-7").unwrap(), int(-7));
        assert_eq!(parse(" 2 / 3 ").unwrap(), ratio(2, 3));
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
        assert!(parse("1.5").is_err());
    }

    #[test]
    fn decimal_sqrt_truncates() {
        assert_eq!(decimal_sqrt(&int(5), 10), "2.2360679774");
        assert_eq!(decimal_sqrt(&int(9), 3), "3.000");
        assert_eq!(decimal_sqrt(&ratio(1, 100), 4), "0.1000");
        assert_eq!(decimal_sqrt(&int(0), 2), "0.00");
        assert_eq!(decimal_sqrt(&int(2), 0), "1");
    }

    #[test]
    fn sqrt_bounds_bracket() {
        for n in 0..50 {
            let x = ratio(n, 7);
            let lo = sqrt_lower(&x, 20);
            let hi = sqrt_upper(&x, 20);
            assert!(&lo * &lo <= x);
            assert!(&hi * &hi >= x);
        }
    }

    #[test]
    fn scaling_round_trips() {
        let vals = [ratio(1, 2), ratio(2, 3), ratio(-5, 4)];
        let d = common_denominator(vals.iter());
        assert_eq!(d, BigInt::from(12));
        let scaled: Vec<BigInt> = vals.iter().map(|v| scale_to(v, &d)).collect();
        assert_eq!(scaled, vec![6.into(), 8.into(), BigInt::from(-15)]);
    }
}
