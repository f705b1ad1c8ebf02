use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Parse a decimal literal such as `-0.000124`, `19.62`, `1e-5` or `7` into
/// an exact rational.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let err = || Error::Parse(format!("not a decimal number: {s:?}"));
    let t = s.trim();
    let (body, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i64>().map_err(|_| err())?),
        None => (t, 0),
    };
    let (neg, body) = match body.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, body.strip_prefix('+').unwrap_or(body)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((a, b)) => (a, b),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let mantissa: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| err())?
    };
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let mut q = BigRational::from_integer(mantissa);
    if scale >= 0 {
        q *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        q /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    if neg {
        q = -q;
    }
    Ok(q)
}

/// `[x - tol, x + tol]` for decimal strings `x` and `tol`.
pub fn decimal_interval(x: &str, tol: &str) -> Result<(BigRational, BigRational)> {
    let v = parse_decimal(x)?;
    let t = parse_decimal(tol)?;
    Ok((&v - &t, &v + &t))
}

/// `true` when `x` is exactly one.
pub fn is_one(x: &BigRational) -> bool {
    x.is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::real::ratio;

    #[test]
    fn parses_common_forms() {
        assert_eq!(parse_decimal("-0.000124").unwrap(), ratio(-124, 1_000_000));
        assert_eq!(parse_decimal("19.62").unwrap(), ratio(1962, 100));
        assert_eq!(parse_decimal("1e-5").unwrap(), ratio(1, 100_000));
        assert_eq!(parse_decimal("+7").unwrap(), ratio(7, 1));
        assert_eq!(parse_decimal(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_decimal("2.5E2").unwrap(), ratio(250, 1));
        for bad in ["", "-", "1.2.3", "abc", "1e", "0x10"] {
            assert!(parse_decimal(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn intervals() {
        let (lo, hi) = decimal_interval("0.001888", "5e-7").unwrap();
        assert_eq!(lo, ratio(18875, 10_000_000));
        assert_eq!(hi, ratio(18885, 10_000_000));
        assert!(is_one(&ratio(3, 3)));
    }
}
