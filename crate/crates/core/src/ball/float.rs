//! Arbitrary-precision binary floating point with explicit rounding.
//!
//! A [`BigFloat`] is `mantissa * 2^exponent` with an arbitrary-size integer
//! mantissa. Values are kept canonical (odd mantissa, or the zero `0 * 2^0`)
//! so that structural equality is numeric equality. Every rounding operation
//! takes a target precision in bits and a [`Round`] direction, which is all the
//! ball layer needs to enclose results outward.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Rounding direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    /// Toward negative infinity.
    Down,
    /// Toward positive infinity.
    Up,
    /// To nearest, ties to even.
    Nearest,
}

impl Round {
    fn flip(self) -> Round {
        match self {
            Round::Down => Round::Up,
            Round::Up => Round::Down,
            Round::Nearest => Round::Nearest,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BigFloat {
    mantissa: BigInt,
    exponent: i64,
}

impl BigFloat {
    pub fn zero() -> Self {
        BigFloat {
            mantissa: BigInt::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        BigFloat::from_i64(1)
    }

    /// Exact `mantissa * 2^exponent`.
    pub fn from_parts(mantissa: BigInt, exponent: i64) -> Self {
        let mut f = BigFloat { mantissa, exponent };
        f.normalize();
        f
    }

    pub fn from_i64(v: i64) -> Self {
        BigFloat::from_parts(BigInt::from(v), 0)
    }

    pub fn from_bigint(v: BigInt) -> Self {
        BigFloat::from_parts(v, 0)
    }

    /// Exact conversion; fails for NaN and infinities.
    pub fn from_f64(v: f64) -> Result<Self> {
        if !v.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite float {v}")));
        }
        if v == 0.0 {
            return Ok(BigFloat::zero());
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Ok(BigFloat::from_parts(BigInt::from(m) * sign, e))
    }

    /// Correctly rounded conversion from an exact rational.
    pub fn from_rational(q: &BigRational, prec: u32, rnd: Round) -> Self {
        BigFloat::div_integers(q.numer(), q.denom(), prec, rnd)
    }

    /// `num / den` rounded to `prec` bits. `den` must be nonzero.
    pub fn div_integers(num: &BigInt, den: &BigInt, prec: u32, rnd: Round) -> Self {
        BigFloat::div_integers_ex(num, den, prec, rnd).0
    }

    /// [`div_integers`](Self::div_integers) plus an exactness flag.
    pub fn div_integers_ex(num: &BigInt, den: &BigInt, prec: u32, rnd: Round) -> (Self, bool) {
        assert!(!den.is_zero(), "division by zero");
        if num.is_zero() {
            return (BigFloat::zero(), true);
        }
        let negative = num.is_negative() != den.is_negative();
        let n = num.magnitude();
        let d = den.magnitude();
        let shift = (prec as i64 + 2 + d.bits() as i64 - n.bits() as i64).max(0);
        let (q, r) = (n << shift as usize).div_rem(d);
        round_magnitude(q, -shift, negative, prec, rnd, !r.is_zero())
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn signum(&self) -> i32 {
        match self.mantissa.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// Number of significant bits in the mantissa.
    pub fn precision(&self) -> u64 {
        self.mantissa.bits()
    }

    /// Exponent of the leading bit plus one, i.e. `2^(top-1) <= |x| < 2^top`.
    /// Undefined (returns `i64::MIN`) for zero.
    pub fn top(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            self.exponent + self.mantissa.bits() as i64
        }
    }

    pub fn abs(&self) -> Self {
        BigFloat {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }

    pub fn neg(&self) -> Self {
        BigFloat {
            mantissa: -&self.mantissa,
            exponent: self.exponent,
        }
    }

    /// Exact multiplication by `2^k`.
    pub fn mul_2exp(&self, k: i64) -> Self {
        if self.is_zero() {
            return BigFloat::zero();
        }
        BigFloat {
            mantissa: self.mantissa.clone(),
            exponent: self.exponent + k,
        }
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exponent >= 0 {
            BigRational::from_integer(&self.mantissa << self.exponent as usize)
        } else {
            BigRational::new(
                self.mantissa.clone(),
                BigInt::one() << (-self.exponent) as usize,
            )
        }
    }

    /// Nearest `f64` (saturating to infinity, flushing to zero at the extremes).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let r = self.round(53, Round::Nearest);
        let m = r.mantissa.to_f64().unwrap_or(f64::NAN);
        let e = r.exponent;
        if e > 2000 {
            return m.signum() * f64::INFINITY;
        }
        if e < -2200 {
            return m.signum() * 0.0;
        }
        // split the scaling so intermediate powers stay representable
        let half = e / 2;
        m * 2f64.powi(half as i32) * 2f64.powi((e - half) as i32)
    }

    /// Round to `prec` significant bits.
    pub fn round(&self, prec: u32, rnd: Round) -> Self {
        self.round_ex(prec, rnd).0
    }

    /// Like [`round`](Self::round), also reporting whether the result is exact.
    pub fn round_ex(&self, prec: u32, rnd: Round) -> (Self, bool) {
        if self.precision() <= prec as u64 {
            return (self.clone(), true);
        }
        round_magnitude(
            self.mantissa.magnitude().clone(),
            self.exponent,
            self.is_negative(),
            prec,
            rnd,
            false,
        )
    }

    pub fn add(&self, other: &Self, prec: u32, rnd: Round) -> Self {
        self.add_ex(other, prec, rnd).0
    }

    /// Rounded sum plus an exactness flag.
    pub fn add_ex(&self, other: &Self, prec: u32, rnd: Round) -> (Self, bool) {
        match self.add_exact_or_sticky(other, prec) {
            Ok((m, e)) => round_signed(m, e, prec, rnd),
            Err((v, exact)) => {
                let (r, ex) = v.round_ex(prec, rnd);
                (r, ex && exact)
            }
        }
    }

    pub fn sub(&self, other: &Self, prec: u32, rnd: Round) -> Self {
        self.add(&other.neg(), prec, rnd)
    }

    /// Exact sum (no rounding). Only for operands of comparable magnitude.
    pub fn add_exact(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exponent.min(other.exponent);
        let a = &self.mantissa << (self.exponent - e) as usize;
        let b = &other.mantissa << (other.exponent - e) as usize;
        BigFloat::from_parts(a + b, e)
    }

    pub fn sub_exact(&self, other: &Self) -> Self {
        self.add_exact(&other.neg())
    }

    pub fn mul_exact(&self, other: &Self) -> Self {
        BigFloat::from_parts(
            &self.mantissa * &other.mantissa,
            self.exponent + other.exponent,
        )
    }

    pub fn mul(&self, other: &Self, prec: u32, rnd: Round) -> Self {
        self.mul_ex(other, prec, rnd).0
    }

    pub fn mul_ex(&self, other: &Self, prec: u32, rnd: Round) -> (Self, bool) {
        self.mul_exact(other).round_ex(prec, rnd)
    }

    pub fn div(&self, other: &Self, prec: u32, rnd: Round) -> Self {
        self.div_ex(other, prec, rnd).0
    }

    pub fn div_ex(&self, other: &Self, prec: u32, rnd: Round) -> (Self, bool) {
        assert!(!other.is_zero(), "division by zero");
        if self.is_zero() {
            return (BigFloat::zero(), true);
        }
        let (q, exact) = BigFloat::div_integers_ex(&self.mantissa, &other.mantissa, prec, rnd);
        (q.mul_2exp(self.exponent - other.exponent), exact)
    }

    /// Square root of a nonnegative value.
    pub fn sqrt(&self, prec: u32, rnd: Round) -> Self {
        self.sqrt_ex(prec, rnd).0
    }

    pub fn sqrt_ex(&self, prec: u32, rnd: Round) -> (Self, bool) {
        assert!(!self.is_negative(), "square root of a negative value");
        if self.is_zero() {
            return (BigFloat::zero(), true);
        }
        // want 2*(prec+2) bits under the root and an even exponent
        let m = self.mantissa.magnitude();
        let mut shift = (2 * (prec as i64 + 2) - m.bits() as i64).max(0);
        if (self.exponent - shift) % 2 != 0 {
            shift += 1;
        }
        let scaled: BigUint = m << shift as usize;
        let root = scaled.sqrt();
        let exact = &root * &root == scaled;
        round_magnitude(root, (self.exponent - shift) / 2, false, prec, rnd, !exact)
    }

    /// `floor(x)` as an integer.
    pub fn floor(&self) -> BigInt {
        if self.exponent >= 0 {
            &self.mantissa << self.exponent as usize
        } else {
            self.mantissa
                .div_floor(&(BigInt::one() << (-self.exponent) as usize))
        }
    }

    /// Hexadecimal literal `[-]0x<hex>p<exp>`; parses back bit-exactly.
    pub fn to_hex(&self) -> String {
        let sign = if self.is_negative() { "-" } else { "" };
        format!(
            "{sign}0x{}p{}",
            self.mantissa.magnitude().to_str_radix(16),
            self.exponent
        )
    }

    /// Parse a hexadecimal float literal. Accepts an optional fractional
    /// part (`0x1.8p+3`) as well as the integer-mantissa form this type prints.
    pub fn from_hex(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid hexadecimal float {s:?}"));
        let t = s.trim();
        let (negative, t) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let t = t
            .strip_prefix("0x")
            .or_else(|| t.strip_prefix("0X"))
            .ok_or_else(bad)?;
        let (digits, exp) = match t.find(['p', 'P']) {
            Some(i) => (&t[..i], t[i + 1..].parse::<i64>().map_err(|_| bad())?),
            None => (t, 0),
        };
        let (int_part, frac_part) = match digits.find('.') {
            Some(i) => (&digits[..i], &digits[i + 1..]),
            None => (digits, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        let joined = format!("{int_part}{frac_part}");
        let mag = BigUint::parse_bytes(joined.as_bytes(), 16).ok_or_else(bad)?;
        let mut m = BigInt::from(mag);
        if negative {
            m = -m;
        }
        Ok(BigFloat::from_parts(m, exp - 4 * frac_part.len() as i64))
    }

    fn normalize(&mut self) {
        if self.mantissa.is_zero() {
            self.exponent = 0;
            return;
        }
        if let Some(tz) = self.mantissa.trailing_zeros() {
            if tz > 0 {
                self.mantissa >>= tz as usize;
                self.exponent += tz as i64;
            }
        }
    }

    /// Either the exact sum as `(mantissa, exponent)`, or, when one operand is
    /// far below the other's rounding position, `Err(v)` with a substitute
    /// value that rounds identically to the true sum at `prec` bits.
    fn add_exact_or_sticky(
        &self,
        other: &Self,
        prec: u32,
    ) -> std::result::Result<(BigInt, i64), (BigFloat, bool)> {
        if self.is_zero() {
            return Err((other.clone(), true));
        }
        if other.is_zero() {
            return Err((self.clone(), true));
        }
        let (big, small) = if self.top() >= other.top() {
            (self, other)
        } else {
            (other, self)
        };
        // position strictly below both the rounding point and every bit of `big`
        let floor = big.exponent.min(big.top() - prec as i64 - 3) - 2;
        if small.top() < floor {
            let tiny = BigFloat {
                mantissa: BigInt::from(small.signum()),
                exponent: floor,
            };
            let s = big.add_exact(&tiny);
            return Err((s, false));
        }
        let e = self.exponent.min(other.exponent);
        let a = &self.mantissa << (self.exponent - e) as usize;
        let b = &other.mantissa << (other.exponent - e) as usize;
        Ok((a + b, e))
    }
}

fn round_signed(m: BigInt, e: i64, prec: u32, rnd: Round) -> (BigFloat, bool) {
    let negative = m.is_negative();
    round_magnitude(m.magnitude().clone(), e, negative, prec, rnd, false)
}

/// Round `(-1)^negative * (mag + sticky_fraction) * 2^exp` to `prec` bits.
///
/// `sticky` means the true magnitude exceeds `mag` by a positive amount below
/// one unit of `mag`'s last place. Callers that pass `sticky` must supply at
/// least `prec + 2` bits in `mag` so nearest rounding is decidable.
fn round_magnitude(
    mag: BigUint,
    exp: i64,
    negative: bool,
    prec: u32,
    rnd: Round,
    sticky: bool,
) -> (BigFloat, bool) {
    let rnd = if negative { rnd.flip() } else { rnd };
    let bits = mag.bits();
    let prec = prec.max(2) as u64;
    let (mut kept, exp, round_bit, rest_nonzero) = if bits > prec {
        let shift = bits - prec;
        let kept = &mag >> shift as usize;
        let round_bit = mag.bit(shift - 1);
        let rest = if shift >= 2 {
            let mask = (BigUint::one() << (shift - 1) as usize) - 1u32;
            !(&mag & mask).is_zero()
        } else {
            false
        };
        (kept, exp + shift as i64, round_bit, rest || sticky)
    } else {
        if !sticky {
            let m = BigInt::from_biguint(if negative { Sign::Minus } else { Sign::Plus }, mag);
            return (BigFloat::from_parts(m, exp), true);
        }
        debug_assert!(bits >= prec || bits == 0 || prec - bits < 64);
        // sticky only: the discarded part is strictly between 0 and half an ulp
        (mag, exp, false, true)
    };
    let inexact = round_bit || rest_nonzero;
    let bump = match rnd {
        Round::Down => false,
        Round::Up => inexact,
        Round::Nearest => round_bit && (rest_nonzero || kept.bit(0)),
    };
    if bump {
        kept += 1u32;
    }
    let m = BigInt::from_biguint(if negative { Sign::Minus } else { Sign::Plus }, kept);
    (BigFloat::from_parts(m, exp), !inexact)
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BigFloat {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        // same sign: compare magnitudes by leading bit first
        let mag = if self.top() != other.top() {
            self.top().cmp(&other.top())
        } else {
            let e = self.exponent.min(other.exponent);
            let a = self.mantissa.magnitude() << (self.exponent - e) as usize;
            let b = other.mantissa.magnitude() << (other.exponent - e) as usize;
            a.cmp(&b)
        };
        if sa > 0 {
            mag
        } else {
            mag.reverse()
        }
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({:e})", self.to_hex(), self.to_f64())
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&to_decimal(self, 20))
    }
}

/// Decimal scientific rendering with `digits` significant digits
/// (nearest-rounded, for display only).
pub fn to_decimal(x: &BigFloat, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let q = x.to_rational().abs();
    // estimate decimal exponent from the binary one, then correct
    let mut e10 = ((x.top() - 1) as f64 * std::f64::consts::LOG10_2).floor() as i64;
    let ten = BigRational::from_integer(BigInt::from(10));
    let pow10 = |k: i64| -> BigRational {
        if k >= 0 {
            num_traits::pow(ten.clone(), k as usize)
        } else {
            num_traits::pow(ten.clone(), (-k) as usize).recip()
        }
    };
    let mut scaled = &q / pow10(e10);
    while scaled >= ten {
        scaled /= &ten;
        e10 += 1;
    }
    while scaled < BigRational::one() {
        scaled *= &ten;
        e10 -= 1;
    }
    let mut digits_int = (scaled * pow10(digits as i64 - 1)).round().to_integer();
    if digits_int >= num_traits::pow(BigInt::from(10), digits) {
        digits_int /= 10;
        e10 += 1;
    }
    let s = digits_int.to_string();
    let sign = if x.is_negative() { "-" } else { "" };
    let (head, tail) = s.split_at(1);
    if tail.is_empty() {
        format!("{sign}{head}e{e10}")
    } else {
        format!("{sign}{head}.{tail}e{e10}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bf(v: f64) -> BigFloat {
        BigFloat::from_f64(v).unwrap()
    }

    #[test]
    fn directed_division_brackets_one_third() {
        let one = BigFloat::one();
        let three = BigFloat::from_i64(3);
        let lo = one.div(&three, 64, Round::Down);
        let hi = one.div(&three, 64, Round::Up);
        let third = BigRational::new(1.into(), 3.into());
        assert!(lo.to_rational() < third && third < hi.to_rational());
        assert_eq!(
            hi.sub_exact(&lo),
            BigFloat::from_parts(1.into(), lo.top() - 64)
        );
    }

    #[test]
    fn nearest_ties_to_even() {
        // 0b1011 rounded to 3 bits: 0b1011 = 11, halfway between 10 and 12 -> 12
        let x = BigFloat::from_i64(11);
        assert_eq!(x.round(3, Round::Nearest), BigFloat::from_i64(12));
        // 0b1001 = 9, halfway between 8 and 10 -> 8 (even)
        assert_eq!(
            BigFloat::from_i64(9).round(3, Round::Nearest),
            BigFloat::from_i64(8)
        );
        assert_eq!(
            BigFloat::from_i64(-9).round(3, Round::Down),
            BigFloat::from_i64(-10)
        );
        assert_eq!(
            BigFloat::from_i64(-9).round(3, Round::Up),
            BigFloat::from_i64(-8)
        );
    }

    #[test]
    fn tiny_addend_still_moves_directed_rounding() {
        let one = BigFloat::one();
        let tiny = BigFloat::from_parts(1.into(), -10_000);
        let up = one.add(&tiny, 53, Round::Up);
        assert!(up > one);
        assert_eq!(one.add(&tiny, 53, Round::Down), one);
        assert_eq!(one.sub(&tiny, 53, Round::Up), one);
        assert!(one.sub(&tiny, 53, Round::Down) < one);
        assert_eq!(one.add(&tiny, 53, Round::Nearest), one);
    }

    #[test]
    fn sqrt_two_brackets() {
        let two = BigFloat::from_i64(2);
        let lo = two.sqrt(100, Round::Down);
        let hi = two.sqrt(100, Round::Up);
        assert!(lo.mul_exact(&lo) < two && two < hi.mul_exact(&hi));
        assert_eq!(
            BigFloat::from_i64(16).sqrt(10, Round::Up),
            BigFloat::from_i64(4)
        );
    }

    #[test]
    fn hex_round_trip_and_c_style_input() {
        let x = BigFloat::from_rational(
            &BigRational::new((-5).into(), 24.into()),
            128,
            Round::Nearest,
        );
        assert_eq!(BigFloat::from_hex(&x.to_hex()).unwrap(), x);
        assert_eq!(
            BigFloat::from_hex("0x1.8p+1").unwrap(),
            BigFloat::from_i64(3)
        );
        assert_eq!(BigFloat::from_hex("-0x0p0").unwrap(), BigFloat::zero());
        assert!(BigFloat::from_hex("1.5").is_err());
    }

    #[test]
    fn decimal_display() {
        assert_eq!(to_decimal(&BigFloat::from_i64(1234), 3), "1.23e3");
        assert_eq!(to_decimal(&bf(-0.001888), 4), "-1.888e-3");
    }

    proptest! {
        #[test]
        fn directed_rounding_encloses_exact(a in -1e6f64..1e6, b in -1e6f64..1e6, p in 2u32..80) {
            let (x, y) = (bf(a), bf(b));
            let exact_sum = x.add_exact(&y);
            prop_assert!(x.add(&y, p, Round::Down) <= exact_sum);
            prop_assert!(x.add(&y, p, Round::Up) >= exact_sum);
            let exact_prod = x.mul_exact(&y);
            prop_assert!(x.mul(&y, p, Round::Down) <= exact_prod);
            prop_assert!(x.mul(&y, p, Round::Up) >= exact_prod);
            if !y.is_zero() {
                let q = x.to_rational() / y.to_rational();
                prop_assert!(x.div(&y, p, Round::Down).to_rational() <= q);
                prop_assert!(x.div(&y, p, Round::Up).to_rational() >= q);
            }
        }

        #[test]
        fn nearest_matches_f64(a in -1e12f64..1e12, b in -1e12f64..1e12) {
            let (x, y) = (bf(a), bf(b));
            prop_assert_eq!(x.add(&y, 53, Round::Nearest).to_f64(), a + b);
            prop_assert_eq!(x.mul(&y, 53, Round::Nearest).to_f64(), a * b);
            if b != 0.0 {
                prop_assert_eq!(x.div(&y, 53, Round::Nearest).to_f64(), a / b);
            }
        }

        #[test]
        fn ordering_agrees_with_rationals(a in -1e9f64..1e9, b in -1e9f64..1e9) {
            let (x, y) = (bf(a), bf(b));
            prop_assert_eq!(x.cmp(&y), x.to_rational().cmp(&y.to_rational()));
        }
    }
}
