use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use super::float::{to_decimal, BigFloat, Round};
use super::mag::{Mag, MAG_BITS};
use crate::error::{Error, Result};

/// A real number known to lie in `[mid - rad, mid + rad]`.
///
/// Arithmetic rounds the midpoint to nearest at the working precision and
/// folds both the rounding error and the propagated input radii into the
/// result radius, so enclosures are never lost. The working precision of a
/// binary operation is the larger of the operands' precisions.
#[derive(Clone, PartialEq, Eq)]
pub struct BallReal {
    mid: BigFloat,
    rad: Mag,
    prec: u32,
}

/// Bound on the nearest-rounding error of a value `r` rounded to `prec` bits.
fn rounding_error(r: &BigFloat, exact: bool, prec: u32) -> Mag {
    if exact || r.is_zero() {
        Mag::zero()
    } else {
        Mag::pow2(r.top() - prec as i64)
    }
}

impl BallReal {
    pub fn new(mid: BigFloat, rad: Mag, prec: u32) -> Self {
        BallReal { mid, rad, prec }
    }

    /// A point ball; the midpoint is taken as is, without rounding.
    pub fn exact(mid: BigFloat, prec: u32) -> Self {
        BallReal {
            mid,
            rad: Mag::zero(),
            prec,
        }
    }

    pub fn zero(prec: u32) -> Self {
        BallReal::exact(BigFloat::zero(), prec)
    }

    pub fn one(prec: u32) -> Self {
        BallReal::exact(BigFloat::one(), prec)
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        BallReal::exact(BigFloat::from_i64(v), prec)
    }

    /// Tightest ball of the given precision around an exact rational.
    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        let (mid, exact) = BigFloat::div_integers_ex(q.numer(), q.denom(), prec, Round::Nearest);
        let rad = rounding_error(&mid, exact, prec);
        BallReal { mid, rad, prec }
    }

    /// Ball enclosing the closed interval `[lo, hi]`.
    pub fn from_interval(lo: &BigFloat, hi: &BigFloat, prec: u32) -> Self {
        assert!(lo <= hi, "empty interval");
        let mid = lo
            .add(hi, prec + 2, Round::Nearest)
            .mul_2exp(-1)
            .round(prec, Round::Nearest);
        let up = hi.sub(&mid, MAG_BITS, Round::Up);
        let down = mid.sub(lo, MAG_BITS, Round::Up);
        let rad = Mag::from_abs(&up).max(Mag::from_abs(&down));
        BallReal { mid, rad, prec }
    }

    pub fn mid(&self) -> &BigFloat {
        &self.mid
    }

    pub fn rad(&self) -> &Mag {
        &self.rad
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn with_precision(mut self, prec: u32) -> Self {
        self.prec = prec;
        self
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    /// Add `extra` to the radius.
    pub fn inflate(&self, extra: &Mag) -> Self {
        BallReal {
            mid: self.mid.clone(),
            rad: self.rad.add(extra),
            prec: self.prec,
        }
    }

    /// Lower endpoint, rounded down.
    pub fn lower(&self) -> BigFloat {
        self.mid
            .sub(self.rad.as_float(), self.prec + MAG_BITS, Round::Down)
    }

    /// Upper endpoint, rounded up.
    pub fn upper(&self) -> BigFloat {
        self.mid
            .add(self.rad.as_float(), self.prec + MAG_BITS, Round::Up)
    }

    /// Upper bound of `|x|` over the ball.
    pub fn abs_upper(&self) -> Mag {
        Mag::from_abs(&self.mid).add(&self.rad)
    }

    /// Lower bound of `|x|` over the ball (zero if the ball contains zero).
    pub fn abs_lower(&self) -> BigFloat {
        let l = self
            .mid
            .abs()
            .sub(self.rad.as_float(), MAG_BITS, Round::Down);
        if l.is_negative() {
            BigFloat::zero()
        } else {
            l
        }
    }

    /// Sign if the ball excludes zero.
    pub fn sign(&self) -> Option<Ordering> {
        if self.mid.is_zero() {
            return if self.rad.is_zero() {
                Some(Ordering::Equal)
            } else {
                None
            };
        }
        if self.mid.abs() > *self.rad.as_float() {
            Some(if self.mid.is_negative() {
                Ordering::Less
            } else {
                Ordering::Greater
            })
        } else {
            None
        }
    }

    pub fn excludes_zero(&self) -> bool {
        matches!(self.sign(), Some(Ordering::Less | Ordering::Greater))
    }

    pub fn contains_rational(&self, q: &BigRational) -> bool {
        let d = (q - self.mid.to_rational()).abs();
        d <= self.rad.as_float().to_rational()
    }

    pub fn contains_float(&self, x: &BigFloat) -> bool {
        let d = x.sub_exact(&self.mid).abs();
        d <= *self.rad.as_float()
    }

    /// True if every point of `other` lies in `self`.
    pub fn contains_ball(&self, other: &BallReal) -> bool {
        let d = other.mid.sub_exact(&self.mid).abs();
        let reach = d.add_exact(other.rad.as_float());
        reach <= *self.rad.as_float()
    }

    pub fn overlaps(&self, other: &BallReal) -> bool {
        let d = other.mid.sub_exact(&self.mid).abs();
        d <= self.rad.as_float().add_exact(other.rad.as_float())
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    pub fn neg(&self) -> Self {
        BallReal {
            mid: self.mid.neg(),
            rad: self.rad.clone(),
            prec: self.prec,
        }
    }

    pub fn abs(&self) -> Self {
        match self.sign() {
            Some(Ordering::Less) => self.neg(),
            Some(_) => self.clone(),
            None => {
                // ball straddles zero: enclose [0, |mid| + rad]
                let hi = self
                    .mid
                    .abs()
                    .add(self.rad.as_float(), self.prec, Round::Up);
                BallReal::from_interval(&BigFloat::zero(), &hi, self.prec)
            }
        }
    }

    pub fn mul_2exp(&self, k: i64) -> Self {
        BallReal {
            mid: self.mid.mul_2exp(k),
            rad: self.rad.mul_2exp(k),
            prec: self.prec,
        }
    }

    pub fn add(&self, other: &BallReal) -> BallReal {
        let prec = self.prec.max(other.prec);
        let (mid, exact) = self.mid.add_ex(&other.mid, prec, Round::Nearest);
        let rad = self
            .rad
            .add(&other.rad)
            .add(&rounding_error(&mid, exact, prec));
        BallReal { mid, rad, prec }
    }

    pub fn sub(&self, other: &BallReal) -> BallReal {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &BallReal) -> BallReal {
        let prec = self.prec.max(other.prec);
        let (mid, exact) = self.mid.mul_ex(&other.mid, prec, Round::Nearest);
        let mut rad = rounding_error(&mid, exact, prec);
        if !self.rad.is_zero() || !other.rad.is_zero() {
            let a = Mag::from_abs(&self.mid);
            let b = Mag::from_abs(&other.mid);
            rad = rad
                .add(&a.mul(&other.rad))
                .add(&b.mul(&self.rad))
                .add(&self.rad.mul(&other.rad));
        }
        BallReal { mid, rad, prec }
    }

    pub fn sqr(&self) -> BallReal {
        self.mul(self)
    }

    pub fn mul_i64(&self, v: i64) -> BallReal {
        self.mul(&BallReal::from_i64(v, self.prec))
    }

    /// Division by a nonzero integer.
    pub fn div_i64(&self, v: i64) -> BallReal {
        assert!(v != 0, "division by zero");
        let d = BigFloat::from_i64(v);
        let (mid, exact) = self.mid.div_ex(&d, self.prec, Round::Nearest);
        let rad = self
            .rad
            .div_lower(&BigFloat::from_i64(v.abs()))
            .add(&rounding_error(&mid, exact, self.prec));
        BallReal {
            mid,
            rad,
            prec: self.prec,
        }
    }

    /// Division; fails if the divisor ball contains zero.
    pub fn div(&self, other: &BallReal) -> Result<BallReal> {
        if !other.excludes_zero() {
            return Err(Error::Indeterminate(
                "divisor ball contains zero".to_string(),
            ));
        }
        let prec = self.prec.max(other.prec);
        let (mid, exact) = self.mid.div_ex(&other.mid, prec, Round::Nearest);
        let mut rad = rounding_error(&mid, exact, prec);
        if !self.rad.is_zero() || !other.rad.is_zero() {
            let bm = other.mid.abs();
            let lb = bm.sub(other.rad.as_float(), MAG_BITS, Round::Down);
            let denom = bm.mul(&lb, MAG_BITS, Round::Down);
            let num = Mag::from_abs(&self.mid)
                .mul(&other.rad)
                .add(&Mag::from_abs(&bm).mul(&self.rad));
            rad = rad.add(&num.div_lower(&denom));
        }
        Ok(BallReal { mid, rad, prec })
    }

    pub fn recip(&self) -> Result<BallReal> {
        BallReal::one(self.prec).div(self)
    }

    /// Square root; fails unless the ball is contained in `(0, inf)`.
    pub fn sqrt(&self) -> Result<BallReal> {
        let lo = self.lower();
        if lo.signum() <= 0 {
            if self.is_exact() && self.mid.is_zero() {
                return Ok(BallReal::zero(self.prec));
            }
            return Err(Error::Indeterminate(
                "square root of a ball touching zero".to_string(),
            ));
        }
        let (mid, exact) = self.mid.sqrt_ex(self.prec, Round::Nearest);
        // |sqrt(x) - sqrt(m)| <= r / sqrt(lo)
        let slo = lo.sqrt(MAG_BITS, Round::Down);
        let rad = self
            .rad
            .div_lower(&slo)
            .add(&rounding_error(&mid, exact, self.prec));
        Ok(BallReal {
            mid,
            rad,
            prec: self.prec,
        })
    }

    /// Integer power by repeated squaring.
    pub fn pow_u64(&self, mut e: u64) -> BallReal {
        let mut base = self.clone();
        let mut acc = BallReal::one(self.prec);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr();
            }
        }
        acc
    }

    /// Compare two balls: `Some` only when the enclosures are disjoint
    /// (or both are the same point).
    pub fn compare(&self, other: &BallReal) -> Option<Ordering> {
        self.sub(other).sign()
    }

    /// Relative radius `rad / |mid|`, or infinity when the midpoint is zero.
    pub fn relative_radius(&self) -> f64 {
        if self.rad.is_zero() {
            return 0.0;
        }
        if self.mid.is_zero() {
            return f64::INFINITY;
        }
        let bits =
            self.rad.log2() - (self.mid.top() as f64 - 1.0 + leading_fraction_log2(&self.mid));
        bits.exp2()
    }

    /// Decimal rendering with the given number of significant digits,
    /// followed by the radius.
    pub fn to_decimal(&self, digits: usize) -> String {
        format!(
            "{} +/- {}",
            to_decimal(&self.mid, digits),
            to_decimal(self.rad.as_float(), 3)
        )
    }
}

fn leading_fraction_log2(x: &BigFloat) -> f64 {
    let m = x.mantissa().abs();
    let bits = m.bits() as i64;
    BigFloat::from_parts(m, 1 - bits).to_f64().log2()
}

impl From<&BigInt> for BallReal {
    fn from(v: &BigInt) -> Self {
        BallReal::exact(BigFloat::from_bigint(v.clone()), (v.bits() as u32).max(64))
    }
}

impl fmt::Debug for BallReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{} +/- {:e}]@{}",
            self.mid,
            self.rad.to_f64(),
            self.prec
        )
    }
}

impl fmt::Display for BallReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal(20))
    }
}

/// Convenience for tests and quick constructions: the rational `num/den`.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

impl BallReal {
    /// True if the ball is a subset of `[lo, hi]`.
    pub fn within(&self, lo: &BigRational, hi: &BigRational) -> bool {
        self.lower().to_rational() >= *lo && self.upper().to_rational() <= *hi
    }

    pub fn is_zero_point(&self) -> bool {
        self.mid.is_zero() && self.rad.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rational_balls_contain_their_value() {
        for (n, d) in [(1, 3), (-5, 24), (140173, 3628800), (7, 1)] {
            let q = ratio(n, d);
            let b = BallReal::from_rational(&q, 64);
            assert!(b.contains_rational(&q));
        }
        assert!(BallReal::from_rational(&ratio(3, 4), 64).is_exact());
    }

    #[test]
    fn division_needs_nonzero_divisor() {
        let straddle = BallReal::new(BigFloat::zero(), Mag::pow2(-3), 64);
        assert!(BallReal::one(64).div(&straddle).is_err());
        let third = BallReal::one(64).div(&BallReal::from_i64(3, 64)).unwrap();
        assert!(third.contains_rational(&ratio(1, 3)));
    }

    #[test]
    fn sign_and_compare() {
        let a = BallReal::from_rational(&ratio(1, 3), 64);
        let b = BallReal::from_rational(&ratio(1, 2), 64);
        assert_eq!(a.compare(&b), Some(Ordering::Less));
        assert_eq!(a.compare(&a.clone()), None);
        assert_eq!(BallReal::zero(64).sign(), Some(Ordering::Equal));
    }

    #[test]
    fn sqrt_and_pow() {
        let two = BallReal::from_i64(2, 128);
        let r = two.sqrt().unwrap();
        assert!(r.sqr().contains_rational(&ratio(2, 1)));
        let p = BallReal::from_rational(&ratio(3, 2), 64).pow_u64(10);
        assert!(p.contains_rational(&(num_traits::pow(ratio(3, 2), 10))));
    }

    fn arb_ball() -> impl Strategy<Value = (BigRational, BallReal)> {
        (-1000i64..1000, 1i64..1000, 0u32..8).prop_map(|(n, d, rexp)| {
            let q = ratio(n, d);
            // widen the ball a bit and move the true value off-centre
            let b = BallReal::from_rational(&q, 40).inflate(&Mag::pow2(-(rexp as i64) - 4));
            (q, b)
        })
    }

    proptest! {
        #[test]
        fn ring_operations_enclose((x, a) in arb_ball(), (y, b) in arb_ball()) {
            prop_assert!(a.add(&b).contains_rational(&(&x + &y)));
            prop_assert!(a.sub(&b).contains_rational(&(&x - &y)));
            prop_assert!(a.mul(&b).contains_rational(&(&x * &y)));
            if let Ok(q) = a.div(&b) {
                prop_assert!(q.contains_rational(&(&x / &y)));
            }
            prop_assert!(a.div_i64(7).contains_rational(&(&x / BigRational::from_integer(7.into()))));
        }
    }
}
