//! Short-precision nonnegative upper bounds, used as ball radii.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;

use super::float::{BigFloat, Round};
use crate::error::Result;

/// Significant bits kept in a radius.
pub const MAG_BITS: u32 = 30;

/// A nonnegative real stored at [`MAG_BITS`] bits. Every arithmetic
/// operation rounds toward positive infinity, so a `Mag` computed from upper
/// bounds is again an upper bound.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mag(BigFloat);

impl Mag {
    pub fn zero() -> Self {
        Mag(BigFloat::zero())
    }

    /// `2^k`, exactly.
    pub fn pow2(k: i64) -> Self {
        Mag(BigFloat::from_parts(BigInt::from(1), k))
    }

    pub fn from_u64(v: u64) -> Self {
        Mag(BigFloat::from_parts(BigInt::from(v), 0).round(MAG_BITS, Round::Up))
    }

    /// Upper bound of `|x|`.
    pub fn from_abs(x: &BigFloat) -> Self {
        Mag(x.abs().round(MAG_BITS, Round::Up))
    }

    /// Upper bound for a nonnegative value; negative inputs are a bug.
    pub fn from_upper(x: &BigFloat) -> Self {
        debug_assert!(!x.is_negative());
        Mag(x.round(MAG_BITS, Round::Up))
    }

    pub fn from_f64_upper(v: f64) -> Result<Self> {
        Ok(Mag::from_abs(&BigFloat::from_f64(v.abs())?))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn as_float(&self) -> &BigFloat {
        &self.0
    }

    pub fn add(&self, other: &Mag) -> Mag {
        Mag(self.0.add(&other.0, MAG_BITS, Round::Up))
    }

    pub fn mul(&self, other: &Mag) -> Mag {
        Mag(self.0.mul(&other.0, MAG_BITS, Round::Up))
    }

    pub fn mul_u64(&self, v: u64) -> Mag {
        self.mul(&Mag::from_u64(v))
    }

    /// Upper bound of `self / other` where `other` is a lower bound of the
    /// true divisor. Panics on a zero divisor.
    pub fn div_lower(&self, other: &BigFloat) -> Mag {
        assert!(other.signum() > 0, "radius division by nonpositive bound");
        Mag(self.0.div(other, MAG_BITS, Round::Up))
    }

    pub fn sqrt(&self) -> Mag {
        Mag(self.0.sqrt(MAG_BITS, Round::Up))
    }

    pub fn mul_2exp(&self, k: i64) -> Mag {
        Mag(self.0.mul_2exp(k))
    }

    pub fn max(self, other: Mag) -> Mag {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn to_f64(&self) -> f64 {
        // round up the last step too; to_f64 is nearest, so nudge if needed
        let v = self.0.to_f64();
        match BigFloat::from_f64(v) {
            Ok(b) if b >= self.0 => v,
            _ => v.next_up(),
        }
    }

    /// `log2` of the value, `-inf` for zero. Approximate.
    pub fn log2(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let m = self.0.mantissa();
        let bits = m.bits() as i64;
        let lead = BigFloat::from_parts(m.clone(), -bits).to_f64();
        lead.log2() + (self.0.exponent() + bits) as f64
    }

    pub fn to_hex(&self) -> String {
        self.0.to_hex()
    }

    pub fn from_hex(s: &str) -> Result<Mag> {
        let v = BigFloat::from_hex(s)?;
        if v.is_negative() {
            return Err(crate::error::Error::Parse(format!("negative radius {s:?}")));
        }
        Ok(Mag(v.round(MAG_BITS, Round::Up)))
    }
}

impl PartialOrd for Mag {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Mag {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl fmt::Debug for Mag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mag({:e})", self.0.to_f64())
    }
}
