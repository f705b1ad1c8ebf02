//! Rigorous elementary functions on balls.
//!
//! Each function evaluates a truncated Taylor-type series in ball arithmetic
//! at a few guard bits above the requested precision, adds an explicit bound
//! on the truncated tail, and finally widens the result by the propagated
//! input radius.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::One;

use super::float::{BigFloat, Round};
use super::mag::Mag;
use super::real::BallReal;
use crate::error::{Error, Result};

const GUARD: u32 = 24;

type ConstCache = Mutex<HashMap<u32, BallReal>>;

fn cached(
    cache: &'static OnceLock<ConstCache>,
    prec: u32,
    compute: impl FnOnce(u32) -> BallReal,
) -> BallReal {
    let map = cache.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = map.lock().expect("constant cache poisoned").get(&prec) {
        return v.clone();
    }
    let v = compute(prec);
    map.lock()
        .expect("constant cache poisoned")
        .insert(prec, v.clone());
    v
}

/// `sum_{k>=0} (-1)^k / ((2k+1) x^(2k+1))`, i.e. `atan(1/x)` for integer `x >= 2`.
fn atan_recip(x: u64, prec: u32) -> BallReal {
    let wp = prec + GUARD;
    let x2 = BigInt::from(x) * BigInt::from(x);
    let mut power = BigInt::from(x);
    let mut sum = BallReal::zero(wp);
    let mut k: u64 = 0;
    loop {
        let den = &power * BigInt::from(2 * k + 1);
        let term = BallReal::from_rational(
            &num_rational::BigRational::new(BigInt::one(), den.clone()),
            wp,
        );
        sum = if k % 2 == 0 {
            sum.add(&term)
        } else {
            sum.sub(&term)
        };
        k += 1;
        power *= &x2;
        // alternating series with decreasing terms: |tail| <= next term
        let next_den = &power * BigInt::from(2 * k + 1);
        if next_den.bits() > (wp + 2) as u64 {
            let tail = Mag::from_u64(1).div_lower(&BigFloat::from_bigint(next_den));
            return sum.inflate(&tail);
        }
    }
}

/// `pi`, via Machin's formula.
pub fn pi(prec: u32) -> BallReal {
    static CACHE: OnceLock<ConstCache> = OnceLock::new();
    cached(&CACHE, prec, |prec| {
        let a = atan_recip(5, prec + 8).mul_i64(16);
        let b = atan_recip(239, prec + 8).mul_i64(4);
        a.sub(&b).with_precision(prec)
    })
}

/// `ln 2 = 2 atanh(1/3)`.
pub fn ln2(prec: u32) -> BallReal {
    static CACHE: OnceLock<ConstCache> = OnceLock::new();
    cached(&CACHE, prec, |prec| {
        let third = BallReal::one(prec + GUARD).div_i64(3);
        atanh_series(&third, 0.34).mul_2exp(1).with_precision(prec)
    })
}

/// `atanh(z) = sum z^(2k+1)/(2k+1)` for a ball with `|z| <= z_max < 1/2`.
fn atanh_series(z: &BallReal, z_max: f64) -> BallReal {
    let wp = z.precision();
    let z2 = z.sqr();
    let mut power = z.clone();
    let mut sum = BallReal::zero(wp);
    let mut k: u64 = 0;
    let zmax = Mag::from_f64_upper(z_max).expect("finite");
    let mut zmax_pow = zmax.clone();
    loop {
        sum = sum.add(&power.div_i64(2 * k as i64 + 1));
        k += 1;
        power = power.mul(&z2);
        zmax_pow = zmax_pow.mul(&zmax).mul(&zmax);
        if zmax_pow.log2() < -(wp as f64) - 4.0 {
            // tail <= zmax^(2k+1) / ((2k+1)(1 - zmax^2)) <= 2 zmax^(2k+1) for zmax < 1/2
            return sum.inflate(&zmax_pow.mul_u64(2));
        }
    }
}

/// Natural logarithm; the ball must be strictly positive.
pub fn ln(x: &BallReal) -> Result<BallReal> {
    let lo = x.lower();
    if lo.signum() <= 0 {
        return Err(Error::Indeterminate(
            "logarithm of a ball that is not strictly positive".to_string(),
        ));
    }
    let prec = x.precision();
    let wp = prec + GUARD;
    let m = x.mid();
    // m = f * 2^e with f in [0.75, 1.5)
    let mut e = m.top() - 1;
    let f_top = m.mul_2exp(-e); // in [1, 2)
    let f = if f_top >= BigFloat::from_f64(1.5).expect("finite") {
        e += 1;
        f_top.mul_2exp(-1)
    } else {
        f_top
    };
    let fb = BallReal::exact(f, wp);
    let one = BallReal::one(wp);
    let z = fb.sub(&one).div(&fb.add(&one))?;
    let mut result = atanh_series(&z, 0.2).mul_2exp(1);
    if e != 0 {
        result = result.add(&ln2(wp).mul_i64(e));
    }
    // |ln x - ln m| <= rad / lo
    let spread = if x.rad().is_zero() {
        Mag::zero()
    } else {
        x.rad().div_lower(&lo)
    };
    Ok(result.inflate(&spread).round_to(prec))
}

/// Natural logarithm of a positive integer.
pub fn ln_u64(n: u64, prec: u32) -> BallReal {
    assert!(n > 0, "logarithm of zero");
    ln(&BallReal::from_i64(n as i64, prec)).expect("positive point")
}

/// Exponential function.
pub fn exp(x: &BallReal) -> Result<BallReal> {
    let prec = x.precision();
    if !x.rad().is_zero() && x.rad().log2() > -1.0 {
        // wide input: enclose the monotone image of the endpoints
        let lo = exp_point(&x.lower(), prec)?;
        let hi = exp_point(&x.upper(), prec)?;
        return Ok(BallReal::from_interval(&lo.lower(), &hi.upper(), prec));
    }
    let e = exp_point(x.mid(), prec)?;
    if x.rad().is_zero() {
        return Ok(e);
    }
    // |exp(m + d) - exp(m)| <= exp(m) (e^r - 1) <= 2 r exp(m) for r <= 1/2
    let spread = e.abs_upper().mul(x.rad()).mul_u64(2);
    Ok(e.inflate(&spread))
}

fn exp_point(m: &BigFloat, prec: u32) -> Result<BallReal> {
    let approx = m.to_f64();
    if !approx.is_finite() || approx.abs() > 1e15 {
        return Err(Error::InvalidArgument(format!(
            "exponent argument out of range: {approx:e}"
        )));
    }
    const HALVINGS: i64 = 16;
    let k = (approx / std::f64::consts::LN_2).round() as i64;
    let k_bits = (k.unsigned_abs().max(1)).ilog2() + 1;
    let wp = prec + GUARD + HALVINGS as u32 + k_bits;
    let mut r = BallReal::exact(m.clone(), wp);
    if k != 0 {
        r = r.sub(&ln2(wp).mul_i64(k));
    }
    // |r| <= ln2/2 + slack, then scale down
    let y = r.mul_2exp(-HALVINGS);
    let y_abs = y.abs_upper();
    let mut sum = BallReal::one(wp);
    let mut term = BallReal::one(wp);
    let mut bound = Mag::from_u64(1);
    let mut i: i64 = 1;
    loop {
        term = term.mul(&y).div_i64(i);
        sum = sum.add(&term);
        bound = bound.mul(&y_abs).div_lower(&BigFloat::from_i64(i + 1));
        i += 1;
        if bound.is_zero() || bound.log2() < -(wp as f64) - 4.0 {
            // |y| <= 1/2: tail <= 2 |y|^(i) / i!
            sum = sum.inflate(&bound.mul_u64(2));
            break;
        }
    }
    for _ in 0..HALVINGS {
        sum = sum.sqr();
    }
    Ok(sum.mul_2exp(k).round_to(prec))
}

/// Simultaneous sine and cosine.
pub fn sin_cos(x: &BallReal) -> Result<(BallReal, BallReal)> {
    let prec = x.precision();
    let approx = x.mid().to_f64();
    if !approx.is_finite() || approx.abs() > 1e15 {
        return Err(Error::InvalidArgument(format!(
            "trigonometric argument out of range: {approx:e}"
        )));
    }
    const HALVINGS: i64 = 8;
    let k = (approx / std::f64::consts::TAU).round() as i64;
    let k_bits = (k.unsigned_abs().max(1)).ilog2() + 1;
    let wp = prec + GUARD + 2 * HALVINGS as u32 + k_bits;
    let mut r = BallReal::exact(x.mid().clone(), wp);
    if k != 0 {
        r = r.sub(&pi(wp).mul_i64(2 * k));
    }
    let y = r.mul_2exp(-HALVINGS);
    let y_abs = y.abs_upper();
    let y2 = y.sqr();
    // sin: y - y^3/3! + ...   cos: 1 - y^2/2! + ...
    let mut s = y.clone();
    let mut c = BallReal::one(wp);
    let mut s_term = y.clone();
    let mut c_term = BallReal::one(wp);
    let mut bound = y_abs.clone();
    let mut n: i64 = 1; // index of the last sine term's power
    loop {
        c_term = c_term.mul(&y2).div_i64(n * (n + 1)).neg();
        c = c.add(&c_term);
        s_term = s_term.mul(&y2).div_i64((n + 1) * (n + 2)).neg();
        s = s.add(&s_term);
        n += 2;
        bound = bound
            .mul(&y_abs)
            .mul(&y_abs)
            .div_lower(&BigFloat::from_i64(n * (n - 1)));
        if bound.is_zero() || bound.log2() < -(wp as f64) - 4.0 {
            // alternating with decreasing terms for |y| < 1: tail <= next term
            let tail = bound.mul(&y_abs).add(&bound);
            s = s.inflate(&tail);
            c = c.inflate(&tail);
            break;
        }
    }
    for _ in 0..HALVINGS {
        let s2 = s.mul(&c).mul_2exp(1);
        let c2 = BallReal::one(wp).sub(&s.sqr().mul_2exp(1));
        s = s2;
        c = c2;
    }
    // both are 1-Lipschitz
    Ok((
        s.inflate(x.rad()).round_to(prec),
        c.inflate(x.rad()).round_to(prec),
    ))
}

impl BallReal {
    /// Re-round the midpoint to `prec` bits, widening the radius accordingly.
    pub fn round_to(&self, prec: u32) -> BallReal {
        let (mid, exact) = self.mid().round_ex(prec, Round::Nearest);
        let mut rad = self.rad().clone();
        if !exact {
            rad = rad.add(&Mag::pow2(mid.top() - prec as i64));
        }
        BallReal::new(mid, rad, prec)
    }
}

/// `x^y = exp(y ln x)` for `x > 0`.
pub fn pow(x: &BallReal, y: &BallReal) -> Result<BallReal> {
    exp(&ln(x)?.mul(y))
}
