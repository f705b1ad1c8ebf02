//! Fixed-point evaluation of the coefficient recurrence.
//!
//! Coefficients are kept as integers `M_k` with `c_k ~ M_k 2^-F`. A step
//! computes `S = sum_k trunc(M_k / (n+1+k))` in pure integer arithmetic and
//! sets `M_n = -(2n+1) S`. Each truncation loses less than one unit, so the
//! step's local error is below `n (2n+1) 2^-F`. How those local errors
//! propagate is bounded separately (see [`propagated_radius`]).
//!
//! Integer sums are associative, so splitting the inner sum across threads
//! gives bit-identical results for any partition.

use num_bigint::{BigInt, BigUint, Sign};
use rayon::prelude::*;

use super::mag::Mag;
use crate::error::{Error, Result};

/// Inner sums shorter than this stay on the calling thread.
const PAR_THRESHOLD: usize = 8192;
const PAR_CHUNK: usize = 2048;

/// Largest `n` the kernel accepts: divisors `2n+1` must fit in 32 bits.
pub const KERNEL_MAX_N: usize = (u32::MAX as usize - 1) / 2;

/// Integer magnitudes stored as a flat array of little-endian 64-bit limbs.
struct FixedStore {
    limbs: usize,
    data: Vec<u64>,
    negative: Vec<bool>,
}

impl FixedStore {
    fn with_capacity(limbs: usize, n: usize) -> Self {
        FixedStore {
            limbs,
            data: Vec::with_capacity(limbs * n),
            negative: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, v: &BigInt) -> Result<()> {
        let digits = v.magnitude().to_u64_digits();
        if digits.len() > self.limbs {
            return Err(Error::Invariant(format!(
                "fixed-point coefficient exceeds {} limbs",
                self.limbs
            )));
        }
        let start = self.data.len();
        self.data.extend_from_slice(&digits);
        self.data.resize(start + self.limbs, 0);
        self.negative.push(v.sign() == Sign::Minus);
        Ok(())
    }

    fn len(&self) -> usize {
        self.negative.len()
    }

    fn magnitude(&self, k: usize) -> &[u64] {
        &self.data[k * self.limbs..(k + 1) * self.limbs]
    }
}

/// Positive and negative quotient accumulators.
#[derive(Clone)]
struct Accum {
    pos: Vec<u64>,
    neg: Vec<u64>,
}

impl Accum {
    fn new(limbs: usize) -> Self {
        // one spare limb absorbs carries from up to 2^64 additions
        Accum {
            pos: vec![0; limbs + 1],
            neg: vec![0; limbs + 1],
        }
    }

    fn merge(mut self, other: Accum) -> Accum {
        add_into(&mut self.pos, &other.pos);
        add_into(&mut self.neg, &other.neg);
        self
    }

    fn value(&self) -> BigInt {
        let p = BigInt::from(BigUint::new(to_u32_digits(&self.pos)));
        let n = BigInt::from(BigUint::new(to_u32_digits(&self.neg)));
        p - n
    }
}

fn to_u32_digits(v: &[u64]) -> Vec<u32> {
    v.iter()
        .flat_map(|&l| [l as u32, (l >> 32) as u32])
        .collect()
}

fn add_into(acc: &mut [u64], x: &[u64]) {
    let mut carry = false;
    for (i, a) in acc.iter_mut().enumerate() {
        let b = x.get(i).copied().unwrap_or(0);
        let (s1, c1) = a.overflowing_add(b);
        let (s2, c2) = s1.overflowing_add(carry as u64);
        *a = s2;
        carry = c1 || c2;
        if i >= x.len() && !carry {
            break;
        }
    }
    debug_assert!(!carry, "accumulator overflow");
}

/// `acc += floor(x / d)` for `d < 2^32`, using `scratch` for the quotient.
#[inline]
fn add_quotient(acc: &mut [u64], x: &[u64], d: u64, scratch: &mut [u64]) {
    let mut rem: u64 = 0;
    for i in (0..x.len()).rev() {
        let limb = x[i];
        let hi = (rem << 32) | (limb >> 32);
        let qh = hi / d;
        rem = hi % d;
        let lo = (rem << 32) | (limb & 0xffff_ffff);
        let ql = lo / d;
        rem = lo % d;
        scratch[i] = (qh << 32) | ql;
    }
    add_into(acc, scratch);
}

fn accumulate(store: &FixedStore, range: std::ops::Range<usize>, n: usize) -> Accum {
    let limbs = store.limbs;
    let mut acc = Accum::new(limbs);
    let mut scratch = vec![0u64; limbs];
    for k in range {
        let d = (n + 1 + k) as u64;
        let target = if store.negative[k] {
            &mut acc.neg
        } else {
            &mut acc.pos
        };
        add_quotient(target, store.magnitude(k), d, &mut scratch);
    }
    acc
}

/// Fixed-point midpoints `M_0..=M_{n_max}` with `F = frac_bits`.
///
/// `progress` is called with each completed index.
pub fn fixed_point_coefficients(
    n_max: usize,
    frac_bits: u32,
    progress: &mut dyn FnMut(usize),
) -> Result<Vec<BigInt>> {
    if n_max > KERNEL_MAX_N {
        return Err(Error::Capacity {
            requested: n_max,
            cap: KERNEL_MAX_N,
        });
    }
    // c_1 = -3/2 is the largest coefficient: two integer bits plus a spare
    let limbs = (frac_bits as usize + 3).div_ceil(64);
    let mut store = FixedStore::with_capacity(limbs, n_max + 1);
    let mut out = Vec::with_capacity(n_max + 1);
    let one = BigInt::from(1) << frac_bits;
    store.push(&one)?;
    out.push(one);
    progress(0);
    for n in 1..=n_max {
        let acc = if n >= PAR_THRESHOLD {
            let chunks: Vec<std::ops::Range<usize>> = (0..n)
                .step_by(PAR_CHUNK)
                .map(|s| s..(s + PAR_CHUNK).min(n))
                .collect();
            chunks
                .into_par_iter()
                .map(|r| accumulate(&store, r, n))
                .reduce(|| Accum::new(limbs), Accum::merge)
        } else {
            accumulate(&store, 0..n, n)
        };
        let m = -(acc.value() * BigInt::from(2 * n as u64 + 1));
        store.push(&m)?;
        out.push(m);
        progress(n);
    }
    debug_assert_eq!(store.len(), n_max + 1);
    Ok(out)
}

/// Upper bounds `R_n` on `|c_n - M_n 2^-F|` for the kernel output.
///
/// The error vector `e` obeys the recurrence itself, forced by the local
/// errors `delta_m` with `|delta_m| < m (2m+1) 2^-F`. Its response to a unit
/// forcing at index `m` is the expansion of `x^m` over `x^{m+1}, x^{m+2}, ...`,
/// whose coefficients satisfy `|G_{n,m}| <= sqrt((2n+1)/(2m+1))` because each
/// squared coefficient times `1/(2n+1)` is a drop in a residual norm that
/// starts at `1/(2m+1)`. Summing gives
/// `R_n = sqrt(2n+1) 2^-F sum_{m=1}^n m sqrt(2m+1)`.
pub fn propagated_radius(n_max: usize, frac_bits: u32) -> Vec<Mag> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(Mag::zero());
    let mut acc = Mag::zero();
    for n in 1..=n_max {
        let odd = Mag::from_u64(2 * n as u64 + 1).sqrt();
        acc = acc.add(&odd.mul_u64(n as u64));
        out.push(acc.mul(&odd).mul_2exp(-(frac_bits as i64)));
    }
    out
}
