use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::arith::double_factorial_odd;
use super::ExactRational;
use crate::error::{Error, Result};

/// Largest `n` accepted by [`coefficient_via_determinant`] by default.
pub const DETERMINANT_CAP: usize = 64;
/// Largest `n` accepted by [`coefficient_via_permutation_sum`].
pub const PERMUTATION_CAP: usize = 20;

fn sign_double_factorial(n: usize) -> ExactRational {
    let df = ExactRational::from_integer(double_factorial_odd(n as u64));
    if n % 2 == 1 {
        -df
    } else {
        df
    }
}

/// Determinant of a square integer matrix by fraction-free (Bareiss)
/// elimination with row swaps.
fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// `c_n = (-1)^n (2n+1)!! det(A_n)` with `(A_n)_{ij} = 1/(i+j)` when
/// `j - i <= 1` and 0 otherwise (`1 <= i, j <= n`).
///
/// Row `i` is scaled by `lcm(i+1, ..., 2i+1)` to clear denominators, the
/// integer determinant is taken, and the row scales are divided back out.
pub fn coefficient_via_determinant(n: usize) -> Result<ExactRational> {
    coefficient_via_determinant_capped(n, DETERMINANT_CAP)
}

pub fn coefficient_via_determinant_capped(n: usize, cap: usize) -> Result<ExactRational> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "determinant oracle needs n >= 1".into(),
        ));
    }
    if n > cap {
        return Err(Error::Capacity { requested: n, cap });
    }
    let mut rows = Vec::with_capacity(n);
    let mut scale = BigInt::one();
    for i in 1..=n {
        let row_lcm = (i + 1..=2 * i + 1).fold(BigInt::one(), |acc, d| acc.lcm(&BigInt::from(d)));
        let row = (1..=n)
            .map(|j| {
                if j <= i + 1 {
                    &row_lcm / BigInt::from(i + j)
                } else {
                    BigInt::zero()
                }
            })
            .collect();
        rows.push(row);
        scale *= row_lcm;
    }
    let det = ExactRational::new(bareiss_determinant(rows), scale);
    Ok(sign_double_factorial(n) * det)
}

/// `c_n = (-1)^n (2n+1)!! sum_sigma sgn(sigma) prod_i 1/(i + sigma(i))` over
/// permutations with `sigma(i) <= i+1`.
///
/// Such permutations are exactly the products of cycles
/// `a -> a+1 -> ... -> b -> a` on consecutive blocks, one per composition of
/// `n`. A block of length `len` has sign `(-1)^(len-1)` and weight
/// `prod_{a<=i<b} 1/(2i+1) * 1/(a+b)`.
pub fn coefficient_via_permutation_sum(n: usize) -> Result<ExactRational> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "permutation oracle needs n >= 1".into(),
        ));
    }
    if n > PERMUTATION_CAP {
        return Err(Error::Capacity {
            requested: n,
            cap: PERMUTATION_CAP,
        });
    }
    let block = |a: usize, b: usize| -> ExactRational {
        let mut den = BigInt::from(a + b);
        for i in a..b {
            den *= 2 * i + 1;
        }
        let w = ExactRational::new(BigInt::one(), den);
        if (b - a) % 2 == 1 {
            -w
        } else {
            w
        }
    };
    let mut total = ExactRational::zero();
    // bit i-1 set means a block ends after position i
    for mask in 0u32..(1u32 << (n - 1)) {
        let mut term = ExactRational::one();
        let mut start = 1;
        for i in 1..=n {
            if i == n || mask & (1 << (i - 1)) != 0 {
                term *= block(start, i);
                start = i + 1;
            }
        }
        total += term;
    }
    Ok(sign_double_factorial(n) * total)
}
