use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::ExactRational;
use crate::error::{Error, Result};

/// Default largest `n_max` accepted by [`exact_coefficients`].
pub const EXACT_DEFAULT_CAP: usize = 2000;

/// Exact coefficients `c_0..=c_{n_max}` with their derived columns.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactCoefficientTable {
    #[serde(skip)]
    coeffs: Vec<ExactRational>,
    #[serde(skip)]
    partial_sums: Vec<ExactRational>,
    #[serde(skip)]
    norms_sq: Vec<ExactRational>,
    #[serde(skip)]
    energies: Vec<ExactRational>,
}

impl ExactCoefficientTable {
    /// Rebuild a table from coefficients alone, recomputing every derived
    /// column. Fails if `coeffs` does not start with 1 or breaks the
    /// recurrence. The recurrence is checked modulo two 64-bit primes, or
    /// exactly if a denominator vanishes modulo one of them.
    pub fn from_coefficients(coeffs: Vec<ExactRational>) -> Result<Self> {
        if coeffs.first() != Some(&BigRational::one()) {
            return Err(Error::Invariant("c_0 must be 1".into()));
        }
        let modular = CHECK_PRIMES
            .iter()
            .map(|&p| recurrence_failures_mod(&coeffs, p))
            .collect::<Option<Vec<Vec<usize>>>>();
        let first_bad = match modular {
            Some(lists) => lists.into_iter().filter_map(|l| l.first().copied()).min(),
            None => (1..coeffs.len()).find(|&n| {
                !(0..=n)
                    .map(|k| &coeffs[k] / BigRational::from_integer(BigInt::from(n + 1 + k)))
                    .sum::<BigRational>()
                    .is_zero()
            }),
        };
        if let Some(n) = first_bad {
            return Err(Error::Invariant(format!(
                "coefficient {n} violates the recurrence"
            )));
        }
        let (partial_sums, norms_sq, energies) = derived_columns(&coeffs);
        Ok(ExactCoefficientTable {
            coeffs,
            partial_sums,
            norms_sq,
            energies,
        })
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[ExactRational] {
        &self.coeffs
    }

    pub fn partial_sums(&self) -> &[ExactRational] {
        &self.partial_sums
    }

    pub fn norms_sq(&self) -> &[ExactRational] {
        &self.norms_sq
    }

    pub fn energies(&self) -> &[ExactRational] {
        &self.energies
    }

    pub fn coeff(&self, n: usize) -> &ExactRational {
        &self.coeffs[n]
    }

    /// `p_n(x) = c_0 + c_1 x + ... + c_n x^n`.
    pub fn polynomial(&self, n: usize) -> super::ExactPolynomial {
        super::ExactPolynomial::new(self.coeffs[..=n].to_vec())
    }

    /// `(int_0^1 p_n'(x) x^n (1-x) dx, int_0^1 p_n'(x) x^{n+1} dx)` by exact
    /// termwise integration. By orthogonality these equal `-c_n/2` for
    /// `n >= 2` and `s_n` for `n >= 1`.
    pub fn derivative_moments(&self, n: usize) -> (ExactRational, ExactRational) {
        let dp = self.polynomial(n).derivative();
        let first = dp.inner_product_with_monomial(n) - dp.inner_product_with_monomial(n + 1);
        (first, dp.inner_product_with_monomial(n + 1))
    }
}

const CHECK_PRIMES: [u64; 2] = [(1 << 61) - 1, u64::MAX - 58];

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut base, mut e, mut acc) = (a, p - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        e >>= 1;
    }
    acc
}

fn rational_mod(q: &BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let num = q.numer().mod_floor(&pb).to_u64()?;
    let den = q.denom().mod_floor(&pb).to_u64()?;
    (den != 0).then(|| mul_mod(num, inv_mod(den, p), p))
}

/// Indices `n` whose recurrence sum is nonzero modulo `p`, or `None` if some
/// denominator is divisible by `p`.
fn recurrence_failures_mod(coeffs: &[ExactRational], p: u64) -> Option<Vec<usize>> {
    let residues = coeffs
        .iter()
        .map(|c| rational_mod(c, p))
        .collect::<Option<Vec<u64>>>()?;
    let inv: Vec<u64> = (0..=2 * coeffs.len() as u64)
        .map(|d| if d == 0 { 0 } else { inv_mod(d, p) })
        .collect();
    let mut bad = Vec::new();
    for n in 1..coeffs.len() {
        let mut acc = 0u128;
        for (k, r) in residues.iter().enumerate().take(n + 1) {
            acc = (acc + mul_mod(*r, inv[n + 1 + k], p) as u128) % p as u128;
        }
        if acc != 0 {
            bad.push(n);
        }
    }
    Some(bad)
}

/// Straightforward rational evaluation of the derived columns; used when a
/// table is assembled from stored coefficients.
fn derived_columns(
    coeffs: &[ExactRational],
) -> (Vec<ExactRational>, Vec<ExactRational>, Vec<ExactRational>) {
    let mut sums = Vec::with_capacity(coeffs.len());
    let mut norms = Vec::with_capacity(coeffs.len());
    let mut energies = Vec::with_capacity(coeffs.len());
    let mut s = BigRational::zero();
    let mut norm = BigRational::one();
    for (n, c) in coeffs.iter().enumerate() {
        let d = match n {
            0 => BigRational::zero(),
            1 => c * c,
            _ => {
                let k = BigRational::from_integer(BigInt::from(n - 1));
                let k1 = BigRational::from_integer(BigInt::from(n));
                let prev = &coeffs[n - 1];
                // 2 <p_k', x^k>; for k = 1 the term <p_0, x^0> = 1 is not zero
                let mut bracket = &s + &s - prev;
                if n == 2 {
                    bracket -= BigRational::from_integer(2.into());
                }
                &energies[n - 1]
                    + &k1 * c * bracket
                    + &k1 * &k1 * c * c
                        / (k * BigRational::from_integer(2.into()) + BigRational::one())
            }
        };
        s += c;
        if n > 0 {
            norm -= c * c / BigRational::from_integer(BigInt::from(2 * n + 1));
        }
        sums.push(s.clone());
        norms.push(norm.clone());
        energies.push(d);
    }
    (sums, norms, energies)
}

/// Sieve of Eratosthenes up to `limit` inclusive.
fn primes_up_to(limit: usize) -> Vec<u64> {
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for p in 2..=limit {
        if !composite[p] {
            out.push(p as u64);
            let mut m = p * p;
            while m <= limit {
                composite[m] = true;
                m += p;
            }
        }
    }
    out
}

/// `lcm(n+1, ..., 2n)` for `n >= 1`, assembled from prime powers.
fn lcm_window(n: u64, primes: &[u64]) -> BigInt {
    let mut l = BigInt::one();
    for &p in primes {
        if p > 2 * n {
            break;
        }
        let mut q = p;
        let mut best = 1u64;
        // some multiple of q lies in [n+1, 2n] iff floor(2n/q) > floor(n/q)
        while q <= 2 * n {
            if (2 * n) / q > n / q {
                best = q;
            }
            q = match q.checked_mul(p) {
                Some(v) => v,
                None => break,
            };
        }
        if best > 1 {
            l *= best;
        }
    }
    l
}

/// Exact table up to `n_max`, refusing anything above [`EXACT_DEFAULT_CAP`].
pub fn exact_coefficients(n_max: usize) -> Result<ExactCoefficientTable> {
    exact_coefficients_with(n_max, EXACT_DEFAULT_CAP, &mut |_| {})
}

/// Exact table with an explicit cap and a progress callback receiving each
/// completed index.
///
/// Every value at step `n` is carried as an integer over the common scale
/// `Q_n = (2n)! M_n`: the recurrence works on `Y_k = c_k Q_n`, so that
/// `c_n Q_n = -(2n+1) sum_k Y_k/(n+1+k)`. Quotients are summed as integers and
/// remainders as one fraction over `lcm(n+1..2n)`. Should `c_n Q_n` fail to
/// be an integer, the extra factor `M_n` grows to absorb the denominator, so
/// the engine never relies on an integrality property it has not checked.
pub fn exact_coefficients_with(
    n_max: usize,
    cap: usize,
    progress: &mut dyn FnMut(usize),
) -> Result<ExactCoefficientTable> {
    if n_max > cap {
        return Err(Error::Capacity {
            requested: n_max,
            cap,
        });
    }
    let primes = primes_up_to(2 * n_max.max(1));
    let mut ys: Vec<BigInt> = vec![BigInt::one()];
    // S_n = s_n Q_n, W_n = (1 - |p_n|^2) Q_n^2 O_n, E_n = D(n) Q_n^2 O_n
    // with O_n = lcm(1..2n+1)
    let mut q = BigInt::one();
    let mut o = BigInt::one();
    let mut s_scaled = BigInt::one();
    let mut w_scaled = BigInt::zero();
    let mut e_scaled = BigInt::zero();
    let mut a_prev = BigInt::one();

    let mut coeffs = vec![BigRational::one()];
    let mut sums = vec![BigRational::one()];
    let mut norms = vec![BigRational::one()];
    let mut energies = vec![BigRational::zero()];
    progress(0);

    for n in 1..=n_max {
        let nn = n as u64;
        let step = (2 * nn - 1) * (2 * nn);
        for y in ys.iter_mut() {
            *y *= step;
        }
        let mut ratio = BigInt::from(step);
        let l = lcm_window(nn, &primes);
        let mut quot = BigInt::zero();
        let mut frac = BigInt::zero();
        for (k, y) in ys.iter().enumerate() {
            let d = nn + 1 + k as u64;
            let (qk, rk) = y.div_rem(&BigInt::from(d));
            quot += qk;
            if !rk.is_zero() {
                frac += rk * (&l / d);
            }
        }
        let odd = BigInt::from(2 * nn + 1);
        let num = -(quot * &l + frac) * &odd;
        let g = l.clone() / num.gcd(&l);
        if !g.is_one() {
            for y in ys.iter_mut() {
                *y *= &g;
            }
            ratio *= &g;
        }
        let a = num * &g / &l;
        let q_prev = q.clone();
        q *= &ratio;

        let o_prev = o.clone();
        o = lcm_small(&lcm_small(&o, 2 * nn), 2 * nn + 1);
        let growth = &o / &o_prev;
        let ratio2 = &ratio * &ratio;

        // S_n = S_{n-1} Q_n/Q_{n-1} + A_n
        let s_prev = s_scaled.clone();
        s_scaled = &s_prev * &ratio + &a;
        w_scaled = &w_scaled * &ratio2 * &growth + &a * &a * (&o / &odd);
        e_scaled = if n == 1 {
            // D(1) = c_1^2
            &a * &a * &o
        } else {
            // n c_n 2<p_{n-1}', x^{n-1}> + n^2 c_n^2 / (2n-1), scaled, where
            // 2<p_k', x^k> = 2 s_k - c_k for k >= 2 and 2 s_1 - c_1 - 2;
            // (2 s_{n-1} - c_{n-1}) Q_n = (2 S_{n-1} - A_{n-1}) Q_n/Q_{n-1}
            let k1 = BigInt::from(nn);
            let mut bracket = BigInt::from(2) * &s_prev - &a_prev;
            if n == 2 {
                bracket -= BigInt::from(2) * &q_prev;
            }
            let cross = &k1 * &a * bracket * &ratio * &o;
            let square = &k1 * &k1 * &a * &a * (&o / BigInt::from(2 * nn - 1));
            &e_scaled * &ratio2 * &growth + cross + square
        };

        let q2o = &q * &q * &o;
        coeffs.push(BigRational::new(a.clone(), q.clone()));
        sums.push(BigRational::new(s_scaled.clone(), q.clone()));
        norms.push(BigRational::new(&q2o - &w_scaled, q2o.clone()));
        energies.push(BigRational::new(e_scaled.clone(), q2o));
        ys.push(a.clone());
        a_prev = a;
        progress(n);
    }

    Ok(ExactCoefficientTable {
        coeffs,
        partial_sums: sums,
        norms_sq: norms,
        energies,
    })
}

/// `lcm(x, d)` for a small `d`.
fn lcm_small(x: &BigInt, d: u64) -> BigInt {
    let r = (x % d).to_u64().expect("remainder below a u64 divisor");
    let g = r.gcd(&d);
    x * (d / g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::real::ratio;

    /// Direct rational recurrence, the definition written out.
    fn naive(n_max: usize) -> Vec<BigRational> {
        let mut c = vec![BigRational::one()];
        for n in 1..=n_max {
            let s: BigRational = c
                .iter()
                .enumerate()
                .map(|(k, ck)| ck / BigRational::from_integer(BigInt::from(n + 1 + k)))
                .sum();
            c.push(-s * BigRational::from_integer(BigInt::from(2 * n + 1)));
        }
        c
    }

    #[test]
    fn first_coefficients() {
        let t = exact_coefficients(5).unwrap();
        let expected = [
            ratio(1, 1),
            ratio(-3, 2),
            ratio(5, 24),
            ratio(77, 720),
            ratio(277, 4480),
            ratio(140173, 3628800),
        ];
        assert_eq!(t.coeffs(), &expected);
    }

    #[test]
    fn trivial_and_first_rows() {
        let t = exact_coefficients(0).unwrap();
        assert_eq!(t.coeffs(), &[ratio(1, 1)]);
        assert_eq!(t.partial_sums(), &[ratio(1, 1)]);
        assert_eq!(t.norms_sq(), &[ratio(1, 1)]);
        assert_eq!(t.energies(), &[ratio(0, 1)]);
        let t = exact_coefficients(1).unwrap();
        assert_eq!(t.partial_sums()[1], ratio(-1, 2));
        assert_eq!(t.norms_sq()[1], ratio(1, 4));
        assert_eq!(t.energies()[1], ratio(9, 4));
    }

    #[test]
    fn fast_engine_matches_naive_recurrence() {
        let t = exact_coefficients(80).unwrap();
        assert_eq!(t.coeffs(), naive(80).as_slice());
        let rebuilt = ExactCoefficientTable::from_coefficients(t.coeffs().to_vec()).unwrap();
        assert_eq!(rebuilt, t);
    }

    #[test]
    fn lcm_window_matches_direct_lcm() {
        let primes = primes_up_to(200);
        for n in 1..=100u64 {
            let direct = (n + 1..=2 * n).fold(BigInt::one(), |acc, d| acc.lcm(&BigInt::from(d)));
            assert_eq!(lcm_window(n, &primes), direct, "n = {n}");
        }
    }

    #[test]
    fn cap_is_enforced() {
        match exact_coefficients_with(11, 10, &mut |_| {}) {
            Err(Error::Capacity { requested, cap }) => assert_eq!((requested, cap), (11, 10)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn corrupted_coefficients_are_rejected() {
        let mut c = exact_coefficients(4).unwrap().coeffs().to_vec();
        c[3] += ratio(1, 1000);
        assert!(ExactCoefficientTable::from_coefficients(c).is_err());
    }

    #[test]
    fn energies_are_derivative_norms() {
        let t = exact_coefficients(30).unwrap();
        let naive = ExactCoefficientTable::from_coefficients(t.coeffs().to_vec()).unwrap();
        for n in 0..=30 {
            let dp = t.polynomial(n).derivative();
            assert_eq!(dp.mul(&dp).integrate(), t.energies()[n], "n = {n}");
        }
        assert_eq!(t.energies()[2], ratio(727, 432));
        assert_eq!(naive.energies(), t.energies());
    }

    #[test]
    fn derivative_moments_match_coefficients() {
        let t = exact_coefficients(30).unwrap();
        for n in 2..=30 {
            let (a, b) = t.derivative_moments(n);
            assert_eq!(
                a,
                -t.coeff(n) / BigRational::from_integer(2.into()),
                "n = {n}"
            );
            assert_eq!(&b, &t.partial_sums()[n], "n = {n}");
        }
        // p_1' = -3/2: the first identity needs n >= 2, the second holds
        let (a, b) = t.derivative_moments(1);
        assert_eq!(a, ratio(-1, 4));
        assert_eq!(b, ratio(-1, 2));
    }

    #[test]
    fn modular_check_accepts_long_tables() {
        let t = exact_coefficients(300).unwrap();
        let back = ExactCoefficientTable::from_coefficients(t.coeffs().to_vec()).unwrap();
        assert_eq!(back, t);
        let mut c = t.coeffs().to_vec();
        c[250] = -c[250].clone();
        match ExactCoefficientTable::from_coefficients(c) {
            Err(Error::Invariant(m)) => assert!(m.contains("250"), "{m}"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
