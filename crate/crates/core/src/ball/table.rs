use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use super::float::{BigFloat, Round};
use super::kernel::{fixed_point_coefficients, propagated_radius};
use super::mag::Mag;
use super::real::BallReal;
use crate::error::{Error, Result};
use crate::exact::ExactCoefficientTable;

/// Guard bits used by the derived columns above the table precision.
const DERIVED_GUARD: u32 = 64;

/// Settings for [`ball_coefficients_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct BallOptions {
    /// Every `c_n` must satisfy `radius <= target_rel_radius * |midpoint|`.
    pub target_rel_radius: f64,
    /// Starting precision; `None` picks [`default_precision`].
    pub initial_precision: Option<u32>,
    /// Escalation stops once doubling would exceed this.
    pub max_precision: u32,
}

impl Default for BallOptions {
    fn default() -> Self {
        BallOptions {
            target_rel_radius: 1e-20,
            initial_precision: None,
            max_precision: 4096,
        }
    }
}

/// 128 bits up to `n_max = 2000`, 256 up to 30000, 512 beyond.
pub fn default_precision(n_max: usize) -> u32 {
    match n_max {
        0..=2000 => 128,
        2001..=30_000 => 256,
        _ => 512,
    }
}

/// Rigorous enclosures of `c_0..=c_{n_max}` and the derived columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallCoefficientTable {
    coeffs: Vec<BallReal>,
    partial_sums: Vec<BallReal>,
    norms_sq: Vec<BallReal>,
    energies: Vec<BallReal>,
    precision_bits: u32,
}

impl BallCoefficientTable {
    /// Assemble a table from coefficient balls, computing the derived
    /// columns. Used both by the engine and when loading stored tables, so
    /// the two paths give bit-identical columns.
    pub fn from_coefficients(coeffs: Vec<BallReal>, precision_bits: u32) -> Result<Self> {
        match coeffs.first() {
            Some(c0) if c0.is_exact() && c0.mid() == &BigFloat::one() => {}
            _ => return Err(Error::Invariant("c_0 must be exactly 1".into())),
        }
        let (partial_sums, norms_sq, energies) = derive_columns(&coeffs, precision_bits);
        Ok(BallCoefficientTable {
            coeffs,
            partial_sums,
            norms_sq,
            energies,
            precision_bits,
        })
    }

    /// Promote an exact table to correctly rounded balls of `precision_bits`.
    pub fn from_exact(exact: &ExactCoefficientTable, precision_bits: u32) -> Self {
        let coeffs = exact
            .coeffs()
            .iter()
            .map(|q| BallReal::from_rational(q, precision_bits))
            .collect();
        BallCoefficientTable::from_coefficients(coeffs, precision_bits)
            .expect("exact tables start with 1")
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn coeffs(&self) -> &[BallReal] {
        &self.coeffs
    }

    pub fn partial_sums(&self) -> &[BallReal] {
        &self.partial_sums
    }

    pub fn norms_sq(&self) -> &[BallReal] {
        &self.norms_sq
    }

    pub fn energies(&self) -> &[BallReal] {
        &self.energies
    }

    pub fn coeff(&self, n: usize) -> &BallReal {
        &self.coeffs[n]
    }

    /// Bits of relative accuracy of `c_n`, `-log2(radius/|midpoint|)`;
    /// infinite for exact entries and `None` for a zero midpoint.
    pub fn relative_accuracy_bits(&self, n: usize) -> Option<f64> {
        let c = &self.coeffs[n];
        if c.mid().is_zero() {
            return None;
        }
        if c.rad().is_zero() {
            return Some(f64::INFINITY);
        }
        Some(Mag::from_abs(c.mid()).log2() - c.rad().log2())
    }

    /// Copy with one coefficient replaced; for negative tests only.
    #[doc(hidden)]
    pub fn with_coefficient(&self, n: usize, c: BallReal) -> Self {
        let mut t = self.clone();
        t.coeffs[n] = c;
        t
    }
}

/// Partial sums, squared norms and energies from coefficient balls.
///
/// `D(1) = c_1^2`, `D(2) = D(1) + 2 c_2 (2 s_1 - c_1 - 2) + 4 c_2^2 / 3`, and
/// for `k >= 2`
/// `D(k+1) = D(k) + (k+1) c_{k+1} (2 s_k - c_k) + (k+1)^2 c_{k+1}^2 / (2k+1)`.
pub fn derive_columns(
    coeffs: &[BallReal],
    precision_bits: u32,
) -> (Vec<BallReal>, Vec<BallReal>, Vec<BallReal>) {
    let wp = precision_bits + DERIVED_GUARD;
    let mut sums = Vec::with_capacity(coeffs.len());
    let mut norms = Vec::with_capacity(coeffs.len());
    let mut energies = Vec::with_capacity(coeffs.len());
    let mut s = BallReal::zero(wp);
    let mut norm = BallReal::one(wp);
    for (n, c) in coeffs.iter().enumerate() {
        let c = c.clone().with_precision(wp);
        let d = match n {
            0 => BallReal::zero(wp),
            1 => c.sqr(),
            _ => {
                let k1 = n as i64;
                let prev = coeffs[n - 1].clone().with_precision(wp);
                // 2 <p_k', x^k> with k = n - 1; <p_0, x^0> = 1 adds -2 at k = 1
                let mut bracket = s.mul_2exp(1).sub(&prev);
                if n == 2 {
                    bracket = bracket.sub(&BallReal::from_i64(2, wp));
                }
                let cross = c.mul(&bracket).mul_i64(k1);
                let square = c.sqr().mul_i64(k1 * k1).div_i64(2 * k1 - 1);
                energies
                    .last()
                    .map(|e: &BallReal| e.add(&cross).add(&square))
                    .expect("n >= 2")
            }
        };
        s = s.add(&c);
        if n > 0 {
            norm = norm.sub(&c.sqr().div_i64(2 * n as i64 + 1));
        }
        sums.push(s.clone());
        norms.push(norm.clone());
        energies.push(d);
    }
    (sums, norms, energies)
}

/// Progress report from the ball engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BallProgress {
    pub n: usize,
    pub n_max: usize,
    pub precision_bits: u32,
}

/// Ball table with the given tolerance and starting precision.
pub fn ball_coefficients(
    n_max: usize,
    target_rel_radius: f64,
    initial_precision_bits: u32,
) -> Result<BallCoefficientTable> {
    let opts = BallOptions {
        target_rel_radius,
        initial_precision: Some(initial_precision_bits),
        ..BallOptions::default()
    };
    ball_coefficients_with(n_max, &opts, &mut |_| {})
}

/// First index whose coefficient misses the relative radius target.
fn first_failure(
    mids: &[BigInt],
    radii: &[Mag],
    frac_bits: u32,
    target: &BigFloat,
) -> Option<usize> {
    mids.iter().zip(radii).position(|(m, r)| {
        if r.is_zero() {
            return false;
        }
        // need r <= target |m| 2^-F
        let allowed = target.mul_exact(&BigFloat::from_parts(
            m.magnitude().clone().into(),
            -(frac_bits as i64),
        ));
        r.as_float().cmp(&allowed) == Ordering::Greater
    })
}

/// Ball table with escalation: the precision doubles until every `c_n` meets
/// the relative radius target or `max_precision` would be exceeded.
pub fn ball_coefficients_with(
    n_max: usize,
    opts: &BallOptions,
    progress: &mut dyn FnMut(BallProgress),
) -> Result<BallCoefficientTable> {
    if n_max < 1 {
        return Err(Error::InvalidArgument(
            "ball engine needs n_max >= 1".into(),
        ));
    }
    if !(opts.target_rel_radius > 0.0 && opts.target_rel_radius.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "target relative radius must be positive, got {}",
            opts.target_rel_radius
        )));
    }
    let target = BigFloat::from_f64(opts.target_rel_radius)?;
    let mut prec = opts
        .initial_precision
        .unwrap_or_else(|| default_precision(n_max))
        .max(16);
    let mut best_failure = None;
    loop {
        if prec > opts.max_precision {
            let failed_n: usize = best_failure.unwrap_or(0);
            return Err(Error::MaxPrecisionExceeded {
                achieved_n: failed_n.saturating_sub(1),
                failed_n,
                precision_bits: prec / 2,
            });
        }
        let mids = fixed_point_coefficients(n_max, prec, &mut |n| {
            if n % 256 == 0 || n == n_max {
                progress(BallProgress {
                    n,
                    n_max,
                    precision_bits: prec,
                })
            }
        })?;
        let radii = propagated_radius(n_max, prec);
        match first_failure(&mids, &radii, prec, &target) {
            None => {
                let coeffs = mids
                    .into_iter()
                    .zip(radii)
                    .map(|(m, r)| BallReal::new(BigFloat::from_parts(m, -(prec as i64)), r, prec))
                    .collect();
                return BallCoefficientTable::from_coefficients(coeffs, prec);
            }
            Some(n) => {
                best_failure = Some(n);
                prec = prec.saturating_mul(2);
            }
        }
    }
}

/// Rigorous bracket for `K = lim |p_n|^2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KEstimate {
    #[serde(serialize_with = "serialize_float")]
    pub lower: BigFloat,
    #[serde(serialize_with = "serialize_float")]
    pub upper: BigFloat,
    pub n_used: usize,
}

fn serialize_float<S: serde::Serializer>(
    x: &BigFloat,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(x.to_f64())
}

impl KEstimate {
    pub fn width(&self) -> BigFloat {
        self.upper.sub(&self.lower, 64, Round::Up)
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        &self.lower.to_rational() <= q && q <= &self.upper.to_rational()
    }

    /// Whether `[lo, hi]` meets the bracket.
    pub fn intersects(&self, lo: &BigRational, hi: &BigRational) -> bool {
        &self.lower.to_rational() <= hi && lo <= &self.upper.to_rational()
    }
}

/// Upper bound of `sum_{k>n} 30782/(k^3 (2k+1))`, namely `30782/(6 n^3)`.
pub fn k_tail_bound(n: usize) -> Mag {
    let n3 = BigFloat::from_bigint(BigInt::from(n).pow(3) * 6);
    Mag::from_u64(30782).div_lower(&n3)
}

/// `|p_n|^2` decreases to `K`, and its decrements `c_k^2/(2k+1)` for `k > n`
/// sum to at most [`k_tail_bound`] because `c_k^2 < 30782/k^3`.
pub fn estimate_k(table: &BallCoefficientTable) -> Result<KEstimate> {
    let n = table.n_max();
    if n < 2 {
        return Err(Error::InvalidArgument("K estimate needs n_max >= 2".into()));
    }
    let norm = &table.norms_sq()[n];
    let upper = norm.upper();
    let tail = k_tail_bound(n);
    let lower = norm
        .lower()
        .sub(tail.as_float(), norm.precision(), Round::Down);
    Ok(KEstimate {
        lower,
        upper,
        n_used: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::real::ratio;
    use crate::exact::exact_coefficients;

    #[test]
    fn contains_first_coefficients() {
        let t = ball_coefficients(5, 1e-10, 64).unwrap();
        let listed = [
            ratio(1, 1),
            ratio(-3, 2),
            ratio(5, 24),
            ratio(77, 720),
            ratio(277, 4480),
            ratio(140173, 3628800),
        ];
        for (b, q) in t.coeffs().iter().zip(&listed) {
            assert!(b.contains_rational(q));
        }
        assert!(t.coeff(0).is_exact());
    }

    #[test]
    fn all_columns_contain_exact_values() {
        let exact = exact_coefficients(150).unwrap();
        let ball = ball_coefficients(150, 1e-15, 96).unwrap();
        for n in 0..=150 {
            assert!(
                ball.coeffs()[n].contains_rational(&exact.coeffs()[n]),
                "c {n}"
            );
            assert!(
                ball.partial_sums()[n].contains_rational(&exact.partial_sums()[n]),
                "s {n}"
            );
            assert!(
                ball.norms_sq()[n].contains_rational(&exact.norms_sq()[n]),
                "norm {n}"
            );
            assert!(
                ball.energies()[n].contains_rational(&exact.energies()[n]),
                "D {n}"
            );
        }
    }

    #[test]
    fn escalation_doubles_precision() {
        let t = ball_coefficients(300, 1e-25, 32).unwrap();
        assert!(t.precision_bits() >= 128);
        assert_eq!(t.precision_bits() % 32, 0);
        let err = ball_coefficients_with(
            300,
            &BallOptions {
                target_rel_radius: 1e-25,
                initial_precision: Some(32),
                max_precision: 64,
            },
            &mut |_| {},
        )
        .unwrap_err();
        assert!(
            matches!(
                err,
                Error::MaxPrecisionExceeded {
                    precision_bits: 64,
                    ..
                }
            ),
            "{err}"
        );
    }

    #[test]
    fn escalated_balls_nest() {
        let lo = ball_coefficients(200, 1e-6, 80).unwrap();
        let hi = ball_coefficients(200, 1e-6, 160).unwrap();
        for n in 0..=200 {
            assert!(lo.coeff(n).contains_ball(hi.coeff(n)), "n = {n}");
        }
    }

    #[test]
    fn deterministic_output() {
        let a = ball_coefficients(120, 1e-10, 96).unwrap();
        let b = ball_coefficients(120, 1e-10, 96).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn k_for_two_terms() {
        let t = ball_coefficients(2, 1e-10, 128).unwrap();
        let k = estimate_k(&t).unwrap();
        // 1 - (9/4)/3 - (5/24)^2/5
        let upper = ratio(1, 4) - ratio(25, 576) / ratio(5, 1);
        assert!(t.norms_sq()[2].contains_rational(&upper));
        assert!(k.upper.to_rational() >= upper);
        assert!(k.lower.to_rational() <= upper - ratio(30782, 48));
    }

    #[test]
    fn promotion_from_exact() {
        let exact = exact_coefficients(40).unwrap();
        let ball = BallCoefficientTable::from_exact(&exact, 128);
        for n in 0..=40 {
            assert!(ball.energies()[n].contains_rational(&exact.energies()[n]));
        }
        assert!(ball.coeff(0).is_exact());
    }

    #[test]
    fn invalid_requests() {
        assert!(ball_coefficients(0, 1e-10, 64).is_err());
        assert!(ball_coefficients(5, 0.0, 64).is_err());
        assert!(estimate_k(&ball_coefficients(1, 1e-5, 64).unwrap()).is_err());
    }
}
