//! Per-index inequalities on coefficient tables, and exact-versus-ball
//! cross-validation.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::Serialize;

use crate::ball::{BallCoefficientTable, BallReal, BigFloat, Mag};
use crate::error::{Error, Result};
use crate::exact::{ExactCoefficientTable, ExactRational};

/// Outcome of one comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Indeterminate,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Indeterminate => "indeterminate",
        })
    }
}

/// The six inequalities, with the first index each is asserted for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum InequalityId {
    /// `c_n^2 <= D(n)/n^3`, `n >= 2`.
    #[serde(rename = "lemma1")]
    Lemma1,
    /// `s_n^2 <= D(n)/(2n+3)`, `n >= 1`.
    #[serde(rename = "lemma2")]
    Lemma2,
    /// `D(n) <= n s_n^2 + (n+1) c_n^2/2 + sum_{k<n} (k+1) c_k^2`, `n >= 1`.
    #[serde(rename = "lemma3")]
    Lemma3,
    /// `c_n^2 <= (4/n^3) sum_{k<n} (k+1) c_k^2`, `n >= 2`.
    #[serde(rename = "recursive_bound")]
    RecursiveBound,
    /// `c_n^2 <= 32/n`, `n >= 1`.
    #[serde(rename = "prac")]
    Prac,
    /// `c_n^2 < 30782/n^3`, `n >= 1`.
    #[serde(rename = "theorem_constant")]
    TheoremConstant,
}

impl InequalityId {
    pub const ALL: [InequalityId; 6] = [
        InequalityId::Lemma1,
        InequalityId::Lemma2,
        InequalityId::Lemma3,
        InequalityId::RecursiveBound,
        InequalityId::Prac,
        InequalityId::TheoremConstant,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InequalityId::Lemma1 => "lemma1",
            InequalityId::Lemma2 => "lemma2",
            InequalityId::Lemma3 => "lemma3",
            InequalityId::RecursiveBound => "recursive_bound",
            InequalityId::Prac => "prac",
            InequalityId::TheoremConstant => "theorem_constant",
        }
    }

    pub fn first_index(self) -> usize {
        match self {
            InequalityId::Lemma1 | InequalityId::RecursiveBound => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InequalityRecord {
    pub n: usize,
    pub inequality_id: InequalityId,
    pub status: Status,
    /// For indeterminate ball comparisons: precision likely to settle it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub needed_precision_bits: Option<u32>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct StatusCounts {
    pub pass: usize,
    pub fail: usize,
    pub indeterminate: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InequalityReport {
    pub range: (usize, usize),
    pub records: Vec<InequalityRecord>,
}

impl InequalityReport {
    pub fn counts(&self) -> BTreeMap<InequalityId, StatusCounts> {
        let mut out: BTreeMap<InequalityId, StatusCounts> = InequalityId::ALL
            .iter()
            .map(|&id| (id, StatusCounts::default()))
            .collect();
        for r in &self.records {
            let c = out.get_mut(&r.inequality_id).expect("all ids present");
            match r.status {
                Status::Pass => c.pass += 1,
                Status::Fail => c.fail += 1,
                Status::Indeterminate => c.indeterminate += 1,
            }
        }
        out
    }

    pub fn failures(&self) -> impl Iterator<Item = &InequalityRecord> {
        self.records.iter().filter(|r| r.status == Status::Fail)
    }

    pub fn indeterminates(&self) -> impl Iterator<Item = &InequalityRecord> {
        self.records
            .iter()
            .filter(|r| r.status == Status::Indeterminate)
    }

    /// Fail if anything failed, else indeterminate if anything was, else pass.
    pub fn overall(&self) -> Status {
        if self.failures().next().is_some() {
            Status::Fail
        } else if self.indeterminates().next().is_some() {
            Status::Indeterminate
        } else {
            Status::Pass
        }
    }
}

/// Arithmetic needed by the inequality checks, for exact and ball values.
pub trait Scalar: Clone {
    fn int_like(v: i64, like: &Self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div_int(&self, d: i64) -> Self;
    /// Sign test of `self >= 0` (or `> 0` when `strict`).
    fn nonneg(&self, strict: bool) -> (Status, Option<u32>);
}

impl Scalar for BigRational {
    fn int_like(v: i64, _: &Self) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div_int(&self, d: i64) -> Self {
        self / BigRational::from_integer(BigInt::from(d))
    }
    fn nonneg(&self, strict: bool) -> (Status, Option<u32>) {
        let ok = if strict {
            self.is_positive()
        } else {
            !self.is_negative()
        };
        (if ok { Status::Pass } else { Status::Fail }, None)
    }
}

impl Scalar for BallReal {
    fn int_like(v: i64, like: &Self) -> Self {
        BallReal::from_i64(v, like.precision())
    }
    fn add(&self, other: &Self) -> Self {
        BallReal::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        BallReal::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        BallReal::mul(self, other)
    }
    fn div_int(&self, d: i64) -> Self {
        self.div_i64(d)
    }
    fn nonneg(&self, strict: bool) -> (Status, Option<u32>) {
        let lo = self.lower();
        let hi = self.upper();
        let pass = if strict {
            lo.signum() > 0
        } else {
            lo.signum() >= 0
        };
        let fail = if strict {
            hi.signum() <= 0
        } else {
            hi.signum() < 0
        };
        if pass {
            (Status::Pass, None)
        } else if fail {
            (Status::Fail, None)
        } else {
            // the radius must shrink below |mid|; assume it scales like 2^-prec
            let need = if self.mid().is_zero() {
                self.precision().saturating_mul(2)
            } else {
                let gap = self.rad().log2() - Mag::from_abs(self.mid()).log2();
                self.precision() + gap.max(0.0).ceil() as u32 + 8
            };
            (Status::Indeterminate, Some(need))
        }
    }
}

/// Read access to the columns the inequalities use.
pub trait CoefficientColumns {
    type Value: Scalar;
    fn n_max(&self) -> usize;
    fn coeff_value(&self, n: usize) -> Self::Value;
    fn partial_sum_value(&self, n: usize) -> Self::Value;
    fn energy_value(&self, n: usize) -> Self::Value;
}

impl CoefficientColumns for ExactCoefficientTable {
    type Value = ExactRational;
    fn n_max(&self) -> usize {
        ExactCoefficientTable::n_max(self)
    }
    fn coeff_value(&self, n: usize) -> ExactRational {
        self.coeffs()[n].clone()
    }
    fn partial_sum_value(&self, n: usize) -> ExactRational {
        self.partial_sums()[n].clone()
    }
    fn energy_value(&self, n: usize) -> ExactRational {
        self.energies()[n].clone()
    }
}

impl CoefficientColumns for BallCoefficientTable {
    type Value = BallReal;
    fn n_max(&self) -> usize {
        BallCoefficientTable::n_max(self)
    }
    fn coeff_value(&self, n: usize) -> BallReal {
        let wp = self.precision_bits() + 64;
        self.coeffs()[n].clone().with_precision(wp)
    }
    fn partial_sum_value(&self, n: usize) -> BallReal {
        self.partial_sums()[n].clone()
    }
    fn energy_value(&self, n: usize) -> BallReal {
        self.energies()[n].clone()
    }
}

/// Check all six inequalities for every `n` in `[n_lo, n_hi]` where each
/// applies.
pub fn verify_inequality_suite<T: CoefficientColumns>(
    table: &T,
    n_lo: usize,
    n_hi: usize,
) -> Result<InequalityReport> {
    if n_lo > n_hi || n_hi > table.n_max() {
        return Err(Error::InvalidArgument(format!(
            "range [{n_lo}, {n_hi}] outside table 0..={}",
            table.n_max()
        )));
    }
    let like = table.coeff_value(0);
    let int = |v: i64| T::Value::int_like(v, &like);
    // sum_{k<n} (k+1) c_k^2
    let mut weighted = int(0);
    let mut records = Vec::new();
    for n in 0..=n_hi {
        let c = table.coeff_value(n);
        let c2 = c.mul(&c);
        if n >= n_lo {
            let s = table.partial_sum_value(n);
            let d = table.energy_value(n);
            let ni = n as i64;
            let mut check = |id: InequalityId, slack: T::Value, strict: bool| {
                if n >= id.first_index() {
                    let (status, needed_precision_bits) = slack.nonneg(strict);
                    records.push(InequalityRecord {
                        n,
                        inequality_id: id,
                        status,
                        needed_precision_bits,
                    });
                }
            };
            if n >= 1 {
                let n3 = ni * ni * ni;
                check(InequalityId::Lemma1, d.div_int(n3).sub(&c2), false);
                check(
                    InequalityId::Lemma2,
                    d.div_int(2 * ni + 3).sub(&s.mul(&s)),
                    false,
                );
                let rhs = s
                    .mul(&s)
                    .mul(&int(ni))
                    .add(&c2.mul(&int(ni + 1)).div_int(2))
                    .add(&weighted);
                check(InequalityId::Lemma3, rhs.sub(&d), false);
                check(
                    InequalityId::RecursiveBound,
                    weighted.mul(&int(4)).div_int(n3).sub(&c2),
                    false,
                );
                check(InequalityId::Prac, int(32).div_int(ni).sub(&c2), false);
                check(
                    InequalityId::TheoremConstant,
                    int(30782).div_int(n3).sub(&c2),
                    true,
                );
            }
        }
        weighted = weighted.add(&c2.mul(&int(n as i64 + 1)));
    }
    Ok(InequalityReport {
        range: (n_lo, n_hi),
        records,
    })
}

/// Result of [`cross_validate`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossValidation {
    pub overlap: usize,
    pub values_checked: usize,
    /// Largest `|mid - exact| / radius` over entries with nonzero radius.
    pub max_normalized_discrepancy: f64,
}

/// Check that every exact value on the common range lies in its ball, for
/// coefficients, partial sums, squared norms and energies.
pub fn cross_validate(
    exact: &ExactCoefficientTable,
    ball: &BallCoefficientTable,
) -> Result<CrossValidation> {
    let overlap = exact.n_max().min(ball.n_max());
    let mut worst = 0.0f64;
    let mut checked = 0;
    let columns: [(&str, &[ExactRational], &[BallReal]); 4] = [
        ("c", exact.coeffs(), ball.coeffs()),
        ("s", exact.partial_sums(), ball.partial_sums()),
        ("norm_sq", exact.norms_sq(), ball.norms_sq()),
        ("D", exact.energies(), ball.energies()),
    ];
    for (name, xs, bs) in columns {
        for n in 0..=overlap {
            let (x, b) = (&xs[n], &bs[n]);
            if !b.contains_rational(x) {
                return Err(Error::Containment {
                    n,
                    detail: format!("{name}: exact value outside {b:?}"),
                });
            }
            checked += 1;
            if !b.rad().is_zero() {
                let dev = (b.mid().to_rational() - x).abs();
                let r = b.rad().as_float().to_rational();
                let ratio = BigFloat::div_integers(
                    &(dev.numer() * r.denom()),
                    &(dev.denom() * r.numer()),
                    53,
                    crate::ball::Round::Nearest,
                )
                .to_f64();
                worst = worst.max(ratio);
            }
        }
    }
    Ok(CrossValidation {
        overlap: overlap + 1,
        values_checked: checked,
        max_normalized_discrepancy: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::ball_coefficients;
    use crate::ball::real::ratio;
    use crate::exact::exact_coefficients;

    #[test]
    fn exact_suite_passes_on_small_range() {
        let t = exact_coefficients(200).unwrap();
        let r = verify_inequality_suite(&t, 2, 200).unwrap();
        assert_eq!(r.overall(), Status::Pass);
        assert_eq!(r.records.len(), 6 * 199);
    }

    #[test]
    fn lemma1_skipped_at_one() {
        let t = exact_coefficients(3).unwrap();
        let r = verify_inequality_suite(&t, 1, 1).unwrap();
        assert!(r
            .records
            .iter()
            .all(|x| x.inequality_id != InequalityId::Lemma1));
        assert!(r
            .records
            .iter()
            .all(|x| x.inequality_id != InequalityId::RecursiveBound));
        assert_eq!(r.records.len(), 4);
    }

    #[test]
    fn ball_suite_matches_exact_suite() {
        let e = exact_coefficients(120).unwrap();
        let b = ball_coefficients(120, 1e-20, 128).unwrap();
        let re = verify_inequality_suite(&e, 1, 120).unwrap();
        let rb = verify_inequality_suite(&b, 1, 120).unwrap();
        assert_eq!(re, rb);
    }

    #[test]
    fn ball_comparisons_are_three_valued() {
        let fuzzy = BallReal::from_i64(0, 64).inflate(&Mag::pow2(-10));
        assert_eq!(fuzzy.nonneg(false).0, Status::Indeterminate);
        assert!(fuzzy.nonneg(false).1.is_some());
        assert_eq!(BallReal::from_i64(0, 64).nonneg(false).0, Status::Pass);
        assert_eq!(BallReal::from_i64(0, 64).nonneg(true).0, Status::Fail);
        assert_eq!(ratio(-1, 3).nonneg(false).0, Status::Fail);
    }

    #[test]
    fn cross_validation_and_corruption() {
        let e = exact_coefficients(60).unwrap();
        let b = ball_coefficients(80, 1e-15, 96).unwrap();
        let cv = cross_validate(&e, &b).unwrap();
        assert_eq!(cv.overlap, 61);
        assert_eq!(cv.values_checked, 4 * 61);
        assert!(cv.max_normalized_discrepancy <= 1.0);
        let shifted = b
            .coeff(7)
            .add(&BallReal::from_rational(&ratio(1, 1000), 96));
        let bad = b.with_coefficient(7, shifted);
        match cross_validate(&e, &bad) {
            Err(Error::Containment { n, .. }) => assert_eq!(n, 7),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn report_serializes_with_schema_names() {
        let t = exact_coefficients(2).unwrap();
        let r = verify_inequality_suite(&t, 2, 2).unwrap();
        let v = serde_json::to_value(&r.records[0]).unwrap();
        assert_eq!(v["n"], 2);
        assert_eq!(v["inequality_id"], "lemma1");
        assert_eq!(v["status"], "pass");
        assert!(v.get("needed_precision_bits").is_none());
    }
}
