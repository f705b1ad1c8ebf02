//! Sign changes, decay-exponent estimates and oscillation diagnostics.

use std::cmp::Ordering;

use serde::Serialize;

use crate::ball::elementary::{ln, ln_u64};
use crate::ball::{BallCoefficientTable, BallReal, BigFloat};
use crate::error::{Error, Result};
use crate::exact::ExactCoefficientTable;

/// Precision used to turn exact coefficients into balls for analysis.
const EXACT_VIEW_PRECISION: u32 = 128;

/// Uniform read access to a coefficient sequence as balls.
pub trait SequenceView {
    fn n_max(&self) -> usize;
    fn ball(&self, n: usize) -> BallReal;
}

impl SequenceView for BallCoefficientTable {
    fn n_max(&self) -> usize {
        BallCoefficientTable::n_max(self)
    }
    fn ball(&self, n: usize) -> BallReal {
        self.coeff(n).clone()
    }
}

impl SequenceView for ExactCoefficientTable {
    fn n_max(&self) -> usize {
        ExactCoefficientTable::n_max(self)
    }
    fn ball(&self, n: usize) -> BallReal {
        BallReal::from_rational(self.coeff(n), EXACT_VIEW_PRECISION)
    }
}

/// A sequence given by `f64` samples, each taken as an exact point. Used to
/// exercise the estimators on sequences with known parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledSequence {
    values: Vec<f64>,
}

impl SampledSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "samples must be finite and nonempty".into(),
            ));
        }
        Ok(SampledSequence { values })
    }

    /// `a_n = f(n)` for `n = 0..=n_max`.
    pub fn from_fn(n_max: usize, f: impl Fn(usize) -> f64) -> Result<Self> {
        SampledSequence::new((0..=n_max).map(f).collect())
    }
}

impl SequenceView for SampledSequence {
    fn n_max(&self) -> usize {
        self.values.len() - 1
    }
    fn ball(&self, n: usize) -> BallReal {
        BallReal::exact(BigFloat::from_f64(self.values[n]).expect("finite"), 64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignChangeReport {
    /// Every `N` with `a_N a_{N+1} < 0`, both signs certified.
    pub indices: Vec<usize>,
    /// Consecutive ratios `t_{k+1}/t_k` of the nonzero indices.
    pub ratios: Vec<f64>,
    /// Indices whose sign could not be certified.
    pub ambiguous: Vec<usize>,
    /// Whether `indices` starts with 0, which the formal definition
    /// (`N > 0`) excludes but which is reported anyway.
    pub includes_zero: bool,
}

impl SignChangeReport {
    /// `N + 1` for each reported `N`: the first index carrying the new sign.
    pub fn first_indices_of_new_sign(&self) -> Vec<usize> {
        self.indices.iter().map(|n| n + 1).collect()
    }
}

/// All certified sign changes `N` in `[0, n_max - 1]`.
pub fn detect_sign_changes<V: SequenceView + ?Sized>(seq: &V) -> SignChangeReport {
    let n_max = seq.n_max();
    let signs: Vec<Option<Ordering>> = (0..=n_max)
        .map(|n| seq.ball(n).sign().filter(|s| *s != Ordering::Equal))
        .collect();
    let mut indices = Vec::new();
    let mut ambiguous = Vec::new();
    for (n, s) in signs.iter().enumerate() {
        if s.is_none() {
            ambiguous.push(n);
        }
    }
    for n in 0..n_max {
        if let (Some(a), Some(b)) = (signs[n], signs[n + 1]) {
            if a != b {
                indices.push(n);
            }
        }
    }
    let ratios = sign_change_ratios(&indices).unwrap_or_default();
    SignChangeReport {
        includes_zero: indices.first() == Some(&0),
        indices,
        ratios,
        ambiguous,
    }
}

/// `t_{k+1}/t_k` over the nonzero indices.
pub fn sign_change_ratios(indices: &[usize]) -> Result<Vec<f64>> {
    let usable: Vec<usize> = indices.iter().copied().filter(|&t| t > 0).collect();
    if usable.len() < 2 {
        return Err(Error::Insufficient(format!(
            "need two nonzero sign-change indices, have {}",
            usable.len()
        )));
    }
    Ok(usable
        .windows(2)
        .map(|w| w[1] as f64 / w[0] as f64)
        .collect())
}

/// `ln|a_n| / ln n` as a ball.
pub fn delta_point_estimate<V: SequenceView + ?Sized>(seq: &V, n: usize) -> Result<BallReal> {
    if n < 2 || n > seq.n_max() {
        return Err(Error::InvalidArgument(format!(
            "delta estimate needs 2 <= n <= {}, got {n}",
            seq.n_max()
        )));
    }
    let c = seq.ball(n);
    if !c.excludes_zero() {
        return Err(Error::Indeterminate(format!(
            "|c_{n}| is not bounded away from zero"
        )));
    }
    let prec = c.precision().max(64);
    let num = ln(&c.abs().with_precision(prec))?;
    num.div(&ln_u64(n as u64, prec))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaEstimate {
    /// `(n, ln|a_n| / ln n)` for every certified point in the window.
    pub point_estimates: Vec<(usize, f64)>,
    /// Least-squares slope through the upper envelope in log-log space.
    pub envelope_slope: f64,
    /// Two standard errors of the slope; infinite with fewer than three
    /// envelope points.
    pub half_width: f64,
    pub window: (usize, usize),
    /// Indices of the envelope points used in the fit.
    pub envelope: Vec<usize>,
}

/// Upper convex hull of points sorted by `x`, keeping collinear points.
fn upper_hull(points: &[(f64, f64, usize)]) -> Vec<(f64, f64, usize)> {
    let mut hull: Vec<(f64, f64, usize)> = Vec::new();
    for &p in points {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            // drop b when it lies strictly below the chord a-p
            let scale = (p.0 - a.0).abs() * (1.0 + a.1.abs().max(p.1.abs()));
            if cross > 1e-12 * scale {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// Slope of `ln|a_n|` against `ln n` along the upper envelope of the points
/// in `[n_lo, n_hi]`. Heuristic: the envelope of an oscillating sequence
/// touches it only near lobe maxima.
pub fn fit_envelope_slope<V: SequenceView + ?Sized>(
    seq: &V,
    n_lo: usize,
    n_hi: usize,
) -> Result<DeltaEstimate> {
    let n_hi = n_hi.min(seq.n_max());
    let lo = n_lo.max(2);
    let mut points = Vec::new();
    let mut estimates = Vec::new();
    for n in lo..=n_hi {
        let c = seq.ball(n);
        if !c.excludes_zero() {
            continue;
        }
        let ln_n = (n as f64).ln();
        let v = c.mid().abs();
        let ln_c = log_abs(&v);
        points.push((ln_n, ln_c, n));
        estimates.push((n, ln_c / ln_n));
    }
    if points.len() < 10 {
        return Err(Error::Insufficient(format!(
            "window [{n_lo}, {n_hi}] has {} certified points, need 10",
            points.len()
        )));
    }
    let mut hull = upper_hull(&points);
    // the window endpoints are always on the hull, whether or not they sit
    // on a lobe maximum
    if hull.len() >= 5 {
        hull.pop();
        hull.remove(0);
    }
    let m = hull.len() as f64;
    let mx = hull.iter().map(|p| p.0).sum::<f64>() / m;
    let my = hull.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = hull.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = hull.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let half_width = if hull.len() >= 3 {
        let rss: f64 = hull
            .iter()
            .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
            .sum();
        2.0 * (rss / (m - 2.0) / sxx).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(DeltaEstimate {
        point_estimates: estimates,
        envelope_slope: slope,
        half_width,
        window: (n_lo, n_hi),
        envelope: hull.iter().map(|p| p.2).collect(),
    })
}

/// Natural log of a positive float of any exponent, as `f64`.
fn log_abs(x: &BigFloat) -> f64 {
    let top = x.top();
    x.mul_2exp(-top).to_f64().ln() + top as f64 * std::f64::consts::LN_2
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OscillationFit {
    /// `pi / ln(t_{k+1}/t_k)` for consecutive nonzero sign changes.
    pub period_estimates: Vec<f64>,
    /// The last consecutive ratio, the best available proxy for its limit.
    pub limiting_ratio_estimate: f64,
}

/// Frequency estimates from sign-change spacing: zeros of `sin(P ln n)` are
/// `pi/P` apart in `ln n`.
pub fn fit_oscillation(report: &SignChangeReport) -> Result<OscillationFit> {
    let ratios = sign_change_ratios(&report.indices)?;
    Ok(OscillationFit {
        period_estimates: ratios
            .iter()
            .map(|r| std::f64::consts::PI / r.ln())
            .collect(),
        limiting_ratio_estimate: *ratios.last().expect("nonempty"),
    })
}

/// Combined report in the analysis JSON schema.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub indices: Vec<usize>,
    pub ratios: Vec<f64>,
    pub ambiguous: Vec<usize>,
    pub delta: DeltaSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaSummary {
    pub points: Vec<(usize, f64)>,
    pub slope: Option<f64>,
    pub half_width: Option<f64>,
}

impl AnalysisReport {
    pub fn new(
        signs: &SignChangeReport,
        points: Vec<(usize, f64)>,
        fit: Option<&DeltaEstimate>,
    ) -> Self {
        AnalysisReport {
            indices: signs.indices.clone(),
            ratios: signs.ratios.clone(),
            ambiguous: signs.ambiguous.clone(),
            delta: DeltaSummary {
                points,
                slope: fit.map(|f| f.envelope_slope),
                half_width: fit.map(|f| f.half_width).filter(|h| h.is_finite()),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::ball_coefficients;
    use crate::exact::exact_coefficients;

    #[test]
    fn first_sign_changes() {
        let t = exact_coefficients(5).unwrap();
        let r = detect_sign_changes(&t);
        assert_eq!(r.indices, vec![0, 1]);
        assert!(r.includes_zero);
        assert!(r.ambiguous.is_empty());
        // c_26 > 0 > c_27
        let t = exact_coefficients(100).unwrap();
        let r = detect_sign_changes(&t);
        assert_eq!(r.indices, vec![0, 1, 26]);
        assert_eq!(r.first_indices_of_new_sign(), vec![1, 2, 27]);
    }

    #[test]
    fn exact_and_ball_agree() {
        let e = exact_coefficients(300).unwrap();
        let b = ball_coefficients(300, 1e-20, 128).unwrap();
        assert_eq!(detect_sign_changes(&e), detect_sign_changes(&b));
    }

    #[test]
    fn ratios_skip_zero() {
        let r = sign_change_ratios(&[0, 1, 27, 533, 10457]).unwrap();
        assert_eq!(r[0], 27.0);
        assert!((r[1] - 19.740_740_7).abs() < 1e-6);
        assert!((r[2] - 19.619_136_9).abs() < 1e-6);
        assert!(sign_change_ratios(&[0, 1]).is_err());
        assert_eq!(sign_change_ratios(&[1, 27]).unwrap(), vec![27.0]);
    }

    #[test]
    fn delta_at_two() {
        let t = exact_coefficients(5).unwrap();
        let d = delta_point_estimate(&t, 2).unwrap();
        let expect = (5.0f64 / 24.0).ln() / 2f64.ln();
        assert!((d.to_f64() - expect).abs() < 1e-14);
        assert!(delta_point_estimate(&t, 1).is_err());
        let z = SampledSequence::new(vec![1.0, 0.5, 0.0]).unwrap();
        assert!(matches!(
            delta_point_estimate(&z, 2),
            Err(Error::Indeterminate(_))
        ));
    }

    #[test]
    fn power_law_fixture_recovers_slope() {
        let seq = SampledSequence::from_fn(400, |n| if n == 0 { 1.0 } else { (n as f64).powi(-2) })
            .unwrap();
        let fit = fit_envelope_slope(&seq, 2, 400).unwrap();
        assert!(
            (fit.envelope_slope + 2.0).abs() < 1e-6,
            "{}",
            fit.envelope_slope
        );
        assert!(fit.half_width < 1e-6);
        assert!(fit_envelope_slope(&seq, 2, 5).is_err());
    }

    #[test]
    fn oscillating_fixture_recovers_parameters() {
        let (delta0, p0, phi0) = (1.5f64, 4.0f64, 0.3f64);
        let seq = SampledSequence::from_fn(200_000, |n| {
            if n == 0 {
                1.0
            } else {
                let x = n as f64;
                x.powf(-delta0) * (p0 * x.ln() + phi0).sin()
            }
        })
        .unwrap();
        let r = detect_sign_changes(&seq);
        let osc = fit_oscillation(&r).unwrap();
        // zeros of sin(P ln n + phi) are pi/P apart in ln n
        let last = osc.period_estimates.last().unwrap();
        assert!((last - p0).abs() < 0.01, "{last}");
        let fit = fit_envelope_slope(&seq, 100, 200_000).unwrap();
        assert!(
            (fit.envelope_slope + delta0).abs() < 0.02,
            "{}",
            fit.envelope_slope
        );
    }

    #[test]
    fn hull_keeps_collinear_points() {
        let pts: Vec<(f64, f64, usize)> = (0..5).map(|i| (i as f64, -(i as f64), i)).collect();
        assert_eq!(upper_hull(&pts).len(), 5);
        let bumpy = vec![(0.0, 0.0, 0), (1.0, -5.0, 1), (2.0, 0.0, 2)];
        assert_eq!(upper_hull(&bumpy).len(), 2);
    }
}
