//! Generating-function and Dirichlet-series identities: `G_n(t)`, the
//! functional and integral equations, the harmonic series identities and
//! partial sums of `C(s) = sum c_n n^{-s}`.

use gauss_quad::GaussLegendre;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::ball::elementary::{exp, ln, ln_u64, pi, pow, sin_cos};
use crate::ball::{BallCoefficientTable, BallReal, BigFloat, ComplexBall, Mag};
use crate::error::{Error, Result};
use crate::inequalities::Status;

/// `c_n^2 < 30782/n^3` for every `n >= 1`; all tail majorants use it.
pub const COEFFICIENT_BOUND_SQ: i64 = 30782;

fn majorant_constant(prec: u32) -> BallReal {
    BallReal::from_i64(COEFFICIENT_BOUND_SQ, prec)
        .sqrt()
        .expect("positive constant")
}

fn upper_mag(b: &BallReal) -> Mag {
    let u = b.upper();
    if u.is_negative() {
        Mag::zero()
    } else {
        Mag::from_upper(&u)
    }
}

/// `n^{3/2}` as a ball.
fn pow_three_halves(n: usize, prec: u32) -> BallReal {
    let x = BallReal::from_i64(n as i64, prec);
    x.mul(&x.sqrt().expect("nonnegative"))
}

fn check_t(t: &BigRational) -> Result<()> {
    if t.is_negative() || *t >= BigRational::one() {
        return Err(Error::InvalidArgument(format!(
            "t must lie in [0, 1), got {t}"
        )));
    }
    Ok(())
}

fn check_n(table: &BallCoefficientTable, n: usize) -> Result<()> {
    if n > table.n_max() {
        return Err(Error::InvalidArgument(format!(
            "truncation N = {n} exceeds table n_max = {}",
            table.n_max()
        )));
    }
    Ok(())
}

/// Pass when `|value| + extra <= tol`, fail when `|value| - extra > tol`.
pub fn verdict(value: &BallReal, extra: &Mag, tol: f64) -> Status {
    let tol = match BigFloat::from_f64(tol) {
        Ok(t) => t,
        Err(_) => return Status::Indeterminate,
    };
    let hi = value.abs_upper().add(extra);
    if *hi.as_float() <= tol {
        return Status::Pass;
    }
    let lo = value
        .abs_lower()
        .sub(extra.as_float(), 64, crate::ball::Round::Down);
    if lo > tol {
        Status::Fail
    } else {
        Status::Indeterminate
    }
}

// ---------------------------------------------------------------- harmonic

/// `H_n = 1 + 1/2 + ... + 1/n`, `H_0 = 0`.
pub fn harmonic_number(n: u64) -> BigRational {
    // accumulate p/q without reducing at every step
    let mut p = BigInt::zero();
    let mut q = BigInt::one();
    for k in 1..=n {
        let k = BigInt::from(k);
        p = p * &k + &q;
        q *= k;
    }
    BigRational::new(p, q)
}

/// `H_0, ..., H_m` as balls.
pub fn harmonic_balls(m: usize, prec: u32) -> Vec<BallReal> {
    let one = BallReal::one(prec);
    let mut out = Vec::with_capacity(m + 1);
    out.push(BallReal::zero(prec));
    for k in 1..=m {
        let next = out[k - 1].add(&one.div_i64(k as i64));
        out.push(next);
    }
    out
}

/// A value of the harmonic kernel: rational off the diagonal, a ball on it.
#[derive(Clone, Debug, PartialEq)]
pub enum KernelValue {
    Exact(BigRational),
    Ball(BallReal),
}

impl KernelValue {
    pub fn to_ball(&self, prec: u32) -> BallReal {
        match self {
            KernelValue::Exact(q) => BallReal::from_rational(q, prec),
            KernelValue::Ball(b) => b.clone(),
        }
    }
}

/// `sum_{k=1}^{m} 1/k^2`.
fn inverse_squares(m: u64) -> BigRational {
    (1..=m).fold(BigRational::zero(), |acc, k| {
        acc + BigRational::new(BigInt::one(), BigInt::from(k * k))
    })
}

/// `pi^2/6 - sum_{k <= 2r} 1/k^2`.
fn diagonal(r: u64, prec: u32) -> BallReal {
    let p = pi(prec + 8);
    p.sqr()
        .div_i64(6)
        .sub(&BallReal::from_rational(&inverse_squares(2 * r), prec + 8))
        .round_to(prec)
}

/// `h_r(n) = (H_{2n} - H_{n+r})/(n - r)` for `n != r`, and
/// `pi^2/6 - sum_{k <= 2r} 1/k^2` for `n = r`.
pub fn h_r(n: u64, r: u64, prec: u32) -> KernelValue {
    if n == r {
        return KernelValue::Ball(diagonal(r, prec));
    }
    let diff = harmonic_number(2 * n) - harmonic_number(n + r);
    KernelValue::Exact(diff / BigRational::from_integer(BigInt::from(n as i64 - r as i64)))
}

/// `h_r(0..=n_max)` as balls.
fn kernel_balls(r: usize, n_max: usize, prec: u32) -> Vec<BallReal> {
    let h = harmonic_balls(2 * n_max.max(r), prec);
    (0..=n_max)
        .map(|n| {
            if n == r {
                diagonal(r as u64, prec)
            } else {
                h[2 * n].sub(&h[n + r]).div_i64(n as i64 - r as i64)
            }
        })
        .collect()
}

/// The `r = 0` and `r = 1` identities with their leading terms moved to the
/// right-hand side.
#[derive(Clone, Debug, PartialEq)]
pub struct RearrangedSum {
    /// First index of the summation.
    pub first_index: usize,
    pub partial_sum: BallReal,
    pub target: BallReal,
    pub residual: BallReal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityEvaluation {
    pub r: usize,
    pub n: usize,
    pub partial_sum: BallReal,
    /// `1/(r+1)`.
    pub target: BallReal,
    pub residual: BallReal,
    /// Bound on the omitted terms `n > N`.
    pub tail_bound: Mag,
    pub rearranged: Option<RearrangedSum>,
    /// `(M, max_{M <= m <= N} |residual_m|)` on a halving grid of `M`.
    pub decay: Vec<(usize, f64)>,
    /// `-slope` of `ln` of the above against `ln M`.
    pub decay_rate: Option<f64>,
}

fn log_log_slope(points: &[(usize, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.1 > 0.0 && p.0 > 0)
        .map(|&(m, v)| ((m as f64).ln(), v.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// `sum_{n=0}^{N} c_n h_r(n)` against `1/(r+1)`.
pub fn identity_partial_sum(
    table: &BallCoefficientTable,
    r: usize,
    n: usize,
) -> Result<IdentityEvaluation> {
    check_n(table, n)?;
    let prec = table.precision_bits();
    let h = kernel_balls(r, n, prec);
    let target = BallReal::one(prec).div_i64(r as i64 + 1);
    let mut sum = BallReal::zero(prec);
    let mut history = Vec::with_capacity(n + 1);
    for (k, hk) in h.iter().enumerate() {
        sum = sum.add(&table.coeff(k).mul(hk));
        history.push(sum.sub(&target).mid().to_f64().abs());
    }
    let residual = sum.sub(&target);

    let rearranged = match r {
        0 | 1 => {
            let first = r + 1;
            let p2 = pi(prec + 8).sqr();
            let t = if r == 0 {
                BallReal::one(prec + 8).sub(&p2.div_i64(6))
            } else {
                p2.div_i64(4).sub(&BallReal::from_rational(
                    &BigRational::new(19.into(), 8.into()),
                    prec + 8,
                ))
            }
            .round_to(prec);
            let mut s = BallReal::zero(prec);
            for (k, hk) in h.iter().enumerate().skip(first) {
                s = s.add(&table.coeff(k).mul(hk));
            }
            Some(RearrangedSum {
                first_index: first,
                residual: s.sub(&t),
                partial_sum: s,
                target: t,
            })
        }
        _ => None,
    };

    // |h_r(m)| <= 1/m and |c_m| <= sqrt(C) m^{-3/2}, so the tail is at most
    // sqrt(C) (2/3) N^{-3/2}
    let tail_bound = if n == 0 {
        // sqrt(C) (1 + 2/3) < 2^9
        Mag::pow2(9)
    } else {
        upper_mag(
            &majorant_constant(64)
                .mul_i64(2)
                .div(&pow_three_halves(n, 64).mul_i64(3))?,
        )
    };

    let mut decay = Vec::new();
    let mut m = n;
    while m >= 16 && decay.len() < 10 {
        let worst = history[m..].iter().copied().fold(0.0, f64::max);
        decay.push((m, worst));
        m /= 2;
    }
    decay.reverse();
    let decay_rate = log_log_slope(&decay).map(|s| -s);

    Ok(IdentityEvaluation {
        r,
        n,
        partial_sum: sum,
        target,
        residual,
        tail_bound,
        rearranged,
        decay,
        decay_rate,
    })
}

// -------------------------------------------------------------------- G_n

/// `G_n(t) = sum_k t^k/(n+k+1)`: the series with a geometric tail bound for
/// `t <= 1/2`, the logarithmic closed form above.
pub fn g(n: usize, t: &BigRational, prec: u32) -> Result<BallReal> {
    check_t(t)?;
    if *t <= BigRational::new(1.into(), 2.into()) {
        g_series(n, t, prec)
    } else {
        g_closed_form(n, t, prec)
    }
}

/// Truncated series plus `t^{K+1}/((n+K+2)(1-t))`.
pub fn g_series(n: usize, t: &BigRational, prec: u32) -> Result<BallReal> {
    check_t(t)?;
    let w = prec + 16;
    let tb = BallReal::from_rational(t, w);
    let one_minus = BallReal::one(w).sub(&tb);
    let eps = Mag::pow2(-(prec as i64) - 4);
    let mut sum = BallReal::zero(w);
    let mut tk = BallReal::one(w);
    let mut k = 0usize;
    loop {
        sum = sum.add(&tk.div_i64((n + k + 1) as i64));
        tk = tk.mul(&tb);
        let tail = upper_mag(&tk.div(&one_minus.mul_i64((n + k + 2) as i64))?);
        if tail <= eps || tk.is_zero_point() {
            return Ok(sum.inflate(&tail).round_to(prec));
        }
        k += 1;
    }
}

/// `-(ln(1-t) + sum_{k<=n} t^k/k) / t^{n+1}` at enough extra precision to
/// absorb the cancellation.
pub fn g_closed_form(n: usize, t: &BigRational, prec: u32) -> Result<BallReal> {
    check_t(t)?;
    if t.is_zero() {
        return Err(Error::InvalidArgument("closed form needs t > 0".into()));
    }
    let lost = (n as f64 + 1.0) * -t.to_f64().unwrap_or(1.0).log2();
    let w = prec + lost.ceil() as u32 + 64;
    let tb = BallReal::from_rational(t, w);
    let mut acc = ln(&BallReal::one(w).sub(&tb))?;
    let mut tk = BallReal::one(w);
    for k in 1..=n {
        tk = tk.mul(&tb);
        acc = acc.add(&tk.div_i64(k as i64));
    }
    let tn1 = tk.mul(&tb);
    Ok(acc.neg().div(&tn1)?.round_to(prec))
}

/// `G_0(t), ..., G_m(t)` by the downward recurrence
/// `G_k = 1/(k+1) + t G_{k+1}`, started from an enclosure far above `m`.
pub fn g_table(m: usize, t: &BigRational, prec: u32) -> Result<Vec<BallReal>> {
    check_t(t)?;
    let w = prec + 16;
    let one = BallReal::one(w);
    if t.is_zero() {
        return Ok((0..=m)
            .map(|k| one.div_i64(k as i64 + 1).round_to(prec))
            .collect());
    }
    let tb = BallReal::from_rational(t, w);
    // start error is damped by t^extra
    let extra = ((w as f64 + 8.0) / -t.to_f64().unwrap_or(0.5).log2()).ceil() as usize + 1;
    let top = m + extra;
    let lo = one.div_i64(top as i64 + 1);
    let hi = lo.div(&one.sub(&tb))?;
    let mut cur = BallReal::from_interval(&lo.lower(), &hi.upper(), w);
    let mut out = vec![BallReal::zero(prec); m + 1];
    for k in (0..top).rev() {
        cur = one.div_i64(k as i64 + 1).add(&tb.mul(&cur));
        if k <= m {
            out[k] = cur.round_to(prec);
        }
    }
    Ok(out)
}

// --------------------------------------------------------------- residuals

/// A signed residual together with a bound on the omitted terms.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub value: BallReal,
    pub tail_bound: Mag,
    /// Number of summed terms.
    pub terms: usize,
}

impl Residual {
    /// Ball containing the untruncated residual.
    pub fn enclosure(&self) -> BallReal {
        self.value.inflate(&self.tail_bound)
    }

    pub fn abs_upper(&self) -> Mag {
        self.value.abs_upper().add(&self.tail_bound)
    }
}

/// `sum_{n<=N} c_n t^n G_{2n}(t) - 1`. Terms beyond the point where `t^n`
/// drops below the working precision are folded into the tail bound
/// `sqrt(C) t^{M+1} / ((M+1)^{3/2} (2M+3) (1-t)^2)`.
pub fn functional_equation_residual(
    table: &BallCoefficientTable,
    t: &BigRational,
    n: usize,
) -> Result<Residual> {
    check_t(t)?;
    check_n(table, n)?;
    let prec = table.precision_bits();
    let m = if t.is_zero() {
        0
    } else {
        let per_term = -t.to_f64().unwrap_or(0.5).log2();
        (((prec as f64 + 40.0) / per_term).ceil() as usize).min(n)
    };
    let gs = g_table(2 * m, t, prec)?;
    let tb = BallReal::from_rational(t, prec);
    let mut tn = BallReal::one(prec);
    let mut sum = BallReal::zero(prec);
    for k in 0..=m {
        sum = sum.add(&table.coeff(k).mul(&tn).mul(&gs[2 * k]));
        tn = tn.mul(&tb);
    }
    let value = sum.sub(&BallReal::one(prec));
    let tail_bound = if t.is_zero() {
        Mag::zero()
    } else {
        let p = 64;
        let tb = BallReal::from_rational(t, p);
        let om = BallReal::one(p).sub(&tb);
        let num = majorant_constant(p).mul(&tb.pow_u64(m as u64 + 1));
        let den = pow_three_halves(m + 1, p)
            .mul_i64(2 * m as i64 + 3)
            .mul(&om.sqr());
        upper_mag(&num.div(&den)?)
    };
    Ok(Residual {
        value,
        tail_bound,
        terms: m + 1,
    })
}

/// Quadrature estimate of `int_0^1 F_N(t x^2)/(1 - t x) dx - 1`. The
/// quadrature error is estimated by doubling the order, not bounded.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadratureResidual {
    pub value: f64,
    /// `|Q_{2k} - Q_k|` plus a floating-point rounding allowance.
    pub error_estimate: f64,
    /// Bound on `F - F_N` integrated against `1/(1-tx)`.
    pub truncation_bound: f64,
    pub order: usize,
    pub terms: usize,
}

impl QuadratureResidual {
    pub fn total_error(&self) -> f64 {
        self.error_estimate + self.truncation_bound
    }
}

pub fn integral_equation_residual(
    table: &BallCoefficientTable,
    t: &BigRational,
    n: usize,
    quad_order: usize,
) -> Result<QuadratureResidual> {
    check_t(t)?;
    check_n(table, n)?;
    if quad_order == 0 {
        return Err(Error::InvalidArgument(
            "quadrature order must be positive".into(),
        ));
    }
    let tf = t.to_f64().unwrap_or(0.0);
    let sqrt_c = (COEFFICIENT_BOUND_SQ as f64).sqrt();
    // drop terms once sqrt(C) t^k k^{-3/2} < 1e-30
    let mut m = n;
    if tf > 0.0 {
        for k in 1..=n {
            if sqrt_c * tf.powi(k as i32) * (k as f64).powf(-1.5) < 1e-30 {
                m = k;
                break;
            }
        }
    } else {
        m = 0;
    }
    let c: Vec<f64> = (0..=m).map(|k| table.coeff(k).to_f64()).collect();
    let horner = |y: f64, abs: bool| {
        c.iter()
            .rev()
            .fold(0.0, |acc, &ck| acc * y + if abs { ck.abs() } else { ck })
    };
    let f = |x: f64| horner(tf * x * x, false) / (1.0 - tf * x);
    let fa = |x: f64| horner(tf * x * x, true) / (1.0 - tf * x);
    let rule = |k: usize| {
        GaussLegendre::new(k)
            .map_err(|e| Error::InvalidArgument(format!("quadrature order {k}: {e}")))
    };
    let q1 = rule(quad_order)?.integrate(0.0, 1.0, f);
    let hi = rule(2 * quad_order)?;
    let q2 = hi.integrate(0.0, 1.0, f);
    let qa = hi.integrate(0.0, 1.0, fa);
    let rounding = (2.0 * m as f64 + 4.0 * quad_order as f64 + 16.0) * f64::EPSILON * qa;
    let truncation_bound = if tf == 0.0 || m == n && m == 0 {
        0.0
    } else {
        let weight = -(1.0 - tf).ln() / tf;
        let b = sqrt_c * ((m + 1) as f64).powf(-1.5) * tf.powi(m as i32 + 1) / (1.0 - tf) * weight;
        b * (1.0 + 1e-12)
    };
    Ok(QuadratureResidual {
        value: q2 - 1.0,
        error_estimate: (q2 - q1).abs() + rounding,
        truncation_bound,
        order: 2 * quad_order,
        terms: m + 1,
    })
}

// ---------------------------------------------------------------- Dirichlet

#[derive(Clone, Debug, PartialEq)]
pub struct DirichletPoint {
    pub s: (BigRational, BigRational),
    pub n: usize,
    /// `sum_{n=1}^{N} c_n n^{-s}`.
    pub partial: ComplexBall,
    /// `sqrt(C) N^{-(Re s + 1/2)} / (Re s + 1/2)`.
    pub tail_bound: Mag,
}

impl DirichletPoint {
    /// Whether `partial` widened by the tail bound contains `re + i im`.
    pub fn contains(&self, re: &BigRational, im: &BigRational) -> bool {
        let p = self.partial.re.precision();
        let w = self.partial.inflate(&self.tail_bound);
        w.contains_point(
            &BallReal::from_rational(re, p),
            &BallReal::from_rational(im, p),
        )
    }
}

/// Partial sum of `C(s)`; requires `Re s > -1/2`.
pub fn dirichlet_partial(
    table: &BallCoefficientTable,
    s_re: &BigRational,
    s_im: &BigRational,
    n: usize,
) -> Result<DirichletPoint> {
    let half = BigRational::new(1.into(), 2.into());
    let a = s_re + &half;
    if !a.is_positive() {
        return Err(Error::InvalidArgument(format!(
            "Re(s) = {s_re} is outside the convergence region Re(s) > -1/2"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    check_n(table, n)?;
    let prec = table.precision_bits();
    let partial = if s_re.is_zero() && s_im.is_zero() {
        ComplexBall::from_real(table.partial_sums()[n].sub(table.coeff(0)))
    } else {
        let sr = BallReal::from_rational(s_re, prec + 16);
        let si = BallReal::from_rational(s_im, prec + 16);
        let real_only = s_im.is_zero();
        let terms: Vec<Result<ComplexBall>> = (1..=n)
            .into_par_iter()
            .map(|k| {
                let c = table.coeff(k);
                if k == 1 {
                    return Ok(ComplexBall::from_real(c.clone()));
                }
                let l = ln_u64(k as u64, prec + 16);
                let modulus = exp(&sr.mul(&l).neg())?;
                let z = if real_only {
                    ComplexBall::from_real(modulus)
                } else {
                    let (s, co) = sin_cos(&si.mul(&l))?;
                    ComplexBall::new(modulus.mul(&co), modulus.mul(&s).neg())
                };
                Ok(z.mul_real(c))
            })
            .collect();
        let mut acc = ComplexBall::zero(prec);
        for z in terms {
            acc = acc.add(&z?);
        }
        ComplexBall::new(acc.re.round_to(prec), acc.im.round_to(prec))
    };
    let p = 64;
    let ab = BallReal::from_rational(&a, p);
    let decay = pow(&BallReal::from_i64(n as i64, p), &ab.neg())?;
    let tail_bound = upper_mag(&majorant_constant(p).mul(&decay).div(&ab)?);
    Ok(DirichletPoint {
        s: (s_re.clone(), s_im.clone()),
        n,
        partial,
        tail_bound,
    })
}

// ----------------------------------------------------------------- reports

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesKind {
    Identity,
    Functional,
    Integral,
    Dirichlet,
}

/// One evaluation in the series JSON schema.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesReport {
    pub kind: SeriesKind,
    pub params: serde_json::Value,
    pub value: serde_json::Value,
    pub radius: f64,
    pub tail_bound: f64,
    pub verdict: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn rat_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

impl IdentityEvaluation {
    /// Verdict on the truncated residual; the tail bound is reported
    /// alongside but not charged against `tol`.
    pub fn report(&self, tol: f64) -> SeriesReport {
        let v = verdict(&self.residual, &Mag::zero(), tol);
        let mut params = json!({"r": self.r, "N": self.n, "tolerance": tol});
        if let Some(re) = &self.rearranged {
            params["rearranged"] = json!({
                "first_index": re.first_index,
                "value": re.partial_sum.to_f64(),
                "target": re.target.to_f64(),
                "residual": re.residual.to_f64(),
                "radius": re.residual.rad().to_f64(),
            });
        }
        let note = (v != Status::Pass).then(|| match self.decay_rate {
            Some(d) => format!("observed residual decay rate N^-{d:.3}"),
            None => "residual decay rate unavailable".into(),
        });
        SeriesReport {
            kind: SeriesKind::Identity,
            params,
            value: json!(self.residual.to_f64()),
            radius: self.residual.rad().to_f64(),
            tail_bound: self.tail_bound.to_f64(),
            verdict: v,
            note,
        }
    }
}

impl Residual {
    pub fn report(&self, t: &BigRational, n: usize, tol: f64) -> SeriesReport {
        SeriesReport {
            kind: SeriesKind::Functional,
            params: json!({"t": rat_f64(t), "N": n, "terms": self.terms, "tolerance": tol}),
            value: json!(self.value.to_f64()),
            radius: self.value.rad().to_f64(),
            tail_bound: self.tail_bound.to_f64(),
            verdict: verdict(&self.value, &self.tail_bound, tol),
            note: None,
        }
    }
}

impl QuadratureResidual {
    pub fn report(&self, t: &BigRational, n: usize, tol: f64) -> SeriesReport {
        let bound = self.value.abs() + self.total_error();
        let verdict = if bound <= tol {
            Status::Pass
        } else if self.value.abs() - self.total_error() > tol {
            Status::Fail
        } else {
            Status::Indeterminate
        };
        SeriesReport {
            kind: SeriesKind::Integral,
            params: json!({"t": rat_f64(t), "N": n, "order": self.order, "tolerance": tol}),
            value: json!(self.value),
            radius: self.error_estimate,
            tail_bound: self.truncation_bound,
            verdict,
            note: Some("quadrature error is estimated, not bounded".into()),
        }
    }
}

impl DirichletPoint {
    /// Verdict on whether the enclosure contains `expected`, when given.
    pub fn report(&self, expected: Option<(&BigRational, &BigRational)>) -> SeriesReport {
        let verdict = match expected {
            None => Status::Pass,
            Some((re, im)) if self.contains(re, im) => Status::Pass,
            Some(_) => Status::Fail,
        };
        let radius = self
            .partial
            .re
            .rad()
            .clone()
            .max(self.partial.im.rad().clone());
        SeriesReport {
            kind: SeriesKind::Dirichlet,
            params: json!({"s": [rat_f64(&self.s.0), rat_f64(&self.s.1)], "N": self.n}),
            value: json!([self.partial.re.to_f64(), self.partial.im.to_f64()]),
            radius: radius.to_f64(),
            tail_bound: self.tail_bound.to_f64(),
            verdict,
            note: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::ball_coefficients;
    use crate::ball::real::ratio;

    fn q(a: i64, b: i64) -> BigRational {
        ratio(a, b)
    }

    #[test]
    fn harmonic_numbers() {
        assert_eq!(harmonic_number(0), BigRational::zero());
        assert_eq!(harmonic_number(2), q(3, 2));
        // pairwise summation, a different association order
        fn pairwise(lo: u64, hi: u64) -> BigRational {
            match hi - lo {
                0 => BigRational::zero(),
                1 => q(1, lo as i64),
                d => pairwise(lo, lo + d / 2) + pairwise(lo + d / 2, hi),
            }
        }
        assert_eq!(harmonic_number(100), pairwise(1, 101));
        let hb = harmonic_balls(100, 128);
        assert!(hb[100].contains_rational(&harmonic_number(100)));
    }

    #[test]
    fn kernel_small_values() {
        let p = pi(128);
        let z = h_r(0, 0, 128).to_ball(128);
        assert!(z.overlaps(&p.sqr().div_i64(6)));
        assert_eq!(h_r(1, 0, 128), KernelValue::Exact(q(1, 2)));
        let d = h_r(1, 1, 128).to_ball(128);
        let expect = p
            .sqr()
            .div_i64(6)
            .sub(&BallReal::from_rational(&q(5, 4), 128));
        assert!(d.overlaps(&expect));
        assert!(d.rad().log2() < -100.0);
    }

    #[test]
    fn kernel_balls_match_exact() {
        let b = kernel_balls(2, 40, 128);
        for n in 0..=40u64 {
            if n != 2 {
                match h_r(n, 2, 128) {
                    KernelValue::Exact(v) => assert!(b[n as usize].contains_rational(&v), "n={n}"),
                    KernelValue::Ball(_) => unreachable!(),
                }
            }
        }
    }

    #[test]
    fn g_basic_values() {
        let z = BigRational::zero();
        for n in [0usize, 3, 10] {
            let v = g(n, &z, 128).unwrap();
            assert!(v.contains_rational(&q(1, n as i64 + 1)));
        }
        let half = q(1, 2);
        let v = g(0, &half, 128).unwrap();
        let two_ln2 = crate::ball::elementary::ln2(128).mul_i64(2);
        assert!(v.overlaps(&two_ln2));
        assert!(v.rad().log2() < -110.0);
        assert!(g(0, &q(1, 1), 64).is_err());
        assert!(g(0, &q(-1, 10), 64).is_err());
    }

    #[test]
    fn g_strategies_agree() {
        let t = q(9, 10);
        let s = g_series(3, &t, 128).unwrap();
        let c = g_closed_form(3, &t, 128).unwrap();
        assert!(s.overlaps(&c));
        assert!(c.rad().log2() < -100.0 && s.rad().log2() < -100.0);
        let table = g_table(40, &t, 128).unwrap();
        for n in [0usize, 7, 40] {
            assert!(
                table[n].overlaps(&g_closed_form(n, &t, 128).unwrap()),
                "n={n}"
            );
        }
    }

    #[test]
    fn functional_residual_small() {
        let table = ball_coefficients(400, 1e-20, 128).unwrap();
        let r = functional_equation_residual(&table, &BigRational::zero(), 10).unwrap();
        assert!(r.value.is_zero_point() || r.abs_upper().log2() < -100.0);
        for (t, tol) in [(q(1, 10), 1e-30), (q(1, 2), 1e-30)] {
            let r = functional_equation_residual(&table, &t, 400).unwrap();
            assert_eq!(r.report(&t, 400, tol).verdict, Status::Pass, "{r:?}");
        }
    }

    #[test]
    fn integral_matches_functional() {
        let table = ball_coefficients(400, 1e-20, 128).unwrap();
        for t in [q(0, 1), q(1, 10), q(1, 2), q(9, 10)] {
            let i = integral_equation_residual(&table, &t, 400, 32).unwrap();
            let f = functional_equation_residual(&table, &t, 400).unwrap();
            let scale = i.total_error().max(f.abs_upper().to_f64());
            assert!(
                (i.value - f.value.to_f64()).abs() <= 10.0 * scale,
                "{t}: {i:?}"
            );
            assert!(i.value.abs() <= i.total_error(), "{t}: {i:?}");
        }
    }

    #[test]
    fn dirichlet_small_cases() {
        let table = ball_coefficients(50, 1e-20, 128).unwrap();
        let d = dirichlet_partial(&table, &q(2, 1), &BigRational::zero(), 1).unwrap();
        assert!(d.partial.re.contains_rational(&q(-3, 2)));
        // sqrt(30782) * 1^{-5/2} / (5/2)
        let t = d.tail_bound.to_f64();
        assert!(t >= (30782f64).sqrt() / 2.5 && t < 70.2, "{t}");
        let z = dirichlet_partial(&table, &BigRational::zero(), &BigRational::zero(), 50).unwrap();
        assert_eq!(z.partial.re, table.partial_sums()[50].sub(table.coeff(0)));
        assert!(z.contains(&q(-1, 1), &BigRational::zero()));
        assert!(dirichlet_partial(&table, &q(-1, 2), &BigRational::zero(), 5).is_err());
        // s = 1 + i, term by term against a direct evaluation of c_2 2^{-s}
        let d = dirichlet_partial(&table, &q(1, 1), &q(1, 1), 2).unwrap();
        let l2 = 2f64.ln();
        let c2 = 5.0 / 24.0 / 2.0;
        let re = -1.5 + c2 * l2.cos();
        let im = -c2 * l2.sin();
        assert!((d.partial.re.to_f64() - re).abs() < 1e-14);
        assert!((d.partial.im.to_f64() - im).abs() < 1e-14);
    }

    #[test]
    fn identity_small_n() {
        let table = ball_coefficients(2000, 1e-20, 128).unwrap();
        let e = identity_partial_sum(&table, 0, 0).unwrap();
        assert!(e.partial_sum.overlaps(&pi(128).sqr().div_i64(6)));
        for r in 0..4 {
            let e = identity_partial_sum(&table, r, 2000).unwrap();
            assert!(
                e.residual.abs_upper().to_f64() < 1e-5,
                "r={r}: {:?}",
                e.residual
            );
            assert!(e.decay_rate.unwrap() > 1.0);
        }
        let e = identity_partial_sum(&table, 1, 2000).unwrap();
        let re = e.rearranged.unwrap();
        assert_eq!(re.first_index, 2);
        assert!(re.residual.abs_upper().to_f64() < 1e-5);
        assert!(e.residual.overlaps(&re.residual));
    }
}
