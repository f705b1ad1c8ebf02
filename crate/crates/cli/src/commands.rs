use std::collections::BTreeMap;

use orthorec::analysis::{
    delta_point_estimate, detect_sign_changes, fit_envelope_slope, AnalysisReport, SignChangeReport,
};
use orthorec::ball::estimate_k;
use orthorec::ball::float::to_decimal;
use orthorec::exact::{
    coefficient_via_determinant, coefficient_via_permutation_sum,
    verify_integrality_and_lower_bound, verify_two_adic_valuation,
};
use orthorec::inequalities::{cross_validate, verify_inequality_suite, InequalityReport};
use orthorec::series::{
    dirichlet_partial, functional_equation_residual, identity_partial_sum,
    integral_equation_residual, SeriesReport,
};
use orthorec::util::parse_decimal;
use orthorec::{
    BallCoefficientTable, BallReal, Error, ExactCoefficientTable, ExactRational, Status,
};
use serde_json::{json, Value};

use crate::args::{Command, Common, EngineArg, Suite};
use crate::output::{worst, Report};
use crate::tables::{ball_precision, ball_table, exact_table, table, Table};
use crate::CliError;

/// Oracle ranges for `verify --suite oracles`.
const DETERMINANT_MAX: usize = 30;
const PERMUTATION_MAX: usize = 12;

const IDENTITY_TOL: f64 = 1e-5;
const SERIES_TOL_INNER: f64 = 1e-6;
const SERIES_TOL_OUTER: f64 = 1e-3;

#[derive(Clone, Copy)]
enum Column {
    Coeffs,
    Sums,
    Norms,
    Energies,
}

impl Column {
    fn name(self) -> &'static str {
        match self {
            Column::Coeffs => "c",
            Column::Sums => "s",
            Column::Norms => "norm_sq",
            Column::Energies => "D",
        }
    }

    fn exact(self, t: &ExactCoefficientTable) -> &[ExactRational] {
        match self {
            Column::Coeffs => t.coeffs(),
            Column::Sums => t.partial_sums(),
            Column::Norms => t.norms_sq(),
            Column::Energies => t.energies(),
        }
    }

    fn ball(self, t: &BallCoefficientTable) -> &[BallReal] {
        match self {
            Column::Coeffs => t.coeffs(),
            Column::Sums => t.partial_sums(),
            Column::Norms => t.norms_sq(),
            Column::Energies => t.energies(),
        }
    }
}

/// What was computed, for the provenance line.
pub struct Outcome {
    pub report: Report,
    pub precision_bits: u32,
}

pub fn run(command: &Command, common: &Common) -> Result<Outcome, CliError> {
    match command {
        Command::Coeffs(rows) => column(common, Column::Coeffs, &rows.at),
        Command::Sums(rows) => column(common, Column::Sums, &rows.at),
        Command::Norms { rows, energy } => {
            let col = if *energy {
                Column::Energies
            } else {
                Column::Norms
            };
            column(common, col, &rows.at)
        }
        Command::Verify { suite, from } => verify(common, *suite, *from),
        Command::Signs => signs(common),
        Command::Delta {
            at,
            window_lo,
            window_hi,
        } => delta(common, at, *window_lo, *window_hi),
        Command::Identities { r, n } => identities(common, r, *n),
        Command::Functional { t, n } => functional(common, t, *n),
        Command::Integral { t, n, order } => integral(common, t, *n, *order),
        Command::Dirichlet { re, im, n } => dirichlet(common, re, im, *n),
        Command::CrossValidate { exact_n_max } => cross(common, *exact_n_max),
    }
}

fn rows_for(at: &[usize], n_max: usize) -> Result<Vec<usize>, CliError> {
    if at.is_empty() {
        return Ok((0..=n_max).collect());
    }
    if let Some(n) = at.iter().find(|&&n| n > n_max) {
        return Err(CliError::Usage(format!("--at {n} exceeds n_max = {n_max}")));
    }
    Ok(at.to_vec())
}

fn column(common: &Common, col: Column, at: &[usize]) -> Result<Outcome, CliError> {
    let t = table(common)?;
    let idx = rows_for(at, common.n_max)?;
    let mut report = Report::new(match col {
        Column::Coeffs => "coeffs",
        Column::Sums => "sums",
        Column::Norms | Column::Energies => "norms",
    });
    let rows: Vec<Value>;
    match &t {
        Table::Exact(e) => {
            let xs = col.exact(e);
            report.header = vec!["n", "numerator", "denominator"];
            rows = idx
                .iter()
                .map(|&n| json!({"n": n, "num": xs[n].numer().to_string(), "den": xs[n].denom().to_string()}))
                .collect();
            for &n in &idx {
                report.rows.push(vec![
                    n.to_string(),
                    xs[n].numer().to_string(),
                    xs[n].denom().to_string(),
                ]);
                report.text.push(format!("{n:>6}  {}", xs[n]));
            }
        }
        Table::Ball(b) => {
            let xs = col.ball(b);
            let prec = b.precision_bits().to_string();
            report.header = vec!["n", "midpoint_hex", "radius_hex", "precision_bits"];
            rows = idx
                .iter()
                .map(|&n| {
                    json!({
                        "n": n,
                        "value": to_decimal(xs[n].mid(), 20),
                        "radius": xs[n].rad().to_f64(),
                        "midpoint_hex": xs[n].mid().to_hex(),
                        "radius_hex": xs[n].rad().to_hex(),
                    })
                })
                .collect();
            for &n in &idx {
                report.rows.push(vec![
                    n.to_string(),
                    xs[n].mid().to_hex(),
                    xs[n].rad().to_hex(),
                    prec.clone(),
                ]);
                report
                    .text
                    .push(format!("{n:>6}  {}", xs[n].to_decimal(20)));
            }
        }
    }
    report.result = json!({"column": col.name(), "rows": rows});
    if let Column::Norms = col {
        let ball = match &t {
            Table::Ball(b) => b.clone(),
            Table::Exact(e) => {
                BallCoefficientTable::from_exact(e, ball_precision(common, e.n_max())?)
            }
        };
        if let Ok(k) = estimate_k(&ball) {
            report.text.push(format!(
                "K in [{}, {}] (from n = {})",
                to_decimal(&k.lower, 15),
                to_decimal(&k.upper, 15),
                k.n_used
            ));
            report.result["k"] = json!(k);
        }
    }
    Ok(Outcome {
        report,
        precision_bits: t.precision_bits(),
    })
}

struct CheckRecord {
    n: usize,
    check: &'static str,
    status: Status,
}

fn from_inequalities(r: &InequalityReport) -> Vec<CheckRecord> {
    r.records
        .iter()
        .map(|x| CheckRecord {
            n: x.n,
            check: x.inequality_id.as_str(),
            status: x.status,
        })
        .collect()
}

fn pass_fail(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn valuation_records(e: &ExactCoefficientTable, from: usize) -> Vec<CheckRecord> {
    (from.max(1)..=e.n_max())
        .map(|n| {
            let c = e.coeff(n);
            let ok = verify_two_adic_valuation(n as u64, c).passed && !num_is_zero(c);
            CheckRecord {
                n,
                check: "two_adic_valuation",
                status: pass_fail(ok),
            }
        })
        .collect()
}

fn num_is_zero(c: &ExactRational) -> bool {
    c.numer().bits() == 0
}

fn oracle_records(e: &ExactCoefficientTable, from: usize) -> Result<Vec<CheckRecord>, CliError> {
    let mut out = Vec::new();
    for n in from.max(1)..=e.n_max().min(DETERMINANT_MAX) {
        out.push(CheckRecord {
            n,
            check: "determinant",
            status: pass_fail(&coefficient_via_determinant(n)? == e.coeff(n)),
        });
    }
    for n in from.max(1)..=e.n_max().min(PERMUTATION_MAX) {
        out.push(CheckRecord {
            n,
            check: "permutation_sum",
            status: pass_fail(&coefficient_via_permutation_sum(n)? == e.coeff(n)),
        });
    }
    Ok(out)
}

fn integrality_records(e: &ExactCoefficientTable, from: usize) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    for n in from.max(1)..=e.n_max() {
        let r = verify_integrality_and_lower_bound(n as u64, e.coeff(n));
        out.push(CheckRecord {
            n,
            check: "integrality_claim",
            status: pass_fail(r.passed),
        });
        out.push(CheckRecord {
            n,
            check: "odd_factor_integrality",
            status: pass_fail(r.odd_factor_integral && r.odd_factor_bound_holds),
        });
    }
    out
}

fn inequality_records(common: &Common, from: usize) -> Result<(Vec<CheckRecord>, u32), CliError> {
    let from = from.max(1);
    Ok(match table(common)? {
        Table::Exact(e) => (
            from_inequalities(&verify_inequality_suite(&e, from, e.n_max())?),
            0,
        ),
        Table::Ball(b) => (
            from_inequalities(&verify_inequality_suite(&b, from, b.n_max())?),
            b.precision_bits(),
        ),
    })
}

fn verify(common: &Common, suite: Suite, from: usize) -> Result<Outcome, CliError> {
    if from > common.n_max {
        return Err(CliError::Usage(format!(
            "--from {from} exceeds n_max = {}",
            common.n_max
        )));
    }
    let mut records = Vec::new();
    let mut precision_bits = 0;
    if matches!(suite, Suite::Inequalities | Suite::All) {
        let (r, p) = inequality_records(common, from)?;
        records.extend(r);
        precision_bits = p;
    }
    if matches!(
        suite,
        Suite::Valuation | Suite::Oracles | Suite::Integrality | Suite::All
    ) {
        let e = exact_table(common, common.n_max)?;
        match suite {
            Suite::Valuation => records.extend(valuation_records(&e, from)),
            Suite::Oracles => records.extend(oracle_records(&e, from)?),
            Suite::Integrality => records.extend(integrality_records(&e, from)),
            _ => {
                records.extend(valuation_records(&e, from));
                records.extend(oracle_records(&e, from)?);
            }
        }
    }

    let mut report = Report::new("verify");
    let mut counts: BTreeMap<&str, [usize; 3]> = BTreeMap::new();
    let mut order = Vec::new();
    for r in &records {
        let slot = counts.entry(r.check).or_insert_with(|| {
            order.push(r.check);
            [0; 3]
        });
        slot[match r.status {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Indeterminate => 2,
        }] += 1;
        report.status = worst(report.status, r.status);
    }
    report.header = vec!["n", "check", "status"];
    report.rows = records
        .iter()
        .map(|r| vec![r.n.to_string(), r.check.to_string(), r.status.to_string()])
        .collect();
    report.text.push(format!(
        "{:<24} {:>8} {:>8} {:>14}",
        "check", "pass", "fail", "indeterminate"
    ));
    for check in &order {
        let [p, f, i] = counts[check];
        report
            .text
            .push(format!("{check:<24} {p:>8} {f:>8} {i:>14}"));
    }
    let bad: Vec<&CheckRecord> = records
        .iter()
        .filter(|r| r.status != Status::Pass)
        .collect();
    for r in bad.iter().take(20) {
        report
            .text
            .push(format!("{}: n = {} {}", r.status, r.n, r.check));
    }
    if bad.len() > 20 {
        report.text.push(format!("... {} more", bad.len() - 20));
    }
    let suite_name = match suite {
        Suite::Inequalities => "inequalities",
        Suite::Valuation => "valuation",
        Suite::Oracles => "oracles",
        Suite::Integrality => "integrality",
        Suite::All => "all",
    };
    report.result = json!({
        "suite": suite_name,
        "range": [from.max(1), common.n_max],
        "counts": counts
            .iter()
            .map(|(k, [p, f, i])| (k.to_string(), json!({"pass": p, "fail": f, "indeterminate": i})))
            .collect::<serde_json::Map<_, _>>(),
        "records": records
            .iter()
            .map(|r| json!({"n": r.n, "check": r.check, "status": r.status}))
            .collect::<Vec<_>>(),
    });
    Ok(Outcome {
        report,
        precision_bits,
    })
}

fn sign_report(t: &Table) -> SignChangeReport {
    match t {
        Table::Exact(e) => detect_sign_changes(e),
        Table::Ball(b) => detect_sign_changes(b),
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    if xs.is_empty() {
        return "none".into();
    }
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn signs(common: &Common) -> Result<Outcome, CliError> {
    let t = table(common)?;
    let r = sign_report(&t);
    let mut report = Report::new("signs");
    if !r.ambiguous.is_empty() {
        report.status = Status::Indeterminate;
    }
    let ratios: Vec<String> = r.ratios.iter().map(|x| format!("{x:.6}")).collect();
    report.text.push(format!("indices: {}", join(&r.indices)));
    report.text.push(format!("ratios: {}", join(&ratios)));
    report
        .text
        .push(format!("ambiguous: {}", join(&r.ambiguous)));
    report.header = vec!["index", "ratio_to_previous"];
    let mut prev_nonzero = None;
    for &n in &r.indices {
        let ratio = match prev_nonzero {
            Some(p) => format!("{}", n as f64 / p as f64),
            None => String::new(),
        };
        if n > 0 {
            prev_nonzero = Some(n);
        }
        report.rows.push(vec![n.to_string(), ratio]);
    }
    report.result = json!({
        "indices": r.indices,
        "ratios": r.ratios,
        "ambiguous": r.ambiguous,
        "first_indices_of_new_sign": r.first_indices_of_new_sign(),
    });
    Ok(Outcome {
        report,
        precision_bits: t.precision_bits(),
    })
}

fn delta(common: &Common, at: &[usize], lo: usize, hi: Option<usize>) -> Result<Outcome, CliError> {
    let t = table(common)?;
    let n_max = common.n_max;
    let at = if at.is_empty() {
        vec![n_max.min(5555)]
    } else {
        at.to_vec()
    };
    if let Some(n) = at.iter().find(|&&n| n > n_max || n < 2) {
        return Err(CliError::Usage(format!(
            "--at {n} must lie in [2, n_max = {n_max}]"
        )));
    }
    let hi = hi.unwrap_or(n_max);
    if lo > hi || hi > n_max {
        return Err(CliError::Usage(format!(
            "window [{lo}, {hi}] does not fit in [0, {n_max}]"
        )));
    }
    let mut report = Report::new("delta");
    let mut points = Vec::new();
    report.header = vec!["n", "estimate", "radius"];
    for &n in &at {
        let d = match &t {
            Table::Exact(e) => delta_point_estimate(e, n),
            Table::Ball(b) => delta_point_estimate(b, n),
        };
        match d {
            Ok(d) => {
                report
                    .text
                    .push(format!("ln|c_{n}|/ln {n} = {}", d.to_decimal(15)));
                report.rows.push(vec![
                    n.to_string(),
                    d.to_f64().to_string(),
                    d.rad().to_f64().to_string(),
                ]);
                points.push((n, d.to_f64()));
            }
            Err(e) => {
                report.text.push(format!("ln|c_{n}|/ln {n}: {e}"));
                report
                    .rows
                    .push(vec![n.to_string(), String::new(), String::new()]);
                report.status = Status::Indeterminate;
            }
        }
    }
    let fit = match &t {
        Table::Exact(e) => fit_envelope_slope(e, lo, hi),
        Table::Ball(b) => fit_envelope_slope(b, lo, hi),
    };
    match &fit {
        Ok(f) => report.text.push(format!(
            "envelope slope on [{lo}, {hi}]: {:.6} +/- {:.6} ({} envelope points; heuristic)",
            f.envelope_slope,
            f.half_width,
            f.envelope.len()
        )),
        Err(e) => report
            .text
            .push(format!("envelope slope on [{lo}, {hi}]: {e}")),
    }
    let signs = sign_report(&t);
    report.result = serde_json::to_value(AnalysisReport::new(&signs, points, fit.as_ref().ok()))
        .expect("analysis report serializes");
    Ok(Outcome {
        report,
        precision_bits: t.precision_bits(),
    })
}

fn truncation(common: &Common, n: Option<usize>) -> Result<usize, CliError> {
    let n = n.unwrap_or(common.n_max);
    if n > common.n_max {
        return Err(CliError::Usage(format!(
            "--n {n} exceeds n_max = {}",
            common.n_max
        )));
    }
    Ok(n)
}

fn series_outcome(name: &'static str, reports: Vec<SeriesReport>, prec: u32) -> Outcome {
    let mut report = Report::new(name);
    report.header = vec!["kind", "params", "value", "radius", "tail_bound", "verdict"];
    for r in &reports {
        report.status = worst(report.status, r.verdict);
        let kind = serde_json::to_value(r.kind).expect("kind serializes");
        let kind = kind.as_str().unwrap_or_default().to_string();
        report.rows.push(vec![
            kind.clone(),
            r.params.to_string(),
            r.value.to_string(),
            format!("{:e}", r.radius),
            format!("{:e}", r.tail_bound),
            r.verdict.to_string(),
        ]);
        let mut line = format!(
            "{kind} {}: value {} radius {:.3e} tail {:.3e} -> {}",
            r.params, r.value, r.radius, r.tail_bound, r.verdict
        );
        if let Some(note) = &r.note {
            line.push_str(&format!(" ({note})"));
        }
        report.text.push(line);
    }
    report.result = serde_json::to_value(&reports).expect("series reports serialize");
    Outcome {
        report,
        precision_bits: prec,
    }
}

fn identities(common: &Common, rs: &[usize], n: Option<usize>) -> Result<Outcome, CliError> {
    let n = truncation(common, n)?;
    let b = ball_table(common, common.n_max)?;
    let tol = common.tolerance.unwrap_or(IDENTITY_TOL);
    let reports = rs
        .iter()
        .map(|&r| Ok(identity_partial_sum(&b, r, n)?.report(tol)))
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(series_outcome("identities", reports, b.precision_bits()))
}

fn parse_ts(ts: &[String]) -> Result<Vec<ExactRational>, CliError> {
    ts.iter()
        .map(|s| parse_decimal(s).map_err(|e| CliError::Usage(format!("--t {s}: {e}"))))
        .collect()
}

fn series_tol(common: &Common, t: &ExactRational) -> f64 {
    common.tolerance.unwrap_or_else(|| {
        if t <= &ExactRational::new(1.into(), 2.into()) {
            SERIES_TOL_INNER
        } else {
            SERIES_TOL_OUTER
        }
    })
}

fn functional(common: &Common, ts: &[String], n: Option<usize>) -> Result<Outcome, CliError> {
    let n = truncation(common, n)?;
    let ts = parse_ts(ts)?;
    let b = ball_table(common, common.n_max)?;
    let reports = ts
        .iter()
        .map(|t| Ok(functional_equation_residual(&b, t, n)?.report(t, n, series_tol(common, t))))
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(series_outcome("functional", reports, b.precision_bits()))
}

fn integral(
    common: &Common,
    ts: &[String],
    n: Option<usize>,
    order: usize,
) -> Result<Outcome, CliError> {
    let n = truncation(common, n)?;
    let ts = parse_ts(ts)?;
    let b = ball_table(common, common.n_max)?;
    let reports = ts
        .iter()
        .map(|t| {
            Ok(integral_equation_residual(&b, t, n, order)?.report(t, n, series_tol(common, t)))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(series_outcome("integral", reports, b.precision_bits()))
}

fn dirichlet(common: &Common, re: &str, im: &str, n: Option<usize>) -> Result<Outcome, CliError> {
    let n = truncation(common, n)?;
    let parse = |s: &str| parse_decimal(s).map_err(|e| CliError::Usage(format!("{s}: {e}")));
    let (re, im) = (parse(re)?, parse(im)?);
    let b = ball_table(common, common.n_max)?;
    let d = dirichlet_partial(&b, &re, &im, n)?;
    let zero = ExactRational::from_integer(0.into());
    let minus_one = ExactRational::from_integer((-1).into());
    let expected = (re == zero && im == zero).then_some((&minus_one, &zero));
    let mut report = d.report(expected);
    if expected.is_some() {
        report.note = Some("C(0) = -1".into());
    }
    Ok(series_outcome(
        "dirichlet",
        vec![report],
        b.precision_bits(),
    ))
}

fn cross(common: &Common, exact_n_max: usize) -> Result<Outcome, CliError> {
    let n_exact = exact_n_max.min(common.n_max);
    let e = exact_table(common, n_exact)?;
    let ball_common = Common {
        engine: EngineArg::Ball,
        ..common.clone()
    };
    let b = ball_table(&ball_common, common.n_max)?;
    let mut report = Report::new("cross-validate");
    report.header = vec![
        "overlap",
        "values_checked",
        "max_normalized_discrepancy",
        "status",
    ];
    match cross_validate(&e, &b) {
        Ok(cv) => {
            report.text.push(format!(
                "{} values for n <= {} inside their balls; worst |mid - exact|/radius = {:.6}",
                cv.values_checked,
                cv.overlap - 1,
                cv.max_normalized_discrepancy
            ));
            report.rows.push(vec![
                cv.overlap.to_string(),
                cv.values_checked.to_string(),
                cv.max_normalized_discrepancy.to_string(),
                "pass".into(),
            ]);
            report.result = json!(cv);
        }
        Err(Error::Containment { n, detail }) => {
            report.status = Status::Fail;
            report
                .text
                .push(format!("containment violated at n = {n}: {detail}"));
            report.rows.push(vec![
                String::new(),
                String::new(),
                String::new(),
                "fail".into(),
            ]);
            report.result = json!({"violation": {"n": n, "detail": detail}});
        }
        Err(e) => return Err(e.into()),
    }
    Ok(Outcome {
        report,
        precision_bits: b.precision_bits(),
    })
}
