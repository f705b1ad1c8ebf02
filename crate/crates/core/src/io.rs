//! Text formats for coefficient tables.
//!
//! Exact tables: CSV `n,numerator,denominator` or JSON
//! `[{"n":..,"num":"..","den":".."}]`. Ball tables: CSV
//! `n,midpoint_hex,radius_hex,precision_bits`, with hexadecimal floats that
//! reload bit-exactly.

use std::io::{Read, Write};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::ball::{BallCoefficientTable, BallReal, BigFloat, Mag};
use crate::error::{Error, Result};
use crate::exact::ExactCoefficientTable;

#[derive(Debug, Serialize, Deserialize)]
struct ExactRow {
    n: usize,
    #[serde(rename = "numerator")]
    num: String,
    #[serde(rename = "denominator")]
    den: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct BallRow {
    n: usize,
    midpoint_hex: String,
    radius_hex: String,
    precision_bits: u32,
}

/// One coefficient in the exact JSON format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactJsonEntry {
    pub n: usize,
    pub num: String,
    pub den: String,
}

fn check_index(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Parse(format!(
            "expected row n = {expected}, found {got}"
        )));
    }
    Ok(())
}

fn parse_fraction(num: &str, den: &str) -> Result<BigRational> {
    let bad = |s: &str| Error::Parse(format!("invalid integer {s:?}"));
    let p: BigInt = num.trim().parse().map_err(|_| bad(num))?;
    let q: BigInt = den.trim().parse().map_err(|_| bad(den))?;
    if q.is_zero() {
        return Err(Error::Parse("zero denominator".into()));
    }
    Ok(BigRational::new(p, q))
}

pub fn write_exact_csv<W: Write>(table: &ExactCoefficientTable, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for (n, c) in table.coeffs().iter().enumerate() {
        out.serialize(ExactRow {
            n,
            num: c.numer().to_string(),
            den: c.denom().to_string(),
        })?;
    }
    out.flush()?;
    Ok(())
}

/// Read an exact CSV table; the recurrence is re-checked.
pub fn read_exact_csv<R: Read>(r: R) -> Result<ExactCoefficientTable> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut coeffs = Vec::new();
    for (i, row) in rdr.deserialize::<ExactRow>().enumerate() {
        let row = row?;
        check_index(i, row.n)?;
        coeffs.push(parse_fraction(&row.num, &row.den)?);
    }
    if coeffs.is_empty() {
        return Err(Error::Parse("empty coefficient table".into()));
    }
    ExactCoefficientTable::from_coefficients(coeffs)
}

pub fn exact_json(table: &ExactCoefficientTable) -> Vec<ExactJsonEntry> {
    table
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| ExactJsonEntry {
            n,
            num: c.numer().to_string(),
            den: c.denom().to_string(),
        })
        .collect()
}

pub fn write_exact_json<W: Write>(table: &ExactCoefficientTable, w: W) -> Result<()> {
    serde_json::to_writer(w, &exact_json(table))?;
    Ok(())
}

pub fn read_exact_json<R: Read>(r: R) -> Result<ExactCoefficientTable> {
    let entries: Vec<ExactJsonEntry> = serde_json::from_reader(r)?;
    let mut coeffs = Vec::with_capacity(entries.len());
    for (i, e) in entries.iter().enumerate() {
        check_index(i, e.n)?;
        coeffs.push(parse_fraction(&e.num, &e.den)?);
    }
    if coeffs.is_empty() {
        return Err(Error::Parse("empty coefficient table".into()));
    }
    ExactCoefficientTable::from_coefficients(coeffs)
}

pub fn write_ball_csv<W: Write>(table: &BallCoefficientTable, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for (n, c) in table.coeffs().iter().enumerate() {
        out.serialize(BallRow {
            n,
            midpoint_hex: c.mid().to_hex(),
            radius_hex: c.rad().to_hex(),
            precision_bits: table.precision_bits(),
        })?;
    }
    out.flush()?;
    Ok(())
}

/// Read a ball CSV table and recompute its derived columns.
pub fn read_ball_csv<R: Read>(r: R) -> Result<BallCoefficientTable> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut coeffs = Vec::new();
    let mut prec = None;
    for (i, row) in rdr.deserialize::<BallRow>().enumerate() {
        let row = row?;
        check_index(i, row.n)?;
        match prec {
            None => prec = Some(row.precision_bits),
            Some(p) if p != row.precision_bits => {
                return Err(Error::Parse(format!(
                    "row {i} has precision {} but the table has {p}",
                    row.precision_bits
                )))
            }
            Some(_) => {}
        }
        let mid = BigFloat::from_hex(&row.midpoint_hex)?;
        let rad = Mag::from_hex(&row.radius_hex)?;
        coeffs.push(BallReal::new(mid, rad, row.precision_bits));
    }
    let prec = prec.ok_or_else(|| Error::Parse("empty coefficient table".into()))?;
    BallCoefficientTable::from_coefficients(coeffs, prec)
}
