use std::io::{self, Write};

use orthorec::Status;
use serde_json::{json, Value};

use crate::args::Format;

/// Version of the JSON envelope written by every command.
pub const SCHEMA_VERSION: u32 = 1;

/// Where the numbers came from.
pub struct Provenance {
    pub engine: &'static str,
    pub n_max: usize,
    pub precision_bits: u32,
}

/// A command's result in all three formats.
pub struct Report {
    pub command: &'static str,
    pub status: Status,
    pub result: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub text: Vec<String>,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report {
            command,
            status: Status::Pass,
            result: Value::Null,
            header: Vec::new(),
            rows: Vec::new(),
            text: Vec::new(),
        }
    }
}

/// Fail dominates indeterminate, which dominates pass.
pub fn worst(a: Status, b: Status) -> Status {
    match (a, b) {
        (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
        (Status::Indeterminate, _) | (_, Status::Indeterminate) => Status::Indeterminate,
        _ => Status::Pass,
    }
}

pub fn emit<W: Write>(
    report: &Report,
    prov: &Provenance,
    format: Format,
    mut w: W,
) -> io::Result<()> {
    match format {
        Format::Json => {
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": report.command,
                "engine": prov.engine,
                "n_max": prov.n_max,
                "precision_bits": prov.precision_bits,
                "status": report.status,
                "result": report.result,
            });
            serde_json::to_writer_pretty(&mut w, &doc)?;
            writeln!(w)?;
        }
        Format::Csv => {
            let mut out = csv::Writer::from_writer(&mut w);
            out.write_record(&report.header)?;
            for row in &report.rows {
                out.write_record(row)?;
            }
            out.flush()?;
        }
        Format::Text => {
            writeln!(
                w,
                "# {}: engine={} n_max={} precision_bits={}",
                report.command, prov.engine, prov.n_max, prov.precision_bits
            )?;
            for line in &report.text {
                writeln!(w, "{line}")?;
            }
            writeln!(w, "status: {}", report.status)?;
        }
    }
    w.flush()
}
