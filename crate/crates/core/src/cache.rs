//! On-disk coefficient cache: a short header followed by the table in its
//! native CSV format.
//!
//! ```text
//! # orthorec-cache
//! # version=1
//! # engine=ball
//! # n_max=20000
//! # precision_bits=256
//! # sha256=<hex digest of the payload>
//! n,midpoint_hex,radius_hex,precision_bits
//! ...
//! ```

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::ball::BallCoefficientTable;
use crate::error::{Error, Result};
use crate::exact::ExactCoefficientTable;
use crate::io;

pub const CACHE_VERSION: u32 = 1;
const MAGIC: &str = "# orthorec-cache";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    Exact,
    Ball,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Exact => "exact",
            Engine::Ball => "ball",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CachedTable {
    Exact(ExactCoefficientTable),
    Ball(BallCoefficientTable),
}

impl CachedTable {
    pub fn engine(&self) -> Engine {
        match self {
            CachedTable::Exact(_) => Engine::Exact,
            CachedTable::Ball(_) => Engine::Ball,
        }
    }

    pub fn n_max(&self) -> usize {
        match self {
            CachedTable::Exact(t) => t.n_max(),
            CachedTable::Ball(t) => t.n_max(),
        }
    }

    /// Precision of a ball table; 0 for exact tables.
    pub fn precision_bits(&self) -> u32 {
        match self {
            CachedTable::Exact(_) => 0,
            CachedTable::Ball(t) => t.precision_bits(),
        }
    }

    /// Ball view; exact tables are rounded to `prec` bits.
    pub fn into_ball(self, prec: u32) -> BallCoefficientTable {
        match self {
            CachedTable::Exact(t) => BallCoefficientTable::from_exact(&t, prec),
            CachedTable::Ball(t) => t,
        }
    }

    /// The exact table; a ball table is refused.
    pub fn into_exact(self) -> Result<ExactCoefficientTable> {
        match self {
            CachedTable::Exact(t) => Ok(t),
            CachedTable::Ball(_) => Err(Error::Cache(
                "cache holds ball coefficients, exact ones were requested".into(),
            )),
        }
    }
}

/// Conventional file name for a table.
pub fn file_name(engine: Engine, n_max: usize, precision_bits: u32) -> PathBuf {
    match engine {
        Engine::Exact => PathBuf::from(format!("exact-n{n_max}.csv")),
        Engine::Ball => PathBuf::from(format!("ball-n{n_max}-p{precision_bits}.csv")),
    }
}

/// The cache file contents for `table`.
pub fn encode(table: &CachedTable) -> Result<Vec<u8>> {
    let mut payload = Vec::new();
    match table {
        CachedTable::Exact(t) => io::write_exact_csv(t, &mut payload)?,
        CachedTable::Ball(t) => io::write_ball_csv(t, &mut payload)?,
    }
    let digest = hex::encode(Sha256::digest(&payload));
    let mut out = format!(
        "{MAGIC}\n# version={CACHE_VERSION}\n# engine={}\n# n_max={}\n# precision_bits={}\n# sha256={digest}\n",
        table.engine(),
        table.n_max(),
        table.precision_bits()
    )
    .into_bytes();
    out.extend_from_slice(&payload);
    Ok(out)
}

fn header_value<'a>(line: Option<&'a str>, key: &str) -> Result<&'a str> {
    line.and_then(|l| l.strip_prefix("# "))
        .and_then(|l| l.strip_prefix(key))
        .and_then(|l| l.strip_prefix('='))
        .ok_or_else(|| Error::Cache(format!("missing or malformed header field {key:?}")))
}

pub fn decode(bytes: &[u8]) -> Result<CachedTable> {
    let mut rest = bytes;
    let mut lines = Vec::new();
    for _ in 0..6 {
        let end = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| Error::Cache("truncated header".into()))?;
        let line = std::str::from_utf8(&rest[..end])
            .map_err(|_| Error::Cache("header is not UTF-8".into()))?;
        lines.push(line);
        rest = &rest[end + 1..];
    }
    let mut it = lines.into_iter();
    if it.next() != Some(MAGIC) {
        return Err(Error::Cache("not an orthorec cache file".into()));
    }
    let version: u32 = header_value(it.next(), "version")?
        .parse()
        .map_err(|_| Error::Cache("bad version field".into()))?;
    if version != CACHE_VERSION {
        return Err(Error::Cache(format!(
            "cache version {version} is not supported (expected {CACHE_VERSION})"
        )));
    }
    let engine = match header_value(it.next(), "engine")? {
        "exact" => Engine::Exact,
        "ball" => Engine::Ball,
        other => return Err(Error::Cache(format!("unknown engine {other:?}"))),
    };
    let n_max: usize = header_value(it.next(), "n_max")?
        .parse()
        .map_err(|_| Error::Cache("bad n_max field".into()))?;
    let prec: u32 = header_value(it.next(), "precision_bits")?
        .parse()
        .map_err(|_| Error::Cache("bad precision_bits field".into()))?;
    let digest = header_value(it.next(), "sha256")?;
    if hex::encode(Sha256::digest(rest)) != digest {
        return Err(Error::Cache("checksum mismatch".into()));
    }
    let table = match engine {
        Engine::Exact => CachedTable::Exact(io::read_exact_csv(rest)?),
        Engine::Ball => CachedTable::Ball(io::read_ball_csv(rest)?),
    };
    if table.n_max() != n_max || table.precision_bits() != prec {
        return Err(Error::Cache("header does not match payload".into()));
    }
    Ok(table)
}

/// Write atomically: a sibling temporary file is renamed over `path`.
pub fn store(path: &Path, table: &CachedTable) -> Result<()> {
    let bytes = encode(table)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<CachedTable> {
    let bytes = fs::read(path)?;
    decode(&bytes)
}
