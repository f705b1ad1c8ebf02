//! Obtaining coefficient tables: from the cache when possible, otherwise from
//! the engines, storing the result.

use std::path::{Path, PathBuf};

use orthorec::ball::{ball_coefficients_with, default_precision, BallOptions, BallProgress};
use orthorec::cache::{self, CachedTable, Engine};
use orthorec::exact::{exact_coefficients_with, EXACT_DEFAULT_CAP};
use orthorec::{BallCoefficientTable, Error, ExactCoefficientTable};

use crate::args::{Common, EngineArg};
use crate::CliError;

/// Smallest precision the ball engine accepts from the command line.
const MIN_PRECISION: u32 = 64;

enum Location {
    File(PathBuf),
    Dir(PathBuf),
}

fn location(common: &Common) -> Option<Location> {
    let p = common.cache.as_ref()?;
    Some(if p.is_file() {
        Location::File(p.clone())
    } else {
        Location::Dir(p.clone())
    })
}

fn load(path: &Path) -> Result<CachedTable, CliError> {
    cache::load(path).map_err(|e| CliError::Cache(format!("{}: {e}", path.display())))
}

fn store(dir: &Path, name: &Path, table: &CachedTable, quiet: bool) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    cache::store(&path, table)?;
    if !quiet {
        eprintln!("orthorec: cached {}", path.display());
    }
    Ok(())
}

fn too_short(path: &Path, have: usize, want: usize) -> CliError {
    CliError::Usage(format!(
        "{} holds n <= {have}, but n_max = {want} was requested",
        path.display()
    ))
}

fn truncate_exact(
    t: ExactCoefficientTable,
    n_max: usize,
) -> Result<ExactCoefficientTable, CliError> {
    if t.n_max() == n_max {
        return Ok(t);
    }
    Ok(ExactCoefficientTable::from_coefficients(
        t.coeffs()[..=n_max].to_vec(),
    )?)
}

fn truncate_ball(t: BallCoefficientTable, n_max: usize) -> Result<BallCoefficientTable, CliError> {
    if t.n_max() == n_max {
        return Ok(t);
    }
    let prec = t.precision_bits();
    Ok(BallCoefficientTable::from_coefficients(
        t.coeffs()[..=n_max].to_vec(),
        prec,
    )?)
}

/// Precision used when a ball table is built or promoted.
pub fn ball_precision(common: &Common, n_max: usize) -> Result<u32, CliError> {
    match common.precision {
        Some(p) if p < MIN_PRECISION => Err(CliError::Usage(format!(
            "--precision must be at least {MIN_PRECISION} bits"
        ))),
        Some(p) => Ok(p),
        None => Ok(default_precision(n_max)),
    }
}

fn compute_exact(common: &Common, n_max: usize) -> Result<ExactCoefficientTable, CliError> {
    let cap = if common.force {
        usize::MAX
    } else {
        EXACT_DEFAULT_CAP
    };
    let step = (n_max / 10).max(1);
    let quiet = common.quiet;
    let mut progress = |n: usize| {
        if !quiet && n > 0 && n % step == 0 {
            eprintln!("orthorec: exact c_n computed up to n = {n}/{n_max}");
        }
    };
    exact_coefficients_with(n_max, cap, &mut progress).map_err(|e| match e {
        Error::Capacity { requested, cap } => CliError::Usage(format!(
            "exact tables are capped at n_max = {cap} (requested {requested}); pass --force to lift the cap"
        )),
        e => e.into(),
    })
}

fn compute_ball(
    common: &Common,
    n_max: usize,
    prec: u32,
) -> Result<BallCoefficientTable, CliError> {
    let opts = BallOptions {
        initial_precision: Some(prec),
        max_precision: BallOptions::default().max_precision.max(prec),
        ..BallOptions::default()
    };
    let step = (n_max / 10).max(1);
    let quiet = common.quiet;
    let mut progress = |p: BallProgress| {
        if !quiet && p.n > 0 && (p.n % step == 0 || p.n == p.n_max) {
            eprintln!(
                "orthorec: ball c_n at {} bits up to n = {}/{}",
                p.precision_bits, p.n, p.n_max
            );
        }
    };
    Ok(ball_coefficients_with(n_max, &opts, &mut progress)?)
}

/// Exact table for `c_0..=c_{n_max}`, whatever the selected engine.
pub fn exact_table(common: &Common, n_max: usize) -> Result<ExactCoefficientTable, CliError> {
    match location(common) {
        Some(Location::File(path)) => {
            let t = load(&path)?;
            if t.engine() == Engine::Ball {
                return Err(CliError::Cache(format!(
                    "{} holds ball coefficients and cannot stand in for exact ones",
                    path.display()
                )));
            }
            if t.n_max() < n_max {
                return Err(too_short(&path, t.n_max(), n_max));
            }
            truncate_exact(t.into_exact()?, n_max)
        }
        Some(Location::Dir(dir)) => {
            let name = cache::file_name(Engine::Exact, n_max, 0);
            let path = dir.join(&name);
            if path.is_file() {
                return Ok(load(&path)?.into_exact()?);
            }
            let t = compute_exact(common, n_max)?;
            let cached = CachedTable::Exact(t);
            store(&dir, &name, &cached, common.quiet)?;
            Ok(cached.into_exact()?)
        }
        None => compute_exact(common, n_max),
    }
}

/// Ball table for `c_0..=c_{n_max}`. With the exact engine, or when only an
/// exact table is cached, the exact values are rounded into balls.
pub fn ball_table(common: &Common, n_max: usize) -> Result<BallCoefficientTable, CliError> {
    let prec = ball_precision(common, n_max)?;
    if common.engine == EngineArg::Exact {
        return Ok(BallCoefficientTable::from_exact(
            &exact_table(common, n_max)?,
            prec,
        ));
    }
    match location(common) {
        Some(Location::File(path)) => {
            let t = load(&path)?;
            if t.n_max() < n_max {
                return Err(too_short(&path, t.n_max(), n_max));
            }
            truncate_ball(t.into_ball(prec), n_max)
        }
        Some(Location::Dir(dir)) => {
            let name = cache::file_name(Engine::Ball, n_max, prec);
            let path = dir.join(&name);
            if path.is_file() {
                return Ok(load(&path)?.into_ball(prec));
            }
            let exact = dir.join(cache::file_name(Engine::Exact, n_max, 0));
            if exact.is_file() {
                return Ok(load(&exact)?.into_ball(prec));
            }
            let t = compute_ball(common, n_max, prec)?;
            let cached = CachedTable::Ball(t);
            store(&dir, &name, &cached, common.quiet)?;
            Ok(cached.into_ball(prec))
        }
        None => compute_ball(common, n_max, prec),
    }
}

pub enum Table {
    Exact(ExactCoefficientTable),
    Ball(BallCoefficientTable),
}

impl Table {
    pub fn precision_bits(&self) -> u32 {
        match self {
            Table::Exact(_) => 0,
            Table::Ball(t) => t.precision_bits(),
        }
    }
}

/// The table of the selected engine.
pub fn table(common: &Common) -> Result<Table, CliError> {
    Ok(match common.engine {
        EngineArg::Exact => Table::Exact(exact_table(common, common.n_max)?),
        EngineArg::Ball => Table::Ball(ball_table(common, common.n_max)?),
    })
}
