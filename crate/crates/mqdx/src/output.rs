//! ASCII output files.
//!
//! Every file is whitespace-separated with 15 significant digits per number.
//! Column layouts:
//!
//! * `NO_PR.out`: time, the `M` natural occupations in ascending order
//!   (normalized to sum one), energy in column `M + 2`.
//! * `<time>orbs.dat`: `x`, four zero placeholders (y, z and two reserved
//!   columns), normalized density `rho(x)` in column 6, the potential `V(x, t)`
//!   in column 7, then real and imaginary parts of each working orbital.
//!   Columns 2 to 5 and the potential's position are conventions of this
//!   program; the density column is the one plotted with `u 1:6`.
//! * `<time>korbs.dat`: `k`, four zero placeholders, normalized momentum
//!   density in column 6.
//! * `<time>N<N>M<M>x-correlations.dat`: `x`, 0, 0, `x'`, 0, 0, `N rho(x)`,
//!   `Re rho1(x, x')`, `Im rho1(x, x')`, `N rho(x')`, `rho2(x, x')`.
//! * `total_energy.dat`: time, kinetic, potential, interaction and total energy.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use mqdx_core::analysis::{density_k, density_x, CorrelationRecord};
use mqdx_core::mctdh::{EnergyBreakdown, HamiltonianSpec, ManyBodyState};
use mqdx_core::solver::Record;

use crate::error::{CliError, Result};

pub const NO_PR_FILE: &str = "NO_PR.out";
pub const TOTAL_ENERGY_FILE: &str = "total_energy.dat";

/// 15 significant digits with a two-digit signed exponent, right-aligned.
pub fn fmt_real(x: f64) -> String {
    let s = format!("{x:.14E}");
    let (mantissa, exp) = s.split_once('E').expect("exponent format always has an E");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{:>24}", format!("{mantissa}E{sign}{:02}", exp.abs()))
}

/// Time prefix of snapshot files, e.g. `20.0000000`.
pub fn time_label(t: f64) -> String {
    // avoid "-0.0000000" from roundoff just below zero
    let t = if t.abs() < 5e-8 { 0.0 } else { t };
    format!("{t:.7}")
}

pub fn orbs_name(t: f64) -> String {
    format!("{}orbs.dat", time_label(t))
}

pub fn korbs_name(t: f64) -> String {
    format!("{}korbs.dat", time_label(t))
}

pub fn correlations_name(t: f64, n: usize, m: usize) -> String {
    format!("{}N{n}M{m}x-correlations.dat", time_label(t))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

fn write_row(out: &mut impl Write, path: &Path, values: impl IntoIterator<Item = f64>) -> Result<()> {
    let line: String = values.into_iter().map(fmt_real).collect();
    writeln!(out, "{line}").map_err(|e| CliError::io(path, e))
}

fn finish(mut out: BufWriter<File>, path: &Path) -> Result<()> {
    out.flush().map_err(|e| CliError::io(path, e))
}

/// Row-by-row writer for `NO_PR.out`; each row is flushed so an interrupted
/// run leaves a valid prefix.
pub struct NoPrWriter {
    out: BufWriter<File>,
    path: PathBuf,
}

impl NoPrWriter {
    pub fn create(path: &Path) -> Result<Self> {
        Ok(Self {
            out: create(path)?,
            path: path.to_path_buf(),
        })
    }

    pub fn push(&mut self, record: &Record) -> Result<()> {
        let row = std::iter::once(record.time)
            .chain(record.occupations.iter().copied())
            .chain(std::iter::once(record.energy));
        write_row(&mut self.out, &self.path, row)?;
        self.out.flush().map_err(|e| CliError::io(&self.path, e))
    }
}

pub fn write_no_pr(records: &[Record], path: &Path) -> Result<()> {
    let mut writer = NoPrWriter::create(path)?;
    records.iter().try_for_each(|r| writer.push(r))
}

pub fn write_orbs(state: &ManyBodyState, spec: &HamiltonianSpec, t: f64, path: &Path) -> Result<()> {
    let mut out = create(path)?;
    let rho = density_x(state);
    for (i, &x) in state.grid.points().iter().enumerate() {
        let row = [x, 0.0, 0.0, 0.0, 0.0, rho[i], spec.potential.evaluate(x, t)]
            .into_iter()
            .chain(state.orbitals.iter().flat_map(|o| [o[i].re, o[i].im]));
        write_row(&mut out, path, row)?;
    }
    finish(out, path)
}

pub fn write_korbs(state: &ManyBodyState, path: &Path) -> Result<()> {
    let mut out = create(path)?;
    let density = density_k(state);
    for (k, rho) in density.k.iter().zip(&density.density) {
        write_row(&mut out, path, [*k, 0.0, 0.0, 0.0, 0.0, *rho])?;
    }
    finish(out, path)
}

/// Writes the records with `x` and `x'` inside `[start, end]`; a blank line
/// separates blocks of constant `x` so the file plots directly as a surface.
pub fn write_correlations(records: &[CorrelationRecord], start: f64, end: f64, path: &Path) -> Result<()> {
    let mut out = create(path)?;
    let inside = |x: f64| x >= start && x <= end;
    let mut last_x: Option<f64> = None;
    for r in records.iter().filter(|r| inside(r.x) && inside(r.x_prime)) {
        if last_x.is_some_and(|x| x != r.x) {
            writeln!(out).map_err(|e| CliError::io(path, e))?;
        }
        last_x = Some(r.x);
        let row = [r.x, 0.0, 0.0, r.x_prime, 0.0, 0.0, r.rho_x, r.rho1_re, r.rho1_im, r.rho_xp, r.rho2_diag];
        write_row(&mut out, path, row)?;
    }
    finish(out, path)
}

pub fn write_total_energy(rows: &[(f64, EnergyBreakdown)], path: &Path) -> Result<()> {
    let mut out = create(path)?;
    for (t, e) in rows {
        write_row(&mut out, path, [*t, e.kinetic, e.potential, e.interaction, e.total()])?;
    }
    finish(out, path)
}

/// Reads a whitespace-separated numeric table, skipping blank lines.
pub fn read_table(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            line.split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>().map_err(|_| CliError::Parse {
                        source_name: path.display().to_string(),
                        line: i + 1,
                        message: format!("not a number: `{tok}`"),
                    })
                })
                .collect()
        })
        .collect()
}
