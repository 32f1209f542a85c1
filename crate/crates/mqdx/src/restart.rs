//! Binary restart snapshots.
//!
//! One file holds everything needed to continue a run:
//!
//! ```text
//! "MQDX0001"                      8 bytes
//! kind, N, M, n_points            u64 each (kind 0 = bosons, 1 = fermions)
//! x_min, x_max, time              f64 each
//! orbitals                        M * n_points complex values
//! coefficients                    basis-size complex values
//! ```
//!
//! All numbers are little-endian; a complex value is its real part followed by
//! its imaginary part.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use log::warn;
use mqdx_core::fock::{ConfigurationBasis, Statistics};
use mqdx_core::grid::Grid;
use mqdx_core::mctdh::ManyBodyState;
use mqdx_core::solver::interpolate_state;
use num_complex::Complex64;

use crate::error::{CliError, Result};
use crate::output::time_label;

pub const MAGIC: &[u8; 8] = b"MQDX0001";
const HEADER_LEN: usize = 8 + 7 * 8;

pub fn restart_name(t: f64) -> String {
    format!("restart_{}.mqdx", time_label(t))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartHeader {
    pub statistics: Statistics,
    pub n_particles: usize,
    pub n_orbitals: usize,
    pub n_points: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub time: f64,
}

pub fn write_restart(state: &ManyBodyState, path: &Path) -> Result<()> {
    let grid = &state.grid;
    let mut bytes = Vec::with_capacity(HEADER_LEN + 16 * (state.n_orbitals() * grid.n_points() + state.coefficients.len()));
    bytes.extend_from_slice(MAGIC);
    let kind: u64 = match state.basis.statistics() {
        Statistics::Boson => 0,
        Statistics::Fermion => 1,
    };
    for v in [kind, state.n_particles() as u64, state.n_orbitals() as u64, grid.n_points() as u64] {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    for v in [grid.x_min(), grid.x_max(), state.time] {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    for z in state.orbitals.iter().flatten().chain(&state.coefficients) {
        bytes.extend_from_slice(&z.re.to_le_bytes());
        bytes.extend_from_slice(&z.im.to_le_bytes());
    }
    // write next to the target and rename, so a crash never leaves half a file
    let tmp = path.with_extension("mqdx.tmp");
    let mut file = std::fs::File::create(&tmp).map_err(|e| CliError::io(&tmp, e))?;
    file.write_all(&bytes).map_err(|e| CliError::io(&tmp, e))?;
    file.sync_all().map_err(|e| CliError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take8(&mut self) -> [u8; 8] {
        let out = self.bytes[self.pos..self.pos + 8].try_into().expect("length checked by caller");
        self.pos += 8;
        out
    }

    fn u64(&mut self) -> u64 {
        u64::from_le_bytes(self.take8())
    }

    fn f64(&mut self) -> f64 {
        f64::from_le_bytes(self.take8())
    }

    fn complex(&mut self, n: usize) -> Vec<Complex64> {
        (0..n).map(|_| Complex64::new(self.f64(), self.f64())).collect()
    }
}

fn parse_header(bytes: &[u8], path: &Path) -> Result<RestartHeader> {
    if bytes.len() < HEADER_LEN {
        return Err(CliError::restart(path, format!("truncated header ({} bytes)", bytes.len())));
    }
    if &bytes[..8] != MAGIC {
        return Err(CliError::restart(
            path,
            format!("bad magic {:?}, expected {:?}", String::from_utf8_lossy(&bytes[..8]), "MQDX0001"),
        ));
    }
    let mut c = Cursor { bytes, pos: 8 };
    let statistics = match c.u64() {
        0 => Statistics::Boson,
        1 => Statistics::Fermion,
        k => return Err(CliError::restart(path, format!("unknown particle kind {k}"))),
    };
    let to_usize = |v: u64| usize::try_from(v).map_err(|_| CliError::restart(path, format!("dimension {v} too large")));
    Ok(RestartHeader {
        statistics,
        n_particles: to_usize(c.u64())?,
        n_orbitals: to_usize(c.u64())?,
        n_points: to_usize(c.u64())?,
        x_min: c.f64(),
        x_max: c.f64(),
        time: c.f64(),
    })
}

pub fn read_header(path: &Path) -> Result<RestartHeader> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    parse_header(&bytes, path)
}

pub fn read_restart(path: &Path) -> Result<ManyBodyState> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let header = parse_header(&bytes, path)?;
    let basis = Arc::new(ConfigurationBasis::new(header.statistics, header.n_particles, header.n_orbitals)?);
    let n_values = header
        .n_orbitals
        .checked_mul(header.n_points)
        .and_then(|v| v.checked_add(basis.len()))
        .ok_or_else(|| CliError::restart(path, "dimensions overflow"))?;
    let expected = HEADER_LEN + 16 * n_values;
    if bytes.len() != expected {
        return Err(CliError::restart(
            path,
            format!("file has {} bytes, header implies {expected}", bytes.len()),
        ));
    }
    let grid = Grid::new(header.n_points, header.x_min, header.x_max)?;
    let mut c = Cursor { bytes: &bytes, pos: HEADER_LEN };
    let orbitals = (0..header.n_orbitals).map(|_| c.complex(header.n_points)).collect();
    let coefficients = c.complex(basis.len());
    Ok(ManyBodyState::new(grid, basis, orbitals, coefficients, header.time)?)
}

/// Checks a snapshot against the run it is meant to start and brings it onto
/// the run's grid. A finer grid with the same extent is reached by
/// interpolation; anything else is an error.
pub fn adapt_to_run(
    state: ManyBodyState,
    path: &Path,
    statistics: Statistics,
    n_particles: usize,
    n_orbitals: usize,
    grid: &Grid,
) -> Result<ManyBodyState> {
    let got = state.basis.statistics();
    if got != statistics {
        return Err(CliError::restart(path, format!("holds {got:?}s but the deck asks for {statistics:?}s")));
    }
    if state.n_particles() != n_particles {
        return Err(CliError::restart(
            path,
            format!("holds N = {} but the deck has Npar = {n_particles}", state.n_particles()),
        ));
    }
    if state.n_orbitals() != n_orbitals {
        return Err(CliError::restart(
            path,
            format!("holds M = {} but the deck has Morb = {n_orbitals}", state.n_orbitals()),
        ));
    }
    let old = &state.grid;
    if old == grid {
        return Ok(state);
    }
    if old.same_extent(grid) && grid.n_points() > old.n_points() {
        warn!(
            "interpolating restart orbitals from {} to {} grid points",
            old.n_points(),
            grid.n_points()
        );
        return Ok(interpolate_state(&state, grid)?);
    }
    Err(CliError::restart(
        path,
        format!(
            "grid ({}, {}, {}) does not match the deck grid ({}, {}, {})",
            old.n_points(),
            old.x_min(),
            old.x_max(),
            grid.n_points(),
            grid.x_min(),
            grid.x_max()
        ),
    ))
}

/// Restart files in `dir`, sorted by the time stored in their header.
pub fn list_snapshots(dir: &Path) -> Result<Vec<(f64, PathBuf)>> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    let mut out = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        let is_restart = path
            .file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.starts_with("restart_") && n.ends_with(".mqdx"));
        if is_restart {
            out.push((read_header(&path)?.time, path));
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}
