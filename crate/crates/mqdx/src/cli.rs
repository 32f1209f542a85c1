//! Command-line interface: `relax`, `propagate`, `analyze` and `benchmark him`.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use log::{info, warn};
use mqdx_core::analysis::correlations_x;
use mqdx_core::fock::ConfigurationBasis;
use mqdx_core::mctdh::{energy_breakdown, ManyBodyState};
use mqdx_core::solver::{initial_guess, propagate_with, relax_with, GuessKind, Record};

use crate::benchmark::{table_header, table_row, HIM_CASES};
use crate::deck::InputDeck;
use crate::error::{CliError, Result};
use crate::output::{
    correlations_name, korbs_name, orbs_name, write_correlations, write_korbs, write_orbs, write_total_energy, NoPrWriter,
    NO_PR_FILE, TOTAL_ENERGY_FILE,
};
use crate::restart::{adapt_to_run, list_snapshots, read_restart, restart_name, write_restart};
use crate::setup::{self, Mode, RunSetup};

/// Run deck looked up next to an analysis deck when `--input` is not given.
pub const DEFAULT_RUN_DECK: &str = "MCTDHX.inp";
/// Largest gap between a requested analysis time and a snapshot that passes silently.
const SNAPSHOT_MATCH: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "mqdx", version, about = "MCTDH ground states and dynamics of 1D bosons and fermions")]
pub struct Cli {
    /// Seed for the random part of HAND initial guesses.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    /// Directory for all output files; created if missing.
    #[arg(long, global = true, default_value = ".")]
    pub output_dir: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Imaginary-time relaxation to the ground state.
    Relax { deck: PathBuf },
    /// Real-time propagation from a restart snapshot.
    Propagate { deck: PathBuf },
    /// Densities, correlations and energies from stored snapshots.
    Analyze {
        deck: PathBuf,
        /// Run deck with the Hamiltonian [default: MCTDHX.inp next to the analysis deck]
        #[arg(long)]
        input: Option<PathBuf>,
        /// Directory holding the restart snapshots [default: the analysis deck's directory]
        #[arg(long)]
        data_dir: Option<PathBuf>,
    },
    /// Published benchmark suites.
    Benchmark {
        #[command(subcommand)]
        suite: Suite,
    },
}

#[derive(Debug, Subcommand)]
pub enum Suite {
    /// Harmonic-interaction ground states against published and exact energies.
    Him {
        /// Include the large cases (bosons M >= 4, fermions N >= 5).
        #[arg(long)]
        slow: bool,
    },
}

/// What a relaxation or propagation produced.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub records: Vec<Record>,
    pub final_state: ManyBodyState,
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Relax { deck } => {
            let summary = run_deck(deck, Mode::Relax, cli.seed, &cli.output_dir)?;
            if let Some(last) = summary.records.last() {
                println!("final energy {:.15}", last.energy);
            }
        }
        Command::Propagate { deck } => {
            let summary = run_deck(deck, Mode::Propagate, cli.seed, &cli.output_dir)?;
            if let Some(last) = summary.records.last() {
                println!("reached t = {} with energy {:.15}", last.time, last.energy);
            }
        }
        Command::Analyze { deck, input, data_dir } => {
            analyze(deck, input.as_deref(), data_dir.as_deref(), &cli.output_dir)?;
        }
        Command::Benchmark { suite: Suite::Him { slow } } => {
            benchmark_him(*slow, cli.seed, &mut std::io::stdout().lock())?;
        }
    }
    Ok(())
}

fn parent_dir(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Restart file for time `t`, looked up next to the deck and then in the output directory.
fn find_restart(deck: &Path, output_dir: &Path, t: f64) -> Result<PathBuf> {
    let name = restart_name(t);
    let candidates = [parent_dir(deck).join(&name), output_dir.join(&name)];
    candidates.iter().find(|p| p.is_file()).cloned().ok_or_else(|| {
        CliError::restart(
            &candidates[0],
            format!("Binary_Start_Time = {t}: no {name} next to the deck or in {}", output_dir.display()),
        )
    })
}

/// Relaxation or propagation driven by a run deck. Writes `NO_PR.out`, a
/// restart snapshot per output time and, with `Write_ASCII`, the orbital files.
pub fn run_deck(deck_path: &Path, mode: Mode, seed: u64, output_dir: &Path) -> Result<RunSummary> {
    let deck = InputDeck::parse_file(deck_path)?;
    let setup = RunSetup::from_deck(&deck, mode)?;
    ensure_dir(output_dir)?;
    let start = match setup.config.guess {
        GuessKind::Hand => {
            let basis = Arc::new(ConfigurationBasis::new(setup.statistics, setup.n_particles, setup.n_orbitals)?);
            initial_guess(&setup.grid, basis, GuessKind::Hand, seed)?
        }
        GuessKind::Binr => {
            let path = find_restart(deck_path, output_dir, setup.config.binary_start_time)?;
            info!("starting from {}", path.display());
            let state = read_restart(&path)?;
            adapt_to_run(state, &path, setup.statistics, setup.n_particles, setup.n_orbitals, &setup.grid)?
        }
    };

    let mut no_pr = NoPrWriter::create(&output_dir.join(NO_PR_FILE))?;
    // the solver's observer can only return solver errors, so file errors are parked here
    let mut io_error: Option<CliError> = None;
    let mut observer = |record: &Record, state: &ManyBodyState| -> mqdx_core::error::Result<()> {
        let outcome = no_pr
            .push(record)
            .and_then(|_| write_restart(state, &output_dir.join(restart_name(record.time))))
            .and_then(|_| {
                if setup.write_ascii {
                    write_orbs(state, &setup.spec, record.time, &output_dir.join(orbs_name(record.time)))
                } else {
                    Ok(())
                }
            });
        info!("t = {:>10.4}  E = {:.12}", record.time, record.energy);
        match outcome {
            Ok(()) => Ok(()),
            Err(e) => {
                let message = e.to_string();
                io_error = Some(e);
                Err(mqdx_core::error::Error::Config(format!("output failed: {message}")))
            }
        }
    };
    let result = match mode {
        Mode::Relax => relax_with(&start, &setup.spec, &setup.config, &mut observer),
        Mode::Propagate => propagate_with(&start, &setup.spec, &setup.config, &mut observer),
    };
    if let Some(e) = io_error {
        return Err(e);
    }
    let (final_state, traj) = result?;
    Ok(RunSummary {
        records: traj.records,
        final_state,
    })
}

/// Requested analysis times: `Time_Points` evenly spaced values from
/// `Time_From` to `Time_To`, both included.
pub fn analysis_times(from: f64, to: f64, points: usize) -> Result<Vec<f64>> {
    match points {
        0 => Err(CliError::bad_value("Time_Points", "must be at least 1")),
        1 => Ok(vec![from]),
        p => Ok((0..p).map(|i| from + (to - from) * i as f64 / (p - 1) as f64).collect()),
    }
}

/// Runs the analysis deck against stored snapshots; returns the snapshot
/// times actually analysed.
pub fn analyze(deck_path: &Path, input: Option<&Path>, data_dir: Option<&Path>, output_dir: &Path) -> Result<Vec<f64>> {
    let deck = InputDeck::parse_file(deck_path)?;
    let run_deck_path = input.map_or_else(|| parent_dir(deck_path).join(DEFAULT_RUN_DECK), Path::to_path_buf);
    let run_deck = InputDeck::parse_file(&run_deck_path)?;
    let spec = setup::hamiltonian(&run_deck)?;
    let data_dir = data_dir.map_or_else(|| parent_dir(deck_path), Path::to_path_buf);
    let snapshots = list_snapshots(&data_dir)?;
    if snapshots.is_empty() {
        return Err(CliError::restart(&data_dir, "no restart_*.mqdx snapshots in this directory"));
    }

    let from = deck.real("Time_From")?;
    let to = deck.real_or("Time_To", from)?;
    let points = if deck.contains("Time_Points") { deck.usize("Time_Points")? } else { 1 };
    let want_density = deck.bool_or("Density_x", false)?;
    let want_k = deck.bool_or("Density_k", false)?;
    let want_corr = deck.bool_or("Correlations_X", false)?;
    let want_energy = deck.bool_or("Total_Energy", false)?;
    if deck.bool_or("Correlations_K", false)? {
        warn!("Correlations_K is not implemented; ignored");
    }
    ensure_dir(output_dir)?;

    let mut analysed = Vec::new();
    let mut energies = Vec::new();
    for t in analysis_times(from, to, points)? {
        let (time, path) = snapshots
            .iter()
            .min_by(|a, b| (a.0 - t).abs().total_cmp(&(b.0 - t).abs()))
            .expect("snapshot list is not empty");
        if (time - t).abs() > SNAPSHOT_MATCH {
            warn!("no snapshot at t = {t}; using the nearest one at t = {time}");
        }
        if analysed.last() == Some(time) {
            continue;
        }
        let state = read_restart(path)?;
        let grid = &state.grid;
        if want_density {
            write_orbs(&state, &spec, *time, &output_dir.join(orbs_name(*time)))?;
        }
        if want_k {
            write_korbs(&state, &output_dir.join(korbs_name(*time)))?;
        }
        if want_corr {
            let start = deck.real_or("xstart", grid.x_min())?;
            let end = deck.real_or("xend", grid.x_max())?;
            let name = correlations_name(*time, state.n_particles(), state.n_orbitals());
            write_correlations(&correlations_x(&state), start, end, &output_dir.join(name))?;
        }
        if want_energy {
            energies.push((*time, energy_breakdown(&state, &spec, *time)));
        }
        analysed.push(*time);
    }
    if want_energy {
        write_total_energy(&energies, &output_dir.join(TOTAL_ENERGY_FILE))?;
    }
    Ok(analysed)
}

pub fn benchmark_him(slow: bool, seed: u64, out: &mut impl Write) -> Result<()> {
    let io = |e| CliError::io(Path::new("<stdout>"), e);
    writeln!(out, "{}", table_header()).map_err(io)?;
    for case in HIM_CASES.iter().filter(|c| slow || !c.slow) {
        let outcome = case.run(seed)?;
        writeln!(out, "{}", table_row(case, &outcome)).map_err(io)?;
        out.flush().map_err(io)?;
    }
    if !slow {
        writeln!(out, "(large cases skipped; pass --slow to include them)").map_err(io)?;
    }
    Ok(())
}
