//! Translation of a run deck into the solver's types.

use log::warn;
use mqdx_core::fock::Statistics;
use mqdx_core::grid::Grid;
use mqdx_core::mctdh::HamiltonianSpec;
use mqdx_core::model::{InteractionKind, InteractionSpec, PotentialKind, PotentialSpec};
use mqdx_core::solver::{CoefficientIntegrator, GuessKind, RunConfig};
use num_complex::Complex64;

use crate::deck::InputDeck;
use crate::error::{CliError, Result};

/// Which of the two run subcommands is reading the deck.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Relax,
    Propagate,
}

impl Mode {
    fn prefactor(self) -> Complex64 {
        match self {
            Mode::Relax => Complex64::new(-1.0, 0.0),
            Mode::Propagate => Complex64::new(0.0, -1.0),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunSetup {
    pub statistics: Statistics,
    pub n_particles: usize,
    pub n_orbitals: usize,
    pub grid: Grid,
    pub spec: HamiltonianSpec,
    pub config: RunConfig,
    pub write_ascii: bool,
}

pub fn statistics(deck: &InputDeck) -> Result<Statistics> {
    match deck.string("JOB_TYPE")? {
        "BOS" => Ok(Statistics::Boson),
        "FER" => Ok(Statistics::Fermion),
        other => Err(CliError::bad_value("JOB_TYPE", format!("expected 'BOS' or 'FER', got '{other}'"))),
    }
}

pub fn grid(deck: &InputDeck) -> Result<Grid> {
    let dim = if deck.contains("DIM_MCTDH") { deck.int("DIM_MCTDH")? } else { 1 };
    if dim != 1 {
        return Err(CliError::bad_value("DIM_MCTDH", format!("only 1D runs are supported, got {dim}")));
    }
    for key in ["NDVR_Y", "NDVR_Z"] {
        if deck.contains(key) && deck.int(key)? != 1 {
            warn!("{key} = {} ignored in a 1D run", deck.int(key)?);
        }
    }
    let n = deck.usize("NDVR_X")?;
    Ok(Grid::new(n, deck.real("x_initial")?, deck.real("x_final")?)?)
}

pub fn potential(deck: &InputDeck) -> Result<PotentialSpec> {
    let name = deck.string("whichpot")?;
    let kind = PotentialKind::from_key(name)
        .ok_or_else(|| CliError::bad_value("whichpot", format!("unsupported potential '{name}' (HO1D or HO1D+td_gauss)")))?;
    let params = deck.indexed_reals("parameter", 30)?;
    if let Some(i) = params.iter().skip(6).position(|&p| p != 0.0) {
        warn!("parameter{} is not used by {name}", i + 7);
    }
    Ok(PotentialSpec::from_parameters(kind, &params)?)
}

/// Interaction_Type 0 is the local contact path; 4 and 7 are the
/// long-range kernels selected by `which_interaction`.
pub fn interaction(deck: &InputDeck) -> Result<InteractionSpec> {
    let strength = deck.real("xlambda_0")?;
    let itype = if deck.contains("Interaction_Type") { deck.int("Interaction_Type")? } else { 0 };
    let kind = match itype {
        0 => {
            if deck.contains("which_interaction") {
                let name = deck.string("which_interaction")?;
                if name != "delta" {
                    warn!("Interaction_Type = 0 is contact; which_interaction = '{name}' ignored");
                }
            }
            InteractionKind::Contact
        }
        4 | 7 => {
            let name = deck.string("which_interaction")?;
            InteractionKind::from_key(name).ok_or_else(|| {
                CliError::bad_value("which_interaction", format!("unsupported interaction '{name}' (delta, HIM or regC)"))
            })?
        }
        other => {
            return Err(CliError::bad_value(
                "Interaction_Type",
                format!("supported types are 0 (contact), 4 and 7 (kernel), got {other}"),
            ))
        }
    };
    let params = deck.indexed_reals("Interaction_Parameter", 30)?;
    let spec = match kind {
        InteractionKind::Contact => InteractionSpec::contact(strength),
        InteractionKind::Harmonic => InteractionSpec::harmonic(strength),
        InteractionKind::RegularizedCoulomb => InteractionSpec::regularized_coulomb(strength, params[0], params[1]),
    };
    spec.validate()?;
    Ok(spec)
}

pub fn hamiltonian(deck: &InputDeck) -> Result<HamiltonianSpec> {
    let mass = deck.real_or("mass", 1.0)?;
    Ok(HamiltonianSpec::new(potential(deck)?, interaction(deck)?, mass)?)
}

fn run_config(deck: &InputDeck, mode: Mode) -> Result<RunConfig> {
    let time_final = deck.real("Time_Final")?;
    let dt = deck.real("Integration_Stepsize")?;
    let output = deck.real("Output_TimeStep")?;
    let mut config = match mode {
        Mode::Relax => RunConfig::relaxation(time_final, dt, output),
        Mode::Propagate => RunConfig::propagation(time_final, dt, output),
    };
    config.time_begin = deck.real_or("Time_Begin", 0.0)?;
    if deck.contains("Job_Prefactor") {
        let (re, im) = deck.complex("Job_Prefactor")?;
        let given = Complex64::new(re, im);
        if given != mode.prefactor() {
            return Err(CliError::bad_value(
                "Job_Prefactor",
                format!("{given} does not match this subcommand, which needs {}", mode.prefactor()),
            ));
        }
    }
    let guess = if deck.contains("GUESS") {
        deck.string("GUESS")?
    } else {
        match mode {
            Mode::Relax => "HAND",
            Mode::Propagate => "BINR",
        }
    };
    config.guess = match guess {
        "HAND" => GuessKind::Hand,
        "BINR" => GuessKind::Binr,
        other => return Err(CliError::bad_value("GUESS", format!("expected 'HAND' or 'BINR', got '{other}'"))),
    };
    if mode == Mode::Propagate && config.guess == GuessKind::Hand {
        return Err(CliError::bad_value("GUESS", "a propagation starts from a restart file; use 'BINR'"));
    }
    if config.guess == GuessKind::Binr {
        config.binary_start_time = deck.real("Binary_Start_Time")?;
    }
    if deck.contains("Coefficients_Integrator") {
        let wanted = match deck.string("Coefficients_Integrator")? {
            "DAV" => CoefficientIntegrator::Davidson,
            "MCS" => CoefficientIntegrator::ShortIterativeLanczos,
            other => {
                return Err(CliError::bad_value(
                    "Coefficients_Integrator",
                    format!("expected 'DAV' or 'MCS', got '{other}'"),
                ))
            }
        };
        if wanted != config.coefficients_integrator {
            warn!(
                "Coefficients_Integrator {:?} replaced by {:?}, the only one used for this run type",
                wanted, config.coefficients_integrator
            );
        }
    }
    if deck.contains("Orbital_Integrator") {
        let name = deck.string("Orbital_Integrator")?;
        if name != "RK" {
            warn!("Orbital_Integrator '{name}' replaced by the built-in exponential Runge-Kutta scheme");
        }
    }
    config.validate()?;
    Ok(config)
}

impl RunSetup {
    pub fn from_deck(deck: &InputDeck, mode: Mode) -> Result<Self> {
        let statistics = statistics(deck)?;
        let n_particles = deck.usize("Npar")?;
        let n_orbitals = deck.usize("Morb")?;
        if n_particles == 0 || n_orbitals == 0 {
            return Err(CliError::bad_value("Npar", "Npar and Morb must be positive"));
        }
        Ok(Self {
            statistics,
            n_particles,
            n_orbitals,
            grid: grid(deck)?,
            spec: hamiltonian(deck)?,
            config: run_config(deck, mode)?,
            write_ascii: deck.bool_or("Write_ASCII", false)?,
        })
    }
}
