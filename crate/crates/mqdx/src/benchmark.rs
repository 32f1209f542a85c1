//! Harmonic-interaction ground-state benchmark suite.
//!
//! Each case relaxes `N` particles in a unit-frequency trap on the grid
//! `(128, -8, 8)` for `tau = 20` at `dtau = 0.1` and compares with the
//! published MCTDH energy and with the closed-form exact energy.

use std::sync::Arc;
use std::time::{Duration, Instant};

use mqdx_core::fock::{ConfigurationBasis, Statistics};
use mqdx_core::grid::Grid;
use mqdx_core::mctdh::HamiltonianSpec;
use mqdx_core::model::{InteractionSpec, PotentialSpec};
use mqdx_core::oracle::{him_exact_energy, HimSpec};
use mqdx_core::solver::{initial_guess, relax, GuessKind, RunConfig};

use crate::error::Result;

pub const BOSON_K0: f64 = 0.05555555556;
pub const FERMION_K0: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HimCase {
    pub statistics: Statistics,
    pub n_particles: usize,
    pub n_orbitals: usize,
    pub k0: f64,
    /// Published MCTDH energy for this orbital count.
    pub reference: f64,
    pub slow: bool,
}

const fn case(statistics: Statistics, n_particles: usize, n_orbitals: usize, reference: f64, slow: bool) -> HimCase {
    let k0 = match statistics {
        Statistics::Boson => BOSON_K0,
        Statistics::Fermion => FERMION_K0,
    };
    HimCase {
        statistics,
        n_particles,
        n_orbitals,
        k0,
        reference,
        slow,
    }
}

/// Bosons (N = 10) and fermions (N = 2, 5, 8) with the published energies.
pub const HIM_CASES: &[HimCase] = &[
    case(Statistics::Boson, 10, 1, 7.071067812008208, false),
    case(Statistics::Boson, 10, 2, 7.038769026440956, false),
    case(Statistics::Boson, 10, 3, 7.038350652543779, false),
    case(Statistics::Boson, 10, 4, 7.038348425047187, true),
    case(Statistics::Boson, 10, 5, 7.038348415486683, true),
    case(Statistics::Fermion, 2, 3, 3.103244922155683, false),
    case(Statistics::Fermion, 2, 4, 3.098082754434019, false),
    case(Statistics::Fermion, 2, 5, 3.098082754434124, false),
    case(Statistics::Fermion, 2, 6, 3.098076216222958, false),
    case(Statistics::Fermion, 5, 6, 29.93368010792828, true),
    case(Statistics::Fermion, 5, 7, 29.89850111772063, true),
    case(Statistics::Fermion, 5, 8, 29.89443423675234, true),
    case(Statistics::Fermion, 8, 9, 95.08244224010051, true),
    case(Statistics::Fermion, 8, 10, 95.01531056595735, true),
];

/// Published natural occupations, descending: bosons N = 10, M = 5.
pub const BOSON_OCCUPATIONS_M5: [f64; 5] = [
    0.9968427274690541,
    0.3147304166934598e-2,
    0.9936893501857101e-5,
    0.3137224570732360e-7,
    0.9826348708153463e-10,
];

/// Published natural occupations, descending: fermions N = 2, M = 5.
pub const FERMION_OCCUPATIONS_M5: [f64; 4] = [
    0.4995067585437437,
    0.4995067585437435,
    0.4932414562564047e-3,
    0.4932414562563642e-3,
];

impl HimCase {
    pub fn exact(&self) -> f64 {
        him_exact_energy(&HimSpec {
            statistics: self.statistics,
            n_particles: self.n_particles,
            omega: 1.0,
            k0: self.k0,
        })
        .expect("benchmark parameters are bound")
    }

    pub fn label(&self) -> String {
        let kind = match self.statistics {
            Statistics::Boson => "bosons",
            Statistics::Fermion => "fermions",
        };
        format!("{kind} N={} M={}", self.n_particles, self.n_orbitals)
    }

    pub fn run(&self, seed: u64) -> Result<HimOutcome> {
        let start = Instant::now();
        let grid = Grid::new(128, -8.0, 8.0)?;
        let spec = HamiltonianSpec::new(PotentialSpec::harmonic(1.0), InteractionSpec::harmonic(self.k0), 1.0)?;
        let basis = Arc::new(ConfigurationBasis::new(self.statistics, self.n_particles, self.n_orbitals)?);
        let guess = initial_guess(&grid, basis, GuessKind::Hand, seed)?;
        let (_, traj) = relax(&guess, &spec, &RunConfig::relaxation(20.0, 0.1, 20.0))?;
        let last = traj.records.last().expect("a relaxation records its final frame");
        Ok(HimOutcome {
            energy: last.energy,
            occupations: last.occupations.iter().rev().copied().collect(),
            elapsed: start.elapsed(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct HimOutcome {
    pub energy: f64,
    /// Descending natural occupations.
    pub occupations: Vec<f64>,
    pub elapsed: Duration,
}

pub fn table_header() -> String {
    format!(
        "{:<20} {:>20} {:>20} {:>10} {:>20} {:>10} {:>9}",
        "case", "energy", "published", "|diff|", "exact", "|diff|", "seconds"
    )
}

pub fn table_row(case: &HimCase, outcome: &HimOutcome) -> String {
    format!(
        "{:<20} {:>20.12} {:>20.12} {:>10.2e} {:>20.12} {:>10.2e} {:>9.2}",
        case.label(),
        outcome.energy,
        case.reference,
        (outcome.energy - case.reference).abs(),
        case.exact(),
        (outcome.energy - case.exact()).abs(),
        outcome.elapsed.as_secs_f64()
    )
}
