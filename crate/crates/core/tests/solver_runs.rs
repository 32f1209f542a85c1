use std::sync::Arc;

use approx::assert_abs_diff_eq;
use mqdx_core::analysis::density_x;
use mqdx_core::fock::{ConfigurationBasis, Statistics};
use mqdx_core::grid::Grid;
use mqdx_core::mctdh::{HamiltonianSpec, ManyBodyState};
use mqdx_core::model::{InteractionSpec, PotentialKind, PotentialSpec};
use mqdx_core::oracle::two_particle_grid_oracle;
use mqdx_core::solver::{initial_guess, propagate, relax, GuessKind, RunConfig};

fn relaxed(
    grid: &Grid,
    stats: Statistics,
    n: usize,
    m: usize,
    spec: &HamiltonianSpec,
    config: &RunConfig,
) -> (ManyBodyState, Vec<f64>) {
    let basis = Arc::new(ConfigurationBasis::new(stats, n, m).unwrap());
    let guess = initial_guess(grid, basis, GuessKind::Hand, 1).unwrap();
    let (state, traj) = relax(&guess, spec, config).unwrap();
    (state, traj.records.iter().map(|r| r.energy).collect())
}

fn him(k0: f64) -> HamiltonianSpec {
    HamiltonianSpec::new(PotentialSpec::harmonic(1.0), InteractionSpec::harmonic(k0), 1.0).unwrap()
}

fn contact(w0: f64, potential: PotentialSpec) -> HamiltonianSpec {
    HamiltonianSpec::new(potential, InteractionSpec::contact(w0), 1.0).unwrap()
}

fn asymmetry(grid: &Grid, rho: &[f64]) -> f64 {
    // x_i and x_{n-i} are mirror images on a symmetric box
    let n = rho.len();
    (1..n).map(|i| (rho[i] - rho[n - i]).abs()).sum::<f64>() * grid.spacing()
}

#[test]
fn noninteracting_bosons_relax_to_the_oscillator_ground_state() {
    let grid = Grid::new(64, -8.0, 8.0).unwrap();
    let (state, energies) = relaxed(&grid, Statistics::Boson, 5, 1, &contact(0.0, PotentialSpec::harmonic(1.0)), &RunConfig::relaxation(20.0, 0.1, 1.0));
    assert_abs_diff_eq!(*energies.last().unwrap(), 2.5, epsilon = 1e-8);
    assert!(state.orthonormality_error() < 1e-12);
}

#[test]
fn harmonic_interaction_two_orbitals_and_monotone_energy() {
    let grid = Grid::new(128, -8.0, 8.0).unwrap();
    let config = RunConfig::relaxation(20.0, 0.1, 0.1);
    let (_, energies) = relaxed(&grid, Statistics::Boson, 10, 2, &him(0.05555555556), &config);
    assert_eq!(energies.len(), 201);
    assert_abs_diff_eq!(*energies.last().unwrap(), 7.038769026, epsilon = 1e-6);
    for w in energies[10..].windows(2) {
        assert!(w[1] <= w[0] + 1e-9, "energy rose from {} to {}", w[0], w[1]);
    }
}

#[test]
fn contact_pair_matches_two_particle_grid_diagonalization() {
    // On a coarse box the contact cusp is smeared over a few points and six
    // orbitals suffice; on finer boxes more are needed.
    let grid = Grid::new(32, -10.0, 10.0).unwrap();
    let spec = contact(1.0, PotentialSpec::harmonic(1.0));
    let (_, energies) = relaxed(&grid, Statistics::Boson, 2, 6, &spec, &RunConfig::relaxation(30.0, 0.1, 1.0));
    let (exact, _) = two_particle_grid_oracle(&grid, &spec, Statistics::Boson).unwrap();
    let e = *energies.last().unwrap();
    assert!(e >= exact - 1e-10, "variational bound violated: {e} < {exact}");
    assert_abs_diff_eq!(e, exact, epsilon = 1e-4);
}

#[test]
fn contact_pair_converges_to_the_grid_oracle_with_orbitals() {
    let grid = Grid::new(32, -6.0, 6.0).unwrap();
    let spec = contact(1.0, PotentialSpec::harmonic(1.0));
    let (exact, _) = two_particle_grid_oracle(&grid, &spec, Statistics::Boson).unwrap();
    let defect = |m: usize| {
        let (_, energies) = relaxed(&grid, Statistics::Boson, 2, m, &spec, &RunConfig::relaxation(30.0, 0.1, 1.0));
        energies.last().unwrap() - exact
    };
    let (d6, d16) = (defect(6), defect(16));
    assert!(d6 > d16 && d16 > -1e-10);
    assert!(d16 < 1e-8, "defect {d16:e} with 16 orbitals");
}

#[test]
fn halving_the_step_reduces_the_relaxation_defect() {
    let grid = Grid::new(64, -8.0, 8.0).unwrap();
    let spec = him(0.05555555556);
    let run = |dt: f64| {
        let (_, e) = relaxed(&grid, Statistics::Boson, 10, 2, &spec, &RunConfig::relaxation(0.8, dt, 0.8));
        *e.last().unwrap()
    };
    let reference = run(0.0125);
    let coarse = (run(0.1) - reference).abs();
    let fine = (run(0.05) - reference).abs();
    assert!(fine < coarse, "defect {fine:e} at dt/2 is not below {coarse:e} at dt");
}

#[test]
fn ground_state_is_stationary_under_propagation() {
    let grid = Grid::new(64, -8.0, 8.0).unwrap();
    let spec = contact(0.5, PotentialSpec::harmonic(1.0));
    let (state, _) = relaxed(&grid, Statistics::Boson, 3, 2, &spec, &RunConfig::relaxation(30.0, 0.1, 1.0));
    let rho0 = density_x(&state);
    let mut config = RunConfig::propagation(10.0, 0.01, 1.0);
    config.keep_snapshots = true;
    let (_, traj) = propagate(&state, &spec, &config).unwrap();
    let e0 = traj.records[0].energy;
    for (t, snap) in traj.snapshots.unwrap() {
        let rho = density_x(&snap);
        let dev = rho.iter().zip(&rho0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(dev <= 1e-6, "density moved by {dev:e} at t = {t}");
    }
    for r in &traj.records {
        assert_abs_diff_eq!(r.energy, e0, epsilon = 1e-8);
    }
}

/// Relaxed state of three weakly interacting bosons, released into a trap
/// displaced by `d`. The centre of mass then follows `d (1 - cos t)` exactly
/// whatever the interaction.
fn kohn_run(t_final: f64, dt: f64) -> (ManyBodyState, Vec<(f64, f64)>, Vec<f64>) {
    let grid = Grid::new(96, -10.0, 10.0).unwrap();
    let d = 0.5;
    let (state, _) = relaxed(&grid, Statistics::Boson, 3, 3, &contact(0.5, PotentialSpec::harmonic(1.0)), &RunConfig::relaxation(30.0, 0.1, 1.0));
    let shifted = contact(0.5, PotentialSpec::from_parameters(PotentialKind::Harmonic, &[1.0, d]).unwrap());
    let mut config = RunConfig::propagation(t_final, dt, 0.5);
    config.keep_snapshots = true;
    let (last, traj) = propagate(&state, &shifted, &config).unwrap();
    let errors = traj
        .snapshots
        .unwrap()
        .iter()
        .map(|(t, snap)| {
            let rho = density_x(snap);
            let weighted: Vec<f64> = rho.iter().zip(grid.points()).map(|(r, x)| r * x).collect();
            (*t, (grid.integrate(&weighted) - d * (1.0 - t.cos())).abs())
        })
        .collect();
    (last, errors, traj.records.iter().map(|r| r.energy).collect())
}

#[test]
fn displaced_trap_oscillation_is_unitary_and_conserves_energy() {
    let (last, errors, energies) = kohn_run(20.0, 0.01);
    assert_eq!(energies.len(), 41);
    assert!(last.orthonormality_error() <= 1e-8);
    assert_abs_diff_eq!(last.coefficient_norm(), 1.0, epsilon = 1e-8);
    let e0 = energies[0];
    for e in &energies {
        assert!(((e - e0) / e0).abs() <= 1e-6, "energy {e} vs {e0}");
    }
    for (t, err) in errors {
        assert!(err <= 5e-4, "centre of mass off by {err:e} at t = {t}");
    }
}

#[test]
fn splitting_error_is_second_order() {
    let worst = |dt: f64| kohn_run(5.0, dt).1.iter().map(|e| e.1).fold(0.0, f64::max);
    let coarse = worst(0.02);
    let fine = worst(0.01);
    assert!(fine < coarse / 3.0, "error {fine:e} at dt/2 vs {coarse:e} at dt");
}

#[test]
fn symmetric_quench_preserves_parity() {
    let grid = Grid::new(64, -8.0, 8.0).unwrap();
    let (state, _) = relaxed(&grid, Statistics::Boson, 2, 4, &contact(1.0, PotentialSpec::harmonic(1.0)), &RunConfig::relaxation(30.0, 0.1, 1.0));
    assert!(asymmetry(&grid, &density_x(&state)) < 1e-6);
    let quench = contact(1.0, PotentialSpec::ramped_barrier(1.0, 5.0, 2.0, 0.5));
    let mut config = RunConfig::propagation(10.0, 0.01, 1.0);
    config.keep_snapshots = true;
    let (_, traj) = propagate(&state, &quench, &config).unwrap();
    for (t, snap) in traj.snapshots.unwrap() {
        let a = asymmetry(&grid, &density_x(&snap));
        assert!(a <= 1e-4, "asymmetry {a:e} at t = {t}");
    }
}
