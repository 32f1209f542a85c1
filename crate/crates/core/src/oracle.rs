//! Reference solutions: closed-form harmonic-interaction energies and a brute-force
//! two-particle grid diagonalization.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fock::Statistics;
use crate::grid::Grid;
use crate::mctdh::HamiltonianSpec;
use crate::model::{harmonic_eigenfunction, InteractionKind};

/// Largest grid accepted by [`two_particle_grid_oracle`]; the pair matrix grows as `n^4`.
pub const ORACLE_MAX_POINTS: usize = 128;

/// Harmonic-interaction model in one dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HimSpec {
    pub statistics: Statistics,
    pub n_particles: usize,
    pub omega: f64,
    pub k0: f64,
}

impl HimSpec {
    /// Relative-motion frequency `sqrt(omega^2 + 2 N K0)`.
    pub fn relative_frequency(&self) -> Result<f64> {
        let d2 = self.omega * self.omega + 2.0 * self.n_particles as f64 * self.k0;
        if !(d2 > 0.0) {
            return Err(Error::Domain(format!(
                "unbound relative motion: omega^2 + 2 N K0 = {d2}"
            )));
        }
        Ok(d2.sqrt())
    }
}

/// Exact ground-state energy. Bosons fill the lowest level of each of the `N - 1`
/// relative oscillators; fermions stack them one quantum apart. The
/// center of mass always contributes `omega / 2`.
pub fn him_exact_energy(spec: &HimSpec) -> Result<f64> {
    if spec.n_particles == 0 {
        return Err(Error::Domain("HIM needs at least one particle".into()));
    }
    let delta = spec.relative_frequency()?;
    let n = spec.n_particles as f64;
    let relative = match spec.statistics {
        Statistics::Boson => 0.5 * (n - 1.0) * delta,
        Statistics::Fermion => 0.5 * (n * n - 1.0) * delta,
    };
    Ok(relative + 0.5 * spec.omega)
}

/// Mean-field energy of `N` harmonically interacting bosons in one orbital.
pub fn him_mean_field_energy(n_particles: usize, omega: f64, k0: f64) -> f64 {
    let n = n_particles as f64;
    0.5 * n * (omega * omega + 2.0 * k0 * (n - 1.0)).sqrt()
}

/// Kinetic matrix of the Fourier grid, summed explicitly over the momentum set.
fn kinetic_matrix(grid: &Grid, mass: f64) -> DMatrix<f64> {
    let n = grid.n_points();
    let x = grid.points();
    let k = grid.momenta();
    DMatrix::from_fn(n, n, |i, j| {
        let r = x[i] - x[j];
        k.iter().map(|&kk| kk * kk / (2.0 * mass) * (kk * r).cos()).sum::<f64>() / n as f64
    })
}

/// Lowest two-particle eigenpair on the (anti)symmetrized product grid.
///
/// Returns the energy and the pair density `rho2(x_a, x_b) = 2 |Psi(x_a, x_b)|^2`,
/// normalized so that its grid double integral is `N (N - 1) = 2`.
pub fn two_particle_grid_oracle(
    grid: &Grid,
    spec: &HamiltonianSpec,
    statistics: Statistics,
) -> Result<(f64, DMatrix<f64>)> {
    let n = grid.n_points();
    if n > ORACLE_MAX_POINTS {
        return Err(Error::Config(format!(
            "two-particle oracle refuses {n} points (limit {ORACLE_MAX_POINTS})"
        )));
    }
    let dx = grid.spacing();
    let x = grid.points();
    let t = kinetic_matrix(grid, spec.mass);
    let v: Vec<f64> = x.iter().map(|&xi| spec.potential.evaluate(xi, 0.0)).collect();
    let w = |a: usize, b: usize| -> f64 {
        match spec.interaction.kind {
            InteractionKind::Contact => {
                if a == b {
                    spec.interaction.w0 / dx
                } else {
                    0.0
                }
            }
            _ => spec.interaction.kernel(x[a] - x[b]).expect("pointwise kernel"),
        }
    };
    let eta = statistics.exchange_sign();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a..n).map(move |b| (a, b)))
        .filter(|&(a, b)| statistics == Statistics::Boson || a != b)
        .collect();
    let norm = |a: usize, b: usize| if a == b { 0.5 } else { std::f64::consts::FRAC_1_SQRT_2 };
    // product-space matrix element <ab|H|cd>
    let product = |a: usize, b: usize, c: usize, d: usize| -> f64 {
        let mut h = 0.0;
        if b == d {
            h += t[(a, c)];
        }
        if a == c {
            h += t[(b, d)];
            if b == d {
                h += v[a] + v[b] + w(a, b);
            }
        }
        h
    };
    let dim = pairs.len();
    let h = DMatrix::from_fn(dim, dim, |p, q| {
        let (a, b) = pairs[p];
        let (c, d) = pairs[q];
        2.0 * norm(a, b) * norm(c, d) * (product(a, b, c, d) + eta * product(a, b, d, c))
    });
    let eig = h.symmetric_eigen();
    let (idx, e0) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty pair basis");
    let vec = eig.eigenvectors.column(idx);
    let mut psi = DMatrix::<f64>::zeros(n, n);
    for (p, &(a, b)) in pairs.iter().enumerate() {
        let amp = vec[p] * norm(a, b);
        psi[(a, b)] += amp;
        psi[(b, a)] += eta * amp;
    }
    let density = psi.map(|z| 2.0 * z * z / (dx * dx));
    Ok((e0, density))
}

/// Density of `N` noninteracting particles in the oscillator ground state, normalized to one.
pub fn noninteracting_reference_density(grid: &Grid, n_particles: usize, statistics: Statistics, omega: f64) -> Vec<f64> {
    let levels = match statistics {
        Statistics::Boson => 1,
        Statistics::Fermion => n_particles.max(1),
    };
    grid.points()
        .iter()
        .map(|&x| {
            (0..levels)
                .map(|k| harmonic_eigenfunction(k, omega, x).powi(2))
                .sum::<f64>()
                / levels as f64
        })
        .collect()
}
