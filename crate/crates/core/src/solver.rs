//! Time integration drivers.
//!
//! Relaxation alternates a Davidson ground-state solve of the configuration
//! Hamiltonian with an imaginary-time orbital step. Propagation uses a
//! symmetric splitting: half a short-iterative-Lanczos step on the
//! coefficients, a full orbital step with the coefficients frozen, then the
//! second coefficient half step with the refreshed Hamiltonian.
//!
//! Orbital steps use the fourth-order exponential Runge-Kutta scheme of Cox
//! and Matthews. The stiff linear part, kinetic energy plus trap plus a
//! Hartree reference potential, is diagonalized on the grid and integrated
//! exactly in its eigenbasis. It is rebuilt every few steps, so a slowly
//! varying potential stays close to the reference.
//!
//! Far from convergence, weakly occupied orbitals make the frozen-coefficient
//! orbital flow violently nonlinear. Relaxation therefore rejects any step that
//! raises the energy and retries it with a larger density floor. The floor is
//! released again step by step as the run settles.

use std::sync::Arc;

use log::{debug, warn};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fock::{ConfigHamiltonian, ConfigurationBasis};
use crate::grid::{dot, Grid};
use crate::etd::{LinearPart, NaturalFrame, OrbitalStepper};
use crate::mctdh::{
    gram_schmidt, integrals_with, HamiltonianSpec, InteractionOperator, ManyBodyState, MeanFields,
    RHO_REGULARIZATION,
};
use crate::model::harmonic_eigenfunction;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub const DEFAULT_KRYLOV_DIM: usize = 12;
pub const DEFAULT_DAVIDSON_TOL: f64 = 1e-12;
pub const DAVIDSON_MAX_ITER: usize = 200;
/// Gram-matrix drift that triggers re-orthonormalization during propagation.
pub const REORTHONORMALIZE_THRESHOLD: f64 = 1e-10;

const DAVIDSON_MAX_SUBSPACE: usize = 40;
const DAVIDSON_KEEP: usize = 8;
const LANCZOS_TOL: f64 = 1e-14;
/// Steps between rebuilds of the linear reference operator.
const REFERENCE_REFRESH: usize = 10;
/// Relative energy rise tolerated before a relaxation step is rejected.
const ENERGY_SLACK: f64 = 1e-11;
const FLOOR_GROWTH: f64 = 100.0;
const FLOOR_RELEASE: f64 = 0.1;
const MAX_STEP_RETRIES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuessKind {
    /// Oscillator eigenfunctions with seeded noise.
    Hand,
    /// Restart from a binary snapshot.
    Binr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientIntegrator {
    Davidson,
    ShortIterativeLanczos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitalIntegrator {
    RungeKutta,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// `-1` for imaginary-time relaxation, `-i` for real-time propagation.
    pub job_prefactor: Complex64,
    pub time_begin: f64,
    pub time_final: f64,
    pub output_timestep: f64,
    pub integration_stepsize: f64,
    pub guess: GuessKind,
    pub binary_start_time: f64,
    pub coefficients_integrator: CoefficientIntegrator,
    pub orbital_integrator: OrbitalIntegrator,
    pub krylov_dim: usize,
    pub davidson_tol: f64,
    /// Density-matrix eigenvalue floor relative to `N` used when inverting `rho1`.
    pub regularization: f64,
    pub keep_snapshots: bool,
}

impl RunConfig {
    pub fn relaxation(time_final: f64, integration_stepsize: f64, output_timestep: f64) -> Self {
        Self {
            job_prefactor: Complex64::new(-1.0, 0.0),
            time_begin: 0.0,
            time_final,
            output_timestep,
            integration_stepsize,
            guess: GuessKind::Hand,
            binary_start_time: 0.0,
            coefficients_integrator: CoefficientIntegrator::Davidson,
            orbital_integrator: OrbitalIntegrator::RungeKutta,
            krylov_dim: DEFAULT_KRYLOV_DIM,
            davidson_tol: DEFAULT_DAVIDSON_TOL,
            regularization: RHO_REGULARIZATION,
            keep_snapshots: false,
        }
    }

    pub fn propagation(time_final: f64, integration_stepsize: f64, output_timestep: f64) -> Self {
        Self {
            job_prefactor: Complex64::new(0.0, -1.0),
            coefficients_integrator: CoefficientIntegrator::ShortIterativeLanczos,
            ..Self::relaxation(time_final, integration_stepsize, output_timestep)
        }
    }

    pub fn is_relaxation(&self) -> bool {
        self.job_prefactor.im == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        let real_unit = self.job_prefactor == Complex64::new(-1.0, 0.0);
        let imag_unit = self.job_prefactor == Complex64::new(0.0, -1.0);
        if !real_unit && !imag_unit {
            return Err(Error::Config(format!(
                "job prefactor must be (-1,0) or (0,-1), got {}",
                self.job_prefactor
            )));
        }
        if !(self.time_final > self.time_begin) {
            return Err(Error::Config("time_final must exceed time_begin".into()));
        }
        if !(self.output_timestep > 0.0) || !(self.integration_stepsize > 0.0) {
            return Err(Error::Config("time steps must be positive".into()));
        }
        if !(self.regularization > 0.0) {
            return Err(Error::Config("regularization must be positive".into()));
        }
        if self.krylov_dim < 2 {
            return Err(Error::Config("krylov dimension must be at least 2".into()));
        }
        self.steps_per_output()?;
        Ok(())
    }

    fn steps_per_output(&self) -> Result<usize> {
        let ratio = self.output_timestep / self.integration_stepsize;
        let k = ratio.round();
        if k < 1.0 || (ratio - k).abs() > 1e-6 * k {
            return Err(Error::Config(format!(
                "output timestep {} is not a multiple of the integration step {}",
                self.output_timestep, self.integration_stepsize
            )));
        }
        Ok(k as usize)
    }

    fn total_steps(&self) -> usize {
        ((self.time_final - self.time_begin) / self.integration_stepsize).round() as usize
    }
}

/// One output frame: time, natural occupations (ascending, summing to 1) and energy.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub time: f64,
    pub occupations: Vec<f64>,
    pub energy: f64,
}

#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub records: Vec<Record>,
    pub snapshots: Option<Vec<(f64, ManyBodyState)>>,
}

impl Trajectory {
    pub fn final_energy(&self) -> Option<f64> {
        self.records.last().map(|r| r.energy)
    }
}

/// Callback invoked on every output frame.
pub type Observer<'a> = dyn FnMut(&Record, &ManyBodyState) -> Result<()> + 'a;

/// Hermitian operator known through its action and diagonal.
pub trait HermitianOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]);
    fn diagonal(&self) -> Vec<f64>;
}

impl HermitianOperator for DMatrix<Complex64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let r = self * DVector::from_column_slice(x);
        y.copy_from_slice(r.as_slice());
    }

    fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows()).map(|i| self[(i, i)].re).collect()
    }
}

impl HermitianOperator for ConfigHamiltonian<'_> {
    fn dim(&self) -> usize {
        ConfigHamiltonian::dim(self)
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        ConfigHamiltonian::apply(self, x, y)
    }

    fn diagonal(&self) -> Vec<f64> {
        ConfigHamiltonian::diagonal(self).to_vec()
    }
}

fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(a: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Orthogonalizes `v` against `basis` twice and returns the remaining norm.
fn orthogonalize(v: &mut [Complex64], basis: &[Vec<Complex64>]) -> f64 {
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, v);
            axpy(-c, b, v);
        }
    }
    vec_norm(v)
}

/// Lowest eigenpair by Davidson iteration with a diagonal preconditioner.
///
/// The residual tolerance is applied relative to `max(1, max |H_ii|)`. When the
/// subspace is full it is restarted from the lowest few Ritz vectors.
pub fn davidson_ground<H: HermitianOperator + ?Sized>(
    h: &H,
    guess: &[Complex64],
    tol: f64,
) -> Result<(f64, Vec<Complex64>)> {
    let n = h.dim();
    assert_eq!(guess.len(), n, "guess length does not match operator");
    let g_norm = vec_norm(guess);
    if !(g_norm > 0.0) || !g_norm.is_finite() {
        return Err(Error::Config("Davidson guess must be a nonzero finite vector".into()));
    }
    let diag = h.diagonal();
    let scale = diag.iter().fold(1.0f64, |a, d| a.max(d.abs()));
    let tol = tol * scale;

    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut images: Vec<Vec<Complex64>> = Vec::new();
    // projected matrix, grown by one row and column per new vector
    let mut s = DMatrix::<Complex64>::zeros(0, 0);
    let push = |v: Vec<Complex64>,
                basis: &mut Vec<Vec<Complex64>>,
                images: &mut Vec<Vec<Complex64>>,
                s: &mut DMatrix<Complex64>| {
        let mut hv = vec![ZERO; n];
        h.apply(&v, &mut hv);
        let k = basis.len();
        let mut grown = s.clone().resize(k + 1, k + 1, ZERO);
        for i in 0..k {
            let x = dot(&basis[i], &hv);
            grown[(i, k)] = x;
            grown[(k, i)] = x.conj();
        }
        grown[(k, k)] = Complex64::new(dot(&v, &hv).re, 0.0);
        *s = grown;
        basis.push(v);
        images.push(hv);
    };
    push(guess.iter().map(|z| z / g_norm).collect(), &mut basis, &mut images, &mut s);

    let mut best = f64::INFINITY;
    for iter in 0..DAVIDSON_MAX_ITER {
        let k = basis.len();
        let eig = s.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let theta = eig.eigenvalues[order[0]];
        let ritz = |col: usize| -> (Vec<Complex64>, Vec<Complex64>) {
            let y = eig.eigenvectors.column(col);
            let mut x = vec![ZERO; n];
            let mut hx = vec![ZERO; n];
            for i in 0..k {
                axpy(y[i], &basis[i], &mut x);
                axpy(y[i], &images[i], &mut hx);
            }
            (x, hx)
        };
        let (mut x, hx) = ritz(order[0]);
        let residual: Vec<Complex64> = hx.iter().zip(&x).map(|(a, b)| a - theta * b).collect();
        let rnorm = vec_norm(&residual);
        best = best.min(rnorm);
        if !theta.is_finite() || !rnorm.is_finite() {
            return Err(Error::NonFinite {
                time: f64::NAN,
                what: "Davidson eigenvalue".into(),
            });
        }
        if rnorm <= tol || k == n {
            let xn = vec_norm(&x);
            x.iter_mut().for_each(|z| *z /= xn);
            debug!("davidson converged in {iter} iterations, residual {rnorm:.3e}");
            return Ok((theta, x));
        }
        let mut t: Vec<Complex64> = residual
            .iter()
            .zip(&diag)
            .map(|(r, d)| {
                let mut den = theta - d;
                if den.abs() < 1e-8 {
                    den = if den < 0.0 { -1e-8 } else { 1e-8 };
                }
                r / den
            })
            .collect();
        if k >= DAVIDSON_MAX_SUBSPACE {
            let keep = DAVIDSON_KEEP.min(k);
            let kept: Vec<(Vec<Complex64>, Vec<Complex64>)> = order[..keep].iter().map(|&c| ritz(c)).collect();
            basis.clear();
            images.clear();
            s = DMatrix::zeros(0, 0);
            for (i, (v, hv)) in kept.into_iter().enumerate() {
                let th = Complex64::new(eig.eigenvalues[order[i]], 0.0);
                s = s.resize(i + 1, i + 1, ZERO);
                s[(i, i)] = th;
                basis.push(v);
                images.push(hv);
            }
        }
        let mut tn = orthogonalize(&mut t, &basis);
        if tn < 1e-12 {
            t = residual;
            tn = orthogonalize(&mut t, &basis);
            if tn < 1e-14 {
                break;
            }
        }
        t.iter_mut().for_each(|z| *z /= tn);
        push(t, &mut basis, &mut images, &mut s);
    }
    Err(Error::NotConverged {
        what: "Davidson",
        iterations: DAVIDSON_MAX_ITER,
        residual: best,
    })
}

/// `exp(-i T dt) e_1` for a real symmetric tridiagonal `T`.
fn tridiagonal_propagator(alpha: &[f64], beta: &[f64], dt: f64) -> Vec<Complex64> {
    let k = alpha.len();
    let t = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = t.symmetric_eigen();
    (0..k)
        .map(|i| {
            (0..k)
                .map(|l| {
                    let phase = Complex64::from_polar(1.0, -eig.eigenvalues[l] * dt);
                    phase * eig.eigenvectors[(i, l)] * eig.eigenvectors[(0, l)]
                })
                .sum()
        })
        .collect()
}

/// `exp(-i H dt) C` by a Lanczos subspace exponential.
///
/// Happy breakdown returns the exact result in the smaller subspace. When the
/// full Krylov space does not reach the error target the step is split in two.
pub fn sil_step<H: HermitianOperator + ?Sized>(
    h: &H,
    c: &[Complex64],
    dt: f64,
    krylov_dim: usize,
) -> Vec<Complex64> {
    sil_step_depth(h, c, dt, krylov_dim.max(2), 0)
}

fn sil_step_depth<H: HermitianOperator + ?Sized>(
    h: &H,
    c: &[Complex64],
    dt: f64,
    krylov_dim: usize,
    depth: usize,
) -> Vec<Complex64> {
    let n = h.dim();
    let norm0 = vec_norm(c);
    if dt == 0.0 || norm0 == 0.0 {
        return c.to_vec();
    }
    let kmax = krylov_dim.min(n);
    let mut q: Vec<Vec<Complex64>> = vec![c.iter().map(|z| z / norm0).collect()];
    let mut alpha = Vec::with_capacity(kmax);
    let mut beta: Vec<f64> = Vec::with_capacity(kmax);
    let mut w = vec![ZERO; n];
    loop {
        let j = q.len() - 1;
        h.apply(&q[j], &mut w);
        let a = dot(&q[j], &w).re;
        alpha.push(a);
        axpy(Complex64::new(-a, 0.0), &q[j], &mut w);
        if j > 0 {
            axpy(Complex64::new(-beta[j - 1], 0.0), &q[j - 1], &mut w);
        }
        let b = orthogonalize(&mut w, &q);
        let y = tridiagonal_propagator(&alpha, &beta, dt);
        let err = b * y[j].norm();
        let breakdown = b <= LANCZOS_TOL * (1.0 + a.abs());
        if err <= LANCZOS_TOL || breakdown || q.len() == kmax {
            if !(err <= 1e-12 || breakdown || q.len() == n) && depth < 20 {
                let half = sil_step_depth(h, c, 0.5 * dt, krylov_dim, depth + 1);
                return sil_step_depth(h, &half, 0.5 * dt, krylov_dim, depth + 1);
            }
            let mut out = vec![ZERO; n];
            for (yi, qi) in y.iter().zip(&q) {
                axpy(yi * norm0, qi, &mut out);
            }
            return out;
        }
        beta.push(b);
        q.push(w.iter().map(|z| z / b).collect());
    }
}

/// Hartree potential of the current state, scaled by `(N - 1) / N`.
fn hartree_reference(state: &ManyBodyState, op: &InteractionOperator) -> Vec<f64> {
    let n = state.grid.n_points();
    let np = state.n_particles();
    if op.is_zero() || np < 2 {
        return vec![0.0; n];
    }
    let rho = state.one_body_density();
    let fields = MeanFields::compute(&state.orbitals, op);
    let m = state.n_orbitals();
    let scale = (np - 1) as f64 / np as f64;
    let mut out = vec![0.0; n];
    for s in 0..m {
        for l in 0..m {
            let r = rho[(s, l)];
            for (o, w) in out.iter_mut().zip(fields.get(s, l)) {
                *o += scale * (r * w).re;
            }
        }
    }
    out
}

/// Natural occupations `rho1 / N`, ascending.
pub fn ascending_occupations(state: &ManyBodyState) -> Vec<f64> {
    let n = state.n_particles() as f64;
    let mut occ: Vec<f64> = state
        .one_body_density()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|v| v / n)
        .collect();
    occ.sort_by(f64::total_cmp);
    occ
}

fn check_finite(state: &ManyBodyState, t: f64) -> Result<()> {
    if !state.coefficients.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite {
            time: t,
            what: "coefficients".into(),
        });
    }
    if !state.orbitals.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite {
            time: t,
            what: "orbitals".into(),
        });
    }
    Ok(())
}

/// Oscillator eigenfunctions with seeded noise, orthonormalized; uniform coefficients.
///
/// The noise is a random complex admixture of the next few oscillator levels,
/// which breaks parity without adding grid-scale roughness.
pub fn initial_guess(grid: &Grid, basis: Arc<ConfigurationBasis>, kind: GuessKind, seed: u64) -> Result<ManyBodyState> {
    if kind != GuessKind::Hand {
        return Err(Error::Config("a binary guess is read from a restart file, not generated".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = basis.n_orbitals();
    let levels = m + 4;
    let table: Vec<Vec<f64>> = (0..levels)
        .map(|l| grid.points().iter().map(|&x| harmonic_eigenfunction(l, 1.0, x)).collect())
        .collect();
    let mut orbitals: Vec<Vec<Complex64>> = (0..m)
        .map(|k| {
            let mix: Vec<Complex64> = (0..levels)
                .map(|l| {
                    let noise = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                    if l == k {
                        Complex64::new(1.0, 0.0) + 0.05 * noise
                    } else {
                        0.05 * noise
                    }
                })
                .collect();
            (0..grid.n_points())
                .map(|i| mix.iter().zip(&table).map(|(c, psi)| c * psi[i]).sum())
                .collect()
        })
        .collect();
    gram_schmidt(grid, &mut orbitals);
    let dim = basis.len();
    let coefficients = vec![Complex64::new(1.0 / (dim as f64).sqrt(), 0.0); dim];
    ManyBodyState::new(grid.clone(), basis, orbitals, coefficients, 0.0)
}

/// Imaginary-time relaxation to the ground state.
pub fn relax(state0: &ManyBodyState, spec: &HamiltonianSpec, config: &RunConfig) -> Result<(ManyBodyState, Trajectory)> {
    relax_with(state0, spec, config, &mut |_, _| Ok(()))
}

pub fn relax_with(
    state0: &ManyBodyState,
    spec: &HamiltonianSpec,
    config: &RunConfig,
    observer: &mut Observer<'_>,
) -> Result<(ManyBodyState, Trajectory)> {
    config.validate()?;
    if !config.is_relaxation() {
        return Err(Error::Config("relaxation requires job prefactor (-1, 0)".into()));
    }
    if spec.potential.is_time_dependent() {
        return Err(Error::Config("relaxation requires a time-independent potential".into()));
    }
    let every = config.steps_per_output()?;
    let n_steps = config.total_steps();
    let dt = config.integration_stepsize;
    let op = InteractionOperator::new(&state0.grid, &spec.interaction);
    let prefactor = Complex64::new(-1.0, 0.0);

    let mut state = state0.clone();
    state.normalize_coefficients();
    state.gram_schmidt();
    let mut traj = Trajectory {
        records: Vec::new(),
        snapshots: config.keep_snapshots.then(Vec::new),
    };
    let mut stepper: Option<OrbitalStepper> = None;
    let ground = |orbitals: &[Vec<Complex64>], guess: &[Complex64], t: f64| -> Result<(f64, Vec<Complex64>)> {
        let ints = integrals_with(&state0.grid, orbitals, spec, &op, t);
        let ham = ConfigHamiltonian::new(&state0.basis, &ints.h, &ints.w);
        let (e, c) = davidson_ground(&ham, guess, config.davidson_tol)?;
        if !e.is_finite() {
            return Err(Error::NonFinite {
                time: t,
                what: "energy".into(),
            });
        }
        Ok((e, c))
    };
    let (mut e, c) = ground(&state.orbitals, &state.coefficients, config.time_begin)?;
    state.coefficients = c;
    let mut floor = config.regularization;

    for step in 0..=n_steps {
        let t = config.time_begin + step as f64 * dt;
        state.time = t;
        check_finite(&state, t)?;
        if step % every == 0 {
            let record = Record {
                time: t,
                occupations: ascending_occupations(&state),
                energy: e,
            };
            debug!("relax t = {t:.4} E = {e:.15}");
            observer(&record, &state)?;
            if let Some(snaps) = traj.snapshots.as_mut() {
                snaps.push((t, state.clone()));
            }
            traj.records.push(record);
        }
        if step == n_steps {
            break;
        }
        if step % REFERENCE_REFRESH == 0 {
            let local: Vec<f64> = spec
                .potential
                .sample(state.grid.points(), t)
                .iter()
                .zip(hartree_reference(&state, &op))
                .map(|(v, u)| v + u)
                .collect();
            stepper = Some(OrbitalStepper {
                grid: &state0.grid,
                spec,
                op: &op,
                linear: LinearPart::with_potential(&state.grid, spec.mass, local, prefactor, dt),
            });
        }
        let stepper = stepper.as_ref().expect("stepper built on the first step");
        // Weakly occupied orbitals make the frozen-coefficient flow violently
        // nonlinear far from convergence. A step that raises the energy is
        // retried with a larger density floor, which leaves the stationary
        // points unchanged.
        let slack = ENERGY_SLACK * e.abs().max(1.0);
        let mut attempts = 0;
        loop {
            let frame = NaturalFrame::new(&state.basis, &state.coefficients, floor);
            let mut orbitals = stepper.step(&state.orbitals, &frame, t);
            gram_schmidt(&state.grid, &mut orbitals);
            let finite = orbitals.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite());
            let trial = if finite {
                ground(&orbitals, &state.coefficients, t + dt).ok()
            } else {
                None
            };
            match trial {
                Some((e_new, c_new)) if e_new <= e + slack => {
                    state.orbitals = orbitals;
                    state.coefficients = c_new;
                    e = e_new;
                    floor = (floor * FLOOR_RELEASE).max(config.regularization);
                    break;
                }
                _ => {
                    attempts += 1;
                    if attempts > MAX_STEP_RETRIES {
                        return Err(Error::NotConverged {
                            what: "orbital relaxation step",
                            iterations: attempts,
                            residual: floor,
                        });
                    }
                    floor = (floor * FLOOR_GROWTH).min(1.0);
                    debug!("relax t = {t:.4}: step rejected, density floor raised to {floor:.1e}");
                }
            }
        }
    }
    Ok((state, traj))
}

/// Real-time propagation.
pub fn propagate(state0: &ManyBodyState, spec: &HamiltonianSpec, config: &RunConfig) -> Result<(ManyBodyState, Trajectory)> {
    propagate_with(state0, spec, config, &mut |_, _| Ok(()))
}

pub fn propagate_with(
    state0: &ManyBodyState,
    spec: &HamiltonianSpec,
    config: &RunConfig,
    observer: &mut Observer<'_>,
) -> Result<(ManyBodyState, Trajectory)> {
    config.validate()?;
    if config.is_relaxation() {
        return Err(Error::Config("propagation requires job prefactor (0, -1)".into()));
    }
    let every = config.steps_per_output()?;
    let n_steps = config.total_steps();
    let dt = config.integration_stepsize;
    let grid = &state0.grid;
    let op = InteractionOperator::new(grid, &spec.interaction);
    let prefactor = Complex64::new(0.0, -1.0);
    let mut stepper: Option<OrbitalStepper> = None;

    let mut state = state0.clone();
    state.time = config.time_begin;
    if state.orthonormality_error() > REORTHONORMALIZE_THRESHOLD {
        state.lowdin_orthonormalize();
    }
    let mut traj = Trajectory {
        records: Vec::new(),
        snapshots: config.keep_snapshots.then(Vec::new),
    };

    let mut ints = integrals_with(grid, &state.orbitals, spec, &op, state.time);
    for step in 0..=n_steps {
        let t = config.time_begin + step as f64 * dt;
        state.time = t;
        check_finite(&state, t)?;
        if step % every == 0 {
            let ham = ConfigHamiltonian::new(&state.basis, &ints.h, &ints.w);
            let e = ham.expectation(&state.coefficients).re;
            if !e.is_finite() {
                return Err(Error::NonFinite {
                    time: t,
                    what: "energy".into(),
                });
            }
            let record = Record {
                time: t,
                occupations: ascending_occupations(&state),
                energy: e,
            };
            debug!("propagate t = {t:.4} E = {e:.15}");
            observer(&record, &state)?;
            if let Some(snaps) = traj.snapshots.as_mut() {
                snaps.push((t, state.clone()));
            }
            traj.records.push(record);
        }
        if step == n_steps {
            break;
        }
        {
            let ham = ConfigHamiltonian::new(&state.basis, &ints.h, &ints.w);
            state.coefficients = sil_step(&ham, &state.coefficients, 0.5 * dt, config.krylov_dim);
        }
        if step % REFERENCE_REFRESH == 0 {
            let local: Vec<f64> = spec
                .potential
                .sample(grid.points(), t + 0.5 * REFERENCE_REFRESH as f64 * dt)
                .iter()
                .zip(hartree_reference(&state, &op))
                .map(|(v, u)| v + u)
                .collect();
            stepper = Some(OrbitalStepper {
                grid,
                spec,
                op: &op,
                linear: LinearPart::with_potential(grid, spec.mass, local, prefactor, dt),
            });
        }
        let stepper = stepper.as_ref().expect("stepper built on the first step");
        let frame = NaturalFrame::new(&state.basis, &state.coefficients, config.regularization);
        state.orbitals = stepper.step(&state.orbitals, &frame, t);
        let drift = state.orthonormality_error();
        if drift > REORTHONORMALIZE_THRESHOLD {
            if drift > 1e-6 {
                warn!("orbital overlap drift {drift:.2e} at t = {t:.4}");
            }
            state.lowdin_orthonormalize();
        }
        ints = integrals_with(grid, &state.orbitals, spec, &op, t + dt);
        let ham = ConfigHamiltonian::new(&state.basis, &ints.h, &ints.w);
        state.coefficients = sil_step(&ham, &state.coefficients, 0.5 * dt, config.krylov_dim);
    }
    Ok((state, traj))
}

/// Fourier interpolation of every orbital onto a finer grid over the same box.
pub fn interpolate_state(state: &ManyBodyState, new_grid: &Grid) -> Result<ManyBodyState> {
    let old = &state.grid;
    if !old.same_extent(new_grid) {
        return Err(Error::Config(format!(
            "grid extents differ: [{}, {}) vs [{}, {})",
            old.x_min(),
            old.x_max(),
            new_grid.x_min(),
            new_grid.x_max()
        )));
    }
    let n = old.n_points();
    let n2 = new_grid.n_points();
    if n2 < n {
        return Err(Error::Config(format!("cannot interpolate from {n} down to {n2} points")));
    }
    if n2 == n {
        return Ok(state.clone());
    }
    let scale = n2 as f64 / n as f64;
    let orbitals = state
        .orbitals
        .iter()
        .map(|orb| {
            let mut spec = orb.clone();
            old.fft(&mut spec);
            let mut padded = vec![ZERO; n2];
            let half = n / 2;
            for i in 0..n {
                if i < half || (n % 2 == 1 && i == half) {
                    padded[i] = spec[i] * scale;
                } else if n % 2 == 0 && i == half {
                    padded[i] = spec[i] * (0.5 * scale);
                    padded[n2 - half] = spec[i] * (0.5 * scale);
                } else {
                    padded[n2 - (n - i)] = spec[i] * scale;
                }
            }
            new_grid.ifft(&mut padded);
            padded
        })
        .collect();
    let mut out = ManyBodyState::new(
        new_grid.clone(),
        state.basis.clone(),
        orbitals,
        state.coefficients.clone(),
        state.time,
    )?;
    out.lowdin_orthonormalize();
    Ok(out)
}
