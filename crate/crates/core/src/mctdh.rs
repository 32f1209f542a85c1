//! Orbital integrals, mean fields, equations of motion and energies.
//!
//! Conventions (fixed by the energy identity checked in the tests):
//!
//! * `h[k][q] = <phi_k| T + V(t) |phi_q>`
//! * mean field `W_sl(x) = int dx' conj(phi_s(x')) W(x, x') phi_l(x')`
//! * `W[k][s][q][l] = <phi_k| W_sl |phi_q>`
//! * `rho1[k][q] = <b_k^dag b_q>`, `rho2[k][s][l][q] = <b_k^dag b_s^dag b_l b_q>`
//! * `E = sum rho1[k][q] h[k][q] + 1/2 sum rho2[k][s][l][q] W[k][s][q][l]`
//!
//! The orbital equation in the projector gauge reads
//! `i d/dt phi_j = P [ h phi_j + sum_{k,s,l,q} (rho1^-1)[j][k] rho2[k][s][l][q] W_sl phi_q ]`
//! and the coefficients follow `i d/dt C = H C`.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::fock::{
    one_body_density, two_body_density, ConfigHamiltonian, ConfigurationBasis, Tensor4,
    TwoBodyDensity, TwoBodyTensor,
};
use crate::grid::{dot, Grid};
use crate::model::{InteractionKind, InteractionSpec, PotentialSpec};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative floor applied to the one-body density eigenvalues before inversion.
pub const RHO_REGULARIZATION: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianSpec {
    pub potential: PotentialSpec,
    pub interaction: InteractionSpec,
    pub mass: f64,
}

impl HamiltonianSpec {
    pub fn new(potential: PotentialSpec, interaction: InteractionSpec, mass: f64) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::Config(format!("mass must be positive, got {mass}")));
        }
        potential.validate()?;
        interaction.validate()?;
        Ok(Self {
            potential,
            interaction,
            mass,
        })
    }
}

/// `M` orbitals on a grid plus configuration coefficients.
#[derive(Debug, Clone)]
pub struct ManyBodyState {
    pub grid: Grid,
    pub basis: Arc<ConfigurationBasis>,
    pub orbitals: Vec<Vec<Complex64>>,
    pub coefficients: Vec<Complex64>,
    pub time: f64,
}

impl ManyBodyState {
    pub fn new(
        grid: Grid,
        basis: Arc<ConfigurationBasis>,
        orbitals: Vec<Vec<Complex64>>,
        coefficients: Vec<Complex64>,
        time: f64,
    ) -> Result<Self> {
        if orbitals.len() != basis.n_orbitals() {
            return Err(Error::Config(format!(
                "{} orbitals supplied for a basis with M = {}",
                orbitals.len(),
                basis.n_orbitals()
            )));
        }
        if orbitals.iter().any(|o| o.len() != grid.n_points()) {
            return Err(Error::Config("orbital length does not match the grid".into()));
        }
        if coefficients.len() != basis.len() {
            return Err(Error::Config(format!(
                "{} coefficients supplied for a basis of size {}",
                coefficients.len(),
                basis.len()
            )));
        }
        Ok(Self {
            grid,
            basis,
            orbitals,
            coefficients,
            time,
        })
    }

    pub fn n_particles(&self) -> usize {
        self.basis.n_particles()
    }

    pub fn n_orbitals(&self) -> usize {
        self.basis.n_orbitals()
    }

    /// Overlap matrix `S[j][k] = <phi_j|phi_k>`.
    pub fn gram_matrix(&self) -> DMatrix<Complex64> {
        let m = self.n_orbitals();
        DMatrix::from_fn(m, m, |j, k| {
            self.grid.inner_product(&self.orbitals[j], &self.orbitals[k])
        })
    }

    /// Largest entry of `|S - 1|`.
    pub fn orthonormality_error(&self) -> f64 {
        let s = self.gram_matrix();
        let mut worst: f64 = 0.0;
        for j in 0..s.nrows() {
            for k in 0..s.ncols() {
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((s[(j, k)] - target).norm());
            }
        }
        worst
    }

    pub fn coefficient_norm(&self) -> f64 {
        self.coefficients.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize_coefficients(&mut self) {
        let norm = self.coefficient_norm();
        self.coefficients.iter_mut().for_each(|z| *z /= norm);
    }

    pub fn one_body_density(&self) -> DMatrix<Complex64> {
        one_body_density(&self.basis, &self.coefficients)
    }

    pub fn two_body_density(&self) -> TwoBodyDensity {
        two_body_density(&self.basis, &self.coefficients)
    }

    /// Modified Gram-Schmidt, applied twice.
    pub fn gram_schmidt(&mut self) {
        gram_schmidt(&self.grid, &mut self.orbitals);
    }

    /// Symmetric (Loewdin) orthonormalization, the closest orthonormal set.
    pub fn lowdin_orthonormalize(&mut self) {
        let s = self.gram_matrix();
        let eig = s.symmetric_eigen();
        let m = self.n_orbitals();
        let inv_sqrt = DMatrix::from_fn(m, m, |a, b| {
            (0..m)
                .map(|i| {
                    eig.eigenvectors[(a, i)] * eig.eigenvectors[(b, i)].conj()
                        / eig.eigenvalues[i].sqrt()
                })
                .sum::<Complex64>()
        });
        let old = self.orbitals.clone();
        for (k, orb) in self.orbitals.iter_mut().enumerate() {
            for (i, z) in orb.iter_mut().enumerate() {
                *z = (0..m).map(|j| old[j][i] * inv_sqrt[(j, k)]).sum();
            }
        }
    }
}

pub(crate) fn gram_schmidt(grid: &Grid, orbitals: &mut [Vec<Complex64>]) {
    for _ in 0..2 {
        for j in 0..orbitals.len() {
            let (done, rest) = orbitals.split_at_mut(j);
            let cur = &mut rest[0];
            for prev in done.iter() {
                let proj = grid.inner_product(prev, cur);
                for (c, p) in cur.iter_mut().zip(prev) {
                    *c -= proj * p;
                }
            }
            let norm = grid.norm(cur);
            cur.iter_mut().for_each(|z| *z /= norm);
        }
    }
}

/// Two-body kernel discretized on a grid.
///
/// Contact interactions act locally; translation-invariant kernels are applied
/// as a Toeplitz matrix-vector product through a zero-padded FFT of length `2n`.
#[derive(Clone)]
pub struct InteractionOperator {
    kind: InteractionKind,
    w0: f64,
    n: usize,
    spacing: f64,
    kernel_hat: Vec<Complex64>,
    forward: Option<Arc<dyn Fft<f64>>>,
    inverse: Option<Arc<dyn Fft<f64>>>,
}

impl std::fmt::Debug for InteractionOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InteractionOperator")
            .field("kind", &self.kind)
            .field("w0", &self.w0)
            .field("n", &self.n)
            .finish()
    }
}

impl InteractionOperator {
    pub fn new(grid: &Grid, spec: &InteractionSpec) -> Self {
        let n = grid.n_points();
        let spacing = grid.spacing();
        if spec.kind == InteractionKind::Contact || spec.w0 == 0.0 {
            return Self {
                kind: spec.kind,
                w0: spec.w0,
                n,
                spacing,
                kernel_hat: Vec::new(),
                forward: None,
                inverse: None,
            };
        }
        let len = 2 * n;
        let mut kernel = vec![ZERO; len];
        for d in 0..n {
            let v = spec.kernel(d as f64 * spacing).expect("pointwise kernel");
            kernel[d] = Complex64::new(v, 0.0);
            if d > 0 {
                let v = spec.kernel(-(d as f64) * spacing).expect("pointwise kernel");
                kernel[len - d] = Complex64::new(v, 0.0);
            }
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);
        forward.process(&mut kernel);
        // fold the quadrature weight and the inverse-FFT normalization into the kernel
        let scale = spacing / len as f64;
        kernel.iter_mut().for_each(|z| *z *= scale);
        Self {
            kind: spec.kind,
            w0: spec.w0,
            n,
            spacing,
            kernel_hat: kernel,
            forward: Some(forward),
            inverse: Some(inverse),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.w0 == 0.0
    }

    /// `(W f)(x) = int dx' W(x, x') f(x')` on the grid.
    pub fn apply(&self, f: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(f.len(), self.n, "array length does not match grid");
        if self.w0 == 0.0 {
            return vec![ZERO; self.n];
        }
        match (&self.forward, &self.inverse) {
            (Some(fwd), Some(inv)) => {
                let mut buf = vec![ZERO; 2 * self.n];
                buf[..self.n].copy_from_slice(f);
                fwd.process(&mut buf);
                for (b, k) in buf.iter_mut().zip(&self.kernel_hat) {
                    *b *= k;
                }
                inv.process(&mut buf);
                buf.truncate(self.n);
                buf
            }
            _ => f.iter().map(|z| z * self.w0).collect(),
        }
    }

    /// Kernel matrix `W(x_i, x_j)`; contact becomes `w0 delta_ij / dx`.
    pub fn dense_kernel(&self, grid: &Grid, spec: &InteractionSpec) -> DMatrix<f64> {
        let n = grid.n_points();
        let x = grid.points();
        match spec.kind {
            InteractionKind::Contact => {
                DMatrix::from_fn(n, n, |i, j| if i == j { spec.w0 / self.spacing } else { 0.0 })
            }
            _ => DMatrix::from_fn(n, n, |i, j| spec.kernel(x[i] - x[j]).expect("pointwise kernel")),
        }
    }
}

/// Mean-field potentials `W_sl(x)` for all orbital pairs, stored at `s * M + l`.
#[derive(Debug, Clone)]
pub struct MeanFields {
    m: usize,
    fields: Vec<Vec<Complex64>>,
}

impl MeanFields {
    pub fn compute(orbitals: &[Vec<Complex64>], op: &InteractionOperator) -> Self {
        let m = orbitals.len();
        let n = orbitals.first().map_or(0, Vec::len);
        let mut fields = vec![Vec::new(); m * m];
        for s in 0..m {
            for l in s..m {
                let product: Vec<Complex64> = orbitals[s]
                    .iter()
                    .zip(&orbitals[l])
                    .map(|(a, b)| a.conj() * b)
                    .collect();
                let field = if op.is_zero() { vec![ZERO; n] } else { op.apply(&product) };
                if s != l {
                    // kernel is real and symmetric: W_ls = conj(W_sl)
                    fields[l * m + s] = field.iter().map(|z| z.conj()).collect();
                }
                fields[s * m + l] = field;
            }
        }
        Self { m, fields }
    }

    pub fn get(&self, s: usize, l: usize) -> &[Complex64] {
        &self.fields[s * self.m + l]
    }
}

/// Mean-field operators `W_sl(x)` for the current orbitals.
pub fn mean_field_operators(state: &ManyBodyState, interaction: &InteractionSpec) -> MeanFields {
    let op = InteractionOperator::new(&state.grid, interaction);
    MeanFields::compute(&state.orbitals, &op)
}

/// Orbital-space integrals `h` and `W` at one instant.
#[derive(Debug, Clone)]
pub struct Integrals {
    pub h: DMatrix<Complex64>,
    pub w: TwoBodyTensor,
}

fn unconjugated_dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (x, y) in a.iter().zip(b) {
        re += x.re * y.re - x.im * y.im;
        im += x.re * y.im + x.im * y.re;
    }
    Complex64::new(re, im)
}

/// Matrices of `T` and `V(t)` in the orbital basis.
fn one_body_parts(
    grid: &Grid,
    orbitals: &[Vec<Complex64>],
    spec: &HamiltonianSpec,
    t: f64,
) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let m = orbitals.len();
    let v = spec.potential.sample(grid.points(), t);
    let t_phi: Vec<Vec<Complex64>> = orbitals
        .iter()
        .map(|o| grid.kinetic_apply(o, spec.mass))
        .collect();
    let v_phi: Vec<Vec<Complex64>> = orbitals
        .iter()
        .map(|o| o.iter().zip(&v).map(|(z, p)| z * p).collect())
        .collect();
    let mut kin = DMatrix::from_element(m, m, ZERO);
    let mut pot = DMatrix::from_element(m, m, ZERO);
    for k in 0..m {
        for q in k..m {
            let a = grid.inner_product(&orbitals[k], &t_phi[q]);
            let b = grid.inner_product(&orbitals[k], &v_phi[q]);
            kin[(k, q)] = a;
            pot[(k, q)] = b;
            if k == q {
                kin[(k, k)] = Complex64::new(a.re, 0.0);
                pot[(k, k)] = Complex64::new(b.re, 0.0);
            } else {
                kin[(q, k)] = a.conj();
                pot[(q, k)] = b.conj();
            }
        }
    }
    (kin, pot)
}

/// `h[k][q] = <phi_k| T + V(t) |phi_q>`, hermitian by construction.
pub fn one_body_integrals(state: &ManyBodyState, spec: &HamiltonianSpec, t: f64) -> DMatrix<Complex64> {
    let (kin, pot) = one_body_parts(&state.grid, &state.orbitals, spec, t);
    kin + pot
}

/// `W[k][s][q][l] = <phi_k| W_sl |phi_q>`.
pub fn two_body_integrals(grid: &Grid, orbitals: &[Vec<Complex64>], fields: &MeanFields) -> TwoBodyTensor {
    let m = orbitals.len();
    let dx = grid.spacing();
    let products: Vec<Vec<Complex64>> = (0..m * m)
        .map(|kq| {
            let (k, q) = (kq / m, kq % m);
            orbitals[k]
                .iter()
                .zip(&orbitals[q])
                .map(|(a, b)| a.conj() * b)
                .collect()
        })
        .collect();
    let mut w = Tensor4::zeros(m);
    // W[k][s][q][l] = W[s][k][l][q]: the (kq, sl) table is symmetric
    for kq in 0..m * m {
        let (k, q) = (kq / m, kq % m);
        for sl in kq..m * m {
            let (s, l) = (sl / m, sl % m);
            let v = unconjugated_dot(&products[kq], fields.get(s, l)) * dx;
            w.set(k, s, q, l, v);
            w.set(s, k, l, q, v);
        }
    }
    w
}

pub(crate) fn integrals_with(
    grid: &Grid,
    orbitals: &[Vec<Complex64>],
    spec: &HamiltonianSpec,
    op: &InteractionOperator,
    t: f64,
) -> Integrals {
    let (kin, pot) = one_body_parts(grid, orbitals, spec, t);
    let fields = MeanFields::compute(orbitals, op);
    Integrals {
        h: kin + pot,
        w: two_body_integrals(grid, orbitals, &fields),
    }
}

pub fn integrals(state: &ManyBodyState, spec: &HamiltonianSpec, t: f64) -> Integrals {
    let op = InteractionOperator::new(&state.grid, &spec.interaction);
    integrals_with(&state.grid, &state.orbitals, spec, &op, t)
}

/// `-i H(t) C`.
pub fn coefficient_rhs(state: &ManyBodyState, spec: &HamiltonianSpec, t: f64) -> Vec<Complex64> {
    let ints = integrals(state, spec, t);
    let ham = ConfigHamiltonian::new(&state.basis, &ints.h, &ints.w);
    ham.apply_vec(&state.coefficients)
        .into_iter()
        .map(|z| z * Complex64::new(0.0, -1.0))
        .collect()
}

/// Inverse of the one-body density with eigenvalues floored at `RHO_REGULARIZATION * N`.
pub fn regularized_inverse(rho: &DMatrix<Complex64>, n_particles: usize) -> DMatrix<Complex64> {
    regularized_inverse_with(rho, RHO_REGULARIZATION * n_particles as f64)
}

/// Inverse with eigenvalues floored at `floor`.
pub fn regularized_inverse_with(rho: &DMatrix<Complex64>, floor: f64) -> DMatrix<Complex64> {
    let m = rho.nrows();
    let eig = rho.clone().symmetric_eigen();
    DMatrix::from_fn(m, m, |a, b| {
        (0..m)
            .map(|i| {
                eig.eigenvectors[(a, i)] * eig.eigenvectors[(b, i)].conj()
                    / eig.eigenvalues[i].max(floor)
            })
            .sum()
    })
}

/// Per-step data for the orbital equations: coefficients are frozen while the
/// orbitals move, so `rho1^-1 rho2` is computed once.
#[derive(Debug, Clone)]
pub struct OrbitalCoupling {
    m: usize,
    /// `A[j][s][l][q] = sum_k (rho1^-1)[j][k] rho2[k][s][l][q]`
    reduced: Vec<Complex64>,
}

impl OrbitalCoupling {
    pub fn new(basis: &ConfigurationBasis, coefficients: &[Complex64]) -> Self {
        Self::with_regularization(basis, coefficients, RHO_REGULARIZATION)
    }

    /// Same with the density floor set to `relative * N`.
    pub fn with_regularization(basis: &ConfigurationBasis, coefficients: &[Complex64], relative: f64) -> Self {
        let rho1 = one_body_density(basis, coefficients);
        let rho2 = two_body_density(basis, coefficients);
        Self::from_densities(&rho1, &rho2, relative * basis.n_particles() as f64)
    }

    pub fn from_densities(rho1: &DMatrix<Complex64>, rho2: &TwoBodyDensity, floor: f64) -> Self {
        let m = rho1.nrows();
        let inv = regularized_inverse_with(rho1, floor);
        let m3 = m * m * m;
        let mut reduced = vec![ZERO; m * m3];
        let r2 = rho2.as_slice();
        for j in 0..m {
            for k in 0..m {
                let c = inv[(j, k)];
                if c == ZERO {
                    continue;
                }
                let dst = &mut reduced[j * m3..(j + 1) * m3];
                for (d, s) in dst.iter_mut().zip(&r2[k * m3..(k + 1) * m3]) {
                    *d += c * s;
                }
            }
        }
        Self { m, reduced }
    }

    /// Wraps a precomputed `A[j][s][l][q]` table.
    pub(crate) fn from_reduced(m: usize, reduced: Vec<Complex64>) -> Self {
        assert_eq!(reduced.len(), m * m * m * m);
        Self { m, reduced }
    }

    #[inline]
    fn get(&self, j: usize, s: usize, l: usize, q: usize) -> Complex64 {
        self.reduced[((j * self.m + s) * self.m + l) * self.m + q]
    }
}

/// Evaluates `sum_{s,l,q} A[j][s][l][q] W_sl phi_q` for every output index `j`.
pub(crate) fn mean_field_terms(
    orbitals: &[Vec<Complex64>],
    op: &InteractionOperator,
    coupling: &OrbitalCoupling,
) -> Vec<Vec<Complex64>> {
    let m = orbitals.len();
    let n = orbitals.first().map_or(0, Vec::len);
    let mut out = vec![vec![ZERO; n]; coupling.m];
    if op.is_zero() {
        return out;
    }
    let fields = MeanFields::compute(orbitals, op);
    let mut prod = vec![ZERO; n];
    for s in 0..m {
        for l in 0..m {
            let field = fields.get(s, l);
            for q in 0..m {
                if (0..coupling.m).all(|j| coupling.get(j, s, l, q) == ZERO) {
                    continue;
                }
                for ((p, f), o) in prod.iter_mut().zip(field).zip(&orbitals[q]) {
                    *p = f * o;
                }
                for (j, g) in out.iter_mut().enumerate() {
                    let a = coupling.get(j, s, l, q);
                    if a == ZERO {
                        continue;
                    }
                    for (gz, p) in g.iter_mut().zip(&prod) {
                        *gz += a * p;
                    }
                }
            }
        }
    }
    out
}

/// Evaluates `P [ h phi_j + sum A[j][s][l][q] W_sl phi_q ]` for every orbital.
pub(crate) fn projected_orbital_terms(
    grid: &Grid,
    orbitals: &[Vec<Complex64>],
    spec: &HamiltonianSpec,
    op: &InteractionOperator,
    coupling: &OrbitalCoupling,
    t: f64,
) -> Vec<Vec<Complex64>> {
    let v = spec.potential.sample(grid.points(), t);
    let mut out = mean_field_terms(orbitals, op, coupling);
    for (g, o) in out.iter_mut().zip(orbitals) {
        let t_phi = grid.kinetic_apply(o, spec.mass);
        for (((gz, tz), p), vp) in g.iter_mut().zip(&t_phi).zip(o).zip(&v) {
            *gz += tz + p * vp;
        }
    }
    project_out(grid, orbitals, &mut out);
    out
}

/// Applies `1 - sum_u |phi_u><phi_u|` to every vector in `targets`.
pub(crate) fn project_out(grid: &Grid, orbitals: &[Vec<Complex64>], targets: &mut [Vec<Complex64>]) {
    let dx = grid.spacing();
    for g in targets.iter_mut() {
        let overlaps: Vec<Complex64> = orbitals.iter().map(|u| dot(u, g) * dx).collect();
        for (u, c) in orbitals.iter().zip(overlaps) {
            for (gz, uz) in g.iter_mut().zip(u) {
                *gz -= c * uz;
            }
        }
    }
}

/// Real-time orbital derivatives `d/dt phi_j = -i P [ ... ]` with the coefficients
/// of `state` held fixed.
pub fn orbital_rhs(state: &ManyBodyState, spec: &HamiltonianSpec, t: f64) -> Vec<Vec<Complex64>> {
    let op = InteractionOperator::new(&state.grid, &spec.interaction);
    let coupling = OrbitalCoupling::new(&state.basis, &state.coefficients);
    let minus_i = Complex64::new(0.0, -1.0);
    projected_orbital_terms(&state.grid, &state.orbitals, spec, &op, &coupling, t)
        .into_iter()
        .map(|g| g.into_iter().map(|z| z * minus_i).collect())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    pub kinetic: f64,
    pub potential: f64,
    pub interaction: f64,
}

impl EnergyBreakdown {
    pub fn total(&self) -> f64 {
        self.kinetic + self.potential + self.interaction
    }
}

fn contract_one_body(rho1: &DMatrix<Complex64>, h: &DMatrix<Complex64>) -> Complex64 {
    rho1.iter().zip(h.iter()).map(|(r, x)| r * x).sum()
}

fn contract_two_body(rho2: &TwoBodyDensity, w: &TwoBodyTensor) -> Complex64 {
    let m = w.dim();
    let mut acc = ZERO;
    for k in 0..m {
        for s in 0..m {
            for q in 0..m {
                for l in 0..m {
                    acc += rho2.get(k, s, l, q) * w.get(k, s, q, l);
                }
            }
        }
    }
    0.5 * acc
}

pub fn energy_breakdown(state: &ManyBodyState, spec: &HamiltonianSpec, t: f64) -> EnergyBreakdown {
    let (kin, pot) = one_body_parts(&state.grid, &state.orbitals, spec, t);
    let rho1 = state.one_body_density();
    let interaction = if spec.interaction.w0 == 0.0 || state.n_particles() < 2 {
        0.0
    } else {
        let fields = mean_field_operators(state, &spec.interaction);
        let w = two_body_integrals(&state.grid, &state.orbitals, &fields);
        contract_two_body(&state.two_body_density(), &w).re
    };
    EnergyBreakdown {
        kinetic: contract_one_body(&rho1, &kin).re,
        potential: contract_one_body(&rho1, &pot).re,
        interaction,
    }
}

/// `E = <Psi|H|Psi>` from the reduced density matrices; the imaginary part is dropped.
pub fn energy(state: &ManyBodyState, spec: &HamiltonianSpec, t: f64) -> f64 {
    energy_complex(state, spec, t).re
}

/// Energy before dropping the (diagnostic) imaginary part.
pub fn energy_complex(state: &ManyBodyState, spec: &HamiltonianSpec, t: f64) -> Complex64 {
    let ints = integrals(state, spec, t);
    let rho1 = state.one_body_density();
    let rho2 = state.two_body_density();
    contract_one_body(&rho1, &ints.h) + contract_two_body(&rho2, &ints.w)
}

/// Energy from density matrices and integrals.
pub fn energy_from_densities(
    rho1: &DMatrix<Complex64>,
    rho2: &TwoBodyDensity,
    ints: &Integrals,
) -> Complex64 {
    contract_one_body(rho1, &ints.h) + contract_two_body(rho2, &ints.w)
}
