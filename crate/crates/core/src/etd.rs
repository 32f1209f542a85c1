//! Exponential fourth-order Runge-Kutta stepping of the orbitals.
//!
//! The orbital equation is integrated in the metric form
//! `i d/dt phi = P [ B (rho1 h phi + rho2 W phi) ]` with `B` the regularized
//! inverse of `rho1`. In the natural-orbital frame `B rho1` is diagonal with
//! entries `d_a = n_a / max(n_a, floor)`, so every natural orbital carries its
//! own scalar multiple of a common Hermitian reference operator, which is
//! treated exactly. Everything else is explicit.
//!
//! Where no eigenvalue is floored this is the usual equation of motion. Unlike
//! regularizing only the two-body term, the metric form keeps the stationary
//! points and the conserved energy independent of the floor.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::fock::{one_body_density, two_body_density, ConfigurationBasis};
use crate::grid::Grid;
use crate::mctdh::{mean_field_terms, project_out, HamiltonianSpec, InteractionOperator, OrbitalCoupling};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const CONTOUR_POINTS: usize = 64;

/// ETD coefficients for one eigenvalue `z = c h`, evaluated as contour means to
/// avoid cancellation near `z = 0`.
#[derive(Debug, Clone, Copy)]
struct EtdCoefficients {
    e: Complex64,
    e2: Complex64,
    q: Complex64,
    f1: Complex64,
    f2: Complex64,
    f3: Complex64,
}

impl EtdCoefficients {
    fn new(z: Complex64, h: f64) -> Self {
        let mut q = ZERO;
        let mut f1 = ZERO;
        let mut f2 = ZERO;
        let mut f3 = ZERO;
        for k in 0..CONTOUR_POINTS {
            let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / CONTOUR_POINTS as f64;
            let lr = z + Complex64::from_polar(1.0, theta);
            let el = lr.exp();
            let lr2 = lr * lr;
            let lr3 = lr2 * lr;
            q += ((lr * 0.5).exp() - 1.0) / lr;
            f1 += (-4.0 - lr + el * (4.0 - 3.0 * lr + lr2)) / lr3;
            f2 += (2.0 + lr + el * (lr - 2.0)) / lr3;
            f3 += (-4.0 - 3.0 * lr - lr2 + el * (4.0 - lr)) / lr3;
        }
        let s = h / CONTOUR_POINTS as f64;
        Self {
            e: z.exp(),
            e2: (z * 0.5).exp(),
            q: q * s,
            f1: f1 * s,
            f2: f2 * s,
            f3: f3 * s,
        }
    }
}

/// Hermitian reference operator `L = T + U(x)` in its eigenbasis.
pub(crate) struct LinearPart {
    /// Orthonormal eigenvectors (columns).
    vectors: DMatrix<f64>,
    local: Vec<f64>,
    mass: f64,
    eigenvalues: Vec<f64>,
    prefactor: Complex64,
    h: f64,
    unit: Vec<EtdCoefficients>,
}

impl LinearPart {
    /// Kinetic energy plus a local potential, diagonalized on the grid.
    pub(crate) fn with_potential(grid: &Grid, mass: f64, local: Vec<f64>, prefactor: Complex64, h: f64) -> Self {
        let n = grid.n_points();
        let mut t = DMatrix::<f64>::zeros(n, n);
        let mut unit = vec![ZERO; n];
        for j in 0..n {
            unit.iter_mut().for_each(|z| *z = ZERO);
            unit[j] = Complex64::new(1.0, 0.0);
            grid.kinetic_apply_in_place(&mut unit, mass);
            for i in 0..n {
                t[(i, j)] = unit[i].re;
            }
        }
        let mut op = (&t + t.transpose()) * 0.5;
        for i in 0..n {
            op[(i, i)] += local[i];
        }
        let eig = op.symmetric_eigen();
        let eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        let unit = Self::table(&eigenvalues, prefactor, h, 1.0);
        Self {
            vectors: eig.eigenvectors,
            local,
            mass,
            eigenvalues,
            prefactor,
            h,
            unit,
        }
    }

    fn table(eigenvalues: &[f64], prefactor: Complex64, h: f64, scale: f64) -> Vec<EtdCoefficients> {
        eigenvalues
            .iter()
            .map(|&l| EtdCoefficients::new(prefactor * (scale * l * h), h))
            .collect()
    }

    /// `L u` in the physical representation.
    fn apply(&self, grid: &Grid, u: &[Complex64]) -> Vec<Complex64> {
        let mut out = grid.kinetic_apply(u, self.mass);
        for ((o, z), v) in out.iter_mut().zip(u).zip(&self.local) {
            *o += z * v;
        }
        out
    }

    fn to_eigen(&self, batch: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        split_apply(batch, |x| self.vectors.tr_mul(x))
    }

    fn from_eigen(&self, batch: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        split_apply(batch, |x| &self.vectors * x)
    }
}

/// Applies a real linear map to a batch of complex vectors through one real
/// matrix product on the stacked real and imaginary parts.
fn split_apply(batch: &[Vec<Complex64>], f: impl Fn(&DMatrix<f64>) -> DMatrix<f64>) -> Vec<Vec<Complex64>> {
    let m = batch.len();
    let n = batch.first().map_or(0, Vec::len);
    let x = DMatrix::from_fn(n, 2 * m, |i, c| if c < m { batch[c][i].re } else { batch[c - m][i].im });
    let y = f(&x);
    (0..m)
        .map(|c| (0..n).map(|i| Complex64::new(y[(i, c)], y[(i, c + m)])).collect())
        .collect()
}

/// Coefficient-dependent data for one orbital step, expressed in the natural frame.
pub(crate) struct NaturalFrame {
    /// Eigenvectors of `rho1` (columns).
    u: DMatrix<Complex64>,
    /// `d_a = n_a / max(n_a, floor)`.
    scale: Vec<f64>,
    /// `A[a][s][l][q] = conj(U[k][a]) rho2[k][s][l][q] / max(n_a, floor)`
    coupling: OrbitalCoupling,
}

impl NaturalFrame {
    /// `floor` is relative to the particle number.
    pub(crate) fn new(basis: &ConfigurationBasis, coefficients: &[Complex64], floor: f64) -> Self {
        let m = basis.n_orbitals();
        let floor = floor * basis.n_particles() as f64;
        let rho1 = one_body_density(basis, coefficients);
        let rho2 = two_body_density(basis, coefficients);
        let eig = rho1.symmetric_eigen();
        let u = eig.eigenvectors;
        let occ: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        let scale = occ.iter().map(|&n| (n.max(0.0) / n.max(floor)).min(1.0)).collect();
        let m3 = m * m * m;
        let r2 = rho2.as_slice();
        let mut reduced = vec![ZERO; m * m3];
        for a in 0..m {
            let inv = 1.0 / occ[a].max(floor);
            let dst = &mut reduced[a * m3..(a + 1) * m3];
            for k in 0..m {
                let c = u[(k, a)].conj() * inv;
                for (d, s) in dst.iter_mut().zip(&r2[k * m3..(k + 1) * m3]) {
                    *d += c * s;
                }
            }
        }
        Self {
            u,
            scale,
            coupling: OrbitalCoupling::from_reduced(m, reduced),
        }
    }

    /// `chi_a = sum_j conj(U[j][a]) phi_j`
    fn to_natural(&self, phi: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        rotate(phi, |j, a| self.u[(j, a)].conj())
    }

    /// `phi_j = sum_a U[j][a] chi_a`
    fn from_natural(&self, chi: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        rotate(chi, |a, j| self.u[(j, a)])
    }
}

/// `out_b = sum_a w(a, b) v_a`
fn rotate(v: &[Vec<Complex64>], w: impl Fn(usize, usize) -> Complex64) -> Vec<Vec<Complex64>> {
    let m = v.len();
    let n = v.first().map_or(0, Vec::len);
    (0..m)
        .map(|b| {
            let mut out = vec![ZERO; n];
            for (a, va) in v.iter().enumerate() {
                let c = w(a, b);
                if c != ZERO {
                    for (o, x) in out.iter_mut().zip(va) {
                        *o += c * x;
                    }
                }
            }
            out
        })
        .collect()
}

/// Orbital integrator for a fixed reference operator and time step.
pub(crate) struct OrbitalStepper<'a> {
    pub grid: &'a Grid,
    pub spec: &'a HamiltonianSpec,
    pub op: &'a InteractionOperator,
    pub linear: LinearPart,
}

impl OrbitalStepper<'_> {
    /// Right-hand side minus its linear part, for natural orbitals `chi`.
    fn nonlinear(&self, chi: &[Vec<Complex64>], frame: &NaturalFrame, t: f64) -> Vec<Vec<Complex64>> {
        let grid = self.grid;
        let phi = frame.from_natural(chi);
        let v = self.spec.potential.sample(grid.points(), t);
        let mut g = mean_field_terms(&phi, self.op, &frame.coupling);
        for ((ga, x), &d) in g.iter_mut().zip(chi).zip(&frame.scale) {
            let tx = grid.kinetic_apply(x, self.spec.mass);
            for (((gz, tz), xz), vz) in ga.iter_mut().zip(&tx).zip(x).zip(&v) {
                *gz += d * (tz + xz * vz);
            }
        }
        project_out(grid, chi, &mut g);
        let p = self.linear.prefactor;
        g.into_iter()
            .zip(chi)
            .zip(&frame.scale)
            .map(|((ga, x), &d)| {
                let lin = self.linear.apply(grid, x);
                ga.iter().zip(&lin).map(|(a, b)| p * (a - d * b)).collect()
            })
            .collect()
    }

    /// One step of length `h` (fixed at construction) from time `t`.
    pub(crate) fn step(&self, orbitals: &[Vec<Complex64>], frame: &NaturalFrame, t: f64) -> Vec<Vec<Complex64>> {
        let lin = &self.linear;
        let h = lin.h;
        let scaled: Vec<Option<Vec<EtdCoefficients>>> = frame
            .scale
            .iter()
            .map(|&d| (d < 1.0 - 1e-12).then(|| LinearPart::table(&lin.eigenvalues, lin.prefactor, h, d)))
            .collect();
        let tables: Vec<&[EtdCoefficients]> = scaled
            .iter()
            .map(|s| s.as_deref().unwrap_or(&lin.unit))
            .collect();
        let combine = |terms: &[(&[Vec<Complex64>], fn(&EtdCoefficients) -> Complex64)]| -> Vec<Vec<Complex64>> {
            tables
                .iter()
                .enumerate()
                .map(|(a, co)| {
                    co.iter()
                        .enumerate()
                        .map(|(i, c)| terms.iter().map(|(v, f)| f(c) * v[a][i]).sum())
                        .collect()
                })
                .collect()
        };
        let chi = frame.to_natural(orbitals);
        let u = lin.to_eigen(&chi);
        let n0 = lin.to_eigen(&self.nonlinear(&chi, frame, t));
        let a = combine(&[(&u, |c| c.e2), (&n0, |c| c.q)]);
        let na = lin.to_eigen(&self.nonlinear(&lin.from_eigen(&a), frame, t + 0.5 * h));
        let b = combine(&[(&u, |c| c.e2), (&na, |c| c.q)]);
        let nb = lin.to_eigen(&self.nonlinear(&lin.from_eigen(&b), frame, t + 0.5 * h));
        let two_nb_minus_n0: Vec<Vec<Complex64>> = nb
            .iter()
            .zip(&n0)
            .map(|(x, y)| x.iter().zip(y).map(|(p, q)| 2.0 * p - q).collect())
            .collect();
        let c = combine(&[(&a, |c| c.e2), (&two_nb_minus_n0, |c| c.q)]);
        let nc = lin.to_eigen(&self.nonlinear(&lin.from_eigen(&c), frame, t + h));
        let na_plus_nb: Vec<Vec<Complex64>> = na
            .iter()
            .zip(&nb)
            .map(|(x, y)| x.iter().zip(y).map(|(p, q)| 2.0 * (p + q)).collect())
            .collect();
        let next = combine(&[(&u, |c| c.e), (&n0, |c| c.f1), (&na_plus_nb, |c| c.f2), (&nc, |c| c.f3)]);
        frame.from_natural(&lin.from_eigen(&next))
    }
}
