//! Observables derived from a many-body state: densities in position and
//! momentum space, natural occupations and orbitals, and the one- and two-body
//! correlation functions on the grid.
//!
//! Correlation records keep the unnormalized convention (densities `N rho`,
//! `rho1` with trace `N`, `rho2` with double integral `N (N - 1)`), so the
//! Glauber functions come out as plain ratios of stored fields.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::mctdh::ManyBodyState;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Position-space density normalized to one.
pub fn density_x(state: &ManyBodyState) -> Vec<f64> {
    let n = state.n_particles() as f64;
    let rho = state.one_body_density();
    density_from(&rho, &state.orbitals, n)
}

fn density_from(rho: &DMatrix<Complex64>, orbitals: &[Vec<Complex64>], n: f64) -> Vec<f64> {
    let points = orbitals.first().map_or(0, Vec::len);
    let mut out = vec![0.0; points];
    for (k, pk) in orbitals.iter().enumerate() {
        for (q, pq) in orbitals.iter().enumerate() {
            let r = rho[(k, q)];
            if r == ZERO {
                continue;
            }
            for ((o, a), b) in out.iter_mut().zip(pk).zip(pq) {
                *o += (r * a.conj() * b).re;
            }
        }
    }
    out.iter_mut().for_each(|v| *v /= n);
    out
}

/// Momentum-space density on the ascending wave-number grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumDensity {
    pub k: Vec<f64>,
    pub density: Vec<f64>,
}

/// Density in momentum space, normalized to one over `dk = 2 pi / L`.
///
/// Orbitals are transformed with `dx / sqrt(2 pi)` so that the transform is
/// unitary between the two quadratures.
pub fn density_k(state: &ManyBodyState) -> MomentumDensity {
    let grid = &state.grid;
    let scale = grid.spacing() / (2.0 * std::f64::consts::PI).sqrt();
    let transformed: Vec<Vec<Complex64>> = state
        .orbitals
        .iter()
        .map(|orb| {
            let mut v = orb.clone();
            grid.fft(&mut v);
            v.iter_mut().for_each(|z| *z *= scale);
            v
        })
        .collect();
    let fft_order = density_from(&state.one_body_density(), &transformed, state.n_particles() as f64);
    let mut order: Vec<usize> = (0..grid.n_points()).collect();
    order.sort_by(|&a, &b| grid.momenta()[a].total_cmp(&grid.momenta()[b]));
    MomentumDensity {
        k: order.iter().map(|&i| grid.momenta()[i]).collect(),
        density: order.iter().map(|&i| fft_order[i]).collect(),
    }
}

/// Natural occupations (descending, summing to one) and the matching orbitals.
#[derive(Debug, Clone)]
pub struct NaturalOrbitals {
    pub occupations: Vec<f64>,
    pub orbitals: Vec<Vec<Complex64>>,
}

/// Eigendecomposition of `rho1 / N`.
///
/// With `rho1[j][k] = <b_j^dag b_k>`, the eigenvector `u` of `rho1` belongs to
/// the orbital `sum_j conj(u_j) phi_j`.
pub fn natural_occupations(state: &ManyBodyState) -> NaturalOrbitals {
    let n = state.n_particles() as f64;
    let eig = state.one_body_density().symmetric_eigen();
    let mut order: Vec<usize> = (0..state.n_orbitals()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let occupations = order.iter().map(|&a| eig.eigenvalues[a] / n).collect();
    let points = state.grid.n_points();
    let orbitals = order
        .iter()
        .map(|&a| {
            let mut chi = vec![ZERO; points];
            for (j, phi) in state.orbitals.iter().enumerate() {
                let c = eig.eigenvectors[(j, a)].conj();
                for (o, p) in chi.iter_mut().zip(phi) {
                    *o += c * p;
                }
            }
            chi
        })
        .collect();
    NaturalOrbitals { occupations, orbitals }
}

/// One grid pair `(x, x')` of the correlation output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationRecord {
    pub x: f64,
    pub x_prime: f64,
    /// `N rho(x)`
    pub rho_x: f64,
    /// `N rho(x')`
    pub rho_xp: f64,
    pub rho1_re: f64,
    pub rho1_im: f64,
    /// `rho2(x, x'; x, x')`
    pub rho2_diag: f64,
}

impl CorrelationRecord {
    /// `|g1(x, x')|`, undefined where either density vanishes.
    pub fn g1(&self, cutoff: f64) -> Option<f64> {
        let d = self.rho_x * self.rho_xp;
        (d > cutoff).then(|| self.rho1_re.hypot(self.rho1_im) / d.sqrt())
    }

    /// `g2(x, x')`, undefined where either density vanishes.
    pub fn g2(&self, cutoff: f64) -> Option<f64> {
        let d = self.rho_x * self.rho_xp;
        (d > cutoff).then(|| self.rho2_diag / d)
    }
}

/// One- and two-body correlations for every grid pair, row-major in `x`.
pub fn correlations_x(state: &ManyBodyState) -> Vec<CorrelationRecord> {
    let grid = &state.grid;
    let n = grid.n_points();
    let m = state.n_orbitals();
    let natural = natural_occupations(state);
    let np = state.n_particles() as f64;

    // rho1(x, x') = sum_a n_a chi_a(x) conj(chi_a(x'))
    let mut rho1 = DMatrix::<Complex64>::zeros(n, n);
    for (occ, chi) in natural.occupations.iter().zip(&natural.orbitals) {
        let w = occ * np;
        if w == 0.0 {
            continue;
        }
        for i in 0..n {
            let a = chi[i] * w;
            for j in 0..n {
                rho1[(i, j)] += a * chi[j].conj();
            }
        }
    }

    // rho2(x, x') = sum P_kq(x) R[(kq), (sl)] P_sl(x') with P_kq = conj(phi_k) phi_q
    let rho2 = state.two_body_density();
    let p = DMatrix::from_fn(n, m * m, |i, c| state.orbitals[c / m][i].conj() * state.orbitals[c % m][i]);
    let r = DMatrix::from_fn(m * m, m * m, |row, col| {
        let (k, q) = (row / m, row % m);
        let (s, l) = (col / m, col % m);
        rho2.get(k, s, l, q)
    });
    let pair = &p * r * p.transpose();

    let mut out = Vec::with_capacity(n * n);
    let points = grid.points();
    for i in 0..n {
        for j in 0..n {
            out.push(CorrelationRecord {
                x: points[i],
                x_prime: points[j],
                rho_x: rho1[(i, i)].re,
                rho_xp: rho1[(j, j)].re,
                rho1_re: rho1[(i, j)].re,
                rho1_im: rho1[(i, j)].im,
                rho2_diag: pair[(i, j)].re,
            });
        }
    }
    out
}
