//! Occupation-number basis and the second-quantized Hamiltonian over `M` orbitals.
//!
//! Configurations are enumerated in descending lexicographic order of their
//! occupation vectors, so the first bosonic configuration is `|N, 0, ..., 0>`
//! and the first fermionic one is `|1, ..., 1, 0, ..., 0>`.
//!
//! Fermionic signs use the ordered-string convention: `b_q` acting on
//! `|n>` picks up `(-1)^(n_0 + ... + n_{q-1})`.
//!
//! Two-body operators are routed through the `(N-2)`-particle space: with
//! `B_L = b_l b_q` for an ordered orbital pair `L = (l, q)`, every two-body
//! operator is `1/2 sum_{K,L} G_{KL} B_K^dag B_L`. Both the configuration
//! Hamiltonian and the two-body density matrix are evaluated in that form.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::dot;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistics {
    Boson,
    Fermion,
}

impl Statistics {
    /// `+1` for bosons, `-1` for fermions: the sign picked up by swapping two operators.
    pub fn exchange_sign(self) -> f64 {
        match self {
            Self::Boson => 1.0,
            Self::Fermion => -1.0,
        }
    }

    pub fn max_occupation(self, n_particles: usize) -> usize {
        match self {
            Self::Boson => n_particles,
            Self::Fermion => 1,
        }
    }
}

/// Occupation vector `(n_1, ..., n_M)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub occupations: Vec<u8>,
}

impl Configuration {
    pub fn n_particles(&self) -> usize {
        self.occupations.iter().map(|&n| n as usize).sum()
    }
}

/// Removes a particle from orbital `q`; returns the matrix element.
fn annihilate(occ: &mut [u8], q: usize, stats: Statistics) -> Option<f64> {
    if occ[q] == 0 {
        return None;
    }
    let factor = match stats {
        Statistics::Boson => (occ[q] as f64).sqrt(),
        Statistics::Fermion => parity(&occ[..q]),
    };
    occ[q] -= 1;
    Some(factor)
}

/// Adds a particle to orbital `k`; returns the matrix element.
fn create(occ: &mut [u8], k: usize, stats: Statistics) -> Option<f64> {
    let factor = match stats {
        Statistics::Boson => (occ[k] as f64 + 1.0).sqrt(),
        Statistics::Fermion => {
            if occ[k] != 0 {
                return None;
            }
            parity(&occ[..k])
        }
    };
    occ[k] += 1;
    Some(factor)
}

fn parity(occ: &[u8]) -> f64 {
    if occ.iter().map(|&n| n as usize).sum::<usize>() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn enumerate(stats: Statistics, n: usize, m: usize) -> Vec<Vec<u8>> {
    fn rec(
        stats: Statistics,
        remaining: usize,
        slot: usize,
        m: usize,
        current: &mut Vec<u8>,
        out: &mut Vec<Vec<u8>>,
    ) {
        if slot == m - 1 {
            if remaining <= stats.max_occupation(remaining.max(1)) {
                current.push(remaining as u8);
                out.push(current.clone());
                current.pop();
            }
            return;
        }
        let top = remaining.min(stats.max_occupation(remaining.max(1)));
        for occ in (0..=top).rev() {
            current.push(occ as u8);
            rec(stats, remaining - occ, slot + 1, m, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    if m == 0 {
        return out;
    }
    rec(stats, n, 0, m, &mut Vec::with_capacity(m), &mut out);
    out
}

/// `b_k^dag b_q` connecting configuration `from` to `to`.
#[derive(Debug, Clone, Copy)]
struct Hop {
    from: u32,
    to: u32,
    /// `k * M + q`
    kq: u32,
    factor: f64,
}

/// `<reduced| b_p b_r |config>` for the ordered pair `(p, r)`.
#[derive(Debug, Clone, Copy)]
struct PairHop {
    config: u32,
    reduced: u32,
    pair: u32,
    factor: f64,
}

#[derive(Debug, Clone)]
pub struct ConfigurationBasis {
    statistics: Statistics,
    n_particles: usize,
    n_orbitals: usize,
    configs: Vec<Configuration>,
    index: HashMap<Vec<u8>, usize>,
    hops: Vec<Hop>,
    /// Ordered orbital pairs `(p, r)`, `p <= r` for bosons and `p < r` for fermions.
    pairs: Vec<(usize, usize)>,
    pair_index: Vec<Option<usize>>,
    reduced_dim: usize,
    pair_hops: Vec<PairHop>,
    /// `pair_hops` indices grouped by reduced configuration.
    by_reduced: Vec<Vec<u32>>,
}

/// Enumerates all configurations of `n` particles in `m` orbitals.
pub fn enumerate_configs(stats: Statistics, n: usize, m: usize) -> Result<ConfigurationBasis> {
    ConfigurationBasis::new(stats, n, m)
}

impl ConfigurationBasis {
    pub fn new(stats: Statistics, n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::Config(format!(
                "need at least one particle and one orbital, got N = {n}, M = {m}"
            )));
        }
        if n > u8::MAX as usize {
            return Err(Error::Config(format!("too many particles: {n}")));
        }
        if stats == Statistics::Fermion && m < n {
            return Err(Error::InfeasibleBasis {
                n_particles: n,
                n_orbitals: m,
            });
        }
        let occs = enumerate(stats, n, m);
        let index: HashMap<Vec<u8>, usize> =
            occs.iter().enumerate().map(|(i, o)| (o.clone(), i)).collect();

        let mut hops = Vec::new();
        for (a, occ) in occs.iter().enumerate() {
            for q in 0..m {
                let mut work = occ.clone();
                let Some(fq) = annihilate(&mut work, q, stats) else {
                    continue;
                };
                for k in 0..m {
                    let mut target = work.clone();
                    if let Some(fk) = create(&mut target, k, stats) {
                        hops.push(Hop {
                            from: a as u32,
                            to: index[&target] as u32,
                            kq: (k * m + q) as u32,
                            factor: fq * fk,
                        });
                    }
                }
            }
        }

        let mut pairs = Vec::new();
        let mut pair_index = vec![None; m * m];
        for p in 0..m {
            let start = if stats == Statistics::Boson { p } else { p + 1 };
            for r in start..m {
                pair_index[p * m + r] = Some(pairs.len());
                pairs.push((p, r));
            }
        }

        let mut pair_hops = Vec::new();
        let mut reduced_dim = 0;
        let mut by_reduced = Vec::new();
        if n >= 2 {
            let reduced = enumerate(stats, n - 2, m);
            let reduced_index: HashMap<Vec<u8>, usize> = reduced
                .iter()
                .enumerate()
                .map(|(i, o)| (o.clone(), i))
                .collect();
            reduced_dim = reduced.len();
            by_reduced = vec![Vec::new(); reduced_dim];
            for (a, occ) in occs.iter().enumerate() {
                for (pi, &(p, r)) in pairs.iter().enumerate() {
                    let mut work = occ.clone();
                    let Some(fr) = annihilate(&mut work, r, stats) else {
                        continue;
                    };
                    let Some(fp) = annihilate(&mut work, p, stats) else {
                        continue;
                    };
                    let red = reduced_index[&work];
                    by_reduced[red].push(pair_hops.len() as u32);
                    pair_hops.push(PairHop {
                        config: a as u32,
                        reduced: red as u32,
                        pair: pi as u32,
                        factor: fr * fp,
                    });
                }
            }
        }

        Ok(Self {
            statistics: stats,
            n_particles: n,
            n_orbitals: m,
            configs: occs
                .into_iter()
                .map(|occupations| Configuration { occupations })
                .collect(),
            index,
            hops,
            pairs,
            pair_index,
            reduced_dim,
            pair_hops,
            by_reduced,
        })
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn n_orbitals(&self) -> usize {
        self.n_orbitals
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn configs(&self) -> &[Configuration] {
        &self.configs
    }

    pub fn position(&self, occupations: &[u8]) -> Option<usize> {
        self.index.get(occupations).copied()
    }

    pub fn n_pairs(&self) -> usize {
        self.pairs.len()
    }

    /// Coefficient of `B_K^dag` / `B_L` for an operator string position: returns the pair
    /// index and the sign relating `b_x b_y` to the stored ordered pair.
    fn annihilator_pair(&self, x: usize, y: usize) -> Option<(usize, f64)> {
        let m = self.n_orbitals;
        if x <= y {
            self.pair_index[x * m + y].map(|i| (i, 1.0))
        } else {
            self.pair_index[y * m + x]
                .map(|i| (i, self.statistics.exchange_sign()))
        }
    }

    /// `T_L = B_L C` for every pair, laid out pair-major.
    fn pair_amplitudes(&self, c: &[Complex64]) -> Vec<Complex64> {
        let mut t = vec![ZERO; self.pairs.len() * self.reduced_dim];
        for hop in &self.pair_hops {
            t[hop.pair as usize * self.reduced_dim + hop.reduced as usize] +=
                c[hop.config as usize] * hop.factor;
        }
        t
    }

    /// Pair coupling matrix `G_{KL}` from the two-body tensor.
    fn pair_couplings(&self, w: &TwoBodyTensor) -> Vec<Complex64> {
        let np = self.pairs.len();
        let eta = self.statistics.exchange_sign();
        let mut g = vec![ZERO; np * np];
        for (ki, &(p, r)) in self.pairs.iter().enumerate() {
            // (k, s) orderings of the creation pair with their signs
            let creations: &[(usize, usize, f64)] = if p == r {
                &[(p, r, 1.0)]
            } else {
                &[(p, r, eta), (r, p, 1.0)]
            };
            for (li, &(u, v)) in self.pairs.iter().enumerate() {
                let annihilations: &[(usize, usize, f64)] = if u == v {
                    &[(u, v, 1.0)]
                } else {
                    &[(u, v, 1.0), (v, u, eta)]
                };
                let mut acc = ZERO;
                for &(k, s, ck) in creations {
                    for &(l, q, cl) in annihilations {
                        // operator b_k^dag b_s^dag b_l b_q carries W[k][s][q][l]
                        acc += w.get(k, s, q, l) * (ck * cl);
                    }
                }
                g[ki * np + li] = acc;
            }
        }
        g
    }
}

/// Dense rank-4 complex tensor with row-major `(a, b, c, d)` indexing.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    m: usize,
    data: Vec<Complex64>,
}

impl Tensor4 {
    pub fn zeros(m: usize) -> Self {
        Self {
            m,
            data: vec![ZERO; m * m * m * m],
        }
    }

    pub fn from_fn(m: usize, mut f: impl FnMut(usize, usize, usize, usize) -> Complex64) -> Self {
        let mut t = Self::zeros(m);
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    for d in 0..m {
                        t.data[((a * m + b) * m + c) * m + d] = f(a, b, c, d);
                    }
                }
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> Complex64 {
        self.data[((a * self.m + b) * self.m + c) * self.m + d]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, d: usize, v: Complex64) {
        self.data[((a * self.m + b) * self.m + c) * self.m + d] = v;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }
}

/// Two-body integrals `W[k][s][q][l] = int int conj(phi_k(x)) conj(phi_s(x')) W(x, x') phi_q(x) phi_l(x')`.
pub type TwoBodyTensor = Tensor4;

/// Two-body density `rho2[k][s][l][q] = <b_k^dag b_s^dag b_l b_q>`.
pub type TwoBodyDensity = Tensor4;

/// Configuration-space Hamiltonian in operator form.
#[derive(Debug, Clone)]
pub struct ConfigHamiltonian<'a> {
    basis: &'a ConfigurationBasis,
    one_body: Vec<Complex64>,
    couplings: Vec<Complex64>,
    diagonal: Vec<f64>,
}

impl<'a> ConfigHamiltonian<'a> {
    pub fn new(basis: &'a ConfigurationBasis, h: &DMatrix<Complex64>, w: &TwoBodyTensor) -> Self {
        let m = basis.n_orbitals;
        assert_eq!(h.nrows(), m, "one-body matrix does not match the basis");
        assert_eq!(h.ncols(), m, "one-body matrix does not match the basis");
        assert_eq!(w.dim(), m, "two-body tensor does not match the basis");
        let mut one_body = vec![ZERO; m * m];
        for k in 0..m {
            for q in 0..m {
                one_body[k * m + q] = h[(k, q)];
            }
        }
        let couplings = if basis.n_particles >= 2 {
            basis.pair_couplings(w)
        } else {
            Vec::new()
        };
        let mut diagonal = vec![0.0; basis.len()];
        for hop in &basis.hops {
            if hop.from == hop.to {
                diagonal[hop.from as usize] += (one_body[hop.kq as usize] * hop.factor).re;
            }
        }
        let np = basis.pairs.len();
        for hop in &basis.pair_hops {
            let p = hop.pair as usize;
            diagonal[hop.config as usize] +=
                0.5 * hop.factor * hop.factor * couplings[p * np + p].re;
        }
        Self {
            basis,
            one_body,
            couplings,
            diagonal,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &ConfigurationBasis {
        self.basis
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    /// `out = H c`.
    pub fn apply(&self, c: &[Complex64], out: &mut [Complex64]) {
        let basis = self.basis;
        assert_eq!(c.len(), basis.len(), "coefficient vector does not match the basis");
        assert_eq!(out.len(), basis.len(), "output vector does not match the basis");
        out.iter_mut().for_each(|z| *z = ZERO);
        for hop in &basis.hops {
            out[hop.to as usize] += self.one_body[hop.kq as usize] * (c[hop.from as usize] * hop.factor);
        }
        if basis.n_particles < 2 {
            return;
        }
        let np = basis.pairs.len();
        let rd = basis.reduced_dim;
        let t = basis.pair_amplitudes(c);
        let mut u = vec![ZERO; np * rd];
        for k in 0..np {
            let row = &mut u[k * rd..(k + 1) * rd];
            for l in 0..np {
                let g = self.couplings[k * np + l];
                if g == ZERO {
                    continue;
                }
                let src = &t[l * rd..(l + 1) * rd];
                for (dst, s) in row.iter_mut().zip(src) {
                    *dst += g * s;
                }
            }
        }
        for hop in &basis.pair_hops {
            out[hop.config as usize] +=
                u[hop.pair as usize * rd + hop.reduced as usize] * (0.5 * hop.factor);
        }
    }

    pub fn apply_vec(&self, c: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; c.len()];
        self.apply(c, &mut out);
        out
    }

    /// `<c|H|c>`.
    pub fn expectation(&self, c: &[Complex64]) -> Complex64 {
        dot(c, &self.apply_vec(c))
    }

    /// Materializes the full matrix.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let basis = self.basis;
        let dim = basis.len();
        let mut mat = DMatrix::from_element(dim, dim, ZERO);
        for hop in &basis.hops {
            mat[(hop.to as usize, hop.from as usize)] += self.one_body[hop.kq as usize] * hop.factor;
        }
        let np = basis.pairs.len();
        for group in &basis.by_reduced {
            for &i in group {
                let hi = basis.pair_hops[i as usize];
                for &j in group {
                    let hj = basis.pair_hops[j as usize];
                    let g = self.couplings[hi.pair as usize * np + hj.pair as usize];
                    mat[(hi.config as usize, hj.config as usize)] += g * (0.5 * hi.factor * hj.factor);
                }
            }
        }
        mat
    }
}

/// Dense configuration-space Hamiltonian `H[a][b] = <n_a|H|n_b>`.
pub fn build_hamiltonian_matrix(
    basis: &ConfigurationBasis,
    h: &DMatrix<Complex64>,
    w: &TwoBodyTensor,
) -> DMatrix<Complex64> {
    ConfigHamiltonian::new(basis, h, w).to_dense()
}

/// One-body density `rho1[j][k] = <b_j^dag b_k>`.
pub fn one_body_density(basis: &ConfigurationBasis, c: &[Complex64]) -> DMatrix<Complex64> {
    assert_eq!(c.len(), basis.len(), "coefficient vector does not match the basis");
    let m = basis.n_orbitals;
    let mut rho = DMatrix::from_element(m, m, ZERO);
    for hop in &basis.hops {
        let (k, q) = (hop.kq as usize / m, hop.kq as usize % m);
        rho[(k, q)] += c[hop.to as usize].conj() * c[hop.from as usize] * hop.factor;
    }
    rho
}

/// Two-body density `rho2[k][s][l][q] = <b_k^dag b_s^dag b_l b_q>`.
pub fn two_body_density(basis: &ConfigurationBasis, c: &[Complex64]) -> TwoBodyDensity {
    assert_eq!(c.len(), basis.len(), "coefficient vector does not match the basis");
    let m = basis.n_orbitals;
    let mut rho2 = Tensor4::zeros(m);
    if basis.n_particles < 2 {
        return rho2;
    }
    let np = basis.pairs.len();
    let rd = basis.reduced_dim;
    let t = basis.pair_amplitudes(c);
    let mut overlaps = vec![ZERO; np * np];
    for k in 0..np {
        for l in k..np {
            let v = dot(&t[k * rd..(k + 1) * rd], &t[l * rd..(l + 1) * rd]);
            overlaps[k * np + l] = v;
            overlaps[l * np + k] = v.conj();
        }
    }
    for k in 0..m {
        for s in 0..m {
            // <b_k^dag b_s^dag ...| = (b_s b_k C)^dag
            let Some((kp, ck)) = basis.annihilator_pair(s, k) else {
                continue;
            };
            for l in 0..m {
                for q in 0..m {
                    let Some((lp, cl)) = basis.annihilator_pair(l, q) else {
                        continue;
                    };
                    rho2.set(k, s, l, q, overlaps[kp * np + lp] * (ck * cl));
                }
            }
        }
    }
    rho2
}

/// One- and two-body density matrices of a normalized coefficient vector.
pub fn transition_density_elements(
    basis: &ConfigurationBasis,
    c: &[Complex64],
) -> (DMatrix<Complex64>, TwoBodyDensity) {
    let norm: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    assert!(
        (norm - 1.0).abs() <= 1e-10,
        "coefficient vector is not normalized (|C|^2 = {norm})"
    );
    (one_body_density(basis, c), two_body_density(basis, c))
}
