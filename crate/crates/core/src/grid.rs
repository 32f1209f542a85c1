//! Periodic uniform grid with a Fourier (FFT) representation of the kinetic energy.
//!
//! Points follow the endpoint-excluded convention `x_i = x_min + i * dx` with
//! `dx = (x_max - x_min) / n`, so the last point is `x_max - dx`. Quadrature is
//! the flat rule `sum_i f_i * dx`, which makes the discrete Fourier transform
//! unitary up to the usual `1/n` factor.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

#[derive(Clone)]
pub struct Grid {
    n_points: usize,
    x_min: f64,
    x_max: f64,
    spacing: f64,
    points: Vec<f64>,
    momenta: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n_points", &self.n_points)
            .field("x_min", &self.x_min)
            .field("x_max", &self.x_max)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n_points == other.n_points && self.x_min == other.x_min && self.x_max == other.x_max
    }
}

/// Builds the grid; see the module docs for the point convention.
pub fn build_grid(n_points: usize, x_min: f64, x_max: f64) -> Result<Grid> {
    Grid::new(n_points, x_min, x_max)
}

impl Grid {
    pub fn new(n_points: usize, x_min: f64, x_max: f64) -> Result<Self> {
        if n_points < 2 {
            return Err(Error::Config(format!(
                "grid needs at least 2 points, got {n_points}"
            )));
        }
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::Config(format!(
                "degenerate grid interval [{x_min}, {x_max})"
            )));
        }
        let length = x_max - x_min;
        let spacing = length / n_points as f64;
        let points = (0..n_points).map(|i| x_min + i as f64 * spacing).collect();
        let momenta = (0..n_points)
            .map(|j| {
                let signed = if j <= (n_points - 1) / 2 {
                    j as f64
                } else {
                    j as f64 - n_points as f64
                };
                2.0 * PI * signed / length
            })
            .collect();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n_points);
        let inverse = planner.plan_fft_inverse(n_points);
        Ok(Self {
            n_points,
            x_min,
            x_max,
            spacing,
            points,
            momenta,
            forward,
            inverse,
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Wave numbers in FFT order (zero first, negative frequencies last).
    pub fn momenta(&self) -> &[f64] {
        &self.momenta
    }

    /// Spacing of the momentum grid, `2 pi / L`.
    pub fn momentum_spacing(&self) -> f64 {
        2.0 * PI / self.length()
    }

    pub fn same_extent(&self, other: &Grid) -> bool {
        self.x_min == other.x_min && self.x_max == other.x_max
    }

    /// In-place unnormalized forward transform.
    pub fn fft(&self, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.n_points, "array length does not match grid");
        self.forward.process(data);
    }

    /// In-place inverse transform, normalized so that `ifft(fft(f)) == f`.
    pub fn ifft(&self, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.n_points, "array length does not match grid");
        self.inverse.process(data);
        let scale = 1.0 / self.n_points as f64;
        for z in data.iter_mut() {
            *z *= scale;
        }
    }

    /// Applies `-1/(2m) d^2/dx^2` spectrally.
    pub fn kinetic_apply(&self, f: &[Complex64], mass: f64) -> Vec<Complex64> {
        let mut out = f.to_vec();
        self.kinetic_apply_in_place(&mut out, mass);
        out
    }

    pub fn kinetic_apply_in_place(&self, f: &mut [Complex64], mass: f64) {
        assert!(mass > 0.0, "mass must be positive");
        self.fft(f);
        let factor = 0.5 / mass;
        for (z, k) in f.iter_mut().zip(&self.momenta) {
            *z *= factor * k * k;
        }
        self.ifft(f);
    }

    /// Quadrature inner product `sum_i conj(f_i) g_i dx`.
    pub fn inner_product(&self, f: &[Complex64], g: &[Complex64]) -> Complex64 {
        assert_eq!(f.len(), self.n_points, "array length does not match grid");
        assert_eq!(g.len(), self.n_points, "array length does not match grid");
        dot(f, g) * self.spacing
    }

    pub fn norm(&self, f: &[Complex64]) -> f64 {
        (f.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.spacing).sqrt()
    }

    /// Integral of a real function by the grid quadrature.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().sum::<f64>() * self.spacing
    }
}

/// Plain `sum conj(a_i) b_i` without the quadrature weight.
pub(crate) fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (x, y) in a.iter().zip(b) {
        re += x.re * y.re + x.im * y.im;
        im += x.re * y.im - x.im * y.re;
    }
    Complex64::new(re, im)
}
