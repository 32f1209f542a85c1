//! One-body potentials and two-body interaction kernels.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    /// `whichpot = "HO1D"`
    Harmonic,
    /// `whichpot = "HO1D+td_gauss"`: harmonic trap plus a linearly ramped Gaussian barrier.
    HarmonicRampedGaussian,
}

impl PotentialKind {
    pub fn from_key(key: &str) -> Option<Self> {
        match key {
            "HO1D" => Some(Self::Harmonic),
            "HO1D+td_gauss" => Some(Self::HarmonicRampedGaussian),
            _ => None,
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            Self::Harmonic => "HO1D",
            Self::HarmonicRampedGaussian => "HO1D+td_gauss",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    /// Trap frequency (parameter1).
    pub omega: f64,
    /// Trap displacement (parameter2).
    pub trap_center: f64,
    /// Final barrier height (parameter3).
    pub v_max: f64,
    /// Ramp duration (parameter4).
    pub tau: f64,
    /// Barrier displacement (parameter5).
    pub barrier_center: f64,
    /// Barrier standard deviation (parameter6).
    pub barrier_sigma: f64,
}

impl PotentialSpec {
    pub fn harmonic(omega: f64) -> Self {
        Self {
            kind: PotentialKind::Harmonic,
            omega,
            trap_center: 0.0,
            v_max: 0.0,
            tau: 1.0,
            barrier_center: 0.0,
            barrier_sigma: 1.0,
        }
    }

    pub fn ramped_barrier(omega: f64, v_max: f64, tau: f64, barrier_sigma: f64) -> Self {
        Self {
            kind: PotentialKind::HarmonicRampedGaussian,
            omega,
            trap_center: 0.0,
            v_max,
            tau,
            barrier_center: 0.0,
            barrier_sigma,
        }
    }

    /// Builds a spec from the `parameter1..` list of an input deck; missing
    /// entries count as zero and anything past parameter6 is ignored.
    pub fn from_parameters(kind: PotentialKind, params: &[f64]) -> Result<Self> {
        let p = |i: usize| params.get(i).copied().unwrap_or(0.0);
        let spec = Self {
            kind,
            omega: p(0),
            trap_center: p(1),
            v_max: p(2),
            tau: p(3),
            barrier_center: p(4),
            barrier_sigma: p(5),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0) {
            return Err(Error::Config(format!(
                "trap frequency must be positive, got {}",
                self.omega
            )));
        }
        if self.kind == PotentialKind::HarmonicRampedGaussian {
            if !(self.tau > 0.0) {
                return Err(Error::Config(format!(
                    "quench time must be positive, got {}",
                    self.tau
                )));
            }
            if !(self.barrier_sigma > 0.0) {
                return Err(Error::Config(format!(
                    "barrier width must be positive, got {}",
                    self.barrier_sigma
                )));
            }
            if self.v_max < 0.0 {
                return Err(Error::Config(format!(
                    "barrier height must be nonnegative, got {}",
                    self.v_max
                )));
            }
        }
        Ok(())
    }

    pub fn is_time_dependent(&self) -> bool {
        self.kind == PotentialKind::HarmonicRampedGaussian && self.v_max != 0.0
    }

    pub fn evaluate(&self, x: f64, t: f64) -> f64 {
        evaluate_potential(self, x, t)
    }

    /// Samples the potential on a set of points.
    pub fn sample(&self, points: &[f64], t: f64) -> Vec<f64> {
        points.iter().map(|&x| self.evaluate(x, t)).collect()
    }
}

/// Barrier height of the linear quench: grows as `v_max t / tau`, then holds.
pub fn ramp_height(v_max: f64, tau: f64, t: f64) -> f64 {
    if t < tau {
        v_max * t / tau
    } else {
        v_max
    }
}

pub fn evaluate_potential(spec: &PotentialSpec, x: f64, t: f64) -> f64 {
    let d = x - spec.trap_center;
    let trap = 0.5 * spec.omega * spec.omega * d * d;
    match spec.kind {
        PotentialKind::Harmonic => trap,
        PotentialKind::HarmonicRampedGaussian => {
            let b = x - spec.barrier_center;
            let width = 2.0 * spec.barrier_sigma * spec.barrier_sigma;
            trap + ramp_height(spec.v_max, spec.tau, t) * (-b * b / width).exp()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InteractionKind {
    /// `W0 delta(x - x')`
    Contact,
    /// `K0 (x - x')^2`
    Harmonic,
    /// `W0 / sqrt((x - x')^2 + alpha exp(-beta |x - x'|))`
    RegularizedCoulomb,
}

impl InteractionKind {
    pub fn from_key(key: &str) -> Option<Self> {
        match key {
            "delta" => Some(Self::Contact),
            "HIM" => Some(Self::Harmonic),
            "regC" => Some(Self::RegularizedCoulomb),
            _ => None,
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            Self::Contact => "delta",
            Self::Harmonic => "HIM",
            Self::RegularizedCoulomb => "regC",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionSpec {
    pub kind: InteractionKind,
    /// Strength `W0` or `K0` (`xlambda_0`).
    pub w0: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl InteractionSpec {
    pub fn contact(w0: f64) -> Self {
        Self {
            kind: InteractionKind::Contact,
            w0,
            alpha: 0.0,
            beta: 0.0,
        }
    }

    pub fn harmonic(k0: f64) -> Self {
        Self {
            kind: InteractionKind::Harmonic,
            w0: k0,
            alpha: 0.0,
            beta: 0.0,
        }
    }

    pub fn regularized_coulomb(w0: f64, alpha: f64, beta: f64) -> Self {
        Self {
            kind: InteractionKind::RegularizedCoulomb,
            w0,
            alpha,
            beta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.w0.is_finite() {
            return Err(Error::Config("interaction strength is not finite".into()));
        }
        if self.alpha < 0.0 || self.beta < 0.0 {
            return Err(Error::Config(format!(
                "interaction parameters must be nonnegative, got alpha = {}, beta = {}",
                self.alpha, self.beta
            )));
        }
        if self.kind == InteractionKind::RegularizedCoulomb && !(self.alpha > 0.0) {
            return Err(Error::Config(
                "regularized Coulomb needs alpha > 0 to remove the singularity".into(),
            ));
        }
        Ok(())
    }

    /// Kernel as a function of the separation `r = x - x'`. Contact has no
    /// pointwise value.
    pub fn kernel(&self, r: f64) -> Result<f64> {
        match self.kind {
            InteractionKind::Contact => Err(Error::UnsupportedKernel("contact")),
            InteractionKind::Harmonic => Ok(self.w0 * r * r),
            InteractionKind::RegularizedCoulomb => {
                let a = r.abs();
                Ok(self.w0 / (a * a + self.alpha * (-self.beta * a).exp()).sqrt())
            }
        }
    }
}

pub fn evaluate_interaction(spec: &InteractionSpec, x: f64, x_prime: f64) -> Result<f64> {
    spec.kernel(x - x_prime)
}

/// Harmonic-oscillator eigenfunction `psi_n(x)` for unit mass and frequency `omega`,
/// from the normalized Hermite recurrence.
pub fn harmonic_eigenfunction(n: usize, omega: f64, x: f64) -> f64 {
    let xi = omega.sqrt() * x;
    let scale = (omega / std::f64::consts::PI).powf(0.25);
    let mut prev = 0.0;
    let mut cur = scale * (-0.5 * xi * xi).exp();
    for k in 1..=n {
        let next = (2.0 / k as f64).sqrt() * xi * cur - ((k - 1) as f64 / k as f64).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}
