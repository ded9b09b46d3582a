//! The phase-matched (`2 k2 - k1`) echo observable built from the two pulses'
//! Wei-Norman parameters.
//!
//! The ensemble average over transition energies is applied in closed form as
//! the Gaussian envelope `exp(-sigma0^2 (T - tau)^2)`; no atoms are sampled.
//! The spatial factor `exp(i (2 k2 - k1).r)` is implied by the choice of term
//! and never evaluated.

use num_complex::Complex64;

use crate::error::{EchoError, Result};
use crate::propagator::{ChiParams, PulseParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomParams {
    /// Mean transition energy of the ensemble.
    pub eps0: f64,
    /// Inhomogeneous width.
    pub sigma0: f64,
    pub dipole_mag: f64,
    /// Coherence time; `f64::INFINITY` for a closed system.
    pub tau_c: f64,
}

impl Default for AtomParams {
    fn default() -> Self {
        AtomParams { eps0: 0.0, sigma0: 1.0, dipole_mag: 1.0, tau_c: f64::INFINITY }
    }
}

impl AtomParams {
    pub fn validate(&self) -> Result<()> {
        if !self.eps0.is_finite() {
            return Err(EchoError::config("eps0 must be finite"));
        }
        if !(self.sigma0 >= 0.0 && self.sigma0.is_finite()) {
            return Err(EchoError::config(format!("sigma0 must be non-negative, got {}", self.sigma0)));
        }
        if !(self.dipole_mag > 0.0 && self.dipole_mag.is_finite()) {
            return Err(EchoError::config(format!(
                "dipole magnitude must be positive, got {}",
                self.dipole_mag
            )));
        }
        if !(self.tau_c > 0.0) {
            return Err(EchoError::config(format!("tau_c must be positive, got {}", self.tau_c)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EchoConfig {
    /// Delay between the end of pulse 1 and the start of pulse 2.
    pub tau: f64,
    /// Detection times `T` after pulse 2.
    pub t_grid: Vec<f64>,
    pub pulse1: PulseParams,
    pub pulse2: PulseParams,
}

impl EchoConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(EchoError::config(format!("tau must be positive, got {}", self.tau)));
        }
        if self.t_grid.is_empty() {
            return Err(EchoError::config("detection grid is empty"));
        }
        if self.t_grid.iter().any(|&t| !(t >= 0.0 && t.is_finite())) {
            return Err(EchoError::config("detection times must be finite and non-negative"));
        }
        if self.t_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(EchoError::config("detection grid must be strictly increasing"));
        }
        self.pulse1.validate()?;
        self.pulse2.validate()?;
        if self.pulse1.rabi != self.pulse2.rabi {
            return Err(EchoError::config("both pulses must share one Rabi frequency"));
        }
        Ok(())
    }

    pub fn rabi(&self) -> f64 {
        self.pulse1.rabi
    }

    pub fn equal_pulses(&self) -> bool {
        self.pulse1.duration == self.pulse2.duration
    }
}

/// Strength factor of the echo amplitude. Bounded by `[0, 64]`.
pub fn strength_factor(chi: &ChiParams, zeta: &ChiParams, rabi: f64) -> f64 {
    let w = rabi;
    let first = ((zeta.chi2 + zeta.chi1) * w).sin().powi(2) + ((zeta.chi2 - zeta.chi1) * w).sin().powi(2);
    let cross = (2.0 * (chi.chi2 - chi.chi1) * w).sin() + (2.0 * (chi.chi2 + chi.chi1) * w).sin();
    let second = cross * cross + 4.0 * (2.0 * chi.chi1 * w).sin().powi(2);
    first * first * second
}

/// Strength factor without phase noise, `16 sin^4(W dt) sin^2(2 W dt)`, for
/// two equal pulses.
pub fn ideal_strength_factor(rabi: f64, delta_tau: f64) -> f64 {
    let x = rabi * delta_tau;
    16.0 * x.sin().powi(4) * (2.0 * x).sin().powi(2)
}

/// Amplitude-level inhomogeneous envelope `exp(-sigma0^2 (T - tau)^2)`.
pub fn inhomogeneous_envelope(atom: &AtomParams, t_detect: f64, tau: f64) -> f64 {
    let d = t_detect - tau;
    (-(atom.sigma0 * atom.sigma0) * d * d).exp()
}

/// Echo amplitude `|mu|^2 / 64 * envelope * F`.
pub fn echo_amplitude(
    chi: &ChiParams,
    zeta: &ChiParams,
    atom: &AtomParams,
    t_detect: f64,
    tau: f64,
    rabi: f64,
) -> f64 {
    let mu2 = atom.dipole_mag * atom.dipole_mag;
    mu2 / 64.0 * inhomogeneous_envelope(atom, t_detect, tau) * strength_factor(chi, zeta, rabi)
}

/// Echo amplitude with the dephasing factor `exp(-(T + tau)/tau_c)`.
pub fn open_amplitude(
    chi: &ChiParams,
    zeta: &ChiParams,
    atom: &AtomParams,
    t_detect: f64,
    tau: f64,
    rabi: f64,
) -> f64 {
    let closed = echo_amplitude(chi, zeta, atom, t_detect, tau, rabi);
    if atom.tau_c.is_infinite() {
        closed
    } else {
        closed * (-(t_detect + tau) / atom.tau_c).exp()
    }
}

/// Complex echo field term at `eps_e = eps0`, normalized so that
/// `64 |E|^2 / |mu|^2` is the strength factor.
pub fn echo_field_term(
    chi: &ChiParams,
    zeta: &ChiParams,
    atom: &AtomParams,
    t_detect: f64,
    tau: f64,
    rabi: f64,
) -> Complex64 {
    let w = rabi;
    let i = Complex64::i();
    // mu is taken real, so mu* = |mu|.
    let prefactor = i * atom.dipole_mag * Complex64::from_polar(1.0, -(t_detect - tau) * atom.eps0);
    let phase = Complex64::from_polar(0.125, 2.0 * w * (zeta.chi3 - chi.chi3));
    let pulse2 = Complex64::new(((zeta.chi2 + zeta.chi1) * w).sin(), ((zeta.chi2 - zeta.chi1) * w).sin());
    let pulse1 = Complex64::new(
        (2.0 * (chi.chi2 - chi.chi1) * w).sin() + (2.0 * (chi.chi2 + chi.chi1) * w).sin(),
        2.0 * (2.0 * chi.chi1 * w).sin(),
    );
    prefactor * phase * pulse2 * pulse2 * pulse1
}
