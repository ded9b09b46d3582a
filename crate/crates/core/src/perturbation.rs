//! Small-noise theory: the linearized Wei-Norman dynamics and the closed-form
//! second-order moments that give the mean strength factor.
//!
//! Everything here assumes two equal pulses sharing one phase realization
//! (`chi = zeta`). `chi1` fluctuations are measured from the noise-free value
//! `-delta_tau`.

use crate::echo::ideal_strength_factor;
use crate::error::{EchoError, Result};
use crate::noise::PhasePath;
use crate::propagator::{ChiParams, PulseParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationInputs {
    pub rabi: f64,
    pub delta_tau: f64,
    pub phi_amp: f64,
    pub gamma: f64,
}

impl PerturbationInputs {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) {
            return Err(EchoError::config(format!("gamma must be positive, got {}", self.gamma)));
        }
        if !(self.rabi > 0.0) {
            return Err(EchoError::config(format!("rabi must be positive, got {}", self.rabi)));
        }
        Ok(())
    }

    fn denom(&self) -> f64 {
        self.gamma * self.gamma + 4.0 * self.rabi * self.rabi
    }
}

/// Linearized `(chi1, chi2, chi3)` at the end of the pulse, by trapezoidal
/// quadrature of the integral solution on the phase grid.
///
/// The convolutions are split as
/// `chi2(t) = cos(2Wt) C(t) + sin(2Wt) S(t)` and
/// `chi3(t) = cos(2Wt) S(t) - sin(2Wt) C(t)`, with `C, S` the running
/// integrals of `cos(2Ws) phi(s)` and `sin(2Ws) phi(s)`, so the whole path
/// costs one pass.
pub fn linearized_chi_path(pulse: &PulseParams, phase: &PhasePath) -> Result<ChiParams> {
    pulse.validate()?;
    let n = pulse.steps_on(phase.dt())?;
    if n > phase.n_steps() {
        return Err(EchoError::config(format!(
            "phase path covers {} but the pulse lasts {}",
            phase.duration(),
            pulse.duration
        )));
    }
    let w = pulse.rabi;
    let h = phase.dt();
    let phi = &phase.values()[..=n];

    let (mut c_int, mut s_int) = (0.0, 0.0);
    let mut chi1_int = 0.0;
    let mut prev: Option<(f64, f64, f64)> = None; // (cos-weighted, sin-weighted, chi1 integrand)
    let (mut chi2, mut chi3) = (0.0, 0.0);
    for (k, &p) in phi.iter().enumerate() {
        let t = k as f64 * h;
        let (s, c) = (2.0 * w * t).sin_cos();
        let (fc, fs) = (c * p, s * p);
        if let Some((pc, ps, _)) = prev {
            c_int += 0.5 * h * (pc + fc);
            s_int += 0.5 * h * (ps + fs);
        }
        chi2 = c * c_int + s * s_int;
        chi3 = c * s_int - s * c_int;
        let g = 0.5 * p * p + 2.0 * w * chi3 * p + 2.0 * w * w * (chi3 * chi3 - chi2 * chi2);
        if let Some((_, _, pg)) = prev {
            chi1_int += 0.5 * h * (pg + g);
        }
        prev = Some((fc, fs, g));
    }
    Ok(ChiParams::new(-pulse.duration + chi1_int, chi2, chi3))
}

/// Closed form of `<(chi2^(1))^2>` for OU noise.
pub fn chi2sq_mean(p: &PerturbationInputs) -> f64 {
    let (g, w, d) = (p.gamma, p.rabi, p.delta_tau);
    let den = p.denom();
    p.phi_amp.powi(2)
        * (g * d / den
            + 2.0 * g * (-g * d).exp() * (g * (2.0 * d * w).cos() - 2.0 * w * (2.0 * d * w).sin()) / (den * den)
            + (g * (4.0 * d * w).sin() - 2.0 * w * (4.0 * d * w).cos()) / (4.0 * w * den)
            + (8.0 * w * w - 6.0 * g * g) / (4.0 * den * den))
}

/// Closed form of `<chi1^(1)>`, the mean shift of `chi1` away from `-delta_tau`.
pub fn chi1_mean(p: &PerturbationInputs) -> f64 {
    let (g, w, d) = (p.gamma, p.rabi, p.delta_tau);
    let den = p.denom();
    p.phi_amp.powi(2)
        * (g * g * d / (2.0 * g * g + 8.0 * w * w)
            - 2.0 * g * w * (-g * d).exp() * (g * (2.0 * d * w).sin() + 2.0 * w * (2.0 * d * w).cos())
                / (den * den)
            + (w * (4.0 * d * w).sin() - g * (2.0 * d * w).sin().powi(2)) / (2.0 * den)
            + 4.0 * g * w * w / (den * den))
}

/// Coefficient of `chi1^(1)` in the expanded strength factor.
pub fn chi1_coefficient(rabi: f64, delta_tau: f64) -> f64 {
    let x = delta_tau * rabi;
    -128.0 * rabi * x.sin().powi(5) * (2.0 * x.cos() + (3.0 * x).cos())
}

/// Coefficient of `(chi2^(1))^2` in the expanded strength factor.
pub fn chi2sq_coefficient(rabi: f64, delta_tau: f64) -> f64 {
    let x = delta_tau * rabi;
    64.0 * rabi * rabi * x.sin().powi(4) * (2.0 * x).cos() * (2.0 * (2.0 * x).cos() + 1.0)
}

/// Second-order strength factor for one realization's fluctuations.
pub fn perturbed_factor(chi1_fluct: f64, chi2_fluct: f64, p: &PerturbationInputs) -> f64 {
    ideal_strength_factor(p.rabi, p.delta_tau)
        + chi1_coefficient(p.rabi, p.delta_tau) * chi1_fluct
        + chi2sq_coefficient(p.rabi, p.delta_tau) * chi2_fluct * chi2_fluct
}

/// Mean strength factor to second order in the noise amplitude.
pub fn mean_strength_factor(p: &PerturbationInputs) -> f64 {
    ideal_strength_factor(p.rabi, p.delta_tau)
        + chi2sq_coefficient(p.rabi, p.delta_tau) * chi2sq_mean(p)
        + chi1_coefficient(p.rabi, p.delta_tau) * chi1_mean(p)
}
