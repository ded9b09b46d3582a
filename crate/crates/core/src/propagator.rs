//! Single-pulse evolution in the Wei-Norman factorized form
//! `U = exp(-i chi3 H3) exp(-i chi2 H2) exp(-i chi1 H1)`, with `H_l = rabi sigma_l`
//! (hbar = 1, spatial phase `k.r` set to zero), plus a direct time-ordered
//! product used as an independent check.
//!
//! The interaction-picture Hamiltonian during a pulse is
//! `H(t) = -cos(phi) H1 + sin(phi) H2`, with `phi` held constant over each
//! grid step.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{EchoError, Result};
use crate::noise::{grid_steps, PhasePath};
use crate::su2::{Axis, Matrix2, Unitary2};

/// Integration aborts once `|2 chi2 rabi|` reaches `pi/2 - SINGULARITY_MARGIN`.
pub const SINGULARITY_MARGIN: f64 = 0.1;

/// Symbolic stand-in for the pulse wavevector. It never enters a numeric phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Wavevector {
    K1,
    K2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseParams {
    pub rabi: f64,
    pub duration: f64,
    pub wavevector: Wavevector,
}

impl PulseParams {
    pub fn new(rabi: f64, duration: f64, wavevector: Wavevector) -> Self {
        PulseParams { rabi, duration, wavevector }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rabi > 0.0 && self.rabi.is_finite()) {
            return Err(EchoError::config(format!("rabi frequency must be positive, got {}", self.rabi)));
        }
        if !(self.duration >= 0.0 && self.duration.is_finite()) {
            return Err(EchoError::config(format!(
                "pulse duration must be non-negative, got {}",
                self.duration
            )));
        }
        Ok(())
    }

    /// Number of phase-grid steps covering the pulse.
    pub fn steps_on(&self, dt: f64) -> Result<usize> {
        grid_steps(self.duration, dt).ok_or_else(|| {
            EchoError::config(format!(
                "pulse duration {} is not a multiple of the grid step {dt}",
                self.duration
            ))
        })
    }
}

/// Wei-Norman parameters of one pulse (`chi` for pulse 1, `zeta` for pulse 2).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChiParams {
    pub chi1: f64,
    pub chi2: f64,
    pub chi3: f64,
}

impl ChiParams {
    pub const fn new(chi1: f64, chi2: f64, chi3: f64) -> Self {
        ChiParams { chi1, chi2, chi3 }
    }

    pub const fn zero() -> Self {
        ChiParams::new(0.0, 0.0, 0.0)
    }

    /// Noise-free values after a pulse of length `duration`.
    pub fn ideal(duration: f64) -> Self {
        ChiParams::new(-duration, 0.0, 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.chi1.is_finite() && self.chi2.is_finite() && self.chi3.is_finite()
    }
}

/// `H1, H2, H3` at `k.r = 0`: `rabi` times the Pauli matrices.
pub fn generators(rabi: f64) -> [Matrix2; 3] {
    let r = Complex64::new(rabi, 0.0);
    [
        Matrix2::pauli(Axis::X).scale(r),
        Matrix2::pauli(Axis::Y).scale(r),
        Matrix2::pauli(Axis::Z).scale(r),
    ]
}

/// Right-hand side `(d chi1, d chi2, d chi3)/dt` of the Wei-Norman equations.
pub fn wei_norman_rhs(phi: f64, chi2: f64, chi3: f64, rabi: f64) -> [f64; 3] {
    let (s, c) = (phi + 2.0 * chi3 * rabi).sin_cos();
    let (s2, c2) = (2.0 * chi2 * rabi).sin_cos();
    [-c / c2, s, -c * s2 / c2]
}

/// The same right-hand side before the angle-addition simplification, as it
/// comes out of inverting the coefficient-matching system.
pub fn wei_norman_rhs_unsimplified(phi: f64, chi2: f64, chi3: f64, rabi: f64) -> [f64; 3] {
    let (sp, cp) = phi.sin_cos();
    let (s3, c3) = (2.0 * chi3 * rabi).sin_cos();
    let a2 = 2.0 * chi2 * rabi;
    let (tan2, sec2) = (a2.tan(), 1.0 / a2.cos());
    [
        -cp * c3 * sec2 + sp * sec2 * s3,
        c3 * sp + cp * s3,
        -cp * c3 * tan2 + sp * s3 * tan2,
    ]
}

fn pulse_steps(pulse: &PulseParams, phase: &PhasePath) -> Result<usize> {
    pulse.validate()?;
    let n = pulse.steps_on(phase.dt())?;
    if n > phase.n_steps() {
        return Err(EchoError::config(format!(
            "phase path covers {} but the pulse lasts {}",
            phase.duration(),
            pulse.duration
        )));
    }
    Ok(n)
}

/// Fixed-step RK4 over the pulse, calling `visit(n, chi(t_n))` for every grid
/// time including `t = 0`.
///
/// `chi1` is carried as its offset from the noise-free solution `-t`; RK4 is
/// exact on linear functions of `t`, so the iterates are unchanged, and a
/// zero phase reproduces `chi1 = -t` without accumulated rounding.
fn integrate_visit(
    pulse: &PulseParams,
    phase: &PhasePath,
    mut visit: impl FnMut(usize, ChiParams),
) -> Result<ChiParams> {
    let n_steps = pulse_steps(pulse, phase)?;
    let h = phase.dt();
    let rabi = pulse.rabi;
    let limit = FRAC_PI_2 - SINGULARITY_MARGIN;

    let rhs = |phi: f64, y: [f64; 3]| {
        let [d1, d2, d3] = wei_norman_rhs(phi, y[1], y[2], rabi);
        [d1 + 1.0, d2, d3]
    };
    let axpy = |y: [f64; 3], k: [f64; 3], a: f64| [y[0] + a * k[0], y[1] + a * k[1], y[2] + a * k[2]];

    // (offset of chi1 from -t, chi2, chi3)
    let mut y = [0.0; 3];
    visit(0, ChiParams::zero());
    for (n, &phi) in phase.values()[..n_steps].iter().enumerate() {
        let k1 = rhs(phi, y);
        let k2 = rhs(phi, axpy(y, k1, 0.5 * h));
        let k3 = rhs(phi, axpy(y, k2, 0.5 * h));
        let k4 = rhs(phi, axpy(y, k3, h));
        for i in 0..3 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }

        let t = if n + 1 == n_steps { pulse.duration } else { (n + 1) as f64 * h };
        let angle = (2.0 * y[1] * rabi).abs();
        if !(angle < limit) || !y.iter().all(|v| v.is_finite()) {
            return Err(EchoError::Singularity { time: t, value: angle });
        }
        visit(n + 1, ChiParams::new(-t + y[0], y[1], y[2]));
    }
    let t = pulse.duration;
    Ok(ChiParams::new(if n_steps == 0 { 0.0 } else { -t + y[0] }, y[1], y[2]))
}

/// Wei-Norman parameters at the end of the pulse.
pub fn integrate_chi(pulse: &PulseParams, phase: &PhasePath) -> Result<ChiParams> {
    integrate_visit(pulse, phase, |_, _| {})
}

/// Wei-Norman parameters at every grid time `0, dt, ..., duration`.
pub fn integrate_chi_trajectory(pulse: &PulseParams, phase: &PhasePath) -> Result<Vec<ChiParams>> {
    let mut out = Vec::with_capacity(phase.n_steps() + 1);
    integrate_visit(pulse, phase, |_, chi| out.push(chi))?;
    Ok(out)
}

/// Time-ordered product of exact per-step exponentials `exp(-i H(phi_n) dt)`.
pub fn direct_unitary(pulse: &PulseParams, phase: &PhasePath) -> Result<Unitary2> {
    let n_steps = pulse_steps(pulse, phase)?;
    let (s, c) = (pulse.rabi * phase.dt()).sin_cos();
    let cos = Complex64::new(c, 0.0);
    let mut u = Matrix2::identity();
    for &phi in &phase.values()[..n_steps] {
        // exp(-i H dt) = cos I + i sin [[0, e^{i phi}], [e^{-i phi}, 0]]
        let off = Complex64::from_polar(s, phi) * Complex64::i();
        let step = Matrix2::new(cos, off, Complex64::new(-off.re, off.im), cos);
        u = step * u;
    }
    Ok(u)
}

/// `exp(-i chi3 H3) exp(-i chi2 H2) exp(-i chi1 H1)` at `k.r = 0`.
pub fn factorized_unitary(chi: &ChiParams, rabi: f64) -> Unitary2 {
    Matrix2::pauli_exp(Axis::Z, rabi * chi.chi3)
        * Matrix2::pauli_exp(Axis::Y, rabi * chi.chi2)
        * Matrix2::pauli_exp(Axis::X, rabi * chi.chi1)
}

/// Principal-branch Wei-Norman parameters of `u`, with `2 rabi chi2` in
/// `[-pi/2, pi/2]`. `factorized_unitary` of the result equals `u` up to a
/// global phase.
pub fn decompose_unitary(u: &Unitary2, rabi: f64) -> Result<ChiParams> {
    let defect = u.unitarity_defect();
    if !(defect <= 1e-8) {
        return Err(EchoError::domain(format!("matrix is not unitary (defect {defect:e})")));
    }
    if !(rabi > 0.0) {
        return Err(EchoError::config(format!("rabi frequency must be positive, got {rabi}")));
    }
    let special = u.scale(u.det().sqrt().inv());
    let r = special.rotation_matrix();

    // R = Rz(psi) Ry(theta) Rx(phi)
    let cos_theta = r[0][0].hypot(r[1][0]);
    let theta = (-r[2][0]).atan2(cos_theta);
    let (psi, phi) = if cos_theta > 1e-12 {
        (r[1][0].atan2(r[0][0]), r[2][1].atan2(r[2][2]))
    } else {
        ((-r[0][1]).atan2(r[1][1]), 0.0)
    };
    let k = 0.5 / rabi;
    Ok(ChiParams::new(phi * k, theta * k, psi * k))
}
