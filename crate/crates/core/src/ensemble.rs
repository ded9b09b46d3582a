//! Monte Carlo engine for the two-pulse experiment.
//!
//! Each repeat draws its phase path(s) from substreams keyed by the repeat
//! index, integrates both pulses and evaluates the strength factor. Repeats run
//! on the current rayon pool; results are collected and reduced in repeat
//! order, so every statistic is independent of the thread count.

use rayon::prelude::*;

use crate::echo::{open_amplitude, strength_factor, AtomParams, EchoConfig};
use crate::error::{EchoError, Result};
use crate::noise::{sample_path, Estimate, NoiseParams, PhasePath};
use crate::perturbation::{linearized_chi_path, mean_strength_factor, PerturbationInputs};
use crate::propagator::{decompose_unitary, direct_unitary, integrate_chi, ChiParams, PulseParams, Wavevector};
use crate::stats::{self, Histogram};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseMode {
    /// One phase realization drives both pulses (`chi = zeta`).
    #[default]
    Shared,
    /// Each pulse gets its own realization.
    Independent,
}

/// What to do when a repeat hits the Wei-Norman chart singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SingularityPolicy {
    #[default]
    Abort,
    /// Drop the repeat and count it.
    SkipAndCount,
    /// Recompute the pulse from the direct time-ordered product and read the
    /// principal-branch parameters off the unitary. The strength factor does
    /// not depend on the branch.
    DirectFallback,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub echo: EchoConfig,
    pub atom: AtomParams,
    /// `n_steps` is ignored; each pulse window sets its own.
    pub noise: NoiseParams,
    pub n_repeats: usize,
    pub phase_mode: PhaseMode,
    pub singularity_policy: SingularityPolicy,
}

impl RunSpec {
    pub fn validate(&self) -> Result<()> {
        self.echo.validate()?;
        self.atom.validate()?;
        self.noise.with_steps(1).validate()?;
        if self.n_repeats == 0 {
            return Err(EchoError::config("n_repeats must be at least 1"));
        }
        self.echo.pulse1.steps_on(self.noise.dt)?;
        self.echo.pulse2.steps_on(self.noise.dt)?;
        Ok(())
    }

    pub fn rabi(&self) -> f64 {
        self.echo.rabi()
    }

    /// Strength factor without noise.
    pub fn ideal_f(&self) -> f64 {
        let chi = ChiParams::ideal(self.echo.pulse1.duration);
        let zeta = ChiParams::ideal(self.echo.pulse2.duration);
        strength_factor(&chi, &zeta, self.rabi())
    }

    /// Closed-form inputs; only meaningful for equal pulses.
    pub fn perturbation_inputs(&self) -> Option<PerturbationInputs> {
        self.echo.equal_pulses().then(|| PerturbationInputs {
            rabi: self.rabi(),
            delta_tau: self.echo.pulse1.duration,
            phi_amp: self.noise.phi_amp,
            gamma: self.noise.gamma,
        })
    }

    fn window(&self, pulse: &PulseParams) -> Result<NoiseParams> {
        Ok(self.noise.with_steps(pulse.steps_on(self.noise.dt)?.max(1)))
    }
}

/// One completed repeat.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepeatResult {
    pub index: usize,
    pub chi: ChiParams,
    pub zeta: ChiParams,
    pub f: f64,
    /// Whether a pulse needed the direct-product fallback.
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepeatSet {
    pub results: Vec<RepeatResult>,
    pub skipped: usize,
}

impl RepeatSet {
    pub fn f_values(&self) -> Vec<f64> {
        self.results.iter().map(|r| r.f).collect()
    }

    pub fn fallbacks(&self) -> usize {
        self.results.iter().filter(|r| r.fallback).count()
    }
}

fn pulse_chi(pulse: &PulseParams, phase: &PhasePath, policy: SingularityPolicy) -> Result<(ChiParams, bool)> {
    match integrate_chi(pulse, phase) {
        Ok(chi) => Ok((chi, false)),
        Err(e) if e.is_singularity() && policy == SingularityPolicy::DirectFallback => {
            let u = direct_unitary(pulse, phase)?;
            Ok((decompose_unitary(&u, pulse.rabi)?, true))
        }
        Err(e) => Err(e),
    }
}

/// Pulse-1 (and shared) path of repeat `r` uses stream `2r`; the independent
/// pulse-2 path uses `2r + 1`.
fn run_one(spec: &RunSpec, index: usize) -> Result<RepeatResult> {
    let p1 = &spec.echo.pulse1;
    let p2 = &spec.echo.pulse2;
    let policy = spec.singularity_policy;
    let stream = 2 * index as u64;

    let (chi, zeta, fallback) = match spec.phase_mode {
        PhaseMode::Shared => {
            let longest = if p1.duration >= p2.duration { p1 } else { p2 };
            let path = sample_path(&spec.window(longest)?, stream)?;
            let (chi, fa) = pulse_chi(p1, &path, policy)?;
            if p1.duration == p2.duration {
                (chi, chi, fa)
            } else {
                let (zeta, fb) = pulse_chi(p2, &path, policy)?;
                (chi, zeta, fa || fb)
            }
        }
        PhaseMode::Independent => {
            let (chi, fa) = pulse_chi(p1, &sample_path(&spec.window(p1)?, stream)?, policy)?;
            let (zeta, fb) = pulse_chi(p2, &sample_path(&spec.window(p2)?, stream + 1)?, policy)?;
            (chi, zeta, fa || fb)
        }
    };
    Ok(RepeatResult { index, chi, zeta, f: strength_factor(&chi, &zeta, spec.rabi()), fallback })
}

/// Runs every repeat of `spec` on the current rayon pool.
pub fn run_repeats(spec: &RunSpec) -> Result<RepeatSet> {
    spec.validate()?;
    let outcomes: Vec<Result<RepeatResult>> =
        (0..spec.n_repeats).into_par_iter().map(|r| run_one(spec, r)).collect();

    let mut results = Vec::with_capacity(outcomes.len());
    let mut skipped = 0;
    for (r, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(res) => results.push(res),
            Err(e) if e.is_singularity() && spec.singularity_policy == SingularityPolicy::SkipAndCount => {
                skipped += 1;
            }
            Err(e) => return Err(EchoError::Repeat { repeat: r, source: Box::new(e) }),
        }
    }
    if results.is_empty() {
        return Err(EchoError::domain("every repeat was skipped"));
    }
    if skipped > 0 {
        log::warn!("skipped {skipped} of {} repeats at the chart singularity", spec.n_repeats);
    }
    Ok(RepeatSet { results, skipped })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    /// Per-repeat strength factors in repeat order.
    pub f_values: Vec<f64>,
    pub mean_f: f64,
    pub se_f: f64,
    /// Center of the tallest Freedman-Diaconis bin.
    pub mode_f: f64,
    pub ideal_f: f64,
    pub skewness_f: f64,
    pub histogram: Vec<(f64, f64)>,
    pub signal_mean: Vec<(f64, f64)>,
    pub signal_mode: Vec<(f64, f64)>,
    pub signal_ideal: Vec<(f64, f64)>,
    pub skipped: usize,
    pub fallbacks: usize,
}

impl EnsembleStats {
    pub fn from_repeats(spec: &RunSpec, set: &RepeatSet) -> Self {
        let f_values = set.f_values();
        let hist = Histogram::freedman_diaconis(&f_values);
        let rabi = spec.rabi();
        let tau = spec.echo.tau;
        let ideal_chi = ChiParams::ideal(spec.echo.pulse1.duration);
        let ideal_zeta = ChiParams::ideal(spec.echo.pulse2.duration);

        let mut signal_mean = Vec::with_capacity(spec.echo.t_grid.len());
        let mut signal_mode = Vec::with_capacity(spec.echo.t_grid.len());
        let mut signal_ideal = Vec::with_capacity(spec.echo.t_grid.len());
        let mut column = Vec::with_capacity(set.results.len());
        for &t in &spec.echo.t_grid {
            column.clear();
            column.extend(
                set.results
                    .iter()
                    .map(|r| open_amplitude(&r.chi, &r.zeta, &spec.atom, t, tau, rabi)),
            );
            signal_mean.push((t, stats::running_mean(&column)));
            signal_mode.push((t, Histogram::freedman_diaconis(&column).mode()));
            signal_ideal.push((t, open_amplitude(&ideal_chi, &ideal_zeta, &spec.atom, t, tau, rabi)));
        }

        EnsembleStats {
            mean_f: stats::running_mean(&f_values),
            se_f: stats::standard_error(&f_values),
            mode_f: hist.mode(),
            ideal_f: spec.ideal_f(),
            skewness_f: stats::skewness(&f_values),
            histogram: hist.bins().collect(),
            signal_mean,
            signal_mode,
            signal_ideal,
            skipped: set.skipped,
            fallbacks: set.fallbacks(),
            f_values,
        }
    }
}

pub fn run_ensemble(spec: &RunSpec) -> Result<EnsembleStats> {
    let set = run_repeats(spec)?;
    Ok(EnsembleStats::from_repeats(spec, &set))
}

/// Histogram of the amplitude at one detection time.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalColumn {
    pub t: f64,
    pub histogram: Histogram,
}

/// `P(A | T)` for each requested detection time, `n_bins` equal bins per column.
pub fn signal_distribution_from(spec: &RunSpec, set: &RepeatSet, t_values: &[f64], n_bins: usize) -> Result<Vec<SignalColumn>> {
    if n_bins < 2 {
        return Err(EchoError::config(format!("need at least 2 histogram bins, got {n_bins}")));
    }
    let rabi = spec.rabi();
    Ok(t_values
        .iter()
        .map(|&t| {
            let column: Vec<f64> = set
                .results
                .iter()
                .map(|r| open_amplitude(&r.chi, &r.zeta, &spec.atom, t, spec.echo.tau, rabi))
                .collect();
            SignalColumn { t, histogram: Histogram::with_bins(&column, n_bins) }
        })
        .collect())
}

pub fn signal_distribution(spec: &RunSpec, t_values: &[f64], n_bins: usize) -> Result<Vec<SignalColumn>> {
    let set = run_repeats(spec)?;
    signal_distribution_from(spec, &set, t_values, n_bins)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Phi,
    Gamma,
    Tau,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    /// `<F> - F_ideal` for PHI/GAMMA, `<A_open>` at `T = tau` for TAU.
    pub mc: f64,
    pub se: f64,
    pub analytic: Option<f64>,
    /// Mean strength factor of this point.
    pub mean_f: f64,
    pub se_f: f64,
}

/// Seed of sweep point `i`; point 0 keeps the base seed.
pub fn sweep_seed(base: u64, i: usize) -> u64 {
    base.wrapping_add((i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// One ensemble per value, each with an independent seed.
pub fn sweep_parameter(base: &RunSpec, parameter: SweepParameter, values: &[f64]) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(EchoError::config("sweep needs at least one value"));
    }
    values
        .iter()
        .enumerate()
        .map(|(i, &value)| {
            let mut spec = base.clone();
            spec.noise.seed = sweep_seed(base.noise.seed, i);
            match parameter {
                SweepParameter::Phi => spec.noise.phi_amp = value,
                SweepParameter::Gamma => spec.noise.gamma = value,
                SweepParameter::Tau => spec.echo.tau = value,
            }
            spec.validate()?;
            let set = run_repeats(&spec)?;
            let f = set.f_values();
            let mean_f = stats::running_mean(&f);
            let se_f = stats::standard_error(&f);
            let ideal = spec.ideal_f();
            let analytic_f = spec.perturbation_inputs().map(|p| mean_strength_factor(&p));

            let row = match parameter {
                SweepParameter::Phi | SweepParameter::Gamma => SweepRow {
                    value,
                    mc: mean_f - ideal,
                    se: se_f,
                    analytic: analytic_f.map(|a| a - ideal),
                    mean_f,
                    se_f,
                },
                SweepParameter::Tau => {
                    let tau = spec.echo.tau;
                    let signal: Vec<f64> = set
                        .results
                        .iter()
                        .map(|r| open_amplitude(&r.chi, &r.zeta, &spec.atom, tau, tau, spec.rabi()))
                        .collect();
                    let mu2 = spec.atom.dipole_mag.powi(2);
                    let decay = if spec.atom.tau_c.is_infinite() { 1.0 } else { (-2.0 * tau / spec.atom.tau_c).exp() };
                    SweepRow {
                        value,
                        mc: stats::running_mean(&signal),
                        se: stats::standard_error(&signal),
                        analytic: analytic_f.map(|a| mu2 / 64.0 * decay * a),
                        mean_f,
                        se_f,
                    }
                }
            };
            Ok(row)
        })
        .collect()
}

/// Monte Carlo moments of the linearized parameters for equal pulses:
/// `(<chi1 + delta_tau>, <chi2^2>)`, each with its standard error.
pub fn linearized_moments(p: &PerturbationInputs, dt: f64, n_paths: usize, seed: u64) -> Result<(Estimate, Estimate)> {
    p.validate()?;
    let pulse = PulseParams::new(p.rabi, p.delta_tau, Wavevector::K1);
    let noise = NoiseParams {
        phi_amp: p.phi_amp,
        gamma: p.gamma,
        dt,
        seed,
        n_steps: pulse.steps_on(dt)?.max(1),
    };
    let samples: Vec<Result<(f64, f64)>> = (0..n_paths)
        .into_par_iter()
        .map(|s| {
            let chi = linearized_chi_path(&pulse, &sample_path(&noise, s as u64)?)?;
            Ok((chi.chi1 + p.delta_tau, chi.chi2 * chi.chi2))
        })
        .collect();
    let samples = samples.into_iter().collect::<Result<Vec<_>>>()?;
    let chi1: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let chi2sq: Vec<f64> = samples.iter().map(|s| s.1).collect();
    Ok((
        Estimate { value: stats::running_mean(&chi1), std_error: stats::standard_error(&chi1) },
        Estimate { value: stats::running_mean(&chi2sq), std_error: stats::standard_error(&chi2sq) },
    ))
}
