//! Oracle suite: each check compares a production routine with an
//! independent computation and reports the worst error against a tolerance.

use num_complex::Complex64;
use photon_echo::ensemble::linearized_moments;
use photon_echo::propagator::{generators, wei_norman_rhs, wei_norman_rhs_unsimplified};
use photon_echo::quadrature::{chi1_mean_oracle, chi2sq_mean_oracle};
use photon_echo::{
    chi1_mean, chi2sq_mean, direct_unitary, factorized_unitary, ideal_strength_factor, integrate_chi,
    mean_strength_factor, sample_path, strength_factor, ChiParams, NoiseParams, PerturbationInputs,
    PhasePath, PulseParams, Wavevector,
};

use crate::CliError;

pub const REFERENCE_GAMMA: f64 = 1.0 / 4.587;
pub const DELAY_SWEEP: [f64; 5] = [1.0, 2.0, 3.0, 4.0, 4.75];
pub const GAMMA_SWEEP: [f64; 4] = [0.05, 0.218, 1.0, 5.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateOptions {
    pub dt: f64,
    /// OU paths for the propagator comparison.
    pub paths: usize,
    /// Paths per point for the linearized Monte Carlo.
    pub mc_paths: usize,
    pub seed: u64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions { dt: 1e-3, paths: 20, mc_paths: 2000, seed: 42 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRow {
    pub name: &'static str,
    /// Worst observed error (or |z| for statistical checks).
    pub metric: f64,
    pub tolerance: f64,
}

impl OracleRow {
    pub fn passed(&self) -> bool {
        self.metric <= self.tolerance
    }

    /// `tolerance / metric`; larger is better.
    pub fn margin(&self) -> f64 {
        self.tolerance / self.metric
    }
}

fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    // NaN propagates so that a broken routine cannot pass.
    values.into_iter().fold(0.0, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) })
}

/// Max Frobenius distance between the Wei-Norman and direct propagators over
/// OU paths at the reference parameters.
pub fn propagator_oracle(dt: f64, paths: usize, seed: u64) -> Result<f64, CliError> {
    let pulse = PulseParams::new(1.0, 4.75, Wavevector::K1);
    let noise = NoiseParams { phi_amp: 0.08, gamma: REFERENCE_GAMMA, dt, seed, n_steps: pulse.steps_on(dt)? };
    let mut errs = Vec::with_capacity(paths);
    for s in 0..paths {
        let path = sample_path(&noise, s as u64)?;
        let chi = integrate_chi(&pulse, &path)?;
        let u = direct_unitary(&pulse, &path)?;
        errs.push((factorized_unitary(&chi, pulse.rabi) - u).frobenius_norm());
    }
    Ok(worst(errs))
}

/// Max deviation of the noiseless parameters from `(-duration, 0, 0)`.
pub fn zero_noise_oracle(dt: f64) -> Result<f64, CliError> {
    let mut errs = Vec::new();
    for d in DELAY_SWEEP {
        let pulse = PulseParams::new(1.0, d, Wavevector::K1);
        let chi = integrate_chi(&pulse, &PhasePath::constant(0.0, dt, pulse.steps_on(dt)?)?)?;
        let ideal = ChiParams::ideal(d);
        errs.extend([(chi.chi1 - ideal.chi1).abs(), chi.chi2.abs(), chi.chi3.abs()]);
    }
    Ok(worst(errs))
}

/// Simplified against expanded Wei-Norman right-hand side on a grid inside
/// the chart, relative to `1 + |value|`.
pub fn rhs_consistency_oracle() -> f64 {
    let mut errs = Vec::new();
    for rabi in [0.5, 1.0, 2.0] {
        let chi2_max = (std::f64::consts::FRAC_PI_2 - 0.1) / (2.0 * rabi);
        for i in 0..=12 {
            let phi = -3.0 + 0.5 * i as f64;
            for j in 0..=8 {
                let chi2 = chi2_max * (j as f64 / 4.0 - 1.0) * 0.999;
                for k in 0..=6 {
                    let chi3 = -1.5 + 0.5 * k as f64;
                    let a = wei_norman_rhs(phi, chi2, chi3, rabi);
                    let b = wei_norman_rhs_unsimplified(phi, chi2, chi3, rabi);
                    errs.extend(a.iter().zip(&b).map(|(x, y)| (x - y).abs() / (1.0 + y.abs())));
                }
            }
        }
    }
    worst(errs)
}

/// `[X_i, X_j] = 2 i rabi eps_ijk X_k` for the pulse generators.
pub fn generator_algebra_oracle() -> f64 {
    let rabi = 1.0;
    let h = generators(rabi);
    let mut errs = Vec::new();
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        let expected = h[k].scale(Complex64::new(0.0, 2.0 * rabi));
        errs.push((h[i].commutator(&h[j]) - expected).max_abs());
        errs.push((h[j].commutator(&h[i]) + expected).max_abs());
        errs.push(h[i].commutator(&h[i]).max_abs());
    }
    worst(errs)
}

fn sweep_inputs(phi_amp: f64) -> impl Iterator<Item = PerturbationInputs> {
    GAMMA_SWEEP.into_iter().flat_map(move |gamma| {
        DELAY_SWEEP.into_iter().map(move |delta_tau| PerturbationInputs { rabi: 1.0, delta_tau, phi_amp, gamma })
    })
}

/// Closed form against quadrature, in units of `phi_amp^2`.
pub fn quadrature_oracle(closed: fn(&PerturbationInputs) -> f64, chi1: bool) -> f64 {
    worst(sweep_inputs(0.05).map(|p| {
        let q = if chi1 { chi1_mean_oracle(&p) } else { chi2sq_mean_oracle(&p) };
        (closed(&p) - q.value).abs() / (p.phi_amp * p.phi_amp)
    }))
}

/// Worst |z| of the linearized Monte Carlo moments against the closed forms
/// along the delay sweep. Returns `(chi1, chi2sq)`.
pub fn linearized_mc_oracle(dt: f64, n_paths: usize, seed: u64) -> Result<(f64, f64), CliError> {
    let mut z1 = Vec::new();
    let mut z2 = Vec::new();
    for (i, delta_tau) in DELAY_SWEEP.into_iter().enumerate() {
        let p = PerturbationInputs { rabi: 1.0, delta_tau, phi_amp: 0.05, gamma: REFERENCE_GAMMA };
        let (c1, c2) = linearized_moments(&p, dt, n_paths, photon_echo::ensemble::sweep_seed(seed, i))?;
        z1.push(c1.z_score(chi1_mean(&p)).abs());
        z2.push(c2.z_score(chi2sq_mean(&p)).abs());
    }
    Ok((worst(z1), worst(z2)))
}

/// Second-order mean factor against an expansion whose coefficients are
/// finite-difference derivatives of the exact strength factor, in units of
/// `phi_amp^2`.
pub fn mean_factor_oracle(mean_factor: impl Fn(&PerturbationInputs) -> f64) -> f64 {
    let f = |a: f64, b: f64, p: &PerturbationInputs| {
        let c = ChiParams::new(-p.delta_tau + a, b, 0.0);
        strength_factor(&c, &c, p.rabi)
    };
    let h = 1e-4;
    worst(sweep_inputs(0.05).map(|p| {
        let d1 = (f(h, 0.0, &p) - f(-h, 0.0, &p)) / (2.0 * h);
        let d2 = (f(0.0, h, &p) - 2.0 * f(0.0, 0.0, &p) + f(0.0, -h, &p)) / (2.0 * h * h);
        let expected = ideal_strength_factor(p.rabi, p.delta_tau) + d1 * chi1_mean(&p) + d2 * chi2sq_mean(&p);
        (mean_factor(&p) - expected).abs() / (p.phi_amp * p.phi_amp)
    }))
}

pub fn run_oracles(opts: &ValidateOptions) -> Result<Vec<OracleRow>, CliError> {
    let (mc1, mc2) = linearized_mc_oracle(opts.dt, opts.mc_paths, opts.seed)?;
    Ok(vec![
        OracleRow {
            name: "propagator: Wei-Norman vs direct product",
            metric: propagator_oracle(opts.dt, opts.paths, opts.seed)?,
            tolerance: 1e-8,
        },
        OracleRow { name: "propagator: zero-noise closed form", metric: zero_noise_oracle(opts.dt)?, tolerance: 1e-10 },
        OracleRow { name: "equations of motion: simplified vs expanded", metric: rhs_consistency_oracle(), tolerance: 1e-12 },
        OracleRow { name: "equations of motion: generator algebra", metric: generator_algebra_oracle(), tolerance: 1e-12 },
        OracleRow { name: "quadrature: <chi2^2> closed form", metric: quadrature_oracle(chi2sq_mean, false), tolerance: 1e-8 },
        OracleRow { name: "quadrature: <chi1> closed form", metric: quadrature_oracle(chi1_mean, true), tolerance: 1e-8 },
        OracleRow { name: "linearized Monte Carlo: <chi1> |z|", metric: mc1, tolerance: 3.0 },
        OracleRow { name: "linearized Monte Carlo: <chi2^2> |z|", metric: mc2, tolerance: 3.0 },
        OracleRow {
            name: "mean strength factor: expansion coefficients",
            metric: mean_factor_oracle(mean_strength_factor),
            tolerance: 1e-5,
        },
    ])
}

pub fn render_table(rows: &[OracleRow]) -> String {
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut out = format!("{:<width$}  {:>10}  {:>10}  {:>9}  result\n", "oracle", "metric", "tolerance", "margin");
    for r in rows {
        out.push_str(&format!(
            "{:<width$}  {:>10.3e}  {:>10.1e}  {:>9.2e}  {}\n",
            r.name,
            r.metric,
            r.tolerance,
            r.margin(),
            if r.passed() { "PASS" } else { "FAIL" }
        ));
    }
    out
}
