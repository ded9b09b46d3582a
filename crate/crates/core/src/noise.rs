//! Stationary Ornstein-Uhlenbeck phase noise.
//!
//! Paths satisfy `<phi(t1) phi(t2)> = phi_amp^2 exp(-gamma |t1 - t2|)` and are
//! sampled with the exact one-step transition law, so the statistics hold at
//! any grid spacing. Consumers treat a path as piecewise constant on
//! `[t_n, t_{n+1})`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{EchoError, Result};
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    /// Fluctuation amplitude (radians).
    pub phi_amp: f64,
    /// Correlation strength (inverse time).
    pub gamma: f64,
    pub dt: f64,
    pub seed: u64,
    pub n_steps: usize,
}

impl NoiseParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(EchoError::config(format!("noise dt must be positive, got {}", self.dt)));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(EchoError::config(format!(
                "noise gamma must be positive, got {}",
                self.gamma
            )));
        }
        if !(self.phi_amp >= 0.0 && self.phi_amp.is_finite()) {
            return Err(EchoError::config(format!(
                "noise phi_amp must be non-negative, got {}",
                self.phi_amp
            )));
        }
        if self.n_steps == 0 {
            return Err(EchoError::config("noise n_steps must be at least 1"));
        }
        if !self.is_resolved() {
            log::warn!(
                "dt * gamma = {} >= 1: the correlation time is not resolved by the grid",
                self.dt * self.gamma
            );
        }
        Ok(())
    }

    /// Whether the grid resolves the correlation time (`dt * gamma < 1`).
    pub fn is_resolved(&self) -> bool {
        self.dt * self.gamma < 1.0
    }

    pub fn with_steps(mut self, n_steps: usize) -> Self {
        self.n_steps = n_steps;
        self
    }
}

/// Phase samples `phi(n dt)` for `n = 0..=n_steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePath {
    values: Vec<f64>,
    dt: f64,
}

impl PhasePath {
    pub fn from_values(values: Vec<f64>, dt: f64) -> Result<Self> {
        if values.len() < 2 {
            return Err(EchoError::config("a phase path needs at least two grid points"));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(EchoError::config(format!("phase path dt must be positive, got {dt}")));
        }
        Ok(PhasePath { values, dt })
    }

    pub fn constant(value: f64, dt: f64, n_steps: usize) -> Result<Self> {
        Self::from_values(vec![value; n_steps + 1], dt)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn duration(&self) -> f64 {
        self.n_steps() as f64 * self.dt
    }
}

/// Independent, reproducible generator for `(seed, stream)`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws a stationary OU path on substream `stream_index` of `params.seed`.
pub fn sample_path(params: &NoiseParams, stream_index: u64) -> Result<PhasePath> {
    params.validate()?;
    let n = params.n_steps;
    if params.phi_amp == 0.0 {
        return PhasePath::constant(0.0, params.dt, n);
    }

    let decay = (-params.gamma * params.dt).exp();
    // sqrt(1 - e^{-2 gamma dt}) without cancellation for small gamma dt
    let kick = params.phi_amp * (-(-2.0 * params.gamma * params.dt).exp_m1()).sqrt();

    let mut rng = stream_rng(params.seed, stream_index);
    let mut values = Vec::with_capacity(n + 1);
    let xi0: f64 = StandardNormal.sample(&mut rng);
    let mut phi = params.phi_amp * xi0;
    values.push(phi);
    for _ in 0..n {
        let xi: f64 = StandardNormal.sample(&mut rng);
        phi = phi * decay + kick * xi;
        values.push(phi);
    }
    PhasePath::from_values(values, params.dt)
}

/// Mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    /// Distance from `target` in units of the standard error. Infinite when
    /// the error is zero and the values differ.
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = self.value - target;
        if diff == 0.0 {
            0.0
        } else {
            diff / self.std_error
        }
    }
}

/// Empirical `<phi(t) phi(t + lag)>`.
///
/// Each path contributes its time average over admissible `t`; the estimate
/// and its standard error are taken across paths, which are independent.
pub fn autocorrelation_estimate(paths: &[PhasePath], lag: f64) -> Result<Estimate> {
    if paths.len() < 2 {
        return Err(EchoError::config("autocorrelation needs at least two paths"));
    }
    let dt = paths[0].dt;
    if paths.iter().any(|p| p.dt != dt) {
        return Err(EchoError::config("all paths must share one grid step"));
    }
    if !(lag >= 0.0 && lag.is_finite()) {
        return Err(EchoError::domain(format!("lag must be non-negative, got {lag}")));
    }
    let k = grid_steps(lag, dt)
        .ok_or_else(|| EchoError::config(format!("lag {lag} is not a multiple of dt {dt}")))?;

    let per_path = paths
        .iter()
        .map(|p| {
            let v = &p.values;
            if k > p.n_steps() {
                return Err(EchoError::domain(format!(
                    "lag {lag} exceeds path duration {}",
                    p.duration()
                )));
            }
            let count = v.len() - k;
            let sum: f64 = v[..count].iter().zip(&v[k..]).map(|(a, b)| a * b).sum();
            Ok(sum / count as f64)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Estimate {
        value: stats::running_mean(&per_path),
        std_error: stats::standard_error(&per_path),
    })
}

/// Number of grid steps spanned by `span`, if it is an integer multiple of `dt`.
pub(crate) fn grid_steps(span: f64, dt: f64) -> Option<usize> {
    let steps = (span / dt).round();
    let tol = 1e-9 * span.abs().max(1.0);
    if steps >= 0.0 && (steps * dt - span).abs() <= tol {
        Some(steps as usize)
    } else {
        None
    }
}
