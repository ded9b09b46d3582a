//! The `simulate`, `sweep` and `fit` commands.

use std::path::PathBuf;

use photon_echo::ensemble::{signal_distribution_from, EnsembleStats};
use photon_echo::{
    fit_coherence_time, run_repeats, sweep_parameter, CoherenceFit, DecayCurve, DecayPoint, SweepParameter,
};

use crate::config::ExperimentConfig;
use crate::output::{num, prefixed, write_csv, write_manifest};
use crate::CliError;

/// A decay is reported only when the fitted slope is this many standard
/// errors below zero.
pub const DECAY_Z: f64 = 3.0;

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

pub fn parameter_name(p: SweepParameter) -> &'static str {
    match p {
        SweepParameter::Phi => "phi",
        SweepParameter::Gamma => "gamma",
        SweepParameter::Tau => "tau",
    }
}

#[derive(Debug, Clone)]
pub struct SimulateReport {
    pub stats: EnsembleStats,
    pub files: Vec<PathBuf>,
}

/// Writes `signal.csv`, `f_hist.csv`, `signal_dist.csv` and `manifest.toml`
/// under the output prefix.
pub fn simulate(cfg: &ExperimentConfig) -> Result<SimulateReport, CliError> {
    let spec = cfg.run_spec()?;
    let set = run_repeats(&spec)?;
    let stats = EnsembleStats::from_repeats(&spec, &set);
    let columns = signal_distribution_from(&spec, &set, &spec.echo.t_grid, cfg.ensemble.hist_bins)?;

    let prefix = &cfg.output.prefix;
    let signal = prefixed(prefix, "signal.csv");
    write_csv(
        &signal,
        &["T", "mean_amplitude", "mode_amplitude", "ideal_amplitude"],
        stats
            .signal_mean
            .iter()
            .zip(&stats.signal_mode)
            .zip(&stats.signal_ideal)
            .map(|((m, o), i)| vec![num(m.0), num(m.1), num(o.1), num(i.1)]),
    )?;

    let hist = prefixed(prefix, "f_hist.csv");
    write_csv(
        &hist,
        &["bin_center", "probability"],
        stats.histogram.iter().map(|&(c, p)| vec![num(c), num(p)]),
    )?;

    let dist = prefixed(prefix, "signal_dist.csv");
    write_csv(
        &dist,
        &["T", "bin_center", "probability"],
        columns
            .iter()
            .flat_map(|col| col.histogram.bins().map(move |(c, p)| vec![num(col.t), num(c), num(p)])),
    )?;

    let manifest = prefixed(prefix, "manifest.toml");
    write_manifest(&manifest, "simulate", &cfg.to_toml())?;

    Ok(SimulateReport { stats, files: vec![signal, hist, dist, manifest] })
}

/// Writes `sweep.csv` and `sweep_manifest.toml`.
pub fn sweep(cfg: &ExperimentConfig, parameter: SweepParameter, values: &[f64]) -> Result<Vec<PathBuf>, CliError> {
    if values.is_empty() {
        return Err(CliError::Config("sweep needs at least one value".into()));
    }
    let spec = cfg.run_spec()?;
    let rows = sweep_parameter(&spec, parameter, values)?;

    let prefix = &cfg.output.prefix;
    let csv = prefixed(prefix, "sweep.csv");
    write_csv(
        &csv,
        &["value", "mc_delta_f", "se", "analytic_delta_f"],
        rows.iter()
            .map(|r| vec![num(r.value), num(r.mc), num(r.se), r.analytic.map(num).unwrap_or_default()]),
    )?;
    let manifest = prefixed(prefix, "sweep_manifest.toml");
    let command = format!("sweep --parameter {} --values {}", parameter_name(parameter), join(values));
    write_manifest(&manifest, &command, &cfg.to_toml())?;
    Ok(vec![csv, manifest])
}

#[derive(Debug, Clone)]
pub struct FitReport {
    pub fit: CoherenceFit,
    pub points: Vec<DecayPoint>,
    pub files: Vec<PathBuf>,
}

impl FitReport {
    pub fn resolves_decay(&self) -> bool {
        self.fit.resolves_decay(DECAY_Z)
    }

    pub fn summary(&self) -> String {
        if self.resolves_decay() {
            format!("tau_c = {:.6} +/- {:.6} (1 standard error)", self.fit.tau_c, self.fit.tau_c_se)
        } else {
            format!(
                "no decoherence detected (slope {:.3e} +/- {:.3e})",
                self.fit.slope, self.fit.slope_se
            )
        }
    }
}

/// Mean revival signal at `T = tau` for each delay, fitted for the coherence
/// time. Writes `fit.csv` and `fit_manifest.toml`.
pub fn fit(cfg: &ExperimentConfig, taus: &[f64]) -> Result<FitReport, CliError> {
    if taus.len() < 3 {
        return Err(CliError::Config(format!("fit needs at least 3 delays, got {}", taus.len())));
    }
    if taus.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(CliError::Config("delays must be strictly increasing".into()));
    }
    let spec = cfg.run_spec()?;
    let rows = sweep_parameter(&spec, SweepParameter::Tau, taus)?;
    let points: Vec<DecayPoint> =
        rows.iter().map(|r| DecayPoint { tau: r.value, mean_signal: r.mc, se: r.se }).collect();
    let fit = fit_coherence_time(&DecayCurve::new(points.clone())?)?;

    let prefix = &cfg.output.prefix;
    let csv = prefixed(prefix, "fit.csv");
    write_csv(
        &csv,
        &["tau", "mean_signal", "se", "fitted_signal"],
        points.iter().map(|p| {
            let fitted = fit.amplitude * (fit.slope * p.tau).exp();
            vec![num(p.tau), num(p.mean_signal), num(p.se), num(fitted)]
        }),
    )?;
    let manifest = prefixed(prefix, "fit_manifest.toml");
    write_manifest(&manifest, &format!("fit --taus {}", join(taus)), &cfg.to_toml())?;
    Ok(FitReport { fit, points, files: vec![csv, manifest] })
}
