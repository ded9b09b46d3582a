//! Experiment configuration file.
//!
//! TOML with six top-level tables; unknown keys are rejected:
//!
//! ```toml
//! [atom]
//! eps0 = 0.0        # center of the inhomogeneous distribution
//! sigma0 = 1.0      # inhomogeneous width
//! dipole = 1.0      # |mu|
//! tau_c = inf       # coherence time; inf disables dephasing
//!
//! [pulses]
//! rabi = 1.0
//! duration1 = 4.75
//! duration2 = 4.75
//!
//! [noise]
//! phi_amp = 0.08
//! gamma = 0.21800741225201659
//! dt = 1e-3
//! phase_mode = "shared"        # or "independent"
//!
//! [echo]
//! tau = 5.0
//! t_start = 0.0
//! t_stop = 10.0
//! t_points = 201
//!
//! [ensemble]
//! n_repeats = 10000
//! seed = 42
//! on_singularity = "abort"     # "skip" or "direct"
//! hist_bins = 50
//!
//! [output]
//! prefix = "out/run_"
//! ```

use std::path::Path;

use photon_echo::{
    AtomParams, EchoConfig, NoiseParams, PhaseMode, PulseParams, RunSpec, SingularityPolicy, Wavevector,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub atom: AtomSection,
    pub pulses: PulsesSection,
    pub noise: NoiseSection,
    pub echo: EchoSection,
    pub ensemble: EnsembleSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSection {
    #[serde(default)]
    pub eps0: f64,
    #[serde(default = "one")]
    pub sigma0: f64,
    #[serde(default = "one")]
    pub dipole: f64,
    #[serde(default = "infinity")]
    pub tau_c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulsesSection {
    pub rabi: f64,
    pub duration1: f64,
    pub duration2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    pub phi_amp: f64,
    pub gamma: f64,
    pub dt: f64,
    #[serde(default)]
    pub phase_mode: ModeName,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EchoSection {
    pub tau: f64,
    pub t_start: f64,
    pub t_stop: f64,
    pub t_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    pub n_repeats: usize,
    pub seed: u64,
    #[serde(default)]
    pub on_singularity: PolicyName,
    #[serde(default = "default_bins")]
    pub hist_bins: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub prefix: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    #[default]
    Shared,
    Independent,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyName {
    #[default]
    Abort,
    Skip,
    Direct,
}

fn one() -> f64 {
    1.0
}

fn infinity() -> f64 {
    f64::INFINITY
}

fn default_bins() -> usize {
    50
}

impl From<ModeName> for PhaseMode {
    fn from(m: ModeName) -> Self {
        match m {
            ModeName::Shared => PhaseMode::Shared,
            ModeName::Independent => PhaseMode::Independent,
        }
    }
}

impl From<PolicyName> for SingularityPolicy {
    fn from(p: PolicyName) -> Self {
        match p {
            PolicyName::Abort => SingularityPolicy::Abort,
            PolicyName::Skip => SingularityPolicy::SkipAndCount,
            PolicyName::Direct => SingularityPolicy::DirectFallback,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Parses and validates a configuration document.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.run_spec()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always serializable")
    }

    /// Detection times: `t_points` evenly spaced values from `t_start` to `t_stop`.
    pub fn t_grid(&self) -> Result<Vec<f64>, CliError> {
        let e = &self.echo;
        if !(e.t_start.is_finite() && e.t_stop.is_finite()) {
            return Err(CliError::Config("echo.t_start and echo.t_stop must be finite".into()));
        }
        match e.t_points {
            0 => Err(CliError::Config("echo.t_points must be at least 1".into())),
            1 => Ok(vec![e.t_start]),
            n => {
                if e.t_stop <= e.t_start {
                    return Err(CliError::Config("echo.t_stop must exceed echo.t_start".into()));
                }
                let span = e.t_stop - e.t_start;
                Ok((0..n).map(|i| e.t_start + span * i as f64 / (n - 1) as f64).collect())
            }
        }
    }

    /// The validated ensemble specification.
    pub fn run_spec(&self) -> Result<RunSpec, CliError> {
        if self.ensemble.hist_bins < 2 {
            return Err(CliError::Config("ensemble.hist_bins must be at least 2".into()));
        }
        let p = &self.pulses;
        let spec = RunSpec {
            echo: EchoConfig {
                tau: self.echo.tau,
                t_grid: self.t_grid()?,
                pulse1: PulseParams::new(p.rabi, p.duration1, Wavevector::K1),
                pulse2: PulseParams::new(p.rabi, p.duration2, Wavevector::K2),
            },
            atom: AtomParams {
                eps0: self.atom.eps0,
                sigma0: self.atom.sigma0,
                dipole_mag: self.atom.dipole,
                tau_c: self.atom.tau_c,
            },
            noise: NoiseParams {
                phi_amp: self.noise.phi_amp,
                gamma: self.noise.gamma,
                dt: self.noise.dt,
                seed: self.ensemble.seed,
                n_steps: 1,
            },
            n_repeats: self.ensemble.n_repeats,
            phase_mode: self.noise.phase_mode.into(),
            singularity_policy: self.ensemble.on_singularity.into(),
        };
        spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(spec)
    }
}
