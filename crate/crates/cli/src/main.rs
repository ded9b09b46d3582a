use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use photon_echo::SweepParameter;
use photon_echo_cli::commands;
use photon_echo_cli::config::ExperimentConfig;
use photon_echo_cli::validate::{render_table, run_oracles, ValidateOptions};
use photon_echo_cli::CliError;

#[derive(Parser)]
#[command(name = "photon-echo", version, about = "Two-pulse photon echo with phase-noisy pulses")]
struct Cli {
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `ensemble.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides `output.prefix`.
    #[arg(long, global = true)]
    out: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ensemble signal, strength-factor histogram and signal distribution.
    Simulate,
    /// Mean strength-factor shift against the closed form over one parameter.
    Sweep {
        #[arg(long, value_enum)]
        parameter: Parameter,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        values: Vec<f64>,
    },
    /// Coherence time from the revival signal at several delays.
    Fit {
        /// Comma-separated, strictly increasing delays.
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        taus: Vec<f64>,
    },
    /// Runs the oracle suite; exits nonzero if any check fails.
    Validate {
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, default_value_t = 20)]
        paths: usize,
        #[arg(long, default_value_t = 2000)]
        mc_paths: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Parameter {
    Phi,
    Gamma,
    Tau,
}

impl From<Parameter> for SweepParameter {
    fn from(p: Parameter) -> Self {
        match p {
            Parameter::Phi => SweepParameter::Phi,
            Parameter::Gamma => SweepParameter::Gamma,
            Parameter::Tau => SweepParameter::Tau,
        }
    }
}

fn load(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config is required for this command".into()))?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.ensemble.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output.prefix = out.clone();
    }
    Ok(cfg)
}

fn print_files(files: &[PathBuf]) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    match &cli.command {
        Command::Simulate => {
            let report = commands::simulate(&load(cli)?)?;
            let s = &report.stats;
            println!(
                "F: mean {:.6e} +/- {:.2e}, mode {:.6e}, ideal {:.6e}, skewness {:.3}",
                s.mean_f, s.se_f, s.mode_f, s.ideal_f, s.skewness_f
            );
            if s.skipped > 0 || s.fallbacks > 0 {
                println!("singular repeats: {} skipped, {} via direct product", s.skipped, s.fallbacks);
            }
            print_files(&report.files);
        }
        Command::Sweep { parameter, values } => {
            print_files(&commands::sweep(&load(cli)?, (*parameter).into(), values)?);
        }
        Command::Fit { taus } => {
            let report = commands::fit(&load(cli)?, taus)?;
            println!("{}", report.summary());
            print_files(&report.files);
        }
        Command::Validate { dt, paths, mc_paths } => {
            let opts = ValidateOptions { dt: *dt, paths: *paths, mc_paths: *mc_paths, seed: cli.seed.unwrap_or(42) };
            let rows = run_oracles(&opts)?;
            print!("{}", render_table(&rows));
            return Ok(if rows.iter().all(|r| r.passed()) { 0 } else { 1 });
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();

    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| run(&cli)),
            Err(e) => Err(CliError::Config(format!("cannot start {n} threads: {e}"))),
        },
        None => run(&cli),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
