//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Tolerances are fixed; the seed is 42 throughout.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use photon_echo::{
    autocorrelation_estimate, direct_unitary, factorized_unitary, ideal_strength_factor, integrate_chi,
    inhomogeneous_envelope, run_ensemble, sample_path, sweep_parameter, ChiParams, NoiseParams, PhasePath,
    PulseParams, RunSpec, SingularityPolicy, SweepParameter, Wavevector,
};
use photon_echo_cli::commands;
use photon_echo_cli::config::ExperimentConfig;
use photon_echo_cli::validate::{linearized_mc_oracle, quadrature_oracle, REFERENCE_GAMMA};

const SEED: u64 = 42;
const Z_MAX: f64 = 3.0;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

type Check = fn() -> Result<Outcome, String>;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn load(name: &str) -> ExperimentConfig {
    ExperimentConfig::load(&configs().join(name)).expect("bundled config parses")
}

fn spec(name: &str) -> RunSpec {
    let mut cfg = load(name);
    cfg.ensemble.seed = SEED;
    cfg.run_spec().expect("bundled config is valid")
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn reference_noise(dt: f64, n_steps: usize) -> NoiseParams {
    NoiseParams { phi_amp: 0.08, gamma: REFERENCE_GAMMA, dt, seed: SEED, n_steps }
}

fn oracle_equivalence() -> Result<Outcome, String> {
    let pulse = PulseParams::new(1.0, 4.75, Wavevector::K1);
    let noise = reference_noise(1e-3, pulse.steps_on(1e-3).map_err(e)?);
    let mut worst: f64 = 0.0;
    for s in 0..100 {
        let path = sample_path(&noise, s).map_err(e)?;
        let chi = integrate_chi(&pulse, &path).map_err(e)?;
        let u = direct_unitary(&pulse, &path).map_err(e)?;
        let d = (factorized_unitary(&chi, 1.0) - u).frobenius_norm();
        worst = if d.is_nan() { f64::NAN } else { worst.max(d) };
    }
    Ok(Outcome::new(worst <= 1e-8, format!("100 paths, max |U_wn - U_direct|_F = {worst:.3e} (tol 1e-8)")))
}

fn zero_noise() -> Result<Outcome, String> {
    let pulse = PulseParams::new(1.0, 4.75, Wavevector::K1);
    let path = PhasePath::constant(0.0, 1e-3, pulse.steps_on(1e-3).map_err(e)?).map_err(e)?;
    let chi = integrate_chi(&pulse, &path).map_err(e)?;
    let ideal = ChiParams::ideal(4.75);
    let chi_err = (chi.chi1 - ideal.chi1).abs().max(chi.chi2.abs()).max(chi.chi3.abs());

    let mut s = spec("revival.toml");
    s.noise.phi_amp = 0.0;
    s.n_repeats = 4;
    let stats = run_ensemble(&s).map_err(e)?;
    let f_ideal = ideal_strength_factor(1.0, 4.75);
    let mu2 = s.atom.dipole_mag.powi(2);
    let amp_err = stats
        .signal_mean
        .iter()
        .map(|&(t, a)| (a - mu2 / 64.0 * inhomogeneous_envelope(&s.atom, t, s.echo.tau) * f_ideal).abs())
        .fold(0.0, f64::max);
    Ok(Outcome::new(
        chi_err <= 1e-10 && amp_err <= 1e-12,
        format!("chi error {chi_err:.3e} (tol 1e-10), amplitude error {amp_err:.3e} over {} T (tol 1e-12)", stats.signal_mean.len()),
    ))
}

fn ou_statistics() -> Result<Outcome, String> {
    let noise = reference_noise(1e-3, 4750);
    let paths = (0..1000).map(|s| sample_path(&noise, s)).collect::<Result<Vec<_>, _>>().map_err(e)?;
    let var = noise.phi_amp * noise.phi_amp;
    let lag = 4.587;
    let c0 = autocorrelation_estimate(&paths, 0.0).map_err(e)?;
    let c1 = autocorrelation_estimate(&paths, lag).map_err(e)?;
    let (z0, z1) = (c0.z_score(var), c1.z_score(var * (-REFERENCE_GAMMA * lag).exp()));
    Ok(Outcome::new(
        z0.abs() <= Z_MAX && z1.abs() <= Z_MAX,
        format!("1000 paths: lag 0 z = {z0:+.2}, lag 1/gamma z = {z1:+.2} (|z| <= 3)"),
    ))
}

fn distribution_shape() -> Result<Outcome, String> {
    let s = spec("revival.toml");
    let st = run_ensemble(&s).map_err(e)?;
    Ok(Outcome::new(
        st.mean_f > st.mode_f && st.mean_f > st.ideal_f && st.skewness_f > 0.0,
        format!(
            "n = {}: mean {:.5} > mode {:.5}, mean > ideal {:.5}, skewness {:.3} > 0",
            s.n_repeats, st.mean_f, st.mode_f, st.ideal_f, st.skewness_f
        ),
    ))
}

fn sweep_lines(parameter: SweepParameter, values: &[f64], s: &RunSpec) -> Result<Vec<(f64, f64)>, String> {
    sweep_parameter(s, parameter, values)
        .map_err(e)?
        .iter()
        .map(|r| {
            let analytic = r.analytic.ok_or("missing closed form")?;
            Ok((r.value, (r.mc - analytic) / r.se))
        })
        .collect()
}

fn fmt_z(rows: &[(f64, f64)]) -> String {
    rows.iter().map(|(v, z)| format!("{v}: z = {z:+.2}")).collect::<Vec<_>>().join(", ")
}

fn phi_sweep() -> Result<Outcome, String> {
    let s = spec("sweep.toml");
    let rows = sweep_lines(SweepParameter::Phi, &[0.02, 0.05, 0.08, 0.1, 0.5], &s)?;
    let small_ok = rows[..4].iter().all(|r| r.1.abs() <= Z_MAX);
    let large_off = rows[4].1.abs() > Z_MAX;
    Ok(Outcome::new(small_ok && large_off, format!("n = {}; {} (small within 3, 0.5 beyond 3)", s.n_repeats, fmt_z(&rows))))
}

fn gamma_sweep() -> Result<Outcome, String> {
    let s = spec("sweep.toml");
    let rows = sweep_lines(SweepParameter::Gamma, &[0.05, 0.218, 1.0, 5.0], &s)?;
    Ok(Outcome::new(
        rows.iter().all(|r| r.1.abs() <= Z_MAX),
        format!("phi = {}, n = {}; {}", s.noise.phi_amp, s.n_repeats, fmt_z(&rows)),
    ))
}

fn closed_form_moments() -> Result<Outcome, String> {
    let q2 = quadrature_oracle(photon_echo::chi2sq_mean, false);
    let q1 = quadrature_oracle(photon_echo::perturbation::chi1_mean, true);
    let (z1, z2) = linearized_mc_oracle(1e-3, 2000, SEED).map_err(e)?;
    Ok(Outcome::new(
        q1 <= 1e-8 && q2 <= 1e-8 && z1 <= Z_MAX && z2 <= Z_MAX,
        format!(
            "quadrature error / phi^2: <chi1> {q1:.2e}, <chi2^2> {q2:.2e} (tol 1e-8); linearized MC max |z|: <chi1> {z1:.2}, <chi2^2> {z2:.2}"
        ),
    ))
}

fn revival_time() -> Result<Outcome, String> {
    let mut details = Vec::new();
    let mut pass = true;
    for phi in [0.0, 0.08, 0.3] {
        let mut s = spec("revival.toml");
        s.noise.phi_amp = phi;
        s.n_repeats = 2000;
        s.singularity_policy = SingularityPolicy::DirectFallback;
        let st = run_ensemble(&s).map_err(e)?;
        let (t_peak, _) = st
            .signal_mean
            .iter()
            .copied()
            .fold((f64::NAN, f64::NEG_INFINITY), |best, p| if p.1 > best.1 { p } else { best });
        let step = s.echo.t_grid[1] - s.echo.t_grid[0];
        pass &= (t_peak - s.echo.tau).abs() <= step;
        details.push(format!("phi {phi}: argmax T = {t_peak}"));
    }
    Ok(Outcome::new(pass, format!("{} (tau = 5, grid step 0.05)", details.join(", "))))
}

fn coherence_time() -> Result<Outcome, String> {
    let dir = tempfile::tempdir().map_err(e)?;
    let mut cfg = load("fit.toml");
    cfg.ensemble.seed = SEED;
    cfg.output.prefix = format!("{}/", dir.path().display());
    let taus: Vec<f64> = (2..=8).map(f64::from).collect();
    let report = commands::fit(&cfg, &taus).map_err(e)?;
    let rel = (report.fit.tau_c - cfg.atom.tau_c).abs() / cfg.atom.tau_c;
    Ok(Outcome::new(
        report.resolves_decay() && rel <= 0.05,
        format!(
            "n = {} per delay: tau_c = {:.4} +/- {:.4}, relative error {:.2}% (tol 5%)",
            cfg.ensemble.n_repeats,
            report.fit.tau_c,
            report.fit.tau_c_se,
            100.0 * rel
        ),
    ))
}

fn simulate_in(dir: &Path, config: &Path, threads: usize) -> Result<Vec<Vec<u8>>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_photon-echo"))
        .current_dir(dir)
        .args(["simulate", "--out", "out/", "--threads", &threads.to_string(), "--config"])
        .arg(config)
        .output()
        .map_err(e)?;
    if !status.status.success() {
        return Err(format!("simulate failed: {}", String::from_utf8_lossy(&status.stderr)));
    }
    ["signal.csv", "f_hist.csv", "signal_dist.csv", "manifest.toml"]
        .iter()
        .map(|f| std::fs::read(dir.join("out").join(f)).map_err(e))
        .collect()
}

fn determinism() -> Result<Outcome, String> {
    let root = tempfile::tempdir().map_err(e)?;
    let mut cfg = load("revival.toml");
    cfg.ensemble.n_repeats = 2000;
    cfg.noise.phi_amp = 0.3;
    cfg.ensemble.on_singularity = photon_echo_cli::config::PolicyName::Direct;
    let config = root.path().join("run.toml");
    std::fs::write(&config, cfg.to_toml()).map_err(e)?;

    let mut runs = Vec::new();
    for (i, threads) in [1, 4, 4].into_iter().enumerate() {
        let dir = root.path().join(format!("run{i}"));
        std::fs::create_dir_all(&dir).map_err(e)?;
        runs.push(simulate_in(&dir, &config, threads)?);
    }
    let identical = runs.windows(2).all(|w| w[0] == w[1]);
    let bytes: usize = runs[0].iter().map(Vec::len).sum();
    Ok(Outcome::new(identical, format!("3 runs (1, 4, 4 threads), 4 files, {bytes} bytes each: identical = {identical}")))
}

fn main() -> ExitCode {
    let checks: [(&str, Check); 10] = [
        ("oracle equivalence", oracle_equivalence),
        ("zero-noise closed form", zero_noise),
        ("OU statistics", ou_statistics),
        ("strength-factor distribution shape", distribution_shape),
        ("mean shift vs noise amplitude", phi_sweep),
        ("mean shift vs correlation strength", gamma_sweep),
        ("closed-form moments", closed_form_moments),
        ("revival invariance", revival_time),
        ("coherence-time protocol", coherence_time),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let outcome = check().unwrap_or_else(|err| Outcome::new(false, format!("error: {err}")));
        let secs = start.elapsed().as_secs_f64();
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag} {name} [{secs:.1} s]: {}", i + 1, outcome.detail);
        failures += usize::from(!outcome.pass);
    }
    println!("acceptance: {} of {} criteria passed", checks.len() - failures, checks.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
