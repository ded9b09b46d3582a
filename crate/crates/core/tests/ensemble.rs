use photon_echo::ensemble::{linearized_moments, signal_distribution_from, sweep_seed};
use photon_echo::perturbation::chi1_mean;
use photon_echo::{
    chi2sq_mean, mean_strength_factor, run_ensemble, run_repeats, sweep_parameter, AtomParams, EchoConfig,
    EchoError, NoiseParams, PerturbationInputs, PhaseMode, PulseParams, RunSpec, SingularityPolicy,
    SweepParameter, Wavevector,
};

fn spec(phi_amp: f64, n_repeats: usize) -> RunSpec {
    let tau = 10.0;
    RunSpec {
        echo: EchoConfig {
            tau,
            t_grid: (0..=40).map(|k| 5.0 + 0.25 * k as f64).collect(),
            pulse1: PulseParams::new(1.0, 4.75, Wavevector::K1),
            pulse2: PulseParams::new(1.0, 4.75, Wavevector::K2),
        },
        atom: AtomParams::default(),
        noise: NoiseParams { phi_amp, gamma: 1.0 / 4.587, dt: 1e-2, seed: 42, n_steps: 1 },
        n_repeats,
        phase_mode: PhaseMode::Shared,
        singularity_policy: SingularityPolicy::Abort,
    }
}

fn on_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn noiseless_single_repeat_equals_ideal_exactly() {
    let stats = run_ensemble(&spec(0.0, 1)).unwrap();
    assert_eq!(stats.mean_f, stats.ideal_f);
    assert_eq!(stats.mode_f, stats.ideal_f);
    for (m, i) in stats.signal_mean.iter().zip(&stats.signal_ideal) {
        assert_eq!(m, i);
    }
}

#[test]
fn noiseless_many_repeats_equals_ideal_exactly() {
    let stats = run_ensemble(&spec(0.0, 64)).unwrap();
    assert_eq!(stats.mean_f, stats.ideal_f);
    assert_eq!(stats.se_f, 0.0);
    assert_eq!(stats.histogram.len(), 1);
    assert_eq!(stats.histogram[0].1, 1.0);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let s = spec(0.1, 40);
    let one = on_pool(1, || run_ensemble(&s).unwrap());
    let four = on_pool(4, || run_ensemble(&s).unwrap());
    assert_eq!(one, four);
}

#[test]
fn phase_modes_agree_without_noise() {
    let shared = run_ensemble(&spec(0.0, 8)).unwrap();
    let mut s = spec(0.0, 8);
    s.phase_mode = PhaseMode::Independent;
    let independent = run_ensemble(&s).unwrap();
    assert_eq!(shared.f_values, independent.f_values);
}

#[test]
fn phase_modes_differ_with_noise() {
    let shared = run_repeats(&spec(0.1, 8)).unwrap();
    let mut s = spec(0.1, 8);
    s.phase_mode = PhaseMode::Independent;
    let independent = run_repeats(&s).unwrap();
    for (a, b) in shared.results.iter().zip(&independent.results) {
        assert_eq!(a.chi, b.chi, "pulse 1 shares stream 2r in both modes");
        assert_ne!(a.zeta, b.zeta);
    }
    for r in &shared.results {
        assert_eq!(r.chi, r.zeta);
    }
}

#[test]
fn strength_factor_is_bounded() {
    let stats = run_ensemble(&spec(0.3, 200)).unwrap();
    assert!(stats.f_values.iter().all(|&f| (0.0..=64.0).contains(&f)));
}

#[test]
fn histogram_is_normalized() {
    let stats = run_ensemble(&spec(0.08, 300)).unwrap();
    let total: f64 = stats.histogram.iter().map(|b| b.1).sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn standard_error_shrinks_like_inverse_sqrt_n() {
    let small = run_ensemble(&spec(0.1, 100)).unwrap();
    let large = run_ensemble(&spec(0.1, 1600)).unwrap();
    let ratio = small.se_f / large.se_f;
    assert!((2.5..6.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn signal_peaks_at_the_revival_time() {
    let s = spec(0.08, 100);
    let stats = run_ensemble(&s).unwrap();
    let (t_peak, _) = stats
        .signal_mean
        .iter()
        .copied()
        .fold((f64::NAN, f64::NEG_INFINITY), |best, p| if p.1 > best.1 { p } else { best });
    assert_eq!(t_peak, s.echo.tau);
}

#[test]
fn noiseless_signal_distribution_is_a_point_mass() {
    let s = spec(0.0, 20);
    let set = run_repeats(&s).unwrap();
    let cols = signal_distribution_from(&s, &set, &[9.0, 10.0, 11.5], 10).unwrap();
    for c in cols {
        let probs: Vec<f64> = c.histogram.bins().map(|b| b.1).collect();
        assert_eq!(probs.iter().filter(|&&p| p > 0.0).count(), 1);
        assert_eq!(probs.iter().sum::<f64>(), 1.0);
    }
    assert!(signal_distribution_from(&s, &set, &[10.0], 1).is_err());
}

#[test]
fn sweep_rows_follow_the_values() {
    let rows = sweep_parameter(&spec(0.0, 30), SweepParameter::Phi, &[0.0, 0.05]).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].mc, 0.0);
    assert_eq!(rows[0].analytic, Some(0.0));
    assert!(rows[1].mc != 0.0);
    assert!(matches!(
        sweep_parameter(&spec(0.0, 30), SweepParameter::Phi, &[]),
        Err(EchoError::Config(_))
    ));
}

#[test]
fn sweep_points_use_independent_seeds() {
    assert_eq!(sweep_seed(42, 0), 42);
    assert_ne!(sweep_seed(42, 1), sweep_seed(42, 2));
    let rows = sweep_parameter(&spec(0.1, 20), SweepParameter::Gamma, &[0.2, 0.2]).unwrap();
    assert_ne!(rows[0].mean_f, rows[1].mean_f);
}

#[test]
fn tau_sweep_analytic_column_matches_the_mean_factor() {
    let mut s = spec(0.05, 20);
    s.atom.tau_c = 10.0;
    let rows = sweep_parameter(&s, SweepParameter::Tau, &[6.0, 8.0]).unwrap();
    let p = s.perturbation_inputs().unwrap();
    for row in rows {
        let expected = mean_strength_factor(&p) / 64.0 * (-2.0 * row.value / 10.0).exp();
        assert!((row.analytic.unwrap() - expected).abs() < 1e-15);
        assert!(row.mc > 0.0 && row.se > 0.0);
    }
}

#[test]
fn mean_factor_does_not_depend_on_the_delay() {
    let mut a = spec(0.1, 50);
    let mut b = spec(0.1, 50);
    a.echo.tau = 8.0;
    b.echo.tau = 20.0;
    let fa = run_ensemble(&a).unwrap();
    let fb = run_ensemble(&b).unwrap();
    assert_eq!(fa.f_values, fb.f_values);
}

#[test]
fn abort_policy_reports_the_repeat() {
    let err = run_repeats(&spec(1.5, 50)).unwrap_err();
    match err {
        EchoError::Repeat { source, .. } => assert!(source.is_singularity()),
        other => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn fallback_and_skip_policies_complete() {
    let mut s = spec(1.5, 50);
    s.singularity_policy = SingularityPolicy::DirectFallback;
    let fallback = run_repeats(&s).unwrap();
    assert_eq!(fallback.results.len(), 50);
    assert!(fallback.fallbacks() > 0);
    assert!(fallback.results.iter().all(|r| (0.0..=64.0).contains(&r.f)));

    s.singularity_policy = SingularityPolicy::SkipAndCount;
    let skipped = run_repeats(&s).unwrap();
    assert_eq!(skipped.skipped, fallback.fallbacks());
    assert_eq!(skipped.results.len() + skipped.skipped, 50);
}

#[test]
fn linearized_moments_match_closed_forms() {
    let p = PerturbationInputs { rabi: 1.0, delta_tau: 4.75, phi_amp: 0.05, gamma: 1.0 / 4.587 };
    let (chi1, chi2sq) = linearized_moments(&p, 1e-2, 2000, 7).unwrap();
    assert!(chi1.z_score(chi1_mean(&p)).abs() < 3.0, "{chi1:?} vs {}", chi1_mean(&p));
    assert!(chi2sq.z_score(chi2sq_mean(&p)).abs() < 3.0, "{chi2sq:?} vs {}", chi2sq_mean(&p));
}

#[test]
fn invalid_specs_are_rejected() {
    let mut s = spec(0.1, 0);
    assert!(matches!(run_repeats(&s), Err(EchoError::Config(_))));
    s.n_repeats = 1;
    s.noise.dt = 0.3;
    assert!(run_repeats(&s).is_err());
    let mut s = spec(0.1, 1);
    s.echo.pulse2.rabi = 2.0;
    assert!(run_repeats(&s).is_err());
}
