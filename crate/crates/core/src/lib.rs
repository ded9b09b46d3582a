//! Two-pulse photon echo on an inhomogeneous ensemble of two-level atoms
//! driven by pulses with Ornstein-Uhlenbeck phase noise.
//!
//! - [`noise`]: stationary OU phase paths on reproducible RNG substreams.
//! - [`propagator`]: Wei-Norman parameters of one pulse (RK4), with a direct
//!   time-ordered product as a cross-check.
//! - [`echo`]: strength factor, echo amplitude, envelope and decay.
//! - [`perturbation`]: linearized dynamics and closed-form mean factor.
//! - [`quadrature`]: direct-integration oracles for the closed forms.
//! - [`ensemble`]: the Monte Carlo engine and parameter sweeps.
//! - [`fitting`]: coherence time from the revival signal versus delay.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod echo;
pub mod ensemble;
pub mod error;
pub mod fitting;
pub mod noise;
pub mod perturbation;
pub mod propagator;
pub mod quadrature;
pub mod stats;
pub mod su2;

pub use echo::{
    echo_amplitude, echo_field_term, ideal_strength_factor, inhomogeneous_envelope, open_amplitude,
    strength_factor, AtomParams, EchoConfig,
};
pub use ensemble::{
    run_ensemble, run_repeats, signal_distribution, sweep_parameter, EnsembleStats, PhaseMode, RunSpec,
    SingularityPolicy, SweepParameter, SweepRow,
};
pub use error::{EchoError, Result};
pub use fitting::{fit_coherence_time, CoherenceFit, DecayCurve, DecayPoint};
pub use noise::{autocorrelation_estimate, sample_path, Estimate, NoiseParams, PhasePath};
pub use perturbation::{
    chi1_mean, chi2sq_mean, linearized_chi_path, mean_strength_factor, perturbed_factor, PerturbationInputs,
};
pub use propagator::{
    decompose_unitary, direct_unitary, factorized_unitary, integrate_chi, ChiParams, PulseParams, Wavevector,
};
pub use su2::{Matrix2, Unitary2};
