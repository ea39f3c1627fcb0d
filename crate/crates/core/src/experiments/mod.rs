//! Recovery-rate experiments: phase transitions over sparsity, knee points
//! across resolutions, and the four-way reconstruction demo.
//!
//! Every trial draws its randomness from seeds split off the master seed by
//! `(K, trial)`, so a sweep gives the same records on any number of threads
//! and any single trial can be replayed in isolation.

mod demo;
mod output;
mod phase;
mod spec;

pub use demo::{default_demo_target, run_demo, Background, DemoResult, DemoSettings, Method, Reconstruction};
pub use output::{curve_csv, demo_errors_csv, knee_csv, trials_csv};
pub use phase::{
    knee_point, replay_trial, resolution_sweep, resolution_sweep_with, run_phase_transition, run_phase_transition_with,
    run_trial, spearman, trial_seed, Curve, CurvePoint, Dictionary, KneeRow, PhaseTransition, ResolutionSweep,
    TrialRecord,
};
pub use spec::{
    AutoTag, BetaSetting, Ensemble, KRange, LambdaSetting, SolverSettings, TrialSpec, NOISELESS_VARIANCE_FLOOR,
};
