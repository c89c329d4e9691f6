//! Experiment orchestration and reporting.

pub mod config;
pub mod experiments;
pub mod report;
pub mod thresholds;
pub mod trial;

pub use config::{ExperimentConfig, OscillatorKind, Preset};
pub use experiments::{
    run_chaos_experiment, run_noise_sweep, run_parameter_sweep, run_timing_experiment, ChaosReport,
    ChaosSeedResult, NoiseSweepReport, ParameterSweepReport, SweepAxis, SweepValue, TimingReport,
};
pub use trial::{run_trial, train_readout, Network, TrialMode, TrialRecord, TrialSpec};
