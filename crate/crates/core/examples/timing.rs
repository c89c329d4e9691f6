//! Interval timing with a sine-driven reservoir, with and without feedback.
//!
//!     cargo run --release --example timing

use odrc::harness::{run_timing_experiment, ExperimentConfig, OscillatorKind, Preset};
use odrc::targets::TaskKind;

fn main() -> odrc::Result<()> {
    let mut cfg = ExperimentConfig::preset(Preset::Desk, TaskKind::Timing);
    cfg.intervals_s = vec![1.0, 2.0, 5.0];
    cfg.seeds = vec![1, 2];

    for (oscillator, feedback) in [
        (OscillatorKind::Sine, true),
        (OscillatorKind::Sine, false),
        (OscillatorKind::None, false),
    ] {
        let cfg = ExperimentConfig {
            oscillator,
            feedback,
            ..cfg.clone()
        };
        let report = run_timing_experiment(&cfg)?;
        let r2: Vec<String> = report.mean_r2().iter().map(|v| format!("{v:.3}")).collect();
        println!(
            "{:<22} R² [{}]  capacity {:.2} s",
            report.condition,
            r2.join(", "),
            report.capacity
        );
    }
    Ok(())
}
