//! Capacity against the recurrent gain g.
//!
//!     cargo run --release --example gain_sweep

use odrc::harness::experiments::SweepValue;
use odrc::harness::{run_parameter_sweep, ExperimentConfig, Preset, SweepAxis};
use odrc::targets::TaskKind;

fn main() -> odrc::Result<()> {
    let mut cfg = ExperimentConfig::preset(Preset::Desk, TaskKind::Timing);
    cfg.intervals_s = vec![1.0, 2.0, 5.0];
    cfg.seeds = vec![1, 2, 3];

    let values: Vec<SweepValue> = [0.8, 1.2, 1.5, 2.0]
        .into_iter()
        .map(SweepValue::Scalar)
        .collect();
    let sweep = run_parameter_sweep(&cfg, SweepAxis::G, &values)?;
    for row in &sweep.rows {
        println!(
            "g = {:<4} capacity {:.3} ± {:.3} s",
            row.value, row.capacity, row.sd
        );
    }
    Ok(())
}
