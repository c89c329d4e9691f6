//! Timing capacity under injected Gaussian noise, normalized at I0 = 1e-3.
//!
//!     cargo run --release --example noise_sweep

use odrc::harness::{run_noise_sweep, ExperimentConfig, Preset};
use odrc::targets::TaskKind;

fn main() -> odrc::Result<()> {
    let mut cfg = ExperimentConfig::preset(Preset::Desk, TaskKind::Timing);
    cfg.intervals_s = vec![1.0, 2.0, 5.0];
    cfg.seeds = vec![1, 2, 3];

    let sweep = run_noise_sweep(&cfg, &[1e-3, 1e-2, 1e-1, 1.0])?;
    println!("{:>8} {:>10} {:>10}", "I0", "capacity", "normalized");
    for row in &sweep.rows {
        println!(
            "{:>8} {:>10.3} {:>10.3}",
            row.noise, row.capacity, row.normalized
        );
    }
    Ok(())
}
