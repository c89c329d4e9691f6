//! Lorenz prediction: train 20 s, run free for 40 s, compare return maps.
//!
//! Full size (N = 3000, ten repetitions) takes a while on one core; pass a
//! smaller reservoir and repetition count to try it quickly:
//!
//!     cargo run --release --example chaos_lorenz -- 1500 3

use odrc::harness::report::write_chaos_report;
use odrc::harness::{run_chaos_experiment, ExperimentConfig, Preset};
use odrc::targets::TaskKind;

fn main() -> odrc::Result<()> {
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut cfg = ExperimentConfig::preset(Preset::Desk, TaskKind::Lorenz);
    cfg.seeds = vec![1];
    if let Some(&n) = args.first() {
        cfg.n = n;
    }
    if let Some(&reps) = args.get(1) {
        cfg.repetitions = reps;
    }

    let report = run_chaos_experiment(&cfg)?;
    for r in &report.results {
        println!("seed {}  task-period R² {:.4}", r.seed, r.r2_task.mean);
        println!(
            "  return-map distance: reproduction {:.4}, generalization {:.4}",
            r.distance_reproduction, r.distance_generalization
        );
        match &r.spectrum_generalization {
            Ok(s) => println!("  generalization spectrum {:.3?}", s.exponents),
            Err(e) => println!("  generalization spectrum unavailable: {e}"),
        }
    }
    if let Some(o) = &report.oracle_spectrum {
        println!("Lorenz reference spectrum {:.3?}", o.exponents);
    }
    let out = std::env::temp_dir().join("odrc_chaos_lorenz");
    write_chaos_report(&report, &out, true)?;
    println!("traces and maps in {}", out.display());
    Ok(())
}
