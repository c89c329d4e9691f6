//! Writes every target series to CSV.
//!
//!     cargo run --release --example generate_targets -- /tmp/targets

use std::path::PathBuf;

use odrc::targets::{chaotic_series, timing_target, TaskKind, TimingSpec};

fn main() -> odrc::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("odrc_targets"));
    std::fs::create_dir_all(&dir).map_err(|e| odrc::OdrcError::io(&dir, e))?;

    let timing = timing_target(&TimingSpec::new(2000.0))?;
    timing.write_csv(&dir.join("timing_2s.csv"))?;
    for kind in [TaskKind::Lorenz, TaskKind::Rossler, TaskKind::Ks] {
        let series = chaotic_series(kind, 20_000)?;
        let path = dir.join(format!("{}.csv", kind.label()));
        series.write_csv(&path)?;
        println!(
            "{:<8} {} × {}  max |d| = {:.3}",
            kind.label(),
            series.len(),
            series.dims(),
            series.max_abs()
        );
    }
    println!("written to {}", dir.display());
    Ok(())
}
