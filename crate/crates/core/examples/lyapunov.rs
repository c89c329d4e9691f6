//! Lyapunov spectra of the Lorenz system: tangent-space integration versus
//! the time-series estimate on the sampled target.
//!
//!     cargo run --release --example lyapunov

use odrc::analysis::{
    lyapunov_benettin_oracle, lyapunov_sano_sawada, BenettinParams, OdeSystem, SanoSawadaParams,
};
use odrc::targets::{lorenz_raw, TaskKind};

fn main() -> odrc::Result<()> {
    let reference = lyapunov_benettin_oracle(OdeSystem::Lorenz, &BenettinParams::new(1000.0));
    println!(
        "tangent space   {:.4?}  sum {:.3}",
        reference.exponents,
        reference.sum()
    );

    let dt = TaskKind::Lorenz.model_time_per_sample().expect("chaotic");
    for samples in [20_000, 40_000] {
        let series = lorenz_raw(samples);
        let est = lyapunov_sano_sawada(&series, dt, &SanoSawadaParams::default())?;
        println!(
            "{samples:>6} samples  {:.4?}  sum {:.3}",
            est.exponents,
            est.sum()
        );
    }
    Ok(())
}
