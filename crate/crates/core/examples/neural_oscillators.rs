//! Small random networks used as oscillators: construction, period, and the
//! effect of the time constant.
//!
//!     cargo run --release --example neural_oscillators

use odrc::oscillators::{zero_crossings, NeuralOscillator, NeuralOscillatorParams};

fn main() -> odrc::Result<()> {
    for tau_ms in [2.0, 20.0] {
        let params = NeuralOscillatorParams {
            tau_ms,
            ..NeuralOscillatorParams::default()
        };
        for seed in 0..3 {
            let mut osc = NeuralOscillator::new(params, seed)?;
            let trace = osc.probe_trace();
            let secs = trace.len() as f64 / 1000.0;
            let hz = zero_crossings(&trace) as f64 / 2.0 / secs;
            println!(
                "tau {tau_ms:>4} ms  seed {seed}  attempts {}  ~{hz:.1} Hz",
                osc.attempts()
            );
        }
    }
    Ok(())
}
