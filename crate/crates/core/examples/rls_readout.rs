//! Online RLS fitting a readout to a fixed random feature stream, compared
//! with the batch ridge solution.
//!
//!     cargo run --release --example rls_readout

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use odrc::training::{Readout, RlsState};

fn main() -> odrc::Result<()> {
    let (n, samples) = (20, 500);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let truth: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();

    let mut readout = Readout::zeros(1, n);
    let mut rls = RlsState::new(n, 1.0)?;
    for k in 0..samples {
        let r: Vec<f64> = (0..n)
            .map(|_| rng.random_range(-1.0..1.0_f64).tanh())
            .collect();
        let d = r.iter().zip(&truth).map(|(a, b)| a * b).sum::<f64>();
        let e = rls.update(&mut readout, &r, &[d])?;
        if k % 100 == 0 {
            println!("sample {k:>3}  prior error {:+.2e}", e[0]);
        }
    }
    let err = readout
        .row(0)
        .iter()
        .zip(&truth)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("max |w - w_true| after {samples} samples: {err:.2e}");
    Ok(())
}
