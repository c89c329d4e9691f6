//! Fixed random reservoir and its Euler-discretized rate dynamics
//!
//! `τ dx/dt = -x + W r + W_os o + W_in s + W_fb y_fb + I_noise`, `r = tanh(x)`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, OdrcError, Result};
use crate::seed::SeedStreams;
use crate::sparse::CsrMatrix;

/// Simulation start time in ms.
pub const SIM_START_MS: f64 = -250.0;
/// Euler step in ms.
pub const DT_MS: f64 = 1.0;
/// Time constant of the reservoir units in ms.
pub const TAU_MS: f64 = 10.0;

/// Gains of the four fixed weight blocks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainConfig {
    pub g: f64,
    pub g_os: f64,
    pub g_in: f64,
    pub g_fb: f64,
}

impl Default for GainConfig {
    fn default() -> Self {
        Self {
            g: 1.5,
            g_os: 0.5,
            g_in: 5.0,
            g_fb: 3.0,
        }
    }
}

/// Onset pulse: 1 on [-50, 0] ms, 0 elsewhere.
pub fn onset_signal(t_ms: f64) -> f64 {
    if (-50.0..=0.0).contains(&t_ms) {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone)]
pub struct ReservoirWeights {
    recurrent: CsrMatrix,
    /// N × N_os, row-major.
    oscillator: Vec<f64>,
    onset: Vec<f64>,
    /// N × N_ro, row-major.
    feedback: Vec<f64>,
    n: usize,
    n_os: usize,
    n_ro: usize,
    gains: GainConfig,
    p: f64,
}

impl ReservoirWeights {
    pub fn init(
        n: usize,
        n_os: usize,
        n_ro: usize,
        gains: GainConfig,
        p: f64,
        seed: u64,
    ) -> Result<Self> {
        Self::from_streams(n, n_os, n_ro, gains, p, &SeedStreams::new(seed))
    }

    /// Each block draws from its own named stream.
    pub fn from_streams(
        n: usize,
        n_os: usize,
        n_ro: usize,
        gains: GainConfig,
        p: f64,
        streams: &SeedStreams,
    ) -> Result<Self> {
        if n == 0 {
            return Err(OdrcError::Config(
                "reservoir needs at least one unit".into(),
            ));
        }
        if n_ro == 0 {
            return Err(OdrcError::Config(
                "readout needs at least one output".into(),
            ));
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(OdrcError::Config(format!(
                "connection probability {p} outside (0, 1]"
            )));
        }
        let recurrent = CsrMatrix::random(
            n,
            n,
            p,
            gains.g / (p * n as f64).sqrt(),
            &mut streams.rng("reservoir.recurrent"),
        );
        let oscillator = if n_os == 0 {
            Vec::new()
        } else {
            gaussian_vec(
                n * n_os,
                gains.g_os / (n_os as f64).sqrt(),
                &mut streams.rng("reservoir.oscillator"),
            )
        };
        let onset = gaussian_vec(n, gains.g_in, &mut streams.rng("reservoir.onset"));
        let feedback = gaussian_vec(
            n * n_ro,
            gains.g_fb / (n_ro as f64).sqrt(),
            &mut streams.rng("reservoir.feedback"),
        );
        Ok(Self {
            recurrent,
            oscillator,
            onset,
            feedback,
            n,
            n_os,
            n_ro,
            gains,
            p,
        })
    }

    pub fn from_parts(
        recurrent: CsrMatrix,
        oscillator: Vec<f64>,
        onset: Vec<f64>,
        feedback: Vec<f64>,
        n_os: usize,
        n_ro: usize,
    ) -> Result<Self> {
        let n = recurrent.rows();
        check_dim("recurrent weights (cols)", n, recurrent.cols())?;
        check_dim("oscillator weights", n * n_os, oscillator.len())?;
        check_dim("onset weights", n, onset.len())?;
        check_dim("feedback weights", n * n_ro, feedback.len())?;
        Ok(Self {
            recurrent,
            oscillator,
            onset,
            feedback,
            n,
            n_os,
            n_ro,
            gains: GainConfig::default(),
            p: 1.0,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_os(&self) -> usize {
        self.n_os
    }

    pub fn n_ro(&self) -> usize {
        self.n_ro
    }

    pub fn gains(&self) -> GainConfig {
        self.gains
    }

    pub fn connection_prob(&self) -> f64 {
        self.p
    }

    pub fn recurrent(&self) -> &CsrMatrix {
        &self.recurrent
    }

    pub fn oscillator(&self) -> &[f64] {
        &self.oscillator
    }

    pub fn onset(&self) -> &[f64] {
        &self.onset
    }

    pub fn feedback(&self) -> &[f64] {
        &self.feedback
    }

    /// `W r + W_os o + W_in s + W_fb y_fb` written into `out`.
    ///
    /// A `None` feedback skips `W_fb` entirely.
    pub fn input_current(
        &self,
        r: &[f64],
        o: &[f64],
        s: f64,
        y_fb: Option<&[f64]>,
        out: &mut [f64],
    ) -> Result<()> {
        check_dim("rates", self.n, r.len())?;
        check_dim("oscillator drive", self.n_os, o.len())?;
        check_dim("current buffer", self.n, out.len())?;
        if let Some(y) = y_fb {
            check_dim("feedback", self.n_ro, y.len())?;
        }
        for (i, cur) in out.iter_mut().enumerate() {
            let mut acc = self.recurrent.row_dot(i, r);
            if self.n_os > 0 {
                let row = &self.oscillator[i * self.n_os..(i + 1) * self.n_os];
                acc += row.iter().zip(o).map(|(w, v)| w * v).sum::<f64>();
            }
            acc += self.onset[i] * s;
            if let Some(y) = y_fb {
                let row = &self.feedback[i * self.n_ro..(i + 1) * self.n_ro];
                acc += row.iter().zip(y).map(|(w, v)| w * v).sum::<f64>();
            }
            *cur = acc;
        }
        Ok(())
    }

    /// Writes the four blocks as CSV files into `dir` for inspection.
    pub fn dump_csv(&self, dir: &std::path::Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| OdrcError::io(dir, e))?;
        let mut w = csv::Writer::from_path(dir.join("w_recurrent.csv"))?;
        w.write_record(["row", "col", "value"])?;
        for (i, j, v) in self.recurrent.triplets() {
            w.write_record([i.to_string(), j.to_string(), v.to_string()])?;
        }
        w.flush().map_err(|e| OdrcError::io(dir, e))?;
        for (name, data, cols) in [
            ("w_oscillator.csv", &self.oscillator, self.n_os),
            ("w_onset.csv", &self.onset, 1),
            ("w_feedback.csv", &self.feedback, self.n_ro),
        ] {
            let mut w = csv::WriterBuilder::new()
                .has_headers(false)
                .from_path(dir.join(name))?;
            if cols > 0 {
                for row in data.chunks(cols) {
                    w.write_record(row.iter().map(|v| v.to_string()))?;
                }
            }
            w.flush().map_err(|e| OdrcError::io(dir, e))?;
        }
        Ok(())
    }
}

fn gaussian_vec<R: Rng + ?Sized>(len: usize, sd: f64, rng: &mut R) -> Vec<f64> {
    let normal = Normal::new(0.0, sd.abs()).expect("finite standard deviation");
    (0..len).map(|_| normal.sample(rng)).collect()
}

/// Per-step Gaussian current noise with standard deviation `amplitude`.
#[derive(Debug, Clone)]
pub struct Noise {
    amplitude: f64,
    rng: ChaCha8Rng,
}

impl Noise {
    pub fn new(amplitude: f64, rng: ChaCha8Rng) -> Self {
        Self { amplitude, rng }
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    fn is_active(&self) -> bool {
        self.amplitude > 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReservoirState {
    x: Vec<f64>,
    r: Vec<f64>,
    t_ms: f64,
    scratch: Vec<f64>,
}

impl ReservoirState {
    /// `x ~ U[-1, 1]`, `t = -250 ms`.
    pub fn init(n: usize, seed: u64) -> Result<Self> {
        Self::from_rng(n, &mut SeedStreams::new(seed).rng("state"))
    }

    pub fn from_rng<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n == 0 {
            return Err(OdrcError::Config(
                "reservoir needs at least one unit".into(),
            ));
        }
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        Ok(Self::from_x(x, SIM_START_MS))
    }

    pub fn from_x(x: Vec<f64>, t_ms: f64) -> Self {
        let r = x.iter().map(|v| v.tanh()).collect();
        let scratch = vec![0.0; x.len()];
        Self {
            x,
            r,
            t_ms,
            scratch,
        }
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn t_ms(&self) -> f64 {
        self.t_ms
    }

    pub fn max_abs_x(&self) -> f64 {
        self.x.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// One Euler step:
    /// `x ← (1 - Δt/τ) x + (Δt/τ)(W r + W_os o + W_in s + W_fb y_fb + I_noise)`.
    #[allow(clippy::too_many_arguments)]
    pub fn step(
        &mut self,
        weights: &ReservoirWeights,
        o: &[f64],
        s: f64,
        y_fb: Option<&[f64]>,
        noise: Option<&mut Noise>,
        dt_ms: f64,
        tau_ms: f64,
    ) -> Result<()> {
        if !(dt_ms > 0.0 && tau_ms > 0.0) {
            return Err(OdrcError::Argument(
                "step size and time constant must be positive".into(),
            ));
        }
        check_dim("reservoir state", weights.n(), self.x.len())?;
        let mut current = std::mem::take(&mut self.scratch);
        weights.input_current(&self.r, o, s, y_fb, &mut current)?;
        if let Some(noise) = noise.filter(|n| n.is_active()) {
            let normal = Normal::new(0.0, noise.amplitude).expect("finite noise amplitude");
            for c in current.iter_mut() {
                *c += normal.sample(&mut noise.rng);
            }
        }
        let a = dt_ms / tau_ms;
        for ((x, r), c) in self.x.iter_mut().zip(self.r.iter_mut()).zip(&current) {
            *x = (1.0 - a) * *x + a * c;
            *r = x.tanh();
        }
        self.scratch = current;
        self.t_ms += dt_ms;
        Ok(())
    }
}
