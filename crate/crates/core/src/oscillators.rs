//! Oscillatory drive for the reservoir.
//!
//! Two kinds of oscillator are supported: a bank of sinusoids with random
//! frequencies and phases, and small random recurrent tanh networks whose
//! activity settles onto a limit cycle (or torus). Both are deterministic
//! given their seed and are reset to the same state at the start of every
//! trial so that the drive seen at a given time is identical across trials.

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, Normal, Uniform};

use crate::error::{OdrcError, Result};
use crate::reservoir::onset_signal;
use crate::seed::SeedStreams;
use crate::sparse::CsrMatrix;

/// Sinusoids `sin(2π f_i t + φ_i)` with `t` in milliseconds and `f_i` in Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct SineBank {
    frequencies: Vec<f64>,
    phases: Vec<f64>,
    f_min: f64,
    f_max: f64,
}

impl SineBank {
    pub fn new(n_os: usize, f_min: f64, f_max: f64, seed: u64) -> Result<Self> {
        Self::from_rng(
            n_os,
            f_min,
            f_max,
            &mut SeedStreams::new(seed).rng("oscillators"),
        )
    }

    pub fn from_rng<R: Rng + ?Sized>(
        n_os: usize,
        f_min: f64,
        f_max: f64,
        rng: &mut R,
    ) -> Result<Self> {
        if !(f_min > 0.0 && f_min <= f_max && f_max.is_finite()) {
            return Err(OdrcError::Config(format!(
                "frequency band [{f_min}, {f_max}] Hz must satisfy 0 < f_min <= f_max"
            )));
        }
        let freq = Uniform::new_inclusive(f_min, f_max).expect("validated band");
        let mut frequencies = Vec::with_capacity(n_os);
        let mut phases = Vec::with_capacity(n_os);
        for _ in 0..n_os {
            frequencies.push(freq.sample(rng));
            // [0, 2π): random::<f64>() is in [0, 1)
            phases.push(TAU * rng.random::<f64>());
        }
        Ok(Self {
            frequencies,
            phases,
            f_min,
            f_max,
        })
    }

    /// Bank with explicit frequencies (Hz) and phases (radians).
    pub fn from_parts(frequencies: Vec<f64>, phases: Vec<f64>) -> Result<Self> {
        if frequencies.len() != phases.len() {
            return Err(OdrcError::Argument(
                "frequencies and phases differ in length".into(),
            ));
        }
        let f_min = frequencies.iter().copied().fold(f64::INFINITY, f64::min);
        let f_max = frequencies
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            frequencies,
            phases: phases.into_iter().map(|p| p.rem_euclid(TAU)).collect(),
            f_min,
            f_max,
        })
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn band(&self) -> (f64, f64) {
        (self.f_min, self.f_max)
    }

    pub fn sample(&self, t_ms: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.sample_into(t_ms, &mut out);
        out
    }

    pub fn sample_into(&self, t_ms: f64, out: &mut [f64]) {
        let t = t_ms * 1e-3;
        for ((o, &f), &phi) in out.iter_mut().zip(&self.frequencies).zip(&self.phases) {
            *o = (TAU * f * t + phi).sin();
        }
    }
}

/// Construction parameters for [`NeuralOscillator`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeuralOscillatorParams {
    pub units: usize,
    pub gain: f64,
    pub connection_prob: f64,
    pub tau_ms: f64,
    /// Standard deviation of the onset-input weights.
    pub onset_gain: f64,
    pub max_resamples: usize,
}

impl Default for NeuralOscillatorParams {
    fn default() -> Self {
        Self {
            units: 100,
            gain: 1.2,
            connection_prob: 0.1,
            tau_ms: 20.0,
            onset_gain: 5.0,
            max_resamples: 50,
        }
    }
}

/// Fixed-point probe: 12 s run, of which the first 2 s are discarded.
pub const PROBE_TOTAL_MS: usize = 12_000;
pub const PROBE_WARMUP_MS: usize = 2_000;
pub const FIXED_POINT_WINDOW_MS: usize = 1_000;
pub const FIXED_POINT_TOLERANCE: f64 = 1e-3;

/// Small random tanh network used as a self-sustained oscillator.
#[derive(Debug, Clone)]
pub struct NeuralOscillator {
    weights: CsrMatrix,
    input_weights: Vec<f64>,
    initial_state: Vec<f64>,
    state: Vec<f64>,
    rates: Vec<f64>,
    tau_ms: f64,
    output_index: usize,
    attempts: usize,
}

impl NeuralOscillator {
    pub fn new(params: NeuralOscillatorParams, seed: u64) -> Result<Self> {
        Self::from_rng(params, &mut SeedStreams::new(seed).rng("neural-oscillator"))
    }

    /// Draws onset weights, initial state and output unit once, then draws
    /// recurrent weights until the probe run is not a fixed point.
    pub fn from_rng<R: Rng + ?Sized>(params: NeuralOscillatorParams, rng: &mut R) -> Result<Self> {
        let n = params.units;
        if n == 0 {
            return Err(OdrcError::Config(
                "neural oscillator needs at least one unit".into(),
            ));
        }
        if !(params.connection_prob > 0.0 && params.connection_prob <= 1.0) {
            return Err(OdrcError::Config(format!(
                "connection probability {} outside (0, 1]",
                params.connection_prob
            )));
        }
        if !(params.tau_ms > 0.0) {
            return Err(OdrcError::Config(
                "oscillator time constant must be positive".into(),
            ));
        }
        let input = Normal::new(0.0, params.onset_gain.abs()).expect("finite gain");
        let input_weights: Vec<f64> = (0..n).map(|_| input.sample(rng)).collect();
        let initial_state: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let output_index = rng.random_range(0..n);
        let sd = params.gain / (params.connection_prob * n as f64).sqrt();

        for attempt in 1..=params.max_resamples.max(1) {
            let weights = CsrMatrix::random(n, n, params.connection_prob, sd, rng);
            let mut osc = Self {
                weights,
                input_weights: input_weights.clone(),
                rates: initial_state.iter().map(|x| x.tanh()).collect(),
                state: initial_state.clone(),
                initial_state: initial_state.clone(),
                tau_ms: params.tau_ms,
                output_index,
                attempts: attempt,
            };
            let trace = osc.probe_trace();
            osc.reset();
            let fixed = detect_fixed_point(
                &trace[PROBE_WARMUP_MS..],
                FIXED_POINT_WINDOW_MS,
                FIXED_POINT_TOLERANCE,
            )?;
            if !fixed {
                return Ok(osc);
            }
        }
        Err(OdrcError::OscillatorConstruction {
            attempts: params.max_resamples.max(1),
        })
    }

    /// Builds an oscillator from explicit parts; no fixed-point check is made.
    pub fn from_parts(
        weights: CsrMatrix,
        input_weights: Vec<f64>,
        initial_state: Vec<f64>,
        tau_ms: f64,
        output_index: usize,
    ) -> Result<Self> {
        let n = weights.rows();
        crate::error::check_dim("oscillator input weights", n, input_weights.len())?;
        crate::error::check_dim("oscillator initial state", n, initial_state.len())?;
        if output_index >= n {
            return Err(OdrcError::Argument(format!(
                "output index {output_index} >= {n}"
            )));
        }
        Ok(Self {
            weights,
            input_weights,
            rates: initial_state.iter().map(|x| x.tanh()).collect(),
            state: initial_state.clone(),
            initial_state,
            tau_ms,
            output_index,
            attempts: 1,
        })
    }

    /// Output of the 12 s probe run used by the constructor, starting from the
    /// initial state at -250 ms with the onset pulse applied.
    pub fn probe_trace(&mut self) -> Vec<f64> {
        self.reset();
        (0..PROBE_TOTAL_MS)
            .map(|k| self.step(onset_signal(-250.0 + k as f64), 1.0))
            .collect()
    }

    pub fn reset(&mut self) {
        self.state.copy_from_slice(&self.initial_state);
        for (r, x) in self.rates.iter_mut().zip(&self.state) {
            *r = x.tanh();
        }
    }

    pub fn output(&self) -> f64 {
        self.rates[self.output_index]
    }

    /// One Euler step of `τ dx/dt = -x + W tanh(x) + w_in s`; returns the new output.
    pub fn step(&mut self, onset: f64, dt_ms: f64) -> f64 {
        let a = dt_ms / self.tau_ms;
        for (i, x) in self.state.iter_mut().enumerate() {
            let drive = self.weights.row_dot(i, &self.rates) + self.input_weights[i] * onset;
            *x = (1.0 - a) * *x + a * drive;
        }
        for (r, x) in self.rates.iter_mut().zip(&self.state) {
            *r = x.tanh();
        }
        self.output()
    }

    pub fn state(&self) -> &[f64] {
        &self.state
    }

    pub fn weights(&self) -> &CsrMatrix {
        &self.weights
    }

    pub fn input_weights(&self) -> &[f64] {
        &self.input_weights
    }

    pub fn output_index(&self) -> usize {
        self.output_index
    }

    pub fn tau_ms(&self) -> f64 {
        self.tau_ms
    }

    /// Number of recurrent weight draws it took to get an oscillating network.
    pub fn attempts(&self) -> usize {
        self.attempts
    }
}

/// True iff the trailing `window` samples of `trace` span less than `tolerance`.
pub fn detect_fixed_point(trace: &[f64], window: usize, tolerance: f64) -> Result<bool> {
    if window == 0 || trace.len() < window {
        return Err(OdrcError::Argument(format!(
            "trace of length {} shorter than window {window}",
            trace.len()
        )));
    }
    let tail = &trace[trace.len() - window..];
    let (lo, hi) = tail
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    Ok(hi - lo < tolerance)
}

/// Sign changes in `trace`, a crude frequency diagnostic.
pub fn zero_crossings(trace: &[f64]) -> usize {
    let mean = trace.iter().sum::<f64>() / trace.len().max(1) as f64;
    trace
        .windows(2)
        .filter(|w| (w[0] - mean) * (w[1] - mean) < 0.0)
        .count()
}

/// The drive vector source used by a network.
#[derive(Debug, Clone)]
pub enum OscillatorBank {
    Sine(SineBank),
    Neural(Vec<NeuralOscillator>),
    None,
}

impl OscillatorBank {
    pub fn len(&self) -> usize {
        match self {
            OscillatorBank::Sine(bank) => bank.len(),
            OscillatorBank::Neural(oscs) => oscs.len(),
            OscillatorBank::None => 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Returns every oscillator to its trial-start state.
    pub fn reset(&mut self) {
        if let OscillatorBank::Neural(oscs) = self {
            oscs.iter_mut().for_each(NeuralOscillator::reset);
        }
    }

    /// Current drive `o(t)`.
    pub fn drive_into(&self, t_ms: f64, out: &mut [f64]) {
        match self {
            OscillatorBank::Sine(bank) => bank.sample_into(t_ms, out),
            OscillatorBank::Neural(oscs) => {
                for (o, osc) in out.iter_mut().zip(oscs) {
                    *o = osc.output();
                }
            }
            OscillatorBank::None => {}
        }
    }

    /// Advances stateful oscillators by one step under onset input `s`.
    pub fn advance(&mut self, onset: f64, dt_ms: f64) {
        if let OscillatorBank::Neural(oscs) = self {
            for osc in oscs.iter_mut() {
                osc.step(onset, dt_ms);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn sine_values_at_origin() {
        let bank = SineBank::from_parts(vec![1.0, 0.5], vec![FRAC_PI_2, 0.0]).unwrap();
        let o = bank.sample(0.0);
        assert!((o[0] - 1.0).abs() < 1e-15);
        assert!(o[1].abs() < 1e-15);
    }

    #[test]
    fn empty_bank_samples_nothing() {
        let bank = SineBank::new(0, 0.1, 1.0, 1).unwrap();
        assert!(bank.sample(12.0).is_empty());
    }

    #[test]
    fn invalid_band_is_rejected() {
        assert!(SineBank::new(3, 0.0, 1.0, 1).is_err());
        assert!(SineBank::new(3, 2.0, 1.0, 1).is_err());
        assert!(SineBank::new(3, -1.0, 1.0, 1).is_err());
    }

    #[test]
    fn fixed_point_window_checks() {
        assert!(detect_fixed_point(&[0.3; 1500], 1000, 1e-3).unwrap());
        let sine: Vec<f64> = (0..2000).map(|k| (TAU * k as f64 / 1000.0).sin()).collect();
        assert!(!detect_fixed_point(&sine, 1000, 1e-3).unwrap());
        assert!(detect_fixed_point(&[0.0; 10], 1000, 1e-3).is_err());
    }

    #[test]
    fn zero_weight_oscillator_is_silent() {
        let osc = NeuralOscillator::from_parts(
            CsrMatrix::zeros(4, 4),
            vec![0.0; 4],
            vec![0.0; 4],
            20.0,
            2,
        );
        let mut osc = osc.unwrap();
        for _ in 0..10 {
            assert_eq!(osc.step(0.0, 1.0), 0.0);
        }
        assert!(osc.state().iter().all(|&x| x == 0.0));
    }
}
