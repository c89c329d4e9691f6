//! One simulated trial: oscillators → reservoir → readout with feedback.

use std::time::{Duration, Instant};

use crate::analysis::{r_squared, RSquared};
use crate::error::{OdrcError, Result};
use crate::oscillators::{NeuralOscillator, OscillatorBank, SineBank};
use crate::reservoir::{
    onset_signal, Noise, ReservoirState, ReservoirWeights, DT_MS, SIM_START_MS,
};
use crate::seed::SeedStreams;
use crate::targets::TargetSeries;
use crate::training::{fires_at, Readout, RlsState};

use super::config::{ExperimentConfig, OscillatorKind};

/// States beyond this magnitude count as divergence.
pub const DIVERGENCE_LIMIT: f64 = 1e6;

/// Fixed parts of one network instance: weights and oscillators.
#[derive(Debug, Clone)]
pub struct Network {
    pub seed: u64,
    pub weights: ReservoirWeights,
    pub oscillators: OscillatorBank,
    pub streams: SeedStreams,
    pub tau_ms: f64,
    pub noise: f64,
    pub feedback: bool,
}

impl Network {
    pub fn build(config: &ExperimentConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let streams = SeedStreams::new(seed);
        let n_os = config.oscillator_count();
        let weights = ReservoirWeights::from_streams(
            config.reservoir_size(),
            n_os,
            config.readout_size(),
            config.gains(),
            config.p,
            &streams,
        )?;
        let oscillators = match config.oscillator {
            OscillatorKind::Sine => OscillatorBank::Sine(SineBank::from_rng(
                n_os,
                config.f_min,
                config.f_max,
                &mut streams.rng("oscillators.sine"),
            )?),
            OscillatorKind::Neural => OscillatorBank::Neural(
                (0..n_os)
                    .map(|i| {
                        NeuralOscillator::from_rng(
                            config.neural_params(),
                            &mut streams.indexed("oscillators.neural", i as u64),
                        )
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
            OscillatorKind::None => OscillatorBank::None,
        };
        Ok(Self {
            seed,
            weights,
            oscillators,
            streams,
            tau_ms: config.tau_ms,
            noise: config.noise,
            feedback: config.feedback,
        })
    }

    pub fn n(&self) -> usize {
        self.weights.n()
    }

    pub fn n_ro(&self) -> usize {
        self.weights.n_ro()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialMode {
    Train,
    Test,
}

/// Result of one trial. `output` and `target` are aligned row-major
/// `T × dims` arrays covering `t = 0 ..= end` ms.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub seed: u64,
    pub condition: String,
    pub trial_index: u64,
    pub dims: usize,
    pub output: Vec<f64>,
    pub target: Vec<f64>,
    /// R² over the evaluation window.
    pub r2: RSquared,
    pub diverged: bool,
    /// RLS updates applied during this trial.
    pub updates: u64,
    pub wall_time: Duration,
}

impl TrialRecord {
    pub fn len(&self) -> usize {
        self.output.len() / self.dims
    }

    pub fn is_empty(&self) -> bool {
        self.output.is_empty()
    }

    pub fn output_column(&self, d: usize) -> Vec<f64> {
        self.output
            .iter()
            .skip(d)
            .step_by(self.dims)
            .copied()
            .collect()
    }
}

/// Trial geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSpec {
    /// Simulation runs from -250 ms to `end_ms` inclusive.
    pub end_ms: usize,
    /// RLS fires on odd `t` in `[1, train_end_ms]` in train mode.
    pub train_end_ms: usize,
    /// R² is evaluated on rows `[0, eval_end_ms)`.
    pub eval_end_ms: usize,
    pub index: u64,
}

impl TrialSpec {
    pub fn whole(end_ms: usize, index: u64) -> Self {
        Self {
            end_ms,
            train_end_ms: end_ms,
            eval_end_ms: end_ms + 1,
            index,
        }
    }
}

/// Simulates one trial from a fresh random initial state.
///
/// In train mode `trainer` must be present and the readout is updated on the
/// every-other-step cadence; in test mode no update fires. Divergence is
/// recorded, scores R² = 0, and is not an error.
pub fn run_trial(
    net: &mut Network,
    readout: &mut Readout,
    mut trainer: Option<&mut RlsState>,
    target: &TargetSeries,
    spec: TrialSpec,
    mode: TrialMode,
    condition: &str,
) -> Result<TrialRecord> {
    let started = Instant::now();
    let dims = net.n_ro();
    if target.dims() != dims || readout.n_ro() != dims || readout.n() != net.n() {
        return Err(OdrcError::Argument(
            "network, readout and target dimensions disagree".into(),
        ));
    }
    if target.len() < spec.end_ms + 1 {
        return Err(OdrcError::Argument(format!(
            "target has {} rows, trial needs {}",
            target.len(),
            spec.end_ms + 1
        )));
    }
    if mode == TrialMode::Train && trainer.is_none() {
        return Err(OdrcError::Argument(
            "train mode needs an RLS trainer".into(),
        ));
    }
    let updates_before = trainer.as_ref().map_or(0, |t| t.updates());

    net.oscillators.reset();
    let mut state =
        ReservoirState::from_rng(net.n(), &mut net.streams.indexed("trial.state", spec.index))?;
    let mut noise = Noise::new(net.noise, net.streams.indexed("trial.noise", spec.index));
    let mut drive = vec![0.0; net.oscillators.len()];
    let mut y = vec![0.0; dims];
    let rows = spec.end_ms + 1;
    let mut output = Vec::with_capacity(rows * dims);
    let mut diverged = false;

    let start = SIM_START_MS as i64;
    for t in start..=spec.end_ms as i64 {
        let tf = t as f64;
        net.oscillators.drive_into(tf, &mut drive);
        let s = onset_signal(tf);
        readout.output_into(state.r(), &mut y)?;
        if t >= 0 {
            output.extend_from_slice(&y);
        }
        if mode == TrialMode::Train && fires_at(t, spec.train_end_ms as i64) {
            let rls = trainer.as_deref_mut().expect("checked above");
            if rls
                .update(readout, state.r(), target.row(t as usize))
                .is_err()
            {
                diverged = true;
                break;
            }
        }
        let fb = if net.feedback {
            Some(y.as_slice())
        } else {
            None
        };
        state.step(
            &net.weights,
            &drive,
            s,
            fb,
            Some(&mut noise),
            DT_MS,
            net.tau_ms,
        )?;
        net.oscillators.advance(s, DT_MS);
        let m = state.max_abs_x();
        if !(m <= DIVERGENCE_LIMIT) {
            diverged = true;
            break;
        }
    }

    // pad a diverged trial so that the record stays aligned
    output.resize(rows * dims, 0.0);
    let target_rows = target.data()[..rows * dims].to_vec();
    let eval = spec.eval_end_ms.min(rows) * dims;
    let r2 = if diverged {
        RSquared {
            per_dim: vec![0.0; dims],
            mean: 0.0,
            degenerate: true,
        }
    } else {
        r_squared(&output[..eval], &target_rows[..eval], dims)?
    };
    let updates = trainer.as_ref().map_or(0, |t| t.updates()) - updates_before;
    Ok(TrialRecord {
        seed: net.seed,
        condition: condition.to_string(),
        trial_index: spec.index,
        dims,
        output,
        target: target_rows,
        r2,
        diverged,
        updates,
        wall_time: started.elapsed(),
    })
}

/// Trains a fresh readout over `repetitions` trials on `target`.
///
/// Returns the readout, the trainer (for inspection) and the per-repetition
/// records. `P` persists across repetitions unless `reset_p` is set.
pub fn train_readout(
    net: &mut Network,
    config: &ExperimentConfig,
    target: &TargetSeries,
    spec: TrialSpec,
    condition: &str,
) -> Result<(Readout, RlsState, Vec<TrialRecord>)> {
    let mut readout = Readout::zeros(net.n_ro(), net.n());
    let mut rls = RlsState::new(net.n(), config.alpha)?;
    let mut records = Vec::with_capacity(config.repetitions);
    for rep in 0..config.repetitions {
        if config.reset_p_between_repetitions && rep > 0 {
            rls.reset();
        }
        let spec = TrialSpec {
            index: rep as u64,
            ..spec
        };
        let rec = run_trial(
            net,
            &mut readout,
            Some(&mut rls),
            target,
            spec,
            TrialMode::Train,
            condition,
        )?;
        let diverged = rec.diverged;
        records.push(rec);
        if diverged {
            break;
        }
    }
    Ok((readout, rls, records))
}

/// Index of the first test trial, disjoint from every training repetition.
pub fn test_index(config: &ExperimentConfig, k: usize) -> u64 {
    (config.repetitions + k) as u64 + 1_000_000
}
