//! Experiment configuration: a flat TOML document with explicit defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::SanoSawadaParams;
use crate::error::{OdrcError, Result};
use crate::oscillators::NeuralOscillatorParams;
use crate::reservoir::GainConfig;
use crate::targets::TaskKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OscillatorKind {
    Sine,
    Neural,
    None,
}

impl std::str::FromStr for OscillatorKind {
    type Err = OdrcError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sine" => Ok(OscillatorKind::Sine),
            "neural" => Ok(OscillatorKind::Neural),
            "none" => Ok(OscillatorKind::None),
            other => Err(OdrcError::Config(format!(
                "unknown oscillator kind {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Scaled-down sweeps that finish on one machine.
    Desk,
    /// Full-length sweeps (1–120 s timing, ten networks).
    Paper,
}

impl std::str::FromStr for Preset {
    type Err = OdrcError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Preset::Desk),
            "paper" => Ok(Preset::Paper),
            other => Err(OdrcError::Config(format!("unknown preset {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: TaskKind,
    pub oscillator: OscillatorKind,
    /// Optional label used in reports; derived from the setup when empty.
    pub condition: String,

    pub f_min: f64,
    pub f_max: f64,
    pub tau_nr_ms: f64,

    /// Reservoir size; 0 selects the task default (400 timing, 3000 chaotic).
    pub n: usize,
    pub n_os: usize,
    pub n_nr: usize,

    pub g: f64,
    pub g_os: f64,
    pub g_in: f64,
    pub g_fb: f64,
    pub g_nr: f64,
    pub p: f64,
    pub tau_ms: f64,
    pub alpha: f64,

    pub feedback: bool,
    pub noise: f64,

    /// Timing intervals in seconds.
    pub intervals_s: Vec<f64>,
    /// Chaotic tasks: training length and free-running test length, in ms.
    pub train_ms: usize,
    pub test_ms: usize,
    /// Length of target series used for the reference return map, in ms.
    pub reference_ms: usize,

    pub repetitions: usize,
    pub reset_p_between_repetitions: bool,
    pub test_trials: usize,
    pub seeds: Vec<u64>,
    pub max_resamples: usize,

    pub ss_neighbors: usize,
    pub ss_radius_fraction: f64,
    pub ss_evolution_step: usize,
    pub ss_theiler_window: usize,
    /// KS grid indices used for three-dimensional Lyapunov analysis.
    pub ks_probe: [usize; 3],

    pub out_dir: PathBuf,
    pub plots: bool,

    /// Every mean R² must reach this value (timing: every interval; chaos: task period).
    pub min_mean_r2: Option<f64>,
    /// Every mean R² must stay below this value.
    pub max_mean_r2: Option<f64>,
    pub min_capacity: Option<f64>,
    /// Chaos: largest accepted mean return-map distance of the generalization segment.
    pub max_return_map_distance: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            task: TaskKind::Timing,
            oscillator: OscillatorKind::Sine,
            condition: String::new(),
            f_min: 0.1,
            f_max: 1.0,
            tau_nr_ms: 20.0,
            n: 0,
            n_os: 10,
            n_nr: 100,
            g: 1.5,
            g_os: 0.5,
            g_in: 5.0,
            g_fb: 3.0,
            g_nr: 1.2,
            p: 0.1,
            tau_ms: 10.0,
            alpha: 1.0,
            feedback: true,
            noise: 0.0,
            intervals_s: vec![1.0, 2.0, 5.0, 10.0],
            train_ms: 20_000,
            test_ms: 40_000,
            reference_ms: 200_000,
            repetitions: 10,
            reset_p_between_repetitions: false,
            test_trials: 1,
            seeds: vec![1, 2, 3, 4, 5],
            max_resamples: 50,
            ss_neighbors: 30,
            ss_radius_fraction: 0.02,
            ss_evolution_step: 10,
            ss_theiler_window: 100,
            ks_probe: [0, 21, 42],
            out_dir: PathBuf::from("results"),
            plots: false,
            min_mean_r2: None,
            max_mean_r2: None,
            min_capacity: None,
            max_return_map_distance: None,
        }
    }
}

impl ExperimentConfig {
    /// Defaults for `task` under `preset`.
    pub fn preset(preset: Preset, task: TaskKind) -> Self {
        let mut cfg = Self {
            task,
            ..Self::default()
        };
        if task.is_chaotic() {
            cfg.f_min = 10.0;
            cfg.f_max = 25.0;
            cfg.tau_nr_ms = 2.0;
            cfg.seeds = vec![1, 2, 3];
        }
        if preset == Preset::Paper {
            cfg.intervals_s = vec![
                1.0, 2.0, 5.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 100.0, 110.0,
                120.0,
            ];
            cfg.seeds = (1..=10).collect();
        }
        cfg
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| OdrcError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(OdrcError::Config(msg));
        if self.oscillator == OscillatorKind::Sine
            && !(self.f_min > 0.0 && self.f_min <= self.f_max)
        {
            return bad(format!(
                "band [{}, {}] Hz is invalid",
                self.f_min, self.f_max
            ));
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return bad(format!("connection probability {} outside (0, 1]", self.p));
        }
        if !(self.tau_ms > 0.0 && self.tau_nr_ms > 0.0) {
            return bad("time constants must be positive".into());
        }
        if !(self.alpha > 0.0) {
            return bad("alpha must be positive".into());
        }
        if self.noise < 0.0 || !self.noise.is_finite() {
            return bad(format!("noise amplitude {} must be >= 0", self.noise));
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        if self.test_trials == 0 {
            return bad("test_trials must be at least 1".into());
        }
        if self.task == TaskKind::Timing {
            if self.intervals_s.is_empty() {
                return bad("intervals_s must not be empty".into());
            }
            if self.intervals_s.windows(2).any(|w| w[1] <= w[0]) || self.intervals_s[0] <= 0.0 {
                return bad("intervals_s must be positive and strictly increasing".into());
            }
        } else {
            if self.train_ms == 0 || self.test_ms <= self.train_ms {
                return bad("chaotic tasks need 0 < train_ms < test_ms".into());
            }
            if self.task == TaskKind::Ks
                && self.ks_probe.iter().any(|&k| k >= crate::targets::KS_GRID)
            {
                return bad("ks_probe indices must be below 64".into());
            }
        }
        Ok(())
    }

    /// Resolved reservoir size.
    pub fn reservoir_size(&self) -> usize {
        match (self.n, self.task) {
            (0, TaskKind::Timing) => 400,
            (0, _) => 3000,
            (n, _) => n,
        }
    }

    pub fn readout_size(&self) -> usize {
        self.task.dims()
    }

    /// Oscillators actually driving the reservoir.
    pub fn oscillator_count(&self) -> usize {
        match self.oscillator {
            OscillatorKind::None => 0,
            _ => self.n_os,
        }
    }

    pub fn gains(&self) -> GainConfig {
        GainConfig {
            g: self.g,
            g_os: self.g_os,
            g_in: self.g_in,
            g_fb: self.g_fb,
        }
    }

    pub fn neural_params(&self) -> NeuralOscillatorParams {
        NeuralOscillatorParams {
            units: self.n_nr,
            gain: self.g_nr,
            connection_prob: self.p,
            tau_ms: self.tau_nr_ms,
            onset_gain: self.g_in,
            max_resamples: self.max_resamples,
        }
    }

    pub fn sano_sawada(&self) -> SanoSawadaParams {
        SanoSawadaParams {
            neighbors: self.ss_neighbors,
            radius_fraction: self.ss_radius_fraction,
            evolution_step: self.ss_evolution_step,
            theiler_window: self.ss_theiler_window,
            ..SanoSawadaParams::default()
        }
    }

    /// Report label, e.g. `sine_0.1-1Hz_fb` or `none_nofb`.
    pub fn condition_label(&self) -> String {
        if !self.condition.is_empty() {
            return self.condition.clone();
        }
        let osc = match self.oscillator {
            OscillatorKind::Sine => format!("sine_{}-{}Hz", self.f_min, self.f_max),
            OscillatorKind::Neural => format!("neural_tau{}ms", self.tau_nr_ms),
            OscillatorKind::None => "none".to_string(),
        };
        let fb = if self.feedback { "fb" } else { "nofb" };
        let mut label = format!("{osc}_{fb}");
        if self.noise > 0.0 {
            label.push_str(&format!("_noise{}", self.noise));
        }
        label
    }
}
