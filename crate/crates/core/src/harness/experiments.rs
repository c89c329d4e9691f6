//! Experiment drivers: timing curves, noise and parameter sweeps, chaotic
//! prediction with return-map and Lyapunov analysis.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    capacity_per_seed, lyapunov_benettin_oracle, lyapunov_sano_sawada, mean, r_squared,
    return_map_distance, sd, successive_maxima, BenettinParams, LyapunovSpectrum, OdeSystem,
    PerformanceCurve, RSquared, ReturnMap,
};
use crate::error::{OdrcError, Result};
use crate::targets::ode::Vec3;
use crate::targets::{chaotic_series, timing_target, TargetSeries, TaskKind, TimingSpec};

use super::config::ExperimentConfig;
use super::trial::{
    run_trial, test_index, train_readout, Network, TrialMode, TrialRecord, TrialSpec,
};

/// One (interval, seed) cell of a timing experiment.
#[derive(Debug, Clone)]
pub struct TimingCell {
    pub interval_s: f64,
    pub seed: u64,
    /// Mean test R² over the configured test trials.
    pub r2: f64,
    pub diverged: bool,
    pub test: Vec<TrialRecord>,
}

#[derive(Debug, Clone)]
pub struct TimingReport {
    pub condition: String,
    pub config: ExperimentConfig,
    pub curve: PerformanceCurve,
    pub capacity: f64,
    pub capacity_sd: f64,
    pub cells: Vec<TimingCell>,
}

impl TimingReport {
    pub fn mean_r2(&self) -> Vec<f64> {
        self.curve.mean()
    }
}

fn timing_cells_for_seed(
    config: &ExperimentConfig,
    seed: u64,
    condition: &str,
) -> Result<Vec<TimingCell>> {
    let mut net = Network::build(config, seed)?;
    config
        .intervals_s
        .iter()
        .map(|&interval_s| {
            let spec = TimingSpec::new(interval_s * 1000.0);
            let target = timing_target(&spec)?;
            let end = target.len() - 1;
            let (mut readout, _rls, train) = train_readout(
                &mut net,
                config,
                &target,
                TrialSpec::whole(end, 0),
                condition,
            )?;
            let train_diverged = train.iter().any(|r| r.diverged);
            let test = (0..config.test_trials)
                .map(|k| {
                    run_trial(
                        &mut net,
                        &mut readout,
                        None,
                        &target,
                        TrialSpec::whole(end, test_index(config, k)),
                        TrialMode::Test,
                        condition,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            let r2 = mean(&test.iter().map(|t| t.r2.mean).collect::<Vec<_>>());
            Ok(TimingCell {
                interval_s,
                seed,
                r2,
                diverged: train_diverged || test.iter().any(|t| t.diverged),
                test,
            })
        })
        .collect()
}

/// R² versus interval over all seeds, plus the timing capacity.
pub fn run_timing_experiment(config: &ExperimentConfig) -> Result<TimingReport> {
    config.validate()?;
    if config.task != TaskKind::Timing {
        return Err(OdrcError::Config(
            "timing experiment needs task = \"timing\"".into(),
        ));
    }
    let condition = config.condition_label();
    let per_seed: Vec<Vec<TimingCell>> = config
        .seeds
        .par_iter()
        .map(|&seed| timing_cells_for_seed(config, seed, &condition))
        .collect::<Result<_>>()?;
    let rows: Vec<Vec<f64>> = (0..config.intervals_s.len())
        .map(|i| per_seed.iter().map(|cells| cells[i].r2).collect())
        .collect();
    let curve = PerformanceCurve::new(config.intervals_s.clone(), rows)?;
    let upper = *config.intervals_s.last().expect("validated nonempty");
    let caps = capacity_per_seed(&curve, upper)?;
    let mut cells: Vec<TimingCell> = per_seed.into_iter().flatten().collect();
    cells.sort_by(|a, b| {
        a.interval_s
            .total_cmp(&b.interval_s)
            .then(a.seed.cmp(&b.seed))
    });
    Ok(TimingReport {
        condition,
        config: config.clone(),
        capacity: mean(&caps),
        capacity_sd: sd(&caps),
        curve,
        cells,
    })
}

/// Reference amplitude for normalized capacities.
pub const NOISE_ANCHOR: f64 = 1e-3;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseRow {
    pub noise: f64,
    pub capacity: f64,
    pub sd: f64,
    pub normalized: f64,
}

#[derive(Debug, Clone)]
pub struct NoiseSweepReport {
    pub rows: Vec<NoiseRow>,
    pub reports: Vec<TimingReport>,
}

/// Timing capacity at each noise amplitude, normalized by the capacity at 1e-3.
pub fn run_noise_sweep(config: &ExperimentConfig, grid: &[f64]) -> Result<NoiseSweepReport> {
    if grid.is_empty() || grid.iter().any(|&v| !(NOISE_ANCHOR..=10.0).contains(&v)) {
        return Err(OdrcError::Config(
            "noise grid must be nonempty and within [1e-3, 10]".into(),
        ));
    }
    let mut amplitudes = grid.to_vec();
    if !amplitudes.contains(&NOISE_ANCHOR) {
        amplitudes.insert(0, NOISE_ANCHOR);
    }
    let reports = amplitudes
        .iter()
        .map(|&noise| {
            run_timing_experiment(&ExperimentConfig {
                noise,
                ..config.clone()
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let anchor = reports[amplitudes
        .iter()
        .position(|&v| v == NOISE_ANCHOR)
        .expect("inserted")]
    .capacity;
    let rows = amplitudes
        .iter()
        .zip(&reports)
        .filter(|(v, _)| grid.contains(v))
        .map(|(&noise, r)| NoiseRow {
            noise,
            capacity: r.capacity,
            sd: r.capacity_sd,
            normalized: if anchor > 0.0 {
                r.capacity / anchor
            } else {
                f64::NAN
            },
        })
        .collect();
    Ok(NoiseSweepReport { rows, reports })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Band,
    NOs,
    GOs,
    G,
    TauNr,
}

impl std::str::FromStr for SweepAxis {
    type Err = OdrcError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "band" => Ok(SweepAxis::Band),
            "n_os" => Ok(SweepAxis::NOs),
            "g_os" => Ok(SweepAxis::GOs),
            "g" => Ok(SweepAxis::G),
            "tau_nr" => Ok(SweepAxis::TauNr),
            other => Err(OdrcError::Config(format!("unknown sweep axis {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SweepValue {
    Scalar(f64),
    Band(f64, f64),
}

impl SweepValue {
    /// Parses `1.5` or, for bands, `0.1-1`.
    pub fn parse(axis: SweepAxis, s: &str) -> Result<Self> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| OdrcError::Config(format!("bad sweep value {t:?}")))
        };
        match axis {
            SweepAxis::Band => {
                let (lo, hi) = s.split_once(['-', ':']).ok_or_else(|| {
                    OdrcError::Config(format!("band value {s:?} must look like 0.1-1"))
                })?;
                Ok(SweepValue::Band(num(lo)?, num(hi)?))
            }
            _ => Ok(SweepValue::Scalar(num(s)?)),
        }
    }

    pub fn label(&self) -> String {
        match self {
            SweepValue::Scalar(v) => v.to_string(),
            SweepValue::Band(lo, hi) => format!("{lo}-{hi}"),
        }
    }
}

/// `config` with one parameter replaced.
pub fn apply_sweep(
    config: &ExperimentConfig,
    axis: SweepAxis,
    value: SweepValue,
) -> Result<ExperimentConfig> {
    let mut c = config.clone();
    c.condition.clear();
    match (axis, value) {
        (SweepAxis::Band, SweepValue::Band(lo, hi)) => {
            c.f_min = lo;
            c.f_max = hi;
        }
        (SweepAxis::NOs, SweepValue::Scalar(v)) if v >= 0.0 && v.fract() == 0.0 => {
            c.n_os = v as usize
        }
        (SweepAxis::GOs, SweepValue::Scalar(v)) => c.g_os = v,
        (SweepAxis::G, SweepValue::Scalar(v)) => c.g = v,
        (SweepAxis::TauNr, SweepValue::Scalar(v)) => c.tau_nr_ms = v,
        (axis, value) => {
            return Err(OdrcError::Config(format!(
                "value {value:?} does not fit axis {axis:?}"
            )));
        }
    }
    c.validate()?;
    Ok(c)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: SweepAxis,
    pub value: String,
    pub capacity: f64,
    pub sd: f64,
}

#[derive(Debug, Clone)]
pub struct ParameterSweepReport {
    pub rows: Vec<SweepRow>,
    pub reports: Vec<TimingReport>,
}

/// One timing-capacity estimate per value of `axis`, all else at `config`.
pub fn run_parameter_sweep(
    config: &ExperimentConfig,
    axis: SweepAxis,
    values: &[SweepValue],
) -> Result<ParameterSweepReport> {
    if values.is_empty() {
        return Err(OdrcError::Config(
            "parameter sweep needs at least one value".into(),
        ));
    }
    let mut rows = Vec::with_capacity(values.len());
    let mut reports = Vec::with_capacity(values.len());
    for &value in values {
        let cfg = apply_sweep(config, axis, value)?;
        let mut report = run_timing_experiment(&cfg)?;
        report.condition = format!("{}={}", axis_name(axis), value.label());
        rows.push(SweepRow {
            axis,
            value: value.label(),
            capacity: report.capacity,
            sd: report.capacity_sd,
        });
        reports.push(report);
    }
    Ok(ParameterSweepReport { rows, reports })
}

pub fn axis_name(axis: SweepAxis) -> &'static str {
    match axis {
        SweepAxis::Band => "band",
        SweepAxis::NOs => "n_os",
        SweepAxis::GOs => "g_os",
        SweepAxis::G => "g",
        SweepAxis::TauNr => "tau_nr",
    }
}

/// Per-seed outcome of a chaotic prediction run.
#[derive(Debug, Clone)]
pub struct ChaosSeedResult {
    pub seed: u64,
    pub test: TrialRecord,
    /// R² over the task (training-length) period of the test run.
    pub r2_task: RSquared,
    pub map_reproduction: ReturnMap,
    pub map_generalization: ReturnMap,
    pub distance_reproduction: f64,
    pub distance_generalization: f64,
    pub spectrum_reproduction: std::result::Result<LyapunovSpectrum, String>,
    pub spectrum_generalization: std::result::Result<LyapunovSpectrum, String>,
}

#[derive(Debug, Clone)]
pub struct ChaosReport {
    pub condition: String,
    pub config: ExperimentConfig,
    pub target: TargetSeries,
    pub target_map: ReturnMap,
    /// Sano–Sawada spectrum of the target over the generalization window.
    pub target_spectrum: std::result::Result<LyapunovSpectrum, String>,
    /// Tangent-space ground truth (Lorenz and Rössler only).
    pub oracle_spectrum: Option<LyapunovSpectrum>,
    pub results: Vec<ChaosSeedResult>,
}

impl ChaosReport {
    pub fn mean_task_r2(&self) -> f64 {
        mean(
            &self
                .results
                .iter()
                .map(|r| r.r2_task.mean)
                .collect::<Vec<_>>(),
        )
    }
}

/// Coordinate whose maxima form the return map (z for 3-d flows).
pub fn map_coordinate(config: &ExperimentConfig) -> usize {
    match config.task {
        TaskKind::Ks => config.ks_probe[0],
        _ => 2,
    }
}

fn lyapunov_columns(config: &ExperimentConfig) -> [usize; 3] {
    match config.task {
        TaskKind::Ks => config.ks_probe,
        _ => [0, 1, 2],
    }
}

fn rows3(data: &[f64], dims: usize, cols: [usize; 3], from: usize, to: usize) -> Vec<Vec3> {
    (from..to)
        .map(|t| {
            let row = &data[t * dims..(t + 1) * dims];
            [row[cols[0]], row[cols[1]], row[cols[2]]]
        })
        .collect()
}

fn column(data: &[f64], dims: usize, d: usize, from: usize, to: usize) -> Vec<f64> {
    (from..to).map(|t| data[t * dims + d]).collect()
}

fn spectrum_of(
    config: &ExperimentConfig,
    points: &[Vec3],
) -> std::result::Result<LyapunovSpectrum, String> {
    let dt = config.task.model_time_per_sample().expect("chaotic task");
    lyapunov_sano_sawada(points, dt, &config.sano_sawada()).map_err(|e| e.to_string())
}

/// Trains on the first `train_ms` of the target, then runs a free test for
/// `test_ms`, splitting it at `train_ms` into reproduction and
/// generalization segments.
pub fn run_chaos_experiment(config: &ExperimentConfig) -> Result<ChaosReport> {
    config.validate()?;
    if !config.task.is_chaotic() {
        return Err(OdrcError::Config(
            "chaos experiment needs a chaotic task".into(),
        ));
    }
    let condition = config.condition_label();
    let total = (config.test_ms + 1).max(config.reference_ms);
    let target = chaotic_series(config.task, total)?;
    let dims = target.dims();
    let map_dim = map_coordinate(config);
    let cols = lyapunov_columns(config);
    let target_map = successive_maxima(&target.column(map_dim))?;
    let target_spectrum = spectrum_of(
        config,
        &rows3(target.data(), dims, cols, config.train_ms, config.test_ms),
    );
    let oracle_spectrum = match config.task {
        TaskKind::Lorenz => Some(lyapunov_benettin_oracle(
            OdeSystem::Lorenz,
            &BenettinParams::new(1000.0),
        )),
        TaskKind::Rossler => Some(lyapunov_benettin_oracle(
            OdeSystem::Rossler,
            &BenettinParams::new(5000.0),
        )),
        _ => None,
    };

    let results = config
        .seeds
        .par_iter()
        .map(|&seed| chaos_seed(config, seed, &target, &target_map, &condition))
        .collect::<Result<Vec<_>>>()?;
    Ok(ChaosReport {
        condition,
        config: config.clone(),
        target,
        target_map,
        target_spectrum,
        oracle_spectrum,
        results,
    })
}

fn chaos_seed(
    config: &ExperimentConfig,
    seed: u64,
    target: &TargetSeries,
    target_map: &ReturnMap,
    condition: &str,
) -> Result<ChaosSeedResult> {
    let mut net = Network::build(config, seed)?;
    let (train_ms, test_ms) = (config.train_ms, config.test_ms);
    let train_spec = TrialSpec {
        end_ms: train_ms,
        train_end_ms: train_ms,
        eval_end_ms: train_ms,
        index: 0,
    };
    let (mut readout, _rls, _train) =
        train_readout(&mut net, config, target, train_spec, condition)?;
    let test_spec = TrialSpec {
        end_ms: test_ms,
        train_end_ms: 0,
        eval_end_ms: train_ms,
        index: test_index(config, 0),
    };
    let test = run_trial(
        &mut net,
        &mut readout,
        None,
        target,
        test_spec,
        TrialMode::Test,
        condition,
    )?;
    let dims = test.dims;
    let r2_task = if test.diverged {
        test.r2.clone()
    } else {
        r_squared(
            &test.output[..train_ms * dims],
            &test.target[..train_ms * dims],
            dims,
        )?
    };
    let map_dim = map_coordinate(config);
    let map_reproduction = successive_maxima(&column(&test.output, dims, map_dim, 0, train_ms))?;
    let map_generalization =
        successive_maxima(&column(&test.output, dims, map_dim, train_ms, test_ms))?;
    let cols = lyapunov_columns(config);
    let (spectrum_reproduction, spectrum_generalization) = if test.diverged {
        let msg = "test run diverged".to_string();
        (Err(msg.clone()), Err(msg))
    } else {
        (
            spectrum_of(config, &rows3(&test.output, dims, cols, 0, train_ms)),
            spectrum_of(config, &rows3(&test.output, dims, cols, train_ms, test_ms)),
        )
    };
    Ok(ChaosSeedResult {
        seed,
        r2_task,
        distance_reproduction: return_map_distance(&map_reproduction, target_map),
        distance_generalization: return_map_distance(&map_generalization, target_map),
        map_reproduction,
        map_generalization,
        spectrum_reproduction,
        spectrum_generalization,
        test,
    })
}
