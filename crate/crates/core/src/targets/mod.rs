//! Target time series: the motor-timing pulse and the Lorenz, Rössler and
//! Kuramoto–Sivashinsky chaotic series. One target sample is one
//! millisecond of simulation time.

pub mod ks;
pub mod ode;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{OdrcError, Result};
use ode::{integrate_sampled, Flow3, Lorenz, Rossler, Vec3};

/// Magnitude bound of every normalized target.
pub const NORMALIZED_MAX: f64 = 0.8;
/// Kept samples discarded before a chaotic series starts.
pub const BURN_IN_STEPS: usize = 3000;
/// RK4 step for the Lorenz and Rössler flows, in model time.
pub const ODE_STEP: f64 = 0.001;
pub const LORENZ_DOWNSAMPLE: usize = 5;
pub const ROSSLER_DOWNSAMPLE: usize = 15;
pub const ODE_INITIAL_STATE: Vec3 = [0.1, 0.0, 0.0];
pub const KS_GRID: usize = 64;
pub const KS_LENGTH: f64 = 22.0;
pub const KS_STEP: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Timing,
    Lorenz,
    Rossler,
    Ks,
}

impl TaskKind {
    pub fn label(&self) -> &'static str {
        match self {
            TaskKind::Timing => "timing",
            TaskKind::Lorenz => "lorenz",
            TaskKind::Rossler => "rossler",
            TaskKind::Ks => "ks",
        }
    }

    pub fn dims(&self) -> usize {
        match self {
            TaskKind::Timing => 1,
            TaskKind::Lorenz | TaskKind::Rossler => 3,
            TaskKind::Ks => KS_GRID,
        }
    }

    pub fn is_chaotic(&self) -> bool {
        !matches!(self, TaskKind::Timing)
    }

    /// Model time advanced by one target sample (1 ms).
    pub fn model_time_per_sample(&self) -> Option<f64> {
        match self {
            TaskKind::Timing => None,
            TaskKind::Lorenz => Some(ODE_STEP * LORENZ_DOWNSAMPLE as f64),
            TaskKind::Rossler => Some(ODE_STEP * ROSSLER_DOWNSAMPLE as f64),
            TaskKind::Ks => Some(KS_STEP),
        }
    }
}

impl std::str::FromStr for TaskKind {
    type Err = OdrcError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "timing" => Ok(TaskKind::Timing),
            "lorenz" => Ok(TaskKind::Lorenz),
            "rossler" => Ok(TaskKind::Rossler),
            "ks" => Ok(TaskKind::Ks),
            other => Err(OdrcError::Config(format!("unknown task kind {other:?}"))),
        }
    }
}

/// A `T × dims` series sampled every millisecond, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSeries {
    data: Vec<f64>,
    dims: usize,
    label: String,
}

impl TargetSeries {
    pub fn new(data: Vec<f64>, dims: usize, label: impl Into<String>) -> Result<Self> {
        if dims == 0 || !data.len().is_multiple_of(dims) {
            return Err(OdrcError::Argument(format!(
                "{} values do not form rows of {dims}",
                data.len()
            )));
        }
        Ok(Self {
            data,
            dims,
            label: label.into(),
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], label: impl Into<String>) -> Result<Self> {
        let dims = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dims) {
            return Err(OdrcError::Argument("ragged target rows".into()));
        }
        Self::new(rows.concat(), dims, label)
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dims
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Always one millisecond.
    pub fn dt_ms(&self) -> f64 {
        1.0
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.data[t * self.dims..(t + 1) * self.dims]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, d: usize) -> Vec<f64> {
        self.data
            .iter()
            .skip(d)
            .step_by(self.dims)
            .copied()
            .collect()
    }

    /// Rows `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> TargetSeries {
        TargetSeries {
            data: self.data[start * self.dims..end * self.dims].to_vec(),
            dims: self.dims,
            label: self.label.clone(),
        }
    }

    /// Selected columns, in the given order.
    pub fn select(&self, columns: &[usize]) -> TargetSeries {
        let mut data = Vec::with_capacity(self.len() * columns.len());
        for t in 0..self.len() {
            let row = self.row(t);
            data.extend(columns.iter().map(|&c| row[c]));
        }
        TargetSeries {
            data,
            dims: columns.len(),
            label: self.label.clone(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// One row per ms: `t_ms, d0, d1, ...`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec!["t_ms".to_string()];
        header.extend((0..self.dims).map(|d| format!("d{d}")));
        w.write_record(&header)?;
        for t in 0..self.len() {
            let mut rec = vec![t.to_string()];
            rec.extend(self.row(t).iter().map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| OdrcError::io(path, e))?;
        Ok(())
    }

    pub fn read_csv(path: &Path, label: impl Into<String>) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path)?;
        let dims = rdr.headers()?.len().saturating_sub(1);
        let mut data = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            for field in rec.iter().skip(1) {
                data.push(field.parse::<f64>().map_err(|e| {
                    OdrcError::Argument(format!("bad target value {field:?}: {e}"))
                })?);
            }
        }
        Self::new(data, dims, label)
    }
}

/// Motor-timing target: a Gaussian peak on a constant baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingSpec {
    pub interval_ms: f64,
    pub peak_amplitude: f64,
    pub peak_sd_ms: f64,
    pub baseline: f64,
    pub tail_ms: f64,
}

impl TimingSpec {
    pub fn new(interval_ms: f64) -> Self {
        Self {
            interval_ms,
            peak_amplitude: 1.0,
            peak_sd_ms: 30.0,
            baseline: 0.2,
            tail_ms: 150.0,
        }
    }

    /// Interval plus the 150 ms tail.
    pub fn task_period_ms(&self) -> f64 {
        self.interval_ms + self.tail_ms
    }

    pub fn value(&self, t_ms: f64) -> f64 {
        let z = (t_ms - self.interval_ms) / self.peak_sd_ms;
        self.baseline
            .max(self.peak_amplitude * (-0.5 * z * z).exp())
    }
}

/// `d(t) = max(0.2, exp(-(t - interval)² / (2·30²)))` for `t = 0 ..= interval + 150` ms.
pub fn timing_target(spec: &TimingSpec) -> Result<TargetSeries> {
    if !(spec.interval_ms > 0.0 && spec.interval_ms.is_finite()) {
        return Err(OdrcError::Config(format!(
            "timing interval {} ms must be positive",
            spec.interval_ms
        )));
    }
    let samples = spec.task_period_ms().round() as usize + 1;
    let data = (0..samples).map(|t| spec.value(t as f64)).collect();
    TargetSeries::new(data, 1, "timing")
}

/// Scales by one global factor so that `max |value| = 0.8`.
pub fn normalize_series(
    raw: &[f64],
    dims: usize,
    label: impl Into<String>,
) -> Result<TargetSeries> {
    if raw.iter().any(|v| !v.is_finite()) {
        return Err(OdrcError::Normalization(
            "series contains non-finite values".into(),
        ));
    }
    let max = raw.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return Err(OdrcError::Normalization(
            "series is identically zero".into(),
        ));
    }
    let scale = NORMALIZED_MAX / max;
    TargetSeries::new(raw.iter().map(|v| v * scale).collect(), dims, label)
}

/// Raw downsampled trajectory of `flow` after the burn-in, `samples` long.
pub fn flow_trajectory<F: Flow3>(flow: &F, downsample: usize, samples: usize) -> Vec<Vec3> {
    let mut traj = integrate_sampled(
        flow,
        ODE_INITIAL_STATE,
        ODE_STEP,
        downsample,
        BURN_IN_STEPS + samples,
    );
    traj.drain(..BURN_IN_STEPS);
    traj
}

pub fn lorenz_raw(samples: usize) -> Vec<Vec3> {
    flow_trajectory(&Lorenz::default(), LORENZ_DOWNSAMPLE, samples)
}

pub fn rossler_raw(samples: usize) -> Vec<Vec3> {
    flow_trajectory(&Rossler::default(), ROSSLER_DOWNSAMPLE, samples)
}

fn check_duration(duration_ms: usize) -> Result<()> {
    if duration_ms == 0 {
        return Err(OdrcError::Argument(
            "target duration must be positive".into(),
        ));
    }
    Ok(())
}

/// Normalized Lorenz series, one sample per ms.
pub fn lorenz_series(duration_ms: usize) -> Result<TargetSeries> {
    check_duration(duration_ms)?;
    normalize_series(&lorenz_raw(duration_ms).concat(), 3, "lorenz")
}

/// Normalized Rössler series, one sample per ms.
pub fn rossler_series(duration_ms: usize) -> Result<TargetSeries> {
    check_duration(duration_ms)?;
    normalize_series(&rossler_raw(duration_ms).concat(), 3, "rossler")
}

/// Raw KS field after the burn-in, `samples` rows of 64 grid values.
pub fn ks_raw(samples: usize) -> Result<Vec<f64>> {
    let mut solver = ks::KsSolver::standard();
    for _ in 0..BURN_IN_STEPS {
        solver.step()?;
    }
    let mut data = Vec::with_capacity(samples * KS_GRID);
    for k in 0..samples {
        if k > 0 {
            solver.step()?;
        }
        data.extend(solver.field());
    }
    Ok(data)
}

/// Normalized 64-dimensional KS series, one sample per ms.
pub fn ks_series(duration_ms: usize) -> Result<TargetSeries> {
    check_duration(duration_ms)?;
    normalize_series(&ks_raw(duration_ms)?, KS_GRID, "ks")
}

/// Normalized series for any chaotic task.
pub fn chaotic_series(kind: TaskKind, duration_ms: usize) -> Result<TargetSeries> {
    match kind {
        TaskKind::Lorenz => lorenz_series(duration_ms),
        TaskKind::Rossler => rossler_series(duration_ms),
        TaskKind::Ks => ks_series(duration_ms),
        TaskKind::Timing => Err(OdrcError::Argument(
            "timing target is not a chaotic series".into(),
        )),
    }
}
