//! Evaluation quantities: squared correlation, capacities, return maps of
//! successive maxima and Lyapunov spectra.

pub mod lyapunov;

use serde::{Deserialize, Serialize};

use crate::error::{OdrcError, Result};

pub use lyapunov::{
    lyapunov_benettin_oracle, lyapunov_sano_sawada, BenettinParams, LyapunovSpectrum, OdeSystem,
    SanoSawadaParams,
};

/// Squared Pearson correlation per dimension and its mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RSquared {
    pub per_dim: Vec<f64>,
    pub mean: f64,
    /// Set when some dimension was constant in either series; that
    /// dimension scores 0.
    pub degenerate: bool,
}

/// Squared correlation of two equally long traces. `None` if either is constant.
pub fn squared_correlation(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa <= 0.0 || sbb <= 0.0 || !(saa.is_finite() && sbb.is_finite()) {
        return None;
    }
    Some(((sab * sab) / (saa * sbb)).min(1.0))
}

/// R² between row-major `output` and `target`, both `T × dims`.
pub fn r_squared(output: &[f64], target: &[f64], dims: usize) -> Result<RSquared> {
    if dims == 0 || output.len() != target.len() || !output.len().is_multiple_of(dims) {
        return Err(OdrcError::Argument(format!(
            "r_squared needs equal T×{dims} series, got {} and {} values",
            output.len(),
            target.len()
        )));
    }
    if output.len() < 2 * dims {
        return Err(OdrcError::Argument(
            "r_squared needs at least two samples".into(),
        ));
    }
    let mut degenerate = false;
    let per_dim: Vec<f64> = (0..dims)
        .map(|d| {
            let a: Vec<f64> = output.iter().skip(d).step_by(dims).copied().collect();
            let b: Vec<f64> = target.iter().skip(d).step_by(dims).copied().collect();
            squared_correlation(&a, &b).unwrap_or_else(|| {
                degenerate = true;
                0.0
            })
        })
        .collect();
    let mean = per_dim.iter().sum::<f64>() / dims as f64;
    Ok(RSquared {
        per_dim,
        mean,
        degenerate,
    })
}

/// R² versus task length, one row of per-seed values per abscissa.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceCurve {
    /// Task lengths in seconds, strictly increasing.
    pub abscissa: Vec<f64>,
    /// `per_seed[i][s]` is the R² of seed `s` at `abscissa[i]`.
    pub per_seed: Vec<Vec<f64>>,
}

impl PerformanceCurve {
    pub fn new(abscissa: Vec<f64>, per_seed: Vec<Vec<f64>>) -> Result<Self> {
        if abscissa.len() != per_seed.len() {
            return Err(OdrcError::Argument(
                "curve abscissa and rows differ in length".into(),
            ));
        }
        if abscissa.windows(2).any(|w| w[1] <= w[0]) {
            return Err(OdrcError::Argument(
                "curve abscissa must be strictly increasing".into(),
            ));
        }
        Ok(Self { abscissa, per_seed })
    }

    pub fn mean(&self) -> Vec<f64> {
        self.per_seed.iter().map(|row| mean(row)).collect()
    }

    pub fn sd(&self) -> Vec<f64> {
        self.per_seed.iter().map(|row| sd(row)).collect()
    }

    /// Curve of a single seed column.
    pub fn seed_curve(&self, seed_index: usize) -> Vec<f64> {
        self.per_seed.iter().map(|row| row[seed_index]).collect()
    }

    pub fn seeds(&self) -> usize {
        self.per_seed.first().map_or(0, Vec::len)
    }
}

pub fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample standard deviation; 0 for fewer than two values.
pub fn sd(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

/// Trapezoidal area under `ordinate(abscissa)` from the first abscissa to `upper`.
pub fn capacity_of(abscissa: &[f64], ordinate: &[f64], upper: f64) -> Result<f64> {
    if abscissa.len() != ordinate.len() || abscissa.is_empty() {
        return Err(OdrcError::Argument(
            "capacity needs a nonempty curve".into(),
        ));
    }
    let last = *abscissa.last().expect("nonempty");
    if upper > last + 1e-12 || upper < abscissa[0] {
        return Err(OdrcError::Argument(format!(
            "curve covers [{}, {last}] but capacity was requested up to {upper}",
            abscissa[0]
        )));
    }
    let mut area = 0.0;
    for i in 1..abscissa.len() {
        let (x0, x1) = (abscissa[i - 1], abscissa[i]);
        if x0 >= upper {
            break;
        }
        let (y0, y1) = (ordinate[i - 1], ordinate[i]);
        let xe = x1.min(upper);
        let ye = y0 + (y1 - y0) * (xe - x0) / (x1 - x0);
        area += 0.5 * (y0 + ye) * (xe - x0);
    }
    Ok(area)
}

/// Capacity of the seed-averaged curve, in seconds.
pub fn capacity(curve: &PerformanceCurve, upper: f64) -> Result<f64> {
    capacity_of(&curve.abscissa, &curve.mean(), upper)
}

/// Capacity of each seed's curve.
pub fn capacity_per_seed(curve: &PerformanceCurve, upper: f64) -> Result<Vec<f64>> {
    (0..curve.seeds())
        .map(|s| capacity_of(&curve.abscissa, &curve.seed_curve(s), upper))
        .collect()
}

/// Consecutive pairs `(M_i, M_{i+1})` of strict local maxima.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnMap {
    pub pairs: Vec<(f64, f64)>,
    /// Fewer than two maxima were found.
    pub insufficient: bool,
}

pub fn local_maxima(trace: &[f64]) -> Vec<f64> {
    trace
        .windows(3)
        .filter(|w| w[1] > w[0] && w[1] > w[2])
        .map(|w| w[1])
        .collect()
}

pub fn successive_maxima(trace: &[f64]) -> Result<ReturnMap> {
    if trace.len() < 3 {
        return Err(OdrcError::Argument(format!(
            "return map needs at least 3 samples, got {}",
            trace.len()
        )));
    }
    let maxima = local_maxima(trace);
    let pairs: Vec<(f64, f64)> = maxima.windows(2).map(|w| (w[0], w[1])).collect();
    Ok(ReturnMap {
        insufficient: pairs.is_empty(),
        pairs,
    })
}

/// Mean Euclidean distance from each pair of `map` to its nearest pair in
/// `reference`. Infinite when either map is empty.
pub fn return_map_distance(map: &ReturnMap, reference: &ReturnMap) -> f64 {
    if map.pairs.is_empty() || reference.pairs.is_empty() {
        return f64::INFINITY;
    }
    let total: f64 = map
        .pairs
        .iter()
        .map(|&(a, b)| {
            reference
                .pairs
                .iter()
                .map(|&(c, d)| (a - c).hypot(b - d))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    total / map.pairs.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_and_negated_outputs_score_one() {
        let t: Vec<f64> = (0..100).map(|k| (k as f64 * 0.1).sin()).collect();
        let neg: Vec<f64> = t.iter().map(|v| -v).collect();
        assert!((r_squared(&t, &t, 1).unwrap().mean - 1.0).abs() < 1e-12);
        assert!((r_squared(&neg, &t, 1).unwrap().mean - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_output_is_flagged() {
        let t: Vec<f64> = (0..10).map(|k| k as f64).collect();
        let r = r_squared(&[0.0; 10], &t, 1).unwrap();
        assert_eq!(r.mean, 0.0);
        assert!(r.degenerate);
    }

    #[test]
    fn capacity_rectangles() {
        let x = [1.0, 60.0, 120.0];
        assert!((capacity_of(&x, &[1.0; 3], 120.0).unwrap() - 119.0).abs() < 1e-12);
        assert_eq!(capacity_of(&x, &[0.0; 3], 120.0).unwrap(), 0.0);
        assert!(capacity_of(&x, &[1.0; 3], 130.0).is_err());
        assert!((capacity_of(&x, &[1.0; 3], 30.0).unwrap() - 29.0).abs() < 1e-12);
    }

    #[test]
    fn monotone_trace_has_no_map() {
        let m = successive_maxima(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(m.insufficient);
        assert!(successive_maxima(&[1.0, 2.0]).is_err());
        // plateaus are not maxima
        assert!(local_maxima(&[0.0, 1.0, 1.0, 0.0]).is_empty());
    }
}
