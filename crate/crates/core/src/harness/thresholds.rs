//! Pass/fail checks against the thresholds configured in an experiment.

use std::fmt;

use crate::analysis::mean;

use super::config::ExperimentConfig;
use super::experiments::{ChaosReport, TimingReport};

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdOutcome {
    pub name: &'static str,
    pub observed: f64,
    pub limit: f64,
    pub passed: bool,
}

impl fmt::Display for ThresholdOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "{verdict} {}: observed {:.4}, limit {:.4}",
            self.name, self.observed, self.limit
        )
    }
}

fn at_least(name: &'static str, observed: f64, limit: Option<f64>) -> Option<ThresholdOutcome> {
    limit.map(|limit| ThresholdOutcome {
        name,
        observed,
        limit,
        passed: observed >= limit,
    })
}

fn below(name: &'static str, observed: f64, limit: Option<f64>) -> Option<ThresholdOutcome> {
    limit.map(|limit| ThresholdOutcome {
        name,
        observed,
        limit,
        passed: observed < limit,
    })
}

/// Timing: the worst interval must clear `min_mean_r2`, the best must stay
/// under `max_mean_r2`.
pub fn check_timing(config: &ExperimentConfig, report: &TimingReport) -> Vec<ThresholdOutcome> {
    let means = report.mean_r2();
    let lo = means.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    [
        at_least("min_mean_r2", lo, config.min_mean_r2),
        below("max_mean_r2", hi, config.max_mean_r2),
        at_least("min_capacity", report.capacity, config.min_capacity),
    ]
    .into_iter()
    .flatten()
    .collect()
}

/// Chaos: mean task-period R² and mean generalization return-map distance.
pub fn check_chaos(config: &ExperimentConfig, report: &ChaosReport) -> Vec<ThresholdOutcome> {
    let r2 = report.mean_task_r2();
    let dist = mean(
        &report
            .results
            .iter()
            .map(|r| r.distance_generalization)
            .collect::<Vec<_>>(),
    );
    [
        at_least("min_mean_r2", r2, config.min_mean_r2),
        below("max_mean_r2", r2, config.max_mean_r2),
        below(
            "max_return_map_distance",
            dist,
            config.max_return_map_distance,
        ),
    ]
    .into_iter()
    .flatten()
    .collect()
}

pub fn all_passed(outcomes: &[ThresholdOutcome]) -> bool {
    outcomes.iter().all(|o| o.passed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparison_directions() {
        assert!(at_least("a", 0.8, Some(0.8)).unwrap().passed);
        assert!(!below("b", 0.5, Some(0.5)).unwrap().passed);
        assert!(at_least("c", f64::NAN, Some(0.1))
            .map(|o| !o.passed)
            .unwrap());
        assert!(at_least("d", 1.0, None).is_none());
    }
}
