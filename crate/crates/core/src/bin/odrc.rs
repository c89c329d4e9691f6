//! Command-line front end for the experiment harness.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use odrc::analysis::{lyapunov_benettin_oracle, lyapunov_sano_sawada, BenettinParams, OdeSystem};
use odrc::harness::experiments::SweepValue;
use odrc::harness::report::{
    write_chaos_report, write_noise_report, write_sweep_report, write_timing_report,
};
use odrc::harness::thresholds::{all_passed, check_chaos, check_timing, ThresholdOutcome};
use odrc::harness::trial::{train_readout, Network, TrialSpec};
use odrc::harness::{
    run_chaos_experiment, run_noise_sweep, run_parameter_sweep, run_timing_experiment,
    ExperimentConfig, OscillatorKind, Preset, SweepAxis,
};
use odrc::targets::{chaotic_series, timing_target, TaskKind, TimingSpec};
use odrc::Result;

#[derive(Parser)]
#[command(
    name = "odrc",
    version,
    about = "Oscillation-driven reservoir computing experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML experiment config; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated seeds.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "desk")]
    preset: Preset,
    #[arg(long)]
    no_feedback: bool,
    #[arg(long)]
    oscillators: Option<OscillatorKind>,
    /// Also write SVG plots.
    #[arg(long)]
    plots: bool,
}

#[derive(Subcommand)]
enum Command {
    /// R² versus interval and timing capacity.
    Timing {
        #[command(flatten)]
        common: Common,
        /// Comma-separated intervals in seconds.
        #[arg(long, value_delimiter = ',')]
        intervals: Option<Vec<f64>>,
        /// Also write the trained readout and network weights of the first
        /// seed for the longest interval.
        #[arg(long)]
        dump_weights: bool,
    },
    /// Chaotic time-series prediction with return maps and spectra.
    Chaos {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "lorenz")]
        task: TaskKind,
        /// Oscillator band as `lo-hi` in Hz.
        #[arg(long)]
        band: Option<String>,
    },
    /// Timing capacity versus noise amplitude.
    NoiseSweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "0.001,0.01,0.1,1")]
        levels: Vec<f64>,
    },
    /// Timing capacity versus one parameter.
    ParamSweep {
        #[command(flatten)]
        common: Common,
        /// band | n_os | g_os | g | tau_nr
        #[arg(long)]
        axis: SweepAxis,
        /// Comma-separated values; bands as `lo-hi`.
        #[arg(long, value_delimiter = ',')]
        values: Vec<String>,
    },
    /// Lyapunov spectrum of a target series: Sano–Sawada estimate and
    /// tangent-space reference.
    Lyapunov {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "lorenz")]
        task: TaskKind,
        /// Samples used for the time-series estimate.
        #[arg(long, default_value_t = 40_000)]
        samples: usize,
    },
    /// Writes a target series to CSV.
    GenTarget {
        #[arg(long, default_value = "lorenz")]
        task: TaskKind,
        /// Length in ms (chaotic tasks).
        #[arg(long, default_value_t = 60_000)]
        duration_ms: usize,
        /// Interval in seconds (timing task).
        #[arg(long, default_value_t = 2.0)]
        interval: f64,
        #[arg(long, default_value = "target.csv")]
        out: PathBuf,
    },
}

fn resolve(common: &Common, task: TaskKind) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::preset(common.preset, task),
    };
    if common.config.is_none() {
        cfg.task = task;
    }
    if let Some(seeds) = &common.seeds {
        cfg.seeds = seeds.clone();
    }
    if let Some(out) = &common.out {
        cfg.out_dir = out.clone();
    }
    if common.no_feedback {
        cfg.feedback = false;
    }
    if let Some(kind) = common.oscillators {
        cfg.oscillator = kind;
    }
    cfg.plots |= common.plots;
    cfg.validate()?;
    Ok(cfg)
}

fn announce(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn report_thresholds(outcomes: &[ThresholdOutcome]) -> bool {
    for o in outcomes {
        println!("{o}");
    }
    all_passed(outcomes)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Timing {
            common,
            intervals,
            dump_weights,
        } => {
            let mut cfg = resolve(&common, TaskKind::Timing)?;
            if let Some(iv) = intervals {
                cfg.intervals_s = iv;
                cfg.validate()?;
            }
            let report = run_timing_experiment(&cfg)?;
            for (x, (m, s)) in cfg
                .intervals_s
                .iter()
                .zip(report.mean_r2().iter().zip(report.curve.sd()))
            {
                println!("interval {x:>6} s  R² {m:.4} ± {s:.4}");
            }
            println!(
                "capacity {:.3} ± {:.3} s",
                report.capacity, report.capacity_sd
            );
            announce(&write_timing_report(&report, &cfg.out_dir, cfg.plots)?);
            if dump_weights {
                let seed = cfg.seeds[0];
                let interval = *cfg.intervals_s.last().expect("validated");
                let target = timing_target(&TimingSpec::new(interval * 1000.0))?;
                let mut net = Network::build(&cfg, seed)?;
                let spec = TrialSpec::whole(target.len() - 1, 0);
                let (readout, _, _) =
                    train_readout(&mut net, &cfg, &target, spec, &report.condition)?;
                let dir = cfg.out_dir.join(format!("seed_{seed}"));
                net.weights.dump_csv(&dir)?;
                let path = dir.join("readout.csv");
                readout.save_csv(&path)?;
                println!("wrote weights under {}", dir.display());
            }
            Ok(report_thresholds(&check_timing(&cfg, &report)))
        }
        Command::Chaos { common, task, band } => {
            let mut cfg = resolve(&common, task)?;
            if let Some(b) = band {
                if let SweepValue::Band(lo, hi) = SweepValue::parse(SweepAxis::Band, &b)? {
                    cfg.f_min = lo;
                    cfg.f_max = hi;
                }
                cfg.validate()?;
            }
            let report = run_chaos_experiment(&cfg)?;
            for r in &report.results {
                println!(
                    "seed {}: task R² {:.4}, map distance reproduction {:.4} generalization {:.4}, λ₁ {}",
                    r.seed,
                    r.r2_task.mean,
                    r.distance_reproduction,
                    r.distance_generalization,
                    r.spectrum_generalization
                        .as_ref()
                        .map_or_else(|e| format!("unavailable ({e})"), |s| format!("{:.3}", s.largest())),
                );
            }
            if let Some(o) = &report.oracle_spectrum {
                println!("reference spectrum {:.3?}", o.exponents);
            }
            announce(&write_chaos_report(&report, &cfg.out_dir, cfg.plots)?);
            Ok(report_thresholds(&check_chaos(&cfg, &report)))
        }
        Command::NoiseSweep { common, levels } => {
            let cfg = resolve(&common, TaskKind::Timing)?;
            let report = run_noise_sweep(&cfg, &levels)?;
            for r in &report.rows {
                println!(
                    "noise {:>8}  capacity {:.3} ± {:.3}  normalized {:.3}",
                    r.noise, r.capacity, r.sd, r.normalized
                );
            }
            announce(&write_noise_report(&report, &cfg.out_dir, cfg.plots)?);
            let outcomes: Vec<_> = report
                .reports
                .iter()
                .flat_map(|r| check_timing(&cfg, r))
                .collect();
            Ok(report_thresholds(&outcomes))
        }
        Command::ParamSweep {
            common,
            axis,
            values,
        } => {
            let cfg = resolve(&common, TaskKind::Timing)?;
            let values = values
                .iter()
                .map(|v| SweepValue::parse(axis, v))
                .collect::<Result<Vec<_>>>()?;
            let report = run_parameter_sweep(&cfg, axis, &values)?;
            for r in &report.rows {
                println!(
                    "{:?} = {:<10} capacity {:.3} ± {:.3}",
                    r.axis, r.value, r.capacity, r.sd
                );
            }
            announce(&write_sweep_report(&report, &cfg.out_dir, cfg.plots)?);
            let outcomes: Vec<_> = report
                .reports
                .iter()
                .flat_map(|r| check_timing(&cfg, r))
                .collect();
            Ok(report_thresholds(&outcomes))
        }
        Command::Lyapunov {
            common,
            task,
            samples,
        } => {
            let cfg = resolve(&common, task)?;
            let dt = task
                .model_time_per_sample()
                .ok_or_else(|| odrc::OdrcError::Config("lyapunov needs a chaotic task".into()))?;
            let series = chaotic_series(task, samples)?;
            let cols = match task {
                TaskKind::Ks => cfg.ks_probe,
                _ => [0, 1, 2],
            };
            let points: Vec<[f64; 3]> = (0..series.len())
                .map(|t| {
                    let r = series.row(t);
                    [r[cols[0]], r[cols[1]], r[cols[2]]]
                })
                .collect();
            let est = lyapunov_sano_sawada(&points, dt, &cfg.sano_sawada())?;
            println!(
                "time-series estimate {:.4?} (sum {:.3})",
                est.exponents,
                est.sum()
            );
            let system = match task {
                TaskKind::Lorenz => Some((OdeSystem::Lorenz, 1000.0)),
                TaskKind::Rossler => Some((OdeSystem::Rossler, 5000.0)),
                _ => None,
            };
            if let Some((system, duration)) = system {
                let oracle = lyapunov_benettin_oracle(system, &BenettinParams::new(duration));
                println!(
                    "tangent-space reference {:.4?} (sum {:.3})",
                    oracle.exponents,
                    oracle.sum()
                );
            }
            Ok(true)
        }
        Command::GenTarget {
            task,
            duration_ms,
            interval,
            out,
        } => {
            let series = match task {
                TaskKind::Timing => timing_target(&TimingSpec::new(interval * 1000.0))?,
                chaotic => chaotic_series(chaotic, duration_ms)?,
            };
            series.write_csv(&out)?;
            println!(
                "wrote {} rows × {} dims to {}",
                series.len(),
                series.dims(),
                out.display()
            );
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
