use proptest::prelude::*;

use odrc::targets::ks::{standard_initial_condition, KsSolver};
use odrc::targets::ode::{integrate, Flow3, Lorenz, Rossler};
use odrc::targets::{
    chaotic_series, lorenz_raw, normalize_series, timing_target, TargetSeries, TaskKind,
    TimingSpec, KS_GRID, KS_LENGTH, KS_STEP,
};

#[test]
fn timing_target_shape() {
    for interval in [1000.0, 2000.0, 5000.0] {
        let spec = TimingSpec::new(interval);
        let d = timing_target(&spec).unwrap();
        assert_eq!(d.len(), interval as usize + 151);
        assert_eq!(d.row(interval as usize)[0], 1.0);
        assert_eq!(d.row(0)[0], 0.2);
        let one_sd = (-0.5f64).exp();
        assert!((d.row(interval as usize + 30)[0] - one_sd).abs() < 1e-15);
        assert!((d.row(interval as usize - 30)[0] - one_sd).abs() < 1e-15);
        assert_eq!(spec.task_period_ms(), interval + 150.0);
    }
}

#[test]
fn timing_target_is_continuous() {
    let spec = TimingSpec::new(2000.0);
    let mut prev = spec.value(0.0);
    let mut t = 0.0;
    while t < 2150.0 {
        t += 0.01;
        let v = spec.value(t);
        assert!((v - prev).abs() < 1e-3);
        prev = v;
    }
}

#[test]
fn stated_systems() {
    let lorenz = Lorenz::default();
    assert_eq!(
        (lorenz.sigma, lorenz.rho, lorenz.beta),
        (10.0, 28.0, 8.0 / 3.0)
    );
    let eq = lorenz.equilibrium();
    assert!((eq[0] - 8.48528137423857).abs() < 1e-12 && eq[2] == 27.0);
    assert!(lorenz.rhs(eq).iter().all(|v| v.abs() < 1e-12));
    let rossler = Rossler::default();
    assert_eq!((rossler.a, rossler.b, rossler.c), (0.2, 0.2, 5.7));
    assert_eq!(rossler.rhs([0.0, 0.0, 0.0])[2], 0.2);
}

#[test]
fn rk4_convergence_order() {
    let lorenz = Lorenz::default();
    let s0 = [1.0, 1.0, 20.0];
    let t_end = 0.5;
    let reference = integrate(&lorenz, s0, t_end / 16_000.0, 16_000);
    let hs = [t_end / 250.0, t_end / 500.0, t_end / 1000.0, t_end / 2000.0];
    let errs: Vec<f64> = hs
        .iter()
        .map(|&h| {
            let s = integrate(&lorenz, s0, h, (t_end / h).round() as usize);
            s.iter()
                .zip(&reference)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    // least-squares slope of log(err) against log(h)
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 4.0, ys.iter().sum::<f64>() / 4.0);
    let slope = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    assert!(slope >= 3.5, "observed order {slope}, errors {errs:?}");
}

#[test]
fn ks_linear_modes_follow_analytic_growth() {
    let u0: Vec<f64> = (0..KS_GRID)
        .map(|j| {
            let x = KS_LENGTH * j as f64 / KS_GRID as f64;
            let w = std::f64::consts::TAU / KS_LENGTH;
            0.1 * (w * x).cos()
                + 0.05 * (2.0 * w * x).sin()
                + 0.02 * (3.0 * w * x).cos()
                + 0.01 * (5.0 * w * x).sin()
        })
        .collect();
    let mut solver = KsSolver::new(KS_GRID, KS_LENGTH, KS_STEP, &u0)
        .unwrap()
        .with_nonlinear(false);
    let initial = solver.spectrum().to_vec();
    let steps = 100;
    for _ in 0..steps {
        solver.step().unwrap();
    }
    let t = steps as f64 * KS_STEP;
    #[allow(clippy::needless_range_loop)]
    for k in 1..=5 {
        let q = solver.wavenumber(k);
        let factor = ((q * q - q.powi(4)) * t).exp();
        let expect = initial[k] * factor;
        let got = solver.spectrum()[k];
        assert!(
            (got - expect).norm() <= 1e-6 * expect.norm().max(1e-12),
            "mode {k}: {got} vs {expect}"
        );
    }
}

#[test]
fn ks_mean_is_conserved() {
    let mut u0 = standard_initial_condition(KS_GRID, KS_LENGTH);
    for v in u0.iter_mut() {
        *v += 0.3;
    }
    let mut solver = KsSolver::new(KS_GRID, KS_LENGTH, KS_STEP, &u0).unwrap();
    let m0 = solver.mean();
    for _ in 0..1000 {
        solver.step().unwrap();
    }
    assert!((solver.mean() - m0).abs() < 1e-8);
}

#[test]
fn ks_stays_bounded_over_long_runs() {
    let mut solver = KsSolver::standard();
    let mut max = 0.0_f64;
    for k in 0..100_000 {
        solver.step().unwrap();
        if k % 50 == 0 {
            max = solver.field().iter().fold(max, |m, v| m.max(v.abs()));
        }
    }
    assert!(max.is_finite() && max < 10.0, "max |u| {max}");
    assert!(
        max > 0.5,
        "solution decayed instead of reaching the attractor"
    );
}

#[test]
fn normalization() {
    assert!(normalize_series(&[0.0; 12], 3, "z").is_err());
    assert!(normalize_series(&[1.0, f64::NAN], 1, "n").is_err());
    let s = normalize_series(&[1.0, -4.0, 2.0, 0.5], 2, "x").unwrap();
    assert_eq!(s.data(), &[0.2, -0.8, 0.4, 0.1]);
}

#[test]
fn generated_series_are_normalized_and_deterministic() {
    for kind in [TaskKind::Lorenz, TaskKind::Rossler, TaskKind::Ks] {
        let a = chaotic_series(kind, 3000).unwrap();
        assert_eq!(a.len(), 3000);
        assert_eq!(a.dims(), kind.dims());
        assert!(a
            .data()
            .iter()
            .all(|v| v.is_finite() && v.abs() <= 0.8 + 1e-15));
        assert!((a.max_abs() - 0.8).abs() < 1e-15);
        assert_eq!(a, chaotic_series(kind, 3000).unwrap());
    }
    // raw Lorenz samples are 5 RK4 steps apart
    let raw = lorenz_raw(2);
    let h = 0.001;
    let mut s = raw[0];
    for _ in 0..5 {
        s = odrc::targets::ode::rk4_step(&Lorenz::default(), s, h);
    }
    assert_eq!(s, raw[1]);
}

#[test]
fn csv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lorenz.csv");
    let s = chaotic_series(TaskKind::Lorenz, 500).unwrap();
    s.write_csv(&path).unwrap();
    let back = TargetSeries::read_csv(&path, "lorenz").unwrap();
    assert_eq!(back.dims(), 3);
    assert_eq!(back.data(), s.data());
}

proptest! {
    #[test]
    fn normalization_bound(values in prop::collection::vec(-1e3f64..1e3, 3..60)) {
        prop_assume!(values.iter().any(|v| *v != 0.0));
        let n = values.len() / 3 * 3;
        let s = normalize_series(&values[..n], 3, "p");
        prop_assume!(s.is_ok());
        let s = s.unwrap();
        prop_assert!((s.max_abs() - 0.8).abs() < 1e-12);
    }
}
