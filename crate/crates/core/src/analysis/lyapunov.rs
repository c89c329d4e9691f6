//! Lyapunov spectra.
//!
//! [`lyapunov_sano_sawada`] estimates a three-exponent spectrum from an
//! observed trajectory by fitting local linear flow maps to neighbour
//! displacements and accumulating their growth with QR re-orthonormalization.
//! [`lyapunov_benettin_oracle`] integrates the variational equations of the
//! known flows and serves as ground truth.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{OdrcError, Result};
use crate::targets::ode::{rk4_step, Flow3, Lorenz, Rossler, Vec3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovSpectrum {
    /// Exponents per unit model time, sorted descending.
    pub exponents: Vec<f64>,
    pub neighbors: usize,
    /// Initial neighbour radius in state-space units.
    pub radius: f64,
    pub evolution_step: usize,
    /// Fraction of reference points skipped for lack of neighbours.
    pub failed_fraction: f64,
}

impl LyapunovSpectrum {
    pub fn sum(&self) -> f64 {
        self.exponents.iter().sum()
    }

    pub fn largest(&self) -> f64 {
        self.exponents[0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SanoSawadaParams {
    /// Neighbours used per local fit.
    pub neighbors: usize,
    /// Initial search radius as a fraction of the attractor diameter.
    pub radius_fraction: f64,
    /// Maximum number of radius doublings before a reference point is skipped.
    pub max_doublings: usize,
    /// Samples over which each local map is fitted; reference points are
    /// this many samples apart so that successive maps chain along the orbit.
    pub evolution_step: usize,
    /// Neighbours closer in time than this many samples are excluded.
    pub theiler_window: usize,
    /// Fewest neighbours accepted after all doublings.
    pub min_neighbors: usize,
    /// Largest skipped fraction tolerated before the estimate is an error.
    pub max_failed_fraction: f64,
}

impl Default for SanoSawadaParams {
    fn default() -> Self {
        Self {
            neighbors: 30,
            radius_fraction: 0.02,
            max_doublings: 4,
            evolution_step: 10,
            theiler_window: 100,
            min_neighbors: 10,
            max_failed_fraction: 0.5,
        }
    }
}

fn sub(a: &Vec3, b: &Vec3) -> Vector3<f64> {
    Vector3::new(a[0] - b[0], a[1] - b[1], a[2] - b[2])
}

/// Sano–Sawada spectrum of a 3-dimensional trajectory sampled every
/// `dt` units of model time.
pub fn lyapunov_sano_sawada(
    series: &[Vec3],
    dt: f64,
    params: &SanoSawadaParams,
) -> Result<LyapunovSpectrum> {
    if series.len() < 10_000 {
        return Err(OdrcError::Argument(format!(
            "Sano-Sawada needs at least 10^4 samples, got {}",
            series.len()
        )));
    }
    if series.iter().flatten().any(|v| !v.is_finite()) {
        return Err(OdrcError::NonFinite("lyapunov input series"));
    }
    if !(dt > 0.0) || params.evolution_step == 0 || params.neighbors < 3 {
        return Err(OdrcError::Argument("invalid Sano-Sawada parameters".into()));
    }
    let step = params.evolution_step;
    let len = series.len();
    let (mut lo, mut hi) = ([f64::INFINITY; 3], [f64::NEG_INFINITY; 3]);
    for p in series {
        for d in 0..3 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let diameter = (0..3).map(|d| (hi[d] - lo[d]).powi(2)).sum::<f64>().sqrt();
    let radius0 = params.radius_fraction * diameter;

    // candidates sorted by their first coordinate; a radius query scans a slab
    let mut order: Vec<usize> = (0..len - step).collect();
    order.sort_by(|&a, &b| series[a][0].total_cmp(&series[b][0]).then(a.cmp(&b)));
    let keys: Vec<f64> = order.iter().map(|&j| series[j][0]).collect();

    let mut q = Matrix3::<f64>::identity();
    let mut sums = [0.0f64; 3];
    let mut used = 0usize;
    let mut failed = 0usize;
    let mut total = 0usize;
    let mut within: Vec<(f64, usize)> = Vec::new();

    let mut i = 0;
    while i + step < len {
        total += 1;
        let xi = &series[i];
        let mut radius = radius0;
        for _ in 0..=params.max_doublings {
            within.clear();
            let r2 = radius * radius;
            let lo = keys.partition_point(|&k| k < xi[0] - radius);
            let hi = keys.partition_point(|&k| k <= xi[0] + radius);
            for &j in &order[lo..hi] {
                if j.abs_diff(i) <= params.theiler_window {
                    continue;
                }
                let xj = &series[j];
                let d2 = (0..3).map(|d| (xj[d] - xi[d]).powi(2)).sum::<f64>();
                if d2 <= r2 && d2 > 0.0 {
                    within.push((d2, j));
                }
            }
            if within.len() >= params.neighbors {
                break;
            }
            radius *= 2.0;
        }
        if within.len() < params.min_neighbors.max(3) {
            failed += 1;
            i += step;
            continue;
        }
        within.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        within.truncate(params.neighbors);

        let mut cyy = Matrix3::<f64>::zeros();
        let mut czy = Matrix3::<f64>::zeros();
        let xf = &series[i + step];
        for &(_, j) in &within {
            let y = sub(&series[j], xi);
            let z = sub(&series[j + step], xf);
            cyy += y * y.transpose();
            czy += z * y.transpose();
        }
        let jac = czy * spread_inverse(cyy);
        let qr = (jac * q).qr();
        let r = qr.r();
        for k in 0..3 {
            sums[k] += r[(k, k)].abs().max(f64::MIN_POSITIVE).ln();
        }
        q = qr.q();
        used += 1;
        i += step;
    }
    let failed_fraction = failed as f64 / total.max(1) as f64;
    if used == 0 || failed_fraction > params.max_failed_fraction {
        return Err(OdrcError::Estimation { failed, total });
    }
    let time = used as f64 * step as f64 * dt;
    let mut exponents: Vec<f64> = sums.iter().map(|s| s / time).collect();
    exponents.sort_by(|a, b| b.total_cmp(a));
    Ok(LyapunovSpectrum {
        exponents,
        neighbors: params.neighbors,
        radius: radius0,
        evolution_step: step,
        failed_fraction,
    })
}

/// Pseudo-inverse of a neighbour covariance. Directions with (relatively)
/// no spread carry no information about the local map and are dropped.
fn spread_inverse(c: Matrix3<f64>) -> Matrix3<f64> {
    let eig = c.symmetric_eigen();
    let top = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut inv = Matrix3::zeros();
    for k in 0..3 {
        let lambda = eig.eigenvalues[k];
        if lambda > SPREAD_CUTOFF * top {
            let v = eig.eigenvectors.column(k);
            inv += v * v.transpose() / lambda;
        }
    }
    inv
}

const SPREAD_CUTOFF: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OdeSystem {
    Lorenz,
    Rossler,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenettinParams {
    /// Averaging time, in model time units.
    pub duration: f64,
    /// Discarded transient before averaging starts.
    pub transient: f64,
    pub step: f64,
    /// Integration steps between re-orthonormalizations.
    pub reorthonormalize_every: usize,
}

impl BenettinParams {
    pub fn new(duration: f64) -> Self {
        Self {
            duration,
            transient: 100.0,
            step: 0.001,
            reorthonormalize_every: 10,
        }
    }
}

fn tangent_rhs<F: Flow3>(flow: &F, s: Vec3, v: &Matrix3<f64>) -> (Vec3, Matrix3<f64>) {
    let j = flow.jacobian(s);
    let jm = Matrix3::new(
        j[0][0], j[0][1], j[0][2], j[1][0], j[1][1], j[1][2], j[2][0], j[2][1], j[2][2],
    );
    (flow.rhs(s), jm * v)
}

fn tangent_rk4<F: Flow3>(flow: &F, s: Vec3, v: &Matrix3<f64>, h: f64) -> (Vec3, Matrix3<f64>) {
    let shift = |s: Vec3, k: Vec3, a: f64| [s[0] + a * k[0], s[1] + a * k[1], s[2] + a * k[2]];
    let (k1, m1) = tangent_rhs(flow, s, v);
    let (k2, m2) = tangent_rhs(flow, shift(s, k1, 0.5 * h), &(v + m1 * (0.5 * h)));
    let (k3, m3) = tangent_rhs(flow, shift(s, k2, 0.5 * h), &(v + m2 * (0.5 * h)));
    let (k4, m4) = tangent_rhs(flow, shift(s, k3, h), &(v + m3 * h));
    let mut out = s;
    for i in 0..3 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    (out, v + (m1 + m2 * 2.0 + m3 * 2.0 + m4) * (h / 6.0))
}

fn benettin<F: Flow3>(flow: &F, s0: Vec3, params: &BenettinParams) -> LyapunovSpectrum {
    let h = params.step;
    let mut s = s0;
    for _ in 0..(params.transient / h).round() as usize {
        s = rk4_step(flow, s, h);
    }
    let mut v = Matrix3::<f64>::identity();
    let mut sums = [0.0f64; 3];
    let total_steps = (params.duration / h).round() as usize;
    let every = params.reorthonormalize_every.max(1);
    let mut done = 0;
    while done < total_steps {
        let chunk = every.min(total_steps - done);
        for _ in 0..chunk {
            let (ns, nv) = tangent_rk4(flow, s, &v, h);
            s = ns;
            v = nv;
        }
        done += chunk;
        let qr = v.qr();
        let r = qr.r();
        for k in 0..3 {
            sums[k] += r[(k, k)].abs().ln();
        }
        v = qr.q();
    }
    let time = total_steps as f64 * h;
    let mut exponents: Vec<f64> = sums.iter().map(|x| x / time).collect();
    exponents.sort_by(|a, b| b.total_cmp(a));
    LyapunovSpectrum {
        exponents,
        neighbors: 0,
        radius: 0.0,
        evolution_step: every,
        failed_fraction: 0.0,
    }
}

/// Ground-truth spectrum of the Lorenz or Rössler flow via tangent-space
/// integration with analytic Jacobians.
pub fn lyapunov_benettin_oracle(system: OdeSystem, params: &BenettinParams) -> LyapunovSpectrum {
    let s0 = crate::targets::ODE_INITIAL_STATE;
    match system {
        OdeSystem::Lorenz => benettin(&Lorenz::default(), s0, params),
        OdeSystem::Rossler => benettin(&Rossler::default(), s0, params),
    }
}
