//! Kuramoto–Sivashinsky equation `u_t = -u u_x - u_xx - u_xxxx` on a
//! periodic domain, integrated with ETDRK4 in Fourier space.
//!
//! The ETDRK4 coefficients are evaluated with the complex contour-integral
//! trick (32 points on a unit circle around each `hL`) to avoid cancellation
//! for small `|hL|`. The quadratic term is dealiased with the 2/3 rule.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{OdrcError, Result};

const CONTOUR_POINTS: usize = 32;

pub struct KsSolver {
    n: usize,
    length: f64,
    h: f64,
    nonlinear: bool,
    wavenumbers: Vec<f64>,
    dealias: Vec<bool>,
    e: Vec<Complex64>,
    e2: Vec<Complex64>,
    q: Vec<Complex64>,
    f1: Vec<Complex64>,
    f2: Vec<Complex64>,
    f3: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    spectrum: Vec<Complex64>,
}

impl std::fmt::Debug for KsSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KsSolver")
            .field("n", &self.n)
            .field("length", &self.length)
            .field("h", &self.h)
            .field("nonlinear", &self.nonlinear)
            .finish()
    }
}

impl KsSolver {
    pub fn new(n: usize, length: f64, h: f64, u0: &[f64]) -> Result<Self> {
        if n < 4 || !n.is_multiple_of(2) {
            return Err(OdrcError::Argument(format!(
                "KS grid size {n} must be even and >= 4"
            )));
        }
        if u0.len() != n {
            return Err(OdrcError::Dimension {
                context: "KS initial condition",
                expected: n,
                got: u0.len(),
            });
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);

        let wavenumbers: Vec<f64> = (0..n)
            .map(|k| {
                let m = if k < n / 2 {
                    k as f64
                } else if k == n / 2 {
                    0.0
                } else {
                    k as f64 - n as f64
                };
                TAU * m / length
            })
            .collect();
        let cutoff = n as f64 / 3.0;
        let dealias: Vec<bool> = (0..n)
            .map(|k| {
                let m = if k <= n / 2 { k as f64 } else { (n - k) as f64 };
                m < cutoff
            })
            .collect();

        let mut e = Vec::with_capacity(n);
        let mut e2 = Vec::with_capacity(n);
        let mut q = Vec::with_capacity(n);
        let mut f1 = Vec::with_capacity(n);
        let mut f2 = Vec::with_capacity(n);
        let mut f3 = Vec::with_capacity(n);
        for &kq in &wavenumbers {
            let l = kq * kq - kq.powi(4);
            let lh = l * h;
            e.push(Complex64::new(lh.exp(), 0.0));
            e2.push(Complex64::new((lh / 2.0).exp(), 0.0));
            let (mut sq, mut s1, mut s2, mut s3) = (
                Complex64::default(),
                Complex64::default(),
                Complex64::default(),
                Complex64::default(),
            );
            for m in 1..=CONTOUR_POINTS {
                let root =
                    Complex64::from_polar(1.0, PI * (m as f64 - 0.5) / CONTOUR_POINTS as f64);
                let z = Complex64::new(lh, 0.0) + root;
                let ez = z.exp();
                let ez2 = (z / 2.0).exp();
                sq += (ez2 - 1.0) / z;
                let z3 = z * z * z;
                s1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
                s2 += (2.0 + z + ez * (z - 2.0)) / z3;
                s3 += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
            }
            let m = CONTOUR_POINTS as f64;
            q.push(Complex64::new(h * (sq / m).re, 0.0));
            f1.push(Complex64::new(h * (s1 / m).re, 0.0));
            f2.push(Complex64::new(h * (s2 / m).re, 0.0));
            f3.push(Complex64::new(h * (s3 / m).re, 0.0));
        }

        let mut spectrum: Vec<Complex64> = u0.iter().map(|&u| Complex64::new(u, 0.0)).collect();
        forward.process(&mut spectrum);
        Ok(Self {
            n,
            length,
            h,
            nonlinear: true,
            wavenumbers,
            dealias,
            e,
            e2,
            q,
            f1,
            f2,
            f3,
            forward,
            inverse,
            spectrum,
        })
    }

    /// Solver on the standard 64-point, L = 22, h = 0.1 setup with the
    /// initial condition `0.1 cos(2πx/L)(1 + sin(2πx/L))`.
    pub fn standard() -> Self {
        let (n, length) = (64, 22.0);
        Self::new(n, length, 0.1, &standard_initial_condition(n, length))
            .expect("valid standard setup")
    }

    /// Turns the quadratic term off, leaving the linear dynamics only.
    pub fn with_nonlinear(mut self, on: bool) -> Self {
        self.nonlinear = on;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn step_size(&self) -> f64 {
        self.h
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn wavenumber(&self, k: usize) -> f64 {
        self.wavenumbers[k]
    }

    pub fn spectrum(&self) -> &[Complex64] {
        &self.spectrum
    }

    /// Current field on the grid.
    pub fn field(&self) -> Vec<f64> {
        let mut buf = self.spectrum.clone();
        self.inverse.process(&mut buf);
        buf.iter().map(|c| c.re / self.n as f64).collect()
    }

    /// `-½ ∂x (u²)` in Fourier space, dealiased.
    fn nonlinear_term(&self, v: &[Complex64]) -> Vec<Complex64> {
        if !self.nonlinear {
            return vec![Complex64::default(); self.n];
        }
        let mut buf = v.to_vec();
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        for c in buf.iter_mut() {
            let u = c.re * scale;
            *c = Complex64::new(u * u, 0.0);
        }
        self.forward.process(&mut buf);
        for (k, c) in buf.iter_mut().enumerate() {
            *c = if self.dealias[k] {
                Complex64::new(0.0, -0.5 * self.wavenumbers[k]) * *c
            } else {
                Complex64::default()
            };
        }
        buf
    }

    pub fn step(&mut self) -> Result<()> {
        let v = &self.spectrum;
        let nv = self.nonlinear_term(v);
        let a: Vec<Complex64> = (0..self.n)
            .map(|k| self.e2[k] * v[k] + self.q[k] * nv[k])
            .collect();
        let na = self.nonlinear_term(&a);
        let b: Vec<Complex64> = (0..self.n)
            .map(|k| self.e2[k] * v[k] + self.q[k] * na[k])
            .collect();
        let nb = self.nonlinear_term(&b);
        let c: Vec<Complex64> = (0..self.n)
            .map(|k| self.e2[k] * a[k] + self.q[k] * (2.0 * nb[k] - nv[k]))
            .collect();
        let nc = self.nonlinear_term(&c);
        let next: Vec<Complex64> = (0..self.n)
            .map(|k| {
                self.e[k] * v[k]
                    + nv[k] * self.f1[k]
                    + 2.0 * (na[k] + nb[k]) * self.f2[k]
                    + nc[k] * self.f3[k]
            })
            .collect();
        if next.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(OdrcError::Generation(
                "KS spectrum became non-finite".into(),
            ));
        }
        self.spectrum = next;
        self.project_real();
        Ok(())
    }

    /// Restores the conjugate symmetry of a real field. Round-off otherwise
    /// seeds an anti-Hermitian part that the linearly unstable low modes
    /// amplify without bound.
    fn project_real(&mut self) {
        let n = self.n;
        self.spectrum[0].im = 0.0;
        self.spectrum[n / 2] = Complex64::default();
        for k in 1..n / 2 {
            let avg = 0.5 * (self.spectrum[k] + self.spectrum[n - k].conj());
            self.spectrum[k] = avg;
            self.spectrum[n - k] = avg.conj();
        }
    }

    /// Spatial mean of the field.
    pub fn mean(&self) -> f64 {
        self.spectrum[0].re / self.n as f64
    }
}

pub fn standard_initial_condition(n: usize, length: f64) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let x = length * j as f64 / n as f64;
            let th = TAU * x / length;
            0.1 * th.cos() * (1.0 + th.sin())
        })
        .collect()
}
