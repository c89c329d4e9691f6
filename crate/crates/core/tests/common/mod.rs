#![allow(dead_code)]

use nalgebra::DMatrix;
use odrc::reservoir::ReservoirWeights;

/// Double-double accumulator (about 106 significant bits), used as an
/// independent high-precision recomputation of floating-point formulas.
#[derive(Debug, Clone, Copy, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub fn from(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let e = e + self.lo + o.lo;
        let (hi, lo) = two_sum(s, e);
        Dd { hi, lo }
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn add_prod(self, a: f64, b: f64) -> Dd {
        self.add(Dd::from(a).mul(Dd::from(b)))
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// Max-norm relative distance between two vectors.
pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let num = a
        .iter()
        .zip(b)
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
    let den = b.iter().fold(0.0_f64, |m, y| m.max(y.abs())).max(1e-300);
    num / den
}

/// Solves (RᵀR + αI) Wᵀ = Rᵀ D with a Cholesky factorization.
pub fn ridge(r: &[Vec<f64>], d: &[Vec<f64>], alpha: f64) -> DMatrix<f64> {
    let (t, n, n_ro) = (r.len(), r[0].len(), d[0].len());
    let rm = DMatrix::from_fn(t, n, |i, j| r[i][j]);
    let dm = DMatrix::from_fn(t, n_ro, |i, j| d[i][j]);
    let a = rm.transpose() * &rm + DMatrix::identity(n, n) * alpha;
    let b = rm.transpose() * dm;
    a.cholesky()
        .expect("positive definite")
        .solve(&b)
        .transpose()
}

/// Euler update recomputed in double-double from the weight blocks.
#[allow(clippy::too_many_arguments)]
pub fn euler_oracle(
    w: &ReservoirWeights,
    x: &[f64],
    r: &[f64],
    o: &[f64],
    s: f64,
    y: Option<&[f64]>,
    dt: f64,
    tau: f64,
) -> Vec<f64> {
    let (n, n_os, n_ro) = (w.n(), w.n_os(), w.n_ro());
    let mut acc = vec![Dd::default(); n];
    for (i, j, v) in w.recurrent().triplets() {
        acc[i] = acc[i].add_prod(v, r[j]);
    }
    let a = Dd::from(dt).mul(Dd::from(1.0 / tau));
    // 1/tau is exact for the time constants used below
    let one_minus_a = Dd::from(1.0).add(Dd::from(-a.hi)).add(Dd::from(-a.lo));
    (0..n)
        .map(|i| {
            let mut c = acc[i];
            for (wk, ok) in w.oscillator()[i * n_os..(i + 1) * n_os].iter().zip(o) {
                c = c.add_prod(*wk, *ok);
            }
            c = c.add_prod(w.onset()[i], s);
            if let Some(y) = y {
                for (wk, yk) in w.feedback()[i * n_ro..(i + 1) * n_ro].iter().zip(y) {
                    c = c.add_prod(*wk, *yk);
                }
            }
            one_minus_a.mul(Dd::from(x[i])).add(a.mul(c)).to_f64()
        })
        .collect()
}
