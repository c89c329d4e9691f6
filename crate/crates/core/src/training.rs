//! Linear readout `y = W_ro r` and its online recursive-least-squares training.
//!
//! The inverse-correlation matrix `P` is symmetric, so only its upper
//! triangle is stored. The rank-1 downdate of one update is deferred and
//! folded into the single pass that computes `P r` for the next update,
//! which halves memory traffic for large reservoirs.

use std::path::Path;

use crate::error::{check_dim, OdrcError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Readout {
    /// N_ro × N, row-major.
    weights: Vec<f64>,
    n: usize,
    n_ro: usize,
}

impl Readout {
    /// Zero readout.
    pub fn zeros(n_ro: usize, n: usize) -> Self {
        Self {
            weights: vec![0.0; n_ro * n],
            n,
            n_ro,
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_ro = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(OdrcError::Argument("ragged readout rows".into()));
        }
        Ok(Self {
            weights: rows.into_iter().flatten().collect(),
            n,
            n_ro,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_ro(&self) -> usize {
        self.n_ro
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.weights[k * self.n..(k + 1) * self.n]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn output_into(&self, r: &[f64], out: &mut [f64]) -> Result<()> {
        check_dim("readout input", self.n, r.len())?;
        check_dim("readout output", self.n_ro, out.len())?;
        for (k, y) in out.iter_mut().enumerate() {
            *y = self.row(k).iter().zip(r).map(|(w, v)| w * v).sum();
        }
        Ok(())
    }

    pub fn output(&self, r: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.n_ro];
        self.output_into(r, &mut y)?;
        Ok(y)
    }

    /// One row per output dimension, one column per reservoir unit.
    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_path(path)?;
        for k in 0..self.n_ro {
            w.write_record(self.row(k).iter().map(|v| v.to_string()))?;
        }
        w.flush().map_err(|e| OdrcError::io(path, e))?;
        Ok(())
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_path(path)?;
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|e| OdrcError::Argument(format!("bad readout value {s:?}: {e}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Self::from_rows(rows)
    }
}

/// Rank-1 downdates held back before they are written into `P`. Between
/// write-backs `P r` is a read-only sweep plus low-rank corrections, which
/// roughly halves memory traffic on large reservoirs.
const DEFERRED_DOWNDATES: usize = 8;

/// Recursive-least-squares state: `P` (initially `I/α`) and update count.
#[derive(Debug, Clone)]
pub struct RlsState {
    n: usize,
    alpha: f64,
    /// Upper triangle of the stored `P`, row-major; row `i` holds columns `i..n`.
    packed: Vec<f64>,
    /// Deferred downdates `P ← P - k kᵀ / c`, oldest first.
    pending: Vec<(Vec<f64>, f64)>,
    updates: u64,
}

impl RlsState {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(OdrcError::Config(format!(
                "RLS constant alpha = {alpha} must be positive"
            )));
        }
        let mut state = Self {
            n,
            alpha,
            packed: vec![0.0; n * (n + 1) / 2],
            pending: Vec::with_capacity(DEFERRED_DOWNDATES),
            updates: 0,
        };
        state.reset();
        Ok(state)
    }

    /// Back to `P = I/α`.
    pub fn reset(&mut self) {
        self.packed.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.n {
            let o = self.offset(i);
            self.packed[o] = 1.0 / self.alpha;
        }
        self.pending.clear();
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Number of updates applied so far.
    pub fn updates(&self) -> u64 {
        self.updates
    }

    fn offset(&self, i: usize) -> usize {
        i * (2 * self.n - i + 1) / 2
    }

    /// Writes every deferred downdate into the stored triangle.
    pub fn flush(&mut self) {
        if !self.pending.is_empty() {
            self.sweep(None);
        }
    }

    /// Dense copy of `P`, row-major.
    pub fn p_dense(&mut self) -> Vec<f64> {
        self.flush();
        let n = self.n;
        let mut dense = vec![0.0; n * n];
        for i in 0..n {
            let o = self.offset(i);
            for j in i..n {
                let v = self.packed[o + j - i];
                dense[i * n + j] = v;
                dense[j * n + i] = v;
            }
        }
        dense
    }

    /// One pass over the triangle: applies the pending downdates, and when
    /// `r` is given returns `P r` with the updated `P`.
    fn sweep(&mut self, r: Option<&[f64]>) -> Vec<f64> {
        let n = self.n;
        let mut pending = std::mem::take(&mut self.pending);
        let mut k = vec![0.0; if r.is_some() { n } else { 0 }];
        let mut coeffs = vec![0.0; pending.len()];
        let mut offset = 0;
        for i in 0..n {
            let len = n - i;
            let row = &mut self.packed[offset..offset + len];
            offset += len;
            for ((kp, cp), a) in pending.iter().zip(coeffs.iter_mut()) {
                *a = kp[i] / cp;
            }
            for ((kp, _), &a) in pending.iter().zip(&coeffs) {
                for (p, kj) in row.iter_mut().zip(&kp[i..]) {
                    *p -= a * kj;
                }
            }
            if let Some(r) = r {
                k[i] += row_product(row, &r[i..], r[i], &mut k[i..]);
            }
        }
        // keep the allocation for the next batch
        pending.clear();
        self.pending = pending;
        k
    }

    /// `P r` for the current `P`: a read-only sweep of the stored triangle
    /// corrected for the deferred downdates, or a write-back sweep once
    /// enough downdates have accumulated.
    fn p_times(&mut self, r: &[f64]) -> Vec<f64> {
        if self.pending.len() >= DEFERRED_DOWNDATES {
            return self.sweep(Some(r));
        }
        let n = self.n;
        let mut k = vec![0.0; n];
        let mut offset = 0;
        for i in 0..n {
            let len = n - i;
            let row = &self.packed[offset..offset + len];
            offset += len;
            k[i] += row_product(row, &r[i..], r[i], &mut k[i..]);
        }
        // P = P_stored - Σ g gᵀ / c, applied in order
        for (g, c) in &self.pending {
            let s = g.iter().zip(r).map(|(a, b)| a * b).sum::<f64>() / c;
            for (kj, gj) in k.iter_mut().zip(g) {
                *kj -= s * gj;
            }
        }
        k
    }

    /// One RLS step on sample `(r, d)`.
    ///
    /// `e = W_ro r - d`, then `P ← P - P r rᵀ P / (1 + rᵀ P r)`, then
    /// `W_ro ← W_ro - e (P r)ᵀ` with the updated `P`. Returns `e`.
    pub fn update(&mut self, readout: &mut Readout, r: &[f64], d: &[f64]) -> Result<Vec<f64>> {
        check_dim("RLS rates", self.n, r.len())?;
        check_dim("readout units", self.n, readout.n())?;
        check_dim("RLS target", readout.n_ro(), d.len())?;
        if r.iter().chain(d).any(|v| !v.is_finite()) {
            return Err(OdrcError::NonFinite("RLS inputs"));
        }
        let e: Vec<f64> = readout
            .output(r)?
            .iter()
            .zip(d)
            .map(|(y, t)| y - t)
            .collect();
        let k = self.p_times(r);
        let c = 1.0 + r.iter().zip(&k).map(|(a, b)| a * b).sum::<f64>();
        if !(c.is_finite() && c > 0.0) {
            return Err(OdrcError::NonFinite("RLS gain denominator"));
        }
        let n = self.n;
        for (o, &eo) in e.iter().enumerate() {
            if eo != 0.0 {
                let scale = eo / c;
                for (w, kj) in readout.weights[o * n..(o + 1) * n].iter_mut().zip(&k) {
                    *w -= scale * kj;
                }
            }
        }
        self.pending.push((k, c));
        self.updates += 1;
        Ok(e)
    }
}

/// Independent partial sums in the row kernel.
const LANES: usize = 8;

/// Multiplies one stored row of the symmetric triangle into `P r`: returns
/// `row·r` and scatters `row[j]·ri` into `k[j]` for `j ≥ 1`.
#[inline]
fn row_product(row: &[f64], r: &[f64], ri: f64, k: &mut [f64]) -> f64 {
    let diag = row[0] * ri;
    let (row, r, k) = (&row[1..], &r[1..], &mut k[1..]);
    let mut lanes = [0.0f64; LANES];
    let split = row.len() - row.len() % LANES;
    for ((p8, r8), k8) in row[..split]
        .chunks_exact(LANES)
        .zip(r.chunks_exact(LANES))
        .zip(k.chunks_exact_mut(LANES))
    {
        for l in 0..LANES {
            lanes[l] += p8[l] * r8[l];
            k8[l] += p8[l] * ri;
        }
    }
    let mut acc = lanes.iter().sum::<f64>();
    for j in split..row.len() {
        acc += row[j] * r[j];
        k[j] += row[j] * ri;
    }
    diag + acc
}

/// Free-function form of [`RlsState::update`].
pub fn rls_update(
    rls: &mut RlsState,
    readout: &mut Readout,
    r: &[f64],
    d: &[f64],
) -> Result<Vec<f64>> {
    rls.update(readout, r, d)
}

/// RLS fires on every second simulation step: odd step indices.
pub fn update_cadence(step_index: u64) -> bool {
    step_index % 2 == 1
}

/// Whether an update fires at time `t_ms` for a training window `[1, end_ms]`.
pub fn fires_at(t_ms: i64, end_ms: i64) -> bool {
    t_ms >= 1 && t_ms <= end_ms && update_cadence(t_ms as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cadence_picks_odd_steps() {
        let fired: Vec<u64> = (0..4).filter(|&s| update_cadence(s)).collect();
        assert_eq!(fired, vec![1, 3]);
        assert_eq!((0..1000).filter(|&s| update_cadence(s)).count(), 500);
        assert!(!fires_at(0, 100));
        assert!(fires_at(1, 100));
        assert!(!fires_at(101, 100));
        assert!(!fires_at(-3, 100));
    }

    #[test]
    fn zero_error_leaves_readout_but_moves_p() {
        let mut rls = RlsState::new(3, 1.0).unwrap();
        let mut ro = Readout::zeros(1, 3);
        let before = rls.p_dense();
        let e = rls.update(&mut ro, &[0.5, -0.2, 0.1], &[0.0]).unwrap();
        assert_eq!(e, vec![0.0]);
        assert!(ro.weights().iter().all(|&w| w == 0.0));
        assert_ne!(before, rls.p_dense());
    }

    #[test]
    fn zero_rates_change_nothing() {
        let mut rls = RlsState::new(3, 2.0).unwrap();
        let mut ro = Readout::from_rows(vec![vec![1.0, 2.0, 3.0]]).unwrap();
        let before = rls.p_dense();
        rls.update(&mut ro, &[0.0; 3], &[4.0]).unwrap();
        assert_eq!(before, rls.p_dense());
        assert_eq!(ro.weights(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn non_finite_target_is_rejected() {
        let mut rls = RlsState::new(2, 1.0).unwrap();
        let mut ro = Readout::zeros(1, 2);
        assert!(matches!(
            rls.update(&mut ro, &[0.1, 0.2], &[f64::NAN]),
            Err(OdrcError::NonFinite(_))
        ));
    }
}
