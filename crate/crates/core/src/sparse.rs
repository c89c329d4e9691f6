//! Compressed sparse row storage for the random recurrent weight matrices.

use rand::Rng;
use rand_distr::{Distribution, Normal};

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    /// Column indices; `u32` keeps the matrix-vector product lighter on memory.
    col_idx: Vec<u32>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            row_ptr: vec![0; rows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Bernoulli(`p`) sparsity pattern with Gaussian(0, `sd`) nonzeros.
    ///
    /// Entries are visited in row-major order and each one consumes a
    /// uniform draw, plus a normal draw when it is kept, so the pattern is a
    /// pure function of the generator state.
    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, p: f64, sd: f64, rng: &mut R) -> Self {
        assert!(
            cols <= u32::MAX as usize,
            "column count {cols} exceeds the index range"
        );
        let normal = Normal::new(0.0, sd.abs()).expect("finite standard deviation");
        let mut row_ptr = Vec::with_capacity(rows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for _ in 0..rows {
            for j in 0..cols {
                if rng.random::<f64>() < p {
                    let v = normal.sample(rng);
                    if sd != 0.0 {
                        col_idx.push(j as u32);
                        values.push(v);
                    }
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(row, col, value)` triplets in storage order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1])
                .map(move |k| (i, self.col_idx[k] as usize, self.values[k]))
        })
    }

    pub fn row_dot(&self, row: usize, v: &[f64]) -> f64 {
        let (lo, hi) = (self.row_ptr[row], self.row_ptr[row + 1]);
        let (cols, vals) = (&self.col_idx[lo..hi], &self.values[lo..hi]);
        // four independent partial sums hide the add latency
        let mut lanes = [0.0f64; 4];
        let split = cols.len() - cols.len() % 4;
        for (c4, w4) in cols[..split]
            .chunks_exact(4)
            .zip(vals[..split].chunks_exact(4))
        {
            for l in 0..4 {
                lanes[l] += w4[l] * v[c4[l] as usize];
            }
        }
        let tail: f64 = cols[split..]
            .iter()
            .zip(&vals[split..])
            .map(|(&j, &w)| w * v[j as usize])
            .sum();
        (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]) + tail
    }

    /// `out = self * v`.
    pub fn mul_vec_into(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row_dot(i, v);
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.cols]; self.rows];
        for (i, j, v) in self.triplets() {
            dense[i][j] = v;
        }
        dense
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_dense_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = CsrMatrix::random(20, 15, 0.3, 1.0, &mut rng);
        let v: Vec<f64> = (0..15).map(|k| (k as f64 * 0.37).sin()).collect();
        let mut out = vec![0.0; 20];
        m.mul_vec_into(&v, &mut out);
        let dense = m.to_dense();
        for i in 0..20 {
            let expect: f64 = dense[i].iter().zip(&v).map(|(a, b)| a * b).sum();
            assert!((out[i] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_sd_gives_empty_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = CsrMatrix::random(10, 10, 0.5, 0.0, &mut rng);
        assert_eq!(m.nnz(), 0);
    }
}
