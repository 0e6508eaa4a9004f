use rand::Rng;

use super::RngSeed;
use crate::error::{Error, Result};

/// Row-compressed sparse matrix.
///
/// Built from coordinate triplets; entries within a row are kept in
/// ascending column order so that products are reproducible bit for bit
/// across save/load.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut entries: Vec<(usize, usize, f64)> = triplets.into_iter().collect();
        for &(r, c, v) in &entries {
            if r >= rows || c >= cols {
                return Err(Error::config(format!("entry ({r}, {c}) outside {rows}x{cols} matrix")));
            }
            if !v.is_finite() {
                return Err(Error::config(format!("entry ({r}, {c}) is not finite")));
            }
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));
        if let Some(w) = entries.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::config(format!("duplicate entry at ({}, {})", w[0].0, w[0].1)));
        }

        let mut row_ptr = vec![0usize; rows + 1];
        for &(r, _, _) in &entries {
            row_ptr[r + 1] += 1;
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        let col_idx = entries.iter().map(|e| e.1).collect();
        let values = entries.iter().map(|e| e.2).collect();
        Ok(SparseMatrix {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn from_dense(dense: &super::DenseMatrix) -> Self {
        let triplets = (0..dense.nrows()).flat_map(|r| {
            (0..dense.ncols())
                .filter(move |&c| dense[(r, c)] != 0.0)
                .map(move |c| (r, c, dense[(r, c)]))
        });
        Self::from_triplets(dense.nrows(), dense.ncols(), triplets)
            .expect("dense matrix entries are in range and unique")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            row_ptr: vec![0; rows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Triplets in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.col_idx[k], self.values[k]))
        })
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[span.clone()].binary_search(&c) {
            Ok(k) => self.values[span.start + k],
            Err(_) => 0.0,
        }
    }

    /// `out = self * x`
    #[inline]
    pub fn mul_vec_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *o = acc;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        self.mul_vec_into(x, &mut out);
        out
    }

    pub fn scaled(&self, factor: f64) -> Self {
        SparseMatrix {
            values: self.values.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }

    pub fn to_dense(&self) -> super::DenseMatrix {
        let mut d = super::DenseMatrix::zeros(self.rows, self.cols);
        for (r, c, v) in self.triplets() {
            d[(r, c)] = v;
        }
        d
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Square `m x m` matrix whose entries are independently nonzero with
/// probability `density`, nonzero values uniform on `[low, high]`.
pub fn random_sparse(m: usize, density: f64, low: f64, high: f64, seed: RngSeed) -> Result<SparseMatrix> {
    random_sparse_stream(m, density, low, high, seed, 0)
}

pub(crate) fn random_sparse_stream(
    m: usize,
    density: f64,
    low: f64,
    high: f64,
    seed: RngSeed,
    stream: u64,
) -> Result<SparseMatrix> {
    if m == 0 {
        return Err(Error::config("matrix size must be at least 1"));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::config(format!("density {density} not in (0, 1]")));
    }
    if !(low.is_finite() && high.is_finite() && low <= high) {
        return Err(Error::config(format!("bad value range [{low}, {high}]")));
    }
    let mut rng = seed.rng(stream);
    let width = high - low;
    let mut triplets = Vec::with_capacity(((m * m) as f64 * density * 1.2) as usize + 1);
    for r in 0..m {
        for c in 0..m {
            if rng.random::<f64>() < density {
                triplets.push((r, c, low + width * rng.random::<f64>()));
            }
        }
    }
    SparseMatrix::from_triplets(m, m, triplets)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nonzero_count_is_binomial() {
        let m = 1000;
        let p = 6.0 / m as f64;
        let a = random_sparse(m, p, -0.5, 0.5, RngSeed(7)).unwrap();
        let n = (m * m) as f64;
        let mean = n * p;
        let sd = (n * p * (1.0 - p)).sqrt();
        assert!((a.nnz() as f64 - mean).abs() < 4.0 * sd, "nnz = {}", a.nnz());
        assert!(a.triplets().all(|(_, _, v)| (-0.5..=0.5).contains(&v)));
    }

    #[test]
    fn degenerate_bounds_give_zero_scalar() {
        let a = random_sparse(1, 1.0, 0.0, 0.0, RngSeed(1)).unwrap();
        assert_eq!(a.rows(), 1);
        assert_eq!(a.get(0, 0), 0.0);
        assert_eq!(a.to_dense(), super::super::DenseMatrix::zeros(1, 1));
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let a = random_sparse(50, 0.1, -0.5, 0.5, RngSeed(99)).unwrap();
        let b = random_sparse(50, 0.1, -0.5, 0.5, RngSeed(99)).unwrap();
        let ta: Vec<_> = a.triplets().map(|(r, c, v)| (r, c, v.to_bits())).collect();
        let tb: Vec<_> = b.triplets().map(|(r, c, v)| (r, c, v.to_bits())).collect();
        assert_eq!(ta, tb);
        let c = random_sparse(50, 0.1, -0.5, 0.5, RngSeed(100)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_bad_configuration() {
        assert!(random_sparse(10, 0.0, -1.0, 1.0, RngSeed(0)).is_err());
        assert!(random_sparse(10, 1.5, -1.0, 1.0, RngSeed(0)).is_err());
        assert!(random_sparse(10, 0.5, 1.0, -1.0, RngSeed(0)).is_err());
        assert!(random_sparse(0, 0.5, -1.0, 1.0, RngSeed(0)).is_err());
    }

    #[test]
    fn triplet_validation() {
        assert!(SparseMatrix::from_triplets(2, 2, [(0, 0, 1.0), (0, 0, 2.0)]).is_err());
        assert!(SparseMatrix::from_triplets(2, 2, [(2, 0, 1.0)]).is_err());
        let a = SparseMatrix::from_triplets(2, 3, [(1, 2, 4.0), (0, 1, 2.0), (1, 0, 1.0)]).unwrap();
        assert_eq!(a.mul_vec(&[1.0, 1.0, 1.0]), vec![2.0, 5.0]);
        let order: Vec<_> = a.triplets().map(|(r, c, _)| (r, c)).collect();
        assert_eq!(order, vec![(0, 1), (1, 0), (1, 2)]);
    }
}
