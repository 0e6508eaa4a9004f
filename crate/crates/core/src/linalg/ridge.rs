use nalgebra::Cholesky;

use super::DenseMatrix;
use crate::error::{Error, Result};

const CHUNK: usize = 256;

/// Streaming accumulator for the ridge normal equations.
///
/// Holds the Gram matrix `R Rᵀ` and the cross term `F Rᵀ` of every pushed
/// (state, target) pair. Pairs are buffered and folded in with a blocked
/// matrix product, so the full state history is never stored.
#[derive(Debug, Clone)]
pub struct RidgeAccumulator {
    gram: DenseMatrix,
    cross: DenseMatrix,
    states: DenseMatrix,
    targets: DenseMatrix,
    pending: usize,
    samples: usize,
}

impl RidgeAccumulator {
    pub fn new(state_dim: usize, target_dim: usize) -> Self {
        RidgeAccumulator {
            gram: DenseMatrix::zeros(state_dim, state_dim),
            cross: DenseMatrix::zeros(target_dim, state_dim),
            states: DenseMatrix::zeros(state_dim, CHUNK),
            targets: DenseMatrix::zeros(target_dim, CHUNK),
            pending: 0,
            samples: 0,
        }
    }

    pub fn state_dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn target_dim(&self) -> usize {
        self.cross.nrows()
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn push(&mut self, state: &[f64], target: &[f64]) -> Result<()> {
        if state.len() != self.state_dim() {
            return Err(Error::Dimension {
                expected: self.state_dim(),
                got: state.len(),
            });
        }
        if target.len() != self.target_dim() {
            return Err(Error::Dimension {
                expected: self.target_dim(),
                got: target.len(),
            });
        }
        self.states.column_mut(self.pending).copy_from_slice(state);
        self.targets.column_mut(self.pending).copy_from_slice(target);
        self.pending += 1;
        self.samples += 1;
        if self.pending == CHUNK {
            self.flush();
        }
        Ok(())
    }

    fn flush(&mut self) {
        if self.pending == 0 {
            return;
        }
        let states = self.states.columns(0, self.pending);
        let targets = self.targets.columns(0, self.pending);
        let states_t = states.transpose();
        self.gram.gemm(1.0, &states, &states_t, 1.0);
        self.cross.gemm(1.0, &targets, &states_t, 1.0);
        self.pending = 0;
    }

    /// `(R Rᵀ, F Rᵀ)` over everything pushed so far.
    pub fn normal_equations(&mut self) -> (&DenseMatrix, &DenseMatrix) {
        self.flush();
        (&self.gram, &self.cross)
    }

    pub fn solve(&mut self, lambda: f64) -> Result<DenseMatrix> {
        if self.samples == 0 {
            return Err(Error::Empty("no samples accumulated for ridge regression"));
        }
        self.flush();
        solve_normal(&self.gram, &self.cross, lambda)
    }
}

/// Readout minimizing `Σ‖f − W r‖² + λ Tr(W Wᵀ)` given states as columns of
/// an `M x K` matrix and targets as columns of an `N x K` matrix.
pub fn ridge_solve(states: &DenseMatrix, targets: &DenseMatrix, lambda: f64) -> Result<DenseMatrix> {
    if states.ncols() == 0 {
        return Err(Error::Empty("ridge regression needs at least one sample"));
    }
    if states.ncols() != targets.ncols() {
        return Err(Error::SeriesMismatch(format!(
            "{} state columns vs {} target columns",
            states.ncols(),
            targets.ncols()
        )));
    }
    if states.iter().any(|v| !v.is_finite()) {
        return Err(Error::config("reservoir states contain non-finite values"));
    }
    let states_t = states.transpose();
    let gram = states * &states_t;
    let cross = targets * &states_t;
    solve_normal(&gram, &cross, lambda)
}

/// Solves `W (G + λI) = B` through a Cholesky factorization of `G + λI`.
fn solve_normal(gram: &DenseMatrix, cross: &DenseMatrix, lambda: f64) -> Result<DenseMatrix> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::config(format!(
            "ridge parameter {lambda} must be finite and >= 0"
        )));
    }
    let n = gram.nrows();
    let mut system = gram.clone();
    for i in 0..n {
        system[(i, i)] += lambda;
    }
    let chol = Cholesky::new(system).ok_or(Error::RegularizationRequired)?;
    if lambda == 0.0 {
        // rounding can leave tiny positive pivots on an exactly singular Gram matrix
        let l = chol.l_dirty();
        let max_diag = (0..n).map(|i| gram[(i, i)]).fold(0.0, f64::max);
        let floor = max_diag * f64::EPSILON * n as f64;
        if (0..n).any(|i| l[(i, i)] * l[(i, i)] <= floor) {
            return Err(Error::RegularizationRequired);
        }
    }
    // G is symmetric, so W (G + λI) = B  ⇔  (G + λI) Wᵀ = Bᵀ.
    Ok(chol.solve(&cross.transpose()).transpose())
}
