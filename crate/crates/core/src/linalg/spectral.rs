use rand::Rng;

use super::{dot, norm, stream, RngSeed, SparseMatrix};
use crate::error::{Error, Result};

pub const POWER_TOL: f64 = 1e-8;
pub const POWER_MAX_ITERS: usize = 10_000;

const START_SEED: RngSeed = RngSeed(0x005e_ed0f_5bec);

/// Largest eigenvalue magnitude of a square, generally nonsymmetric matrix.
///
/// Each sweep takes two matrix products `y = A x`, `z = A y` from a
/// normalized iterate and tries two models of the dominant part of the
/// spectrum: a single real eigenvalue (`z ≈ λ y`), and a dominant pair
/// `λ² + c₁λ + c₀ = 0` fitted by least squares to `z + c₁ y + c₀ x ≈ 0`.
/// The pair model covers complex-conjugate and `±λ` dominant eigenvalues,
/// where plain power iteration never settles. Whichever model first has a
/// relative residual below `tol` supplies the radius.
///
/// If nothing converges within half the budget the iteration restarts once
/// from a fresh random vector.
pub fn spectral_radius(a: &SparseMatrix, tol: f64, max_iters: usize) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::Dimension {
            expected: a.rows(),
            got: a.cols(),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::config("power-iteration tolerance must be positive"));
    }
    if a.nnz() == 0 {
        return Ok(0.0);
    }

    let first_budget = max_iters.div_ceil(2);
    match run(a, tol, first_budget, stream::POWER_START) {
        Ok(rho) => Ok(rho),
        Err(_) => run(a, tol, max_iters - first_budget, stream::POWER_RESTART),
    }
}

fn run(a: &SparseMatrix, tol: f64, iters: usize, stream_id: u64) -> Result<f64> {
    let n = a.rows();
    let mut rng = START_SEED.rng(stream_id);
    let mut x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
    let nx = norm(&x);
    x.iter_mut().for_each(|v| *v /= nx);

    let mut y = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut resid = vec![0.0; n];
    let mut estimate = f64::NAN;

    for _ in 0..iters {
        a.mul_vec_into(&x, &mut y);
        let ny = norm(&y);
        if ny == 0.0 {
            // x landed in the null space; the dominant part of the spectrum is 0
            // on the Krylov space it spans.
            return Ok(0.0);
        }
        a.mul_vec_into(&y, &mut z);
        let nz = norm(&z);
        if nz == 0.0 {
            return Ok(0.0);
        }

        // single real eigenvalue
        let yy = dot(&y, &y);
        let lambda = dot(&y, &z) / yy;
        for i in 0..n {
            resid[i] = z[i] - lambda * y[i];
        }
        let real_resid = norm(&resid) / nz;
        estimate = lambda.abs();
        if real_resid <= tol {
            return Ok(estimate);
        }

        // dominant pair: solve the 2x2 normal equations for (c1, c0)
        let xx = dot(&x, &x);
        let xy = dot(&x, &y);
        let det = yy * xx - xy * xy;
        if det > 1e-14 * yy * xx {
            let yz = dot(&y, &z);
            let xz = dot(&x, &z);
            let c1 = (-yz * xx + xz * xy) / det;
            let c0 = (-xz * yy + yz * xy) / det;
            for i in 0..n {
                resid[i] = z[i] + c1 * y[i] + c0 * x[i];
            }
            let pair_resid = norm(&resid) / nz;
            let disc = c1 * c1 - 4.0 * c0;
            let pair_radius = if disc < 0.0 {
                c0.sqrt()
            } else {
                let s = disc.sqrt();
                ((-c1 + s) / 2.0).abs().max(((-c1 - s) / 2.0).abs())
            };
            if pair_resid <= tol {
                return Ok(pair_radius);
            }
            if pair_resid < real_resid {
                estimate = pair_radius;
            }
        }

        for i in 0..n {
            x[i] = z[i] / nz;
        }
    }

    Err(Error::NoConvergence {
        iterations: iters,
        last_estimate: estimate,
        last_iterate: x,
    })
}

/// `a * (target / ρ(a))`.
pub fn rescale_to_radius(a: &SparseMatrix, target: f64) -> Result<SparseMatrix> {
    let rho = spectral_radius(a, POWER_TOL, POWER_MAX_ITERS)?;
    if rho == 0.0 || !rho.is_finite() {
        return Err(Error::ZeroSpectralRadius);
    }
    Ok(a.scaled(target / rho))
}

#[cfg(test)]
mod tests {
    use super::super::{random_sparse, DenseMatrix};
    use super::*;
    use approx::assert_relative_eq;

    fn diag(values: &[f64]) -> SparseMatrix {
        SparseMatrix::from_triplets(
            values.len(),
            values.len(),
            values.iter().enumerate().map(|(i, &v)| (i, i, v)),
        )
        .unwrap()
    }

    /// Independent oracle: all eigenvalues through nalgebra's real Schur form.
    fn dense_radius(a: &SparseMatrix) -> f64 {
        let d: DenseMatrix = a.to_dense();
        d.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn diagonal_spectrum() {
        let rho = spectral_radius(&diag(&[3.0, -1.0, 0.5]), POWER_TOL, POWER_MAX_ITERS).unwrap();
        assert_relative_eq!(rho, 3.0, max_relative = 1e-8);
    }

    #[test]
    fn permutation_matrix() {
        // eigenvalues ±1: a tie that plain power iteration cannot resolve
        let a = SparseMatrix::from_triplets(2, 2, [(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        let rho = spectral_radius(&a, POWER_TOL, POWER_MAX_ITERS).unwrap();
        assert_relative_eq!(rho, 1.0, max_relative = 1e-8);
    }

    #[test]
    fn rotation_has_complex_pair() {
        let a = SparseMatrix::from_triplets(3, 3, [(0, 1, -2.0), (1, 0, 2.0), (2, 2, 0.5)]).unwrap();
        let rho = spectral_radius(&a, POWER_TOL, POWER_MAX_ITERS).unwrap();
        assert_relative_eq!(rho, 2.0, max_relative = 1e-8);
    }

    #[test]
    fn matches_dense_eigensolver_on_random_instances() {
        for seed in 0..20 {
            let a = random_sparse(20, 0.3, -0.5, 0.5, RngSeed(seed)).unwrap();
            let expected = dense_radius(&a);
            let rho = spectral_radius(&a, POWER_TOL, POWER_MAX_ITERS).unwrap();
            assert_relative_eq!(rho, expected, max_relative = 1e-6);
        }
    }

    #[test]
    fn zero_matrix_has_zero_radius() {
        let a = SparseMatrix::zeros(4, 4);
        assert_eq!(spectral_radius(&a, POWER_TOL, POWER_MAX_ITERS).unwrap(), 0.0);
        assert!(matches!(rescale_to_radius(&a, 1.2), Err(Error::ZeroSpectralRadius)));
    }

    #[test]
    fn nilpotent_cannot_be_rescaled() {
        let a = SparseMatrix::from_triplets(2, 2, [(0, 1, 1.0)]).unwrap();
        assert!(rescale_to_radius(&a, 1.0).is_err());
    }

    #[test]
    fn rejects_rectangular() {
        let a = SparseMatrix::zeros(2, 3);
        assert!(spectral_radius(&a, POWER_TOL, 10).is_err());
    }

    #[test]
    fn diagonal_rescale() {
        let a = rescale_to_radius(&diag(&[2.0, 1.0]), 1.2).unwrap();
        assert_relative_eq!(a.get(0, 0), 1.2, max_relative = 1e-12);
        assert_relative_eq!(a.get(1, 1), 0.6, max_relative = 1e-12);
    }

    #[test]
    fn rescale_to_own_radius_is_identity() {
        let a = random_sparse(30, 0.2, -0.5, 0.5, RngSeed(3)).unwrap();
        let rho = spectral_radius(&a, POWER_TOL, POWER_MAX_ITERS).unwrap();
        let b = rescale_to_radius(&a, rho).unwrap();
        for ((_, _, x), (_, _, y)) in a.triplets().zip(b.triplets()) {
            assert_relative_eq!(x, y, max_relative = 1e-14);
        }
    }

    #[test]
    fn rescaled_random_matrix_hits_target() {
        let a = random_sparse(50, 0.12, -0.5, 0.5, RngSeed(11)).unwrap();
        let b = rescale_to_radius(&a, 1.2).unwrap();
        let rho = spectral_radius(&b, POWER_TOL, POWER_MAX_ITERS).unwrap();
        assert_relative_eq!(rho, 1.2, max_relative = 1e-6);
        assert_relative_eq!(dense_radius(&b), 1.2, max_relative = 1e-5);
    }
}
