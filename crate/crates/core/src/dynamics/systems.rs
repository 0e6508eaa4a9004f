use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Autonomous vector field `F` of `dx/dt = F(x) + forcing`.
pub trait DynamicalSystem: Send + Sync {
    fn name(&self) -> &str;
    fn dim(&self) -> usize;
    /// Writes `F(x)` into `out`; both slices have length `dim()`.
    fn drift(&self, x: &[f64], out: &mut [f64]);
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Lorenz {
    pub sigma: f64,
    pub rho: f64,
    pub beta: f64,
}

impl Default for Lorenz {
    fn default() -> Self {
        Lorenz {
            sigma: 10.0,
            rho: 28.0,
            beta: 8.0 / 3.0,
        }
    }
}

impl DynamicalSystem for Lorenz {
    fn name(&self) -> &str {
        "lorenz"
    }

    fn dim(&self) -> usize {
        3
    }

    #[inline]
    fn drift(&self, s: &[f64], out: &mut [f64]) {
        let (x, y, z) = (s[0], s[1], s[2]);
        out[0] = self.sigma * (y - x);
        out[1] = x * (self.rho - z) - y;
        out[2] = x * y - self.beta * z;
    }
}

pub fn lorenz_drift(state: &[f64], sigma: f64, rho: f64, beta: f64) -> Result<Vec<f64>> {
    if state.len() != 3 {
        return Err(Error::Dimension {
            expected: 3,
            got: state.len(),
        });
    }
    let mut out = vec![0.0; 3];
    Lorenz { sigma, rho, beta }.drift(state, &mut out);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Rossler {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Default for Rossler {
    fn default() -> Self {
        Rossler { a: 0.2, b: 0.2, c: 5.7 }
    }
}

impl DynamicalSystem for Rossler {
    fn name(&self) -> &str {
        "rossler"
    }

    fn dim(&self) -> usize {
        3
    }

    #[inline]
    fn drift(&self, s: &[f64], out: &mut [f64]) {
        let (x, y, z) = (s[0], s[1], s[2]);
        out[0] = -y - z;
        out[1] = x + self.a * y;
        out[2] = self.b + z * (x - self.c);
    }
}

/// One Euler step of the Rössler system.
pub fn rossler_step(state: &[f64], dt: f64, a: f64, b: f64, c: f64) -> Result<Vec<f64>> {
    if state.len() != 3 {
        return Err(Error::Dimension {
            expected: 3,
            got: state.len(),
        });
    }
    let mut d = [0.0; 3];
    Rossler { a, b, c }.drift(state, &mut d);
    Ok(state.iter().zip(d).map(|(x, dx)| x + dt * dx).collect())
}

/// A system given by a closure, mostly for tests and ad-hoc experiments.
pub struct FnSystem<F> {
    name: String,
    dim: usize,
    f: F,
}

impl<F> FnSystem<F>
where
    F: Fn(&[f64], &mut [f64]) + Send + Sync,
{
    pub fn new(name: impl Into<String>, dim: usize, f: F) -> Self {
        FnSystem {
            name: name.into(),
            dim,
            f,
        }
    }
}

impl<F> DynamicalSystem for FnSystem<F>
where
    F: Fn(&[f64], &mut [f64]) + Send + Sync,
{
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn drift(&self, x: &[f64], out: &mut [f64]) {
        (self.f)(x, out)
    }
}
