use std::path::PathBuf;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::systems::{DynamicalSystem, Rossler};
use super::{prefixed_labels, steps_for};
use crate::error::{Error, Result};
use crate::linalg::{stream, RngSeed};
use crate::series::TimeSeries;

fn default_frequency() -> f64 {
    0.05
}
fn one() -> f64 {
    1.0
}
fn default_rossler_scale() -> f64 {
    0.1
}
fn default_transient() -> f64 {
    super::DEFAULT_TRANSIENT
}
fn default_diffusion() -> f64 {
    1.25
}
fn default_theta() -> f64 {
    0.5
}
fn default_hold() -> f64 {
    f64::INFINITY
}

/// What a forcing signal is, independent of the grid it is evaluated on.
///
/// The two-channel kinds write their channels into the signal's active
/// components in order; every other component is exactly zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ForcingKind {
    Zero,
    /// `A [cos(ωt), sin(ωt)]`
    SinusoidPair {
        #[serde(default = "default_frequency")]
        frequency: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `A [cos(ωt), cos(ω(t − lag))]`
    OffsetCosines {
        #[serde(default = "default_frequency")]
        frequency: f64,
        #[serde(default = "one")]
        lag: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `A [sign(cos(ωt)), sign(sin(ωt))]`
    SquarePair {
        #[serde(default = "default_frequency")]
        frequency: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// Cycles through `levels`, holding each for `hold` time units. A single
    /// level is a constant forcing.
    PiecewiseConstant {
        levels: Vec<Vec<f64>>,
        #[serde(default = "default_hold")]
        hold: f64,
    },
    /// `scale · [x_R, y_R]` of an auxiliary Rössler system started at
    /// (1, 1, 1) and run for `transient` time units before sampling.
    RosslerScaled {
        #[serde(default = "default_rossler_scale")]
        scale: f64,
        #[serde(default)]
        rossler: Rossler,
        #[serde(default = "default_transient")]
        transient: f64,
    },
    /// Independent Ornstein–Uhlenbeck paths `dX = −θX dt + η dt`,
    /// `⟨η(t)η(t′)⟩ = 2D δ(t − t′)`, one per active component.
    OrnsteinUhlenbeck {
        #[serde(default = "default_diffusion")]
        diffusion: f64,
        #[serde(default = "default_theta")]
        theta: f64,
        #[serde(default)]
        x0: f64,
    },
    /// Values read from a CSV time series.
    ExternalSeries {
        path: PathBuf,
    },
}

impl ForcingKind {
    pub fn label(&self) -> &'static str {
        match self {
            ForcingKind::Zero => "zero",
            ForcingKind::SinusoidPair { .. } => "sinusoid-pair",
            ForcingKind::OffsetCosines { .. } => "offset-cosines",
            ForcingKind::SquarePair { .. } => "square-pair",
            ForcingKind::PiecewiseConstant { .. } => "piecewise-constant",
            ForcingKind::RosslerScaled { .. } => "rossler-scaled",
            ForcingKind::OrnsteinUhlenbeck { .. } => "ornstein-uhlenbeck",
            ForcingKind::ExternalSeries { .. } => "external-series",
        }
    }

    pub fn is_stochastic(&self) -> bool {
        matches!(self, ForcingKind::OrnsteinUhlenbeck { .. })
    }
}

/// A vector-valued function of time acting additively on a system.
///
/// Rössler, Ornstein–Uhlenbeck and external signals are precomputed on a
/// time grid and looked up by nearest sample when queried on that grid,
/// with linear interpolation between samples otherwise.
#[derive(Debug, Clone)]
pub struct ForcingSignal {
    dim: usize,
    active: Vec<usize>,
    kind: ForcingKind,
    samples: Option<TimeSeries>,
}

impl ForcingSignal {
    pub fn zero(dim: usize) -> Self {
        ForcingSignal {
            dim,
            active: Vec::new(),
            kind: ForcingKind::Zero,
            samples: None,
        }
    }

    fn analytic(dim: usize, active: Vec<usize>, kind: ForcingKind) -> Result<Self> {
        check_active(dim, &active)?;
        match &kind {
            ForcingKind::SinusoidPair { frequency, amplitude }
            | ForcingKind::SquarePair { frequency, amplitude }
            | ForcingKind::OffsetCosines {
                frequency, amplitude, ..
            } => {
                if active.len() != 2 {
                    return Err(Error::config(format!(
                        "{} forcing drives exactly two components, got {}",
                        kind.label(),
                        active.len()
                    )));
                }
                if !frequency.is_finite() || !amplitude.is_finite() {
                    return Err(Error::config("forcing parameters must be finite"));
                }
            }
            ForcingKind::PiecewiseConstant { levels, hold } => {
                if levels.is_empty() {
                    return Err(Error::config("piecewise-constant forcing needs at least one level"));
                }
                if let Some(l) = levels.iter().find(|l| l.len() != active.len()) {
                    return Err(Error::config(format!(
                        "level {l:?} has {} values for {} active components",
                        l.len(),
                        active.len()
                    )));
                }
                if !(*hold > 0.0) {
                    return Err(Error::config("piecewise-constant hold time must be positive"));
                }
            }
            _ => unreachable!("not an analytic kind"),
        }
        Ok(ForcingSignal {
            dim,
            active,
            kind,
            samples: None,
        })
    }

    pub fn sinusoid_pair(dim: usize, active: Vec<usize>, frequency: f64, amplitude: f64) -> Result<Self> {
        Self::analytic(dim, active, ForcingKind::SinusoidPair { frequency, amplitude })
    }

    pub fn offset_cosines(dim: usize, active: Vec<usize>, frequency: f64, lag: f64, amplitude: f64) -> Result<Self> {
        Self::analytic(
            dim,
            active,
            ForcingKind::OffsetCosines {
                frequency,
                lag,
                amplitude,
            },
        )
    }

    pub fn square_pair(dim: usize, active: Vec<usize>, frequency: f64, amplitude: f64) -> Result<Self> {
        Self::analytic(dim, active, ForcingKind::SquarePair { frequency, amplitude })
    }

    pub fn piecewise_constant(dim: usize, active: Vec<usize>, levels: Vec<Vec<f64>>, hold: f64) -> Result<Self> {
        Self::analytic(dim, active, ForcingKind::PiecewiseConstant { levels, hold })
    }

    pub fn constant(dim: usize, active: Vec<usize>, value: Vec<f64>) -> Result<Self> {
        Self::piecewise_constant(dim, active, vec![value], f64::INFINITY)
    }

    /// Samples `scale · [x_R, y_R]` on `t_start + i·dt`, `i = 0..=steps`.
    #[allow(clippy::too_many_arguments)]
    pub fn rossler_scaled(
        dim: usize,
        active: Vec<usize>,
        scale: f64,
        rossler: &Rossler,
        dt: f64,
        t_start: f64,
        steps: usize,
        transient: f64,
    ) -> Result<Self> {
        check_active(dim, &active)?;
        if active.len() != 2 {
            return Err(Error::config("rossler-scaled forcing drives exactly two components"));
        }
        let mut r = super::DEFAULT_X0.to_vec();
        let mut d = [0.0; 3];
        let mut euler = |r: &mut Vec<f64>| {
            rossler.drift(r, &mut d);
            for k in 0..3 {
                r[k] += dt * d[k];
            }
        };
        for _ in 0..steps_for(transient, dt)? {
            euler(&mut r);
        }
        let mut series = TimeSeries::with_capacity(dt, t_start, prefixed_labels("g", &active, dim), steps + 1);
        for i in 0..=steps {
            series.push(&[scale * r[0], scale * r[1]])?;
            if i < steps {
                euler(&mut r);
            }
        }
        Ok(ForcingSignal {
            dim,
            active,
            kind: ForcingKind::RosslerScaled {
                scale,
                rossler: *rossler,
                transient,
            },
            samples: Some(series),
        })
    }

    /// Independent OU paths on `t_start + i·dt`, `i = 0..=steps`; channel `k`
    /// draws its noise from stream `NOISE_BASE + k` of `seed`.
    #[allow(clippy::too_many_arguments)]
    pub fn ornstein_uhlenbeck(
        dim: usize,
        active: Vec<usize>,
        diffusion: f64,
        theta: f64,
        x0: f64,
        dt: f64,
        t_start: f64,
        steps: usize,
        seed: RngSeed,
    ) -> Result<Self> {
        check_active(dim, &active)?;
        let paths = (0..active.len())
            .map(|k| ou_channel(steps, dt, diffusion, theta, x0, seed, stream::NOISE_BASE + k as u64))
            .collect::<Result<Vec<_>>>()?;
        let mut series = TimeSeries::with_capacity(dt, t_start, prefixed_labels("g", &active, dim), steps + 1);
        let mut row = vec![0.0; active.len()];
        for i in 0..=steps {
            for (slot, p) in row.iter_mut().zip(&paths) {
                *slot = p[i];
            }
            series.push(&row)?;
        }
        Ok(ForcingSignal {
            dim,
            active,
            kind: ForcingKind::OrnsteinUhlenbeck { diffusion, theta, x0 },
            samples: Some(series),
        })
    }

    pub fn external(dim: usize, active: Vec<usize>, series: TimeSeries, path: PathBuf) -> Result<Self> {
        check_active(dim, &active)?;
        if series.dim() != active.len() {
            return Err(Error::Dimension {
                expected: active.len(),
                got: series.dim(),
            });
        }
        if series.is_empty() {
            return Err(Error::Empty("external forcing series is empty"));
        }
        Ok(ForcingSignal {
            dim,
            active,
            kind: ForcingKind::ExternalSeries { path },
            samples: Some(series),
        })
    }

    /// Builds a signal of `kind` covering the grid `i·dt`, `i = 0..=steps`.
    pub fn build(
        kind: &ForcingKind,
        dim: usize,
        active: Vec<usize>,
        dt: f64,
        steps: usize,
        seed: RngSeed,
    ) -> Result<Self> {
        match kind.clone() {
            ForcingKind::Zero => Ok(Self::zero(dim)),
            k @ (ForcingKind::SinusoidPair { .. }
            | ForcingKind::OffsetCosines { .. }
            | ForcingKind::SquarePair { .. }
            | ForcingKind::PiecewiseConstant { .. }) => Self::analytic(dim, active, k),
            ForcingKind::RosslerScaled {
                scale,
                rossler,
                transient,
            } => Self::rossler_scaled(dim, active, scale, &rossler, dt, 0.0, steps, transient),
            ForcingKind::OrnsteinUhlenbeck { diffusion, theta, x0 } => {
                Self::ornstein_uhlenbeck(dim, active, diffusion, theta, x0, dt, 0.0, steps, seed)
            }
            ForcingKind::ExternalSeries { path } => {
                let series = TimeSeries::read_csv(&path)?;
                Self::external(dim, active, series, path)
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn kind(&self) -> &ForcingKind {
        &self.kind
    }

    pub fn samples(&self) -> Option<&TimeSeries> {
        self.samples.as_ref()
    }

    /// Writes the full `dim`-vector forcing at time `t` into `out`.
    pub fn eval_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        debug_assert_eq!(out.len(), self.dim);
        out.fill(0.0);
        let a = &self.active;
        match &self.kind {
            ForcingKind::Zero => {}
            ForcingKind::SinusoidPair { frequency, amplitude } => {
                let (s, c) = (frequency * t).sin_cos();
                out[a[0]] = amplitude * c;
                out[a[1]] = amplitude * s;
            }
            ForcingKind::OffsetCosines {
                frequency,
                lag,
                amplitude,
            } => {
                out[a[0]] = amplitude * (frequency * t).cos();
                out[a[1]] = amplitude * (frequency * (t - lag)).cos();
            }
            ForcingKind::SquarePair { frequency, amplitude } => {
                let (s, c) = (frequency * t).sin_cos();
                out[a[0]] = amplitude * sign(c);
                out[a[1]] = amplitude * sign(s);
            }
            ForcingKind::PiecewiseConstant { levels, hold } => {
                let idx = if levels.len() == 1 || !hold.is_finite() {
                    0
                } else {
                    ((t / hold).floor() as i64).rem_euclid(levels.len() as i64) as usize
                };
                for (&c, &v) in a.iter().zip(&levels[idx]) {
                    out[c] = v;
                }
            }
            ForcingKind::RosslerScaled { .. }
            | ForcingKind::OrnsteinUhlenbeck { .. }
            | ForcingKind::ExternalSeries { .. } => {
                let series = self.samples.as_ref().expect("sampled kinds carry samples");
                sample_at(series, t, a, out)?;
            }
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(t, &mut out)?;
        Ok(out)
    }
}

pub fn eval_forcing(signal: &ForcingSignal, t: f64) -> Result<Vec<f64>> {
    signal.eval(t)
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn check_active(dim: usize, active: &[usize]) -> Result<()> {
    for (i, &c) in active.iter().enumerate() {
        if c >= dim {
            return Err(Error::config(format!("active component {c} outside dimension {dim}")));
        }
        if active[..i].contains(&c) {
            return Err(Error::config(format!("active component {c} listed twice")));
        }
    }
    Ok(())
}

/// Grid points closer than this fraction of a step count as exact hits.
const ON_GRID: f64 = 1e-6;

fn sample_at(series: &TimeSeries, t: f64, active: &[usize], out: &mut [f64]) -> Result<()> {
    let n = series.len();
    let pos = (t - series.start()) / series.dt();
    let out_of_range = || Error::OutOfHorizon {
        t,
        start: series.start(),
        end: series.end(),
    };
    if !pos.is_finite() || pos < -ON_GRID || pos > (n - 1) as f64 + ON_GRID {
        return Err(out_of_range());
    }
    let nearest = pos.round();
    if (pos - nearest).abs() <= ON_GRID {
        let s = series.sample((nearest.max(0.0) as usize).min(n - 1));
        for (&c, &v) in active.iter().zip(s) {
            out[c] = v;
        }
        return Ok(());
    }
    let lo = pos.floor() as usize;
    let w = pos - lo as f64;
    let (a, b) = (series.sample(lo), series.sample(lo + 1));
    for (k, &c) in active.iter().enumerate() {
        out[c] = a[k] + w * (b[k] - a[k]);
    }
    Ok(())
}

fn ou_channel(
    steps: usize,
    dt: f64,
    diffusion: f64,
    theta: f64,
    x0: f64,
    seed: RngSeed,
    stream_id: u64,
) -> Result<Vec<f64>> {
    if !(dt > 0.0) {
        return Err(Error::config("OU time step must be positive"));
    }
    if !(diffusion >= 0.0) {
        return Err(Error::config("OU diffusion must be non-negative"));
    }
    let mut rng = seed.rng(stream_id);
    // η per step ~ N(0, 2D/Δt), so Δt·η has variance 2DΔt
    let eta_sd = (2.0 * diffusion / dt).sqrt();
    let mut path = Vec::with_capacity(steps + 1);
    let mut x = x0;
    path.push(x);
    for _ in 0..steps {
        let xi: f64 = StandardNormal.sample(&mut rng);
        x += dt * (-theta * x + eta_sd * xi);
        path.push(x);
    }
    Ok(path)
}

/// Euler–Maruyama path of `dX = −X/2 dt + η dt` with `n_steps + 1` samples.
pub fn ou_path(n_steps: usize, dt: f64, diffusion: f64, x0: f64, seed: RngSeed) -> Result<TimeSeries> {
    let path = ou_channel(n_steps, dt, diffusion, 0.5, x0, seed, stream::NOISE_BASE)?;
    let mut s = TimeSeries::with_capacity(dt, 0.0, vec!["X".into()], n_steps + 1);
    for v in path {
        s.push(&[v])?;
    }
    Ok(s)
}
