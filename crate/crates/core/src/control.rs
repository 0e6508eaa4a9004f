//! Closed-loop suppression of a disturbance using a trained reservoir's
//! estimate of it.
//!
//! Simple scheme: `dx/dt = F(x) + g(t) − α u(t)` with `u` the reservoir
//! readout fed with the current state. Delayed scheme: the feedback goes
//! through an exponential moving average, `dx/dt = F(x) + g − α v`,
//! `dv/dt = (u − v)/τ`.
//!
//! Each Euler step runs in a fixed order: infer `u` from `x(t)`, advance
//! `v`, then advance `x` using the pre-update `v(t)`.
//!
//! The reservoir starts from `r = 0` and its first outputs are meaningless,
//! so the loop is closed only after a synchronization period during which
//! the reservoir listens to the uncontrolled system. `v` starts at zero when
//! the loop closes.

use serde::{Deserialize, Serialize};

use crate::dynamics::{prefixed_labels, state_labels, steps_for, DynamicalSystem, ForcingSignal};
use crate::error::{Error, Result};
use crate::reservoir::Reservoir;
use crate::series::TimeSeries;

/// Any state component beyond this magnitude counts as divergence.
pub const DIVERGENCE_BOUND: f64 = 1e6;

/// A single Euler step moving any component farther than this also counts
/// as divergence. The reservoir readout is bounded, so an unstable loop
/// usually settles into a step-to-step flip of the feedback rather than
/// running off to infinity; the flip moves the state by far more than the
/// attractor's own scale per step, while any flow moves it by O(1).
pub const STEP_BOUND: f64 = 50.0;

/// Matches the default reservoir washout of 2500 steps at the default step.
pub const DEFAULT_SYNC: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Simple,
    Delayed,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Simple => "simple",
            Scheme::Delayed => "delayed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlLoopConfig {
    pub scheme: Scheme,
    pub alpha: f64,
    /// Filter time constant; only used by the delayed scheme.
    pub tau: f64,
    pub dt: f64,
    /// Length of the recorded window.
    pub duration: f64,
    /// Simulated before recording starts.
    pub transient: f64,
    /// Leading part of the transient with the feedback switched off.
    pub sync: f64,
}

impl Default for ControlLoopConfig {
    fn default() -> Self {
        ControlLoopConfig {
            scheme: Scheme::Delayed,
            alpha: 0.0,
            tau: 2.0,
            dt: crate::dynamics::DEFAULT_DT,
            duration: crate::dynamics::DEFAULT_DURATION,
            transient: crate::dynamics::DEFAULT_TRANSIENT,
            sync: DEFAULT_SYNC,
        }
    }
}

impl ControlLoopConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::config(format!(
                "control gain {} must be finite and >= 0",
                self.alpha
            )));
        }
        if !(self.dt > 0.0) {
            return Err(Error::config("control time step must be positive"));
        }
        if self.scheme == Scheme::Delayed && !(self.tau / self.dt > 1.0) {
            return Err(Error::config(format!(
                "delayed control needs tau/dt > 1, got {}",
                self.tau / self.dt
            )));
        }
        steps_for(self.duration, self.dt)?;
        steps_for(self.transient, self.dt)?;
        if !(self.sync >= 0.0 && self.sync <= self.transient) {
            return Err(Error::config(format!(
                "sync period {} must lie within the transient {}",
                self.sync, self.transient
            )));
        }
        Ok(())
    }
}

/// Everything recorded over the window after the transient.
#[derive(Debug, Clone)]
pub struct LoopRecord {
    pub scheme: Scheme,
    pub alpha: f64,
    /// State components the feedback acts on, one per estimate channel.
    pub components: Vec<usize>,
    pub states: TimeSeries,
    pub estimate: TimeSeries,
    /// `v`, present for the delayed scheme.
    pub filtered: Option<TimeSeries>,
    pub disturbance: TimeSeries,
    /// `g − αu` or `g − αv` on the controlled components.
    pub effective: TimeSeries,
    /// Global step index at which the state left the finite bound; the
    /// record is truncated there.
    pub diverged_at: Option<usize>,
}

impl LoopRecord {
    pub fn is_stable(&self) -> bool {
        self.diverged_at.is_none()
    }

    /// Columns `t, x, y, z, u_*, v_*, g_*`; `v_*` is empty for the simple scheme.
    pub fn write_csv(&self, w: &mut impl std::io::Write) -> Result<()> {
        use crate::series::fmt_f64;
        let mut header = vec!["t".to_string()];
        header.extend(self.states.labels().iter().cloned());
        header.extend(self.estimate.labels().iter().cloned());
        let dim = self.states.dim();
        header.extend(prefixed_labels("v", &self.components, dim));
        header.extend(self.disturbance.labels().iter().cloned());
        writeln!(w, "{}", header.join(","))?;
        for i in 0..self.states.len() {
            let mut row = vec![fmt_f64(self.states.time(i))];
            row.extend(self.states.sample(i).iter().map(|v| fmt_f64(*v)));
            row.extend(self.estimate.sample(i).iter().map(|v| fmt_f64(*v)));
            match &self.filtered {
                Some(v) => row.extend(v.sample(i).iter().map(|v| fmt_f64(*v))),
                None => row.extend(self.components.iter().map(|_| String::new())),
            }
            row.extend(self.disturbance.sample(i).iter().map(|v| fmt_f64(*v)));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

pub fn run_simple(
    system: &dyn DynamicalSystem,
    disturbance: &ForcingSignal,
    res: &mut Reservoir,
    x0: &[f64],
    cfg: &ControlLoopConfig,
) -> Result<LoopRecord> {
    if cfg.scheme != Scheme::Simple {
        return Err(Error::config("run_simple called with a delayed configuration"));
    }
    run_loop(system, disturbance, res, x0, cfg)
}

pub fn run_delayed(
    system: &dyn DynamicalSystem,
    disturbance: &ForcingSignal,
    res: &mut Reservoir,
    x0: &[f64],
    cfg: &ControlLoopConfig,
) -> Result<LoopRecord> {
    if cfg.scheme != Scheme::Delayed {
        return Err(Error::config("run_delayed called with a simple configuration"));
    }
    run_loop(system, disturbance, res, x0, cfg)
}

/// Runs whichever scheme `cfg` selects. The reservoir is reset first; its
/// readout stays frozen.
pub fn run_loop(
    system: &dyn DynamicalSystem,
    disturbance: &ForcingSignal,
    res: &mut Reservoir,
    x0: &[f64],
    cfg: &ControlLoopConfig,
) -> Result<LoopRecord> {
    cfg.validate()?;
    if !res.is_trained() {
        return Err(Error::Untrained);
    }
    let n = system.dim();
    if x0.len() != n || disturbance.dim() != n {
        return Err(Error::Dimension {
            expected: n,
            got: if x0.len() != n { x0.len() } else { disturbance.dim() },
        });
    }
    let comps = res.config().outputs.clone();
    if res.config().input_dim != n || comps.iter().any(|&c| c >= n) {
        return Err(Error::config(
            "reservoir inputs/outputs do not match the system dimension",
        ));
    }
    let m = comps.len();
    let skip = steps_for(cfg.transient, cfg.dt)?;
    let sync = steps_for(cfg.sync, cfg.dt)?;
    let record = steps_for(cfg.duration, cfg.dt)?;
    let total = skip + record;
    let t_rec = skip as f64 * cfg.dt;
    let delayed = cfg.scheme == Scheme::Delayed;

    let mut states = TimeSeries::with_capacity(cfg.dt, t_rec, state_labels(n), record + 1);
    let mut estimate = TimeSeries::with_capacity(cfg.dt, t_rec, prefixed_labels("u", &comps, n), record + 1);
    let mut filtered =
        delayed.then(|| TimeSeries::with_capacity(cfg.dt, t_rec, prefixed_labels("v", &comps, n), record + 1));
    let mut dist = TimeSeries::with_capacity(cfg.dt, t_rec, prefixed_labels("g", &comps, n), record + 1);
    let mut effective = TimeSeries::with_capacity(cfg.dt, t_rec, prefixed_labels("e", &comps, n), record + 1);

    let mut x = x0.to_vec();
    let mut g = vec![0.0; n];
    let mut drift = vec![0.0; n];
    let mut u = vec![0.0; m];
    let mut v = vec![0.0; m];
    let mut v_next = vec![0.0; m];
    let mut forcing = vec![0.0; n];
    let mut g_out = vec![0.0; m];
    let mut e_out = vec![0.0; m];
    let mut diverged_at = None;
    let relax = cfg.dt / cfg.tau;
    res.reset();

    for i in 0..=total {
        let t = i as f64 * cfg.dt;
        disturbance.eval_into(t, &mut g)?;
        res.infer_into(&x, &mut u)?;
        let closed = i >= sync;
        let feedback = if delayed { &v } else { &u };

        forcing.copy_from_slice(&g);
        if closed {
            for (k, &c) in comps.iter().enumerate() {
                forcing[c] = g[c] - cfg.alpha * feedback[k];
            }
        }

        if i >= skip {
            for (k, &c) in comps.iter().enumerate() {
                g_out[k] = g[c];
                e_out[k] = forcing[c];
            }
            states.push(&x)?;
            estimate.push(&u)?;
            if let Some(f) = filtered.as_mut() {
                f.push(&v)?;
            }
            dist.push(&g_out)?;
            effective.push(&e_out)?;
        }
        if i == total {
            break;
        }

        if delayed && closed {
            for k in 0..m {
                v_next[k] = v[k] + relax * (u[k] - v[k]);
            }
        }
        system.drift(&x, &mut drift);
        let mut jump = 0.0f64;
        for k in 0..n {
            let dx = cfg.dt * (drift[k] + forcing[k]);
            x[k] += dx;
            jump = jump.max(dx.abs());
        }
        if delayed && closed {
            std::mem::swap(&mut v, &mut v_next);
        }
        if !(jump <= STEP_BOUND) || x.iter().any(|s| !s.is_finite() || s.abs() > DIVERGENCE_BOUND) {
            diverged_at = Some(i + 1);
            break;
        }
    }

    Ok(LoopRecord {
        scheme: cfg.scheme,
        alpha: cfg.alpha,
        components: comps,
        states,
        estimate,
        filtered,
        disturbance: dist,
        effective,
        diverged_at,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
}

/// Largest eigenvalue magnitude of the linear part of the surrogate map
/// `u⁺ = g − αv`, `v⁺ = v + (u − v)/k` with `k = τ/Δt`.
pub fn surrogate_spectral_radius(alpha: f64, tau_over_dt: f64) -> f64 {
    // [[0, −α], [1/k, 1 − 1/k]]
    let trace = 1.0 - 1.0 / tau_over_dt;
    let det = alpha / tau_over_dt;
    let disc = trace * trace / 4.0 - det;
    if disc < 0.0 {
        det.sqrt()
    } else {
        let s = disc.sqrt();
        (trace / 2.0 + s).abs().max((trace / 2.0 - s).abs())
    }
}

/// Linear stability of the fixed point `u = v = g/(1+α)` of the surrogate
/// map; marginal cases count as unstable.
pub fn surrogate_stability(alpha: f64, tau_over_dt: f64) -> Result<Stability> {
    if !(tau_over_dt > 0.0) {
        return Err(Error::config("tau/dt must be positive"));
    }
    Ok(if surrogate_spectral_radius(alpha, tau_over_dt) < 1.0 {
        Stability::Stable
    } else {
        Stability::Unstable
    })
}
