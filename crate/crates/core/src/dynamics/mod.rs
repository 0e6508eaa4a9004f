//! Test systems, forcing signals and fixed-step Euler integration.

mod forcing;
mod systems;

pub use forcing::{eval_forcing, ou_path, ForcingKind, ForcingSignal};
pub use systems::{lorenz_drift, rossler_step, DynamicalSystem, FnSystem, Lorenz, Rossler};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

pub const DEFAULT_DT: f64 = 0.002;
pub const DEFAULT_TRANSIENT: f64 = 50.0;
pub const DEFAULT_DURATION: f64 = 150.0;
pub const DEFAULT_X0: [f64; 3] = [1.0, 1.0, 1.0];

/// Number of whole steps of size `dt` in `duration`.
pub fn steps_for(duration: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::config(format!("time step {dt} must be positive")));
    }
    if !(duration >= 0.0) || !duration.is_finite() {
        return Err(Error::config(format!("duration {duration} must be non-negative")));
    }
    Ok((duration / dt).round() as usize)
}

/// A forced trajectory: the states visited and the forcing applied at each.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: TimeSeries,
    pub forcing: TimeSeries,
}

pub(crate) fn state_labels(dim: usize) -> Vec<String> {
    const XYZ: [&str; 3] = ["x", "y", "z"];
    (0..dim)
        .map(|i| match dim {
            1..=3 => XYZ[i].to_string(),
            _ => format!("x{i}"),
        })
        .collect()
}

pub(crate) fn prefixed_labels(prefix: &str, components: &[usize], dim: usize) -> Vec<String> {
    let base = state_labels(dim);
    components.iter().map(|&c| format!("{prefix}_{}", base[c])).collect()
}

/// Euler trajectory `x(t+Δt) = x(t) + Δt [F(x(t)) + f(t)]` starting at `t = 0`.
pub fn integrate_forced(
    system: &dyn DynamicalSystem,
    forcing: &ForcingSignal,
    x0: &[f64],
    dt: f64,
    duration: f64,
) -> Result<Trajectory> {
    if !(duration >= dt) {
        return Err(Error::config(format!("duration {duration} shorter than one step {dt}")));
    }
    integrate_forced_from(system, forcing, x0, 0.0, dt, steps_for(duration, dt)?)
}

/// Records `steps + 1` samples at `t0, t0 + dt, …` together with the forcing
/// evaluated at each sample time.
pub fn integrate_forced_from(
    system: &dyn DynamicalSystem,
    forcing: &ForcingSignal,
    x0: &[f64],
    t0: f64,
    dt: f64,
    steps: usize,
) -> Result<Trajectory> {
    let n = system.dim();
    check_dims(system, forcing, x0)?;

    let mut states = TimeSeries::with_capacity(dt, t0, state_labels(n), steps + 1);
    let mut forces = TimeSeries::with_capacity(dt, t0, prefixed_labels("f", &(0..n).collect::<Vec<_>>(), n), steps + 1);
    let mut x = x0.to_vec();
    let mut drift = vec![0.0; n];
    let mut f = vec![0.0; n];
    for i in 0..=steps {
        let t = t0 + i as f64 * dt;
        forcing.eval_into(t, &mut f)?;
        states.push(&x)?;
        forces.push(&f)?;
        if i == steps {
            break;
        }
        system.drift(&x, &mut drift);
        for k in 0..n {
            x[k] += dt * (drift[k] + f[k]);
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { step: i + 1 });
        }
    }
    Ok(Trajectory {
        states,
        forcing: forces,
    })
}

/// Integrates without recording and returns the final state; used to
/// discard transients.
pub fn advance(
    system: &dyn DynamicalSystem,
    forcing: &ForcingSignal,
    x0: &[f64],
    t0: f64,
    dt: f64,
    steps: usize,
) -> Result<Vec<f64>> {
    let n = system.dim();
    check_dims(system, forcing, x0)?;
    let mut x = x0.to_vec();
    let mut drift = vec![0.0; n];
    let mut f = vec![0.0; n];
    for i in 0..steps {
        forcing.eval_into(t0 + i as f64 * dt, &mut f)?;
        system.drift(&x, &mut drift);
        for k in 0..n {
            x[k] += dt * (drift[k] + f[k]);
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { step: i + 1 });
        }
    }
    Ok(x)
}

fn check_dims(system: &dyn DynamicalSystem, forcing: &ForcingSignal, x0: &[f64]) -> Result<()> {
    let n = system.dim();
    if x0.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: x0.len(),
        });
    }
    if forcing.dim() != n {
        return Err(Error::Dimension {
            expected: n,
            got: forcing.dim(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lorenz_fixed_point_is_stationary() {
        let lorenz = Lorenz::default();
        let c = (lorenz.beta * (lorenz.rho - 1.0)).sqrt();
        let x0 = [c, c, lorenz.rho - 1.0];
        let traj = integrate_forced(&lorenz, &ForcingSignal::zero(3), &x0, DEFAULT_DT, 10.0).unwrap();
        let last = traj.states.sample(traj.states.len() - 1);
        for (a, b) in last.iter().zip(x0) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn constant_forcing_integrates_exactly() {
        let still = FnSystem::new("still", 3, |_x: &[f64], out: &mut [f64]| out.fill(0.0));
        let push = ForcingSignal::piecewise_constant(3, vec![0], vec![vec![1.0]], 1.0).unwrap();
        let traj = integrate_forced(&still, &push, &[0.0; 3], DEFAULT_DT, 1.0).unwrap();
        assert_eq!(traj.states.len(), 501);
        let end = traj.states.sample(500);
        assert_relative_eq!(end[0], 1.0, max_relative = 1e-12);
        assert_eq!(&end[1..], &[0.0, 0.0]);
        assert_eq!(traj.forcing.sample(0), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn linear_decay_matches_closed_form() {
        let decay = FnSystem::new("decay", 1, |x: &[f64], out: &mut [f64]| out[0] = -x[0]);
        let dt = 0.01;
        let traj = integrate_forced(&decay, &ForcingSignal::zero(1), &[2.0], dt, 1.0).unwrap();
        for (n, s) in traj.states.iter().enumerate() {
            let mut expected = 2.0;
            for _ in 0..n {
                expected *= 1.0 - dt;
            }
            // x ← x + dt·(−x) rounds differently from x·(1 − dt)
            assert_relative_eq!(s[0], expected, max_relative = 1e-13);
        }
    }

    #[test]
    fn divergence_reports_step() {
        let blowup = FnSystem::new("blowup", 1, |x: &[f64], out: &mut [f64]| out[0] = x[0] * x[0]);
        let err = integrate_forced(&blowup, &ForcingSignal::zero(1), &[1.0], 0.1, 100.0).unwrap_err();
        assert!(matches!(err, Error::Divergence { step } if step > 1));
    }

    #[test]
    fn dimension_checks() {
        let lorenz = Lorenz::default();
        assert!(integrate_forced(&lorenz, &ForcingSignal::zero(3), &[1.0, 1.0], 0.01, 1.0).is_err());
        assert!(integrate_forced(&lorenz, &ForcingSignal::zero(2), &[1.0; 3], 0.01, 1.0).is_err());
        assert!(integrate_forced(&lorenz, &ForcingSignal::zero(3), &[1.0; 3], 0.01, 0.001).is_err());
    }

    #[test]
    fn lorenz_with_scaled_rossler_stays_bounded() {
        let lorenz = Lorenz::default();
        let steps = steps_for(DEFAULT_DURATION, DEFAULT_DT).unwrap();
        let g = ForcingSignal::rossler_scaled(
            3,
            vec![0, 1],
            0.1,
            &Rossler::default(),
            DEFAULT_DT,
            0.0,
            steps,
            DEFAULT_TRANSIENT,
        )
        .unwrap();
        let traj = integrate_forced(&lorenz, &g, &DEFAULT_X0, DEFAULT_DT, DEFAULT_DURATION).unwrap();
        assert_eq!(traj.states.len(), steps + 1);
        let max = traj.states.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(max < 100.0, "max |x| = {max}");
        // still chaotic: x changes sign repeatedly
        let xs = traj.states.channel(0);
        let flips = xs.windows(2).filter(|w| w[0].signum() != w[1].signum()).count();
        assert!(flips > 20, "only {flips} lobe switches");
    }
}
