//! Diagnostics: attractor distance, NRMSE, smoothing and training coverage.

mod coverage;
mod distance;

pub use coverage::{coverage_ratio, Coverage};
pub use distance::{attractor_distance, AttractorReference, GridIndex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Per-channel root-mean-square error over samples `discard..`, divided by
/// the standard deviation of `truth` over the same samples. A channel whose
/// truth is constant has no defined NRMSE and yields `None`.
pub fn nrmse(estimate: &TimeSeries, truth: &TimeSeries, discard: usize) -> Result<Vec<Option<f64>>> {
    if estimate.len() != truth.len() || estimate.dim() != truth.dim() {
        return Err(Error::SeriesMismatch(format!(
            "estimate is {}x{}, truth is {}x{}",
            estimate.len(),
            estimate.dim(),
            truth.len(),
            truth.dim()
        )));
    }
    if discard >= truth.len() {
        return Err(Error::SeriesMismatch(format!(
            "discarding {discard} of {} samples leaves nothing",
            truth.len()
        )));
    }
    let n = (truth.len() - discard) as f64;
    let dim = truth.dim();
    let mut mean = vec![0.0; dim];
    for s in truth.iter().skip(discard) {
        for (m, v) in mean.iter_mut().zip(s) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);

    let mut var = vec![0.0; dim];
    let mut sse = vec![0.0; dim];
    for (e, t) in estimate.iter().zip(truth.iter()).skip(discard) {
        for c in 0..dim {
            var[c] += (t[c] - mean[c]).powi(2);
            sse[c] += (e[c] - t[c]).powi(2);
        }
    }
    Ok((0..dim)
        .map(|c| {
            let sd = (var[c] / n).sqrt();
            // constant channels have sd at rounding level, not exactly zero
            let scale = mean[c].abs().max(f64::MIN_POSITIVE);
            if sd <= 1e-12 * scale || sd == 0.0 {
                None
            } else {
                Some((sse[c] / n).sqrt() / sd)
            }
        })
        .collect())
}

/// Centered moving average over `window` time units.
///
/// The window spans `⌊window/dt⌋` samples, bumped to the next odd count;
/// near the ends it shrinks symmetrically so every output stays centered.
pub fn moving_average(series: &TimeSeries, window: f64) -> Result<TimeSeries> {
    let dt = series.dt();
    if !(window >= dt * (1.0 - 1e-12)) {
        return Err(Error::config(format!(
            "moving-average window {window} shorter than sample step {dt}"
        )));
    }
    let mut width = ((window / dt) * (1.0 + 1e-12)).floor() as usize;
    if width.is_multiple_of(2) {
        width += 1;
    }
    let half = width / 2;
    let n = series.len();
    let dim = series.dim();
    let mut out = TimeSeries::with_capacity(dt, series.start(), series.labels().to_vec(), n);
    let mut acc = vec![0.0; dim];
    for i in 0..n {
        let h = half.min(i).min(n - 1 - i);
        acc.fill(0.0);
        for j in i - h..=i + h {
            for (a, v) in acc.iter_mut().zip(series.sample(j)) {
                *a += v;
            }
        }
        let count = (2 * h + 1) as f64;
        acc.iter_mut().for_each(|a| *a /= count);
        out.push(&acc)?;
    }
    Ok(out)
}

/// Result of a gain sweep: `distances[i]` is `None` when run `i` diverged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub alphas: Vec<f64>,
    pub distances: Vec<Option<f64>>,
    pub diverged_at: Vec<Option<usize>>,
}

impl SweepResult {
    pub fn is_stable(&self, i: usize) -> bool {
        self.diverged_at[i].is_none()
    }

    /// CSV with columns `alpha,distance,stable`; diverged rows leave the
    /// distance empty.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("alpha,distance,stable\n");
        for i in 0..self.alphas.len() {
            let d = self.distances[i].map(crate::series::fmt_f64).unwrap_or_default();
            s.push_str(&format!(
                "{},{},{}\n",
                crate::series::fmt_f64(self.alphas[i]),
                d,
                self.is_stable(i)
            ));
        }
        s
    }
}
