//! Uniformly sampled vector time series and their CSV form.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Maximum relative deviation of any sampling interval from the nominal one.
pub const GRID_JITTER: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    dt: f64,
    start: f64,
    labels: Vec<String>,
    data: Vec<f64>,
}

impl TimeSeries {
    pub fn new(dt: f64, start: f64, labels: Vec<String>) -> Self {
        assert!(dt > 0.0, "time step must be positive");
        assert!(!labels.is_empty(), "a series needs at least one channel");
        TimeSeries {
            dt,
            start,
            labels,
            data: Vec::new(),
        }
    }

    pub fn with_capacity(dt: f64, start: f64, labels: Vec<String>, samples: usize) -> Self {
        let mut s = Self::new(dt, start, labels);
        s.data.reserve(samples * s.dim());
        s
    }

    pub fn labeled(dt: f64, start: f64, labels: &[&str]) -> Self {
        Self::new(dt, start, labels.iter().map(|s| s.to_string()).collect())
    }

    pub fn from_samples(dt: f64, start: f64, labels: Vec<String>, samples: &[Vec<f64>]) -> Result<Self> {
        let mut s = Self::new(dt, start, labels);
        for v in samples {
            s.push(v)?;
        }
        Ok(s)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.start + i as f64 * self.dt
    }

    pub fn end(&self) -> f64 {
        self.time(self.len().saturating_sub(1))
    }

    pub fn push(&mut self, sample: &[f64]) -> Result<()> {
        if sample.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: sample.len(),
            });
        }
        self.data.extend_from_slice(sample);
        Ok(())
    }

    pub fn sample(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.data[i * d..(i + 1) * d]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim())
    }

    pub fn channel(&self, c: usize) -> Vec<f64> {
        self.iter().map(|s| s[c]).collect()
    }

    pub fn channels(&self, which: &[usize]) -> TimeSeries {
        let labels = which.iter().map(|&c| self.labels[c].clone()).collect();
        let mut out = TimeSeries::with_capacity(self.dt, self.start, labels, self.len());
        for s in self.iter() {
            out.data.extend(which.iter().map(|&c| s[c]));
        }
        out
    }

    /// Samples from index `from` onward, with the start time shifted to match.
    pub fn skip(&self, from: usize) -> TimeSeries {
        let from = from.min(self.len());
        TimeSeries {
            dt: self.dt,
            start: self.time(from),
            labels: self.labels.clone(),
            data: self.data[from * self.dim()..].to_vec(),
        }
    }

    pub fn truncate(&mut self, len: usize) {
        self.data.truncate(len * self.dim());
    }

    pub fn relabel(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.dim());
        self.labels = labels;
        self
    }

    /// True when both series are sampled on the same grid with the same length.
    pub fn same_grid(&self, other: &TimeSeries) -> bool {
        self.len() == other.len()
            && ((self.dt - other.dt).abs() <= GRID_JITTER * self.dt)
            && ((self.start - other.start).abs() <= GRID_JITTER * self.dt.max(self.start.abs()))
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim()];
        for s in self.iter() {
            for (a, v) in m.iter_mut().zip(s) {
                *a += v;
            }
        }
        let n = self.len().max(1) as f64;
        m.iter_mut().for_each(|a| *a /= n);
        m
    }

    /// Writes `t,<labels...>` rows with 17 significant digits.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_csv_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn write_csv_to(&self, w: &mut impl Write) -> Result<()> {
        write!(w, "t")?;
        for l in &self.labels {
            write!(w, ",{l}")?;
        }
        writeln!(w)?;
        for (i, s) in self.iter().enumerate() {
            write!(w, "{}", fmt_f64(self.time(i)))?;
            for v in s {
                write!(w, ",{}", fmt_f64(*v))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Reads a CSV with a header row whose first column is time.
    ///
    /// Rows must be uniformly spaced in time; `dt` is taken from the first
    /// and last timestamps and every interval must match it to within
    /// [`GRID_JITTER`].
    pub fn read_csv(path: &Path) -> Result<TimeSeries> {
        let grid_err = |reason: String| Error::Grid {
            path: path.to_path_buf(),
            reason,
        };
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
        let header = reader.headers()?.clone();
        if header.len() < 2 {
            return Err(grid_err("need a time column and at least one channel".into()));
        }
        let labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();

        let mut times = Vec::new();
        let mut data = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record?;
            if record.len() != header.len() {
                return Err(grid_err(format!("row {} has {} fields", line + 2, record.len())));
            }
            let mut fields = record.iter().map(|f| {
                f.parse::<f64>()
                    .map_err(|_| grid_err(format!("row {}: cannot parse {f:?}", line + 2)))
            });
            times.push(fields.next().unwrap()?);
            for f in fields {
                data.push(f?);
            }
        }
        if times.len() < 2 {
            return Err(grid_err("need at least two samples to define a time step".into()));
        }
        let n = times.len();
        let dt = (times[n - 1] - times[0]) / (n - 1) as f64;
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(grid_err("timestamps are not increasing".into()));
        }
        for (i, w) in times.windows(2).enumerate() {
            let step = w[1] - w[0];
            if ((step - dt) / dt).abs() > GRID_JITTER.max(64.0 * f64::EPSILON * w[1].abs() / dt) {
                return Err(grid_err(format!("interval {i} is {step}, expected uniform step {dt}")));
            }
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(grid_err("non-finite sample".into()));
        }
        Ok(TimeSeries {
            dt,
            start: times[0],
            labels,
            data,
        })
    }
}

/// Shortest-exact formatting is not what downstream tools expect; write 17
/// significant digits so every value round-trips bit for bit.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}
