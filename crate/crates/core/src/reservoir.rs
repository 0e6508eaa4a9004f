//! Echo-state reservoir with a ridge-regression readout.
//!
//! The reservoir is driven by observed states,
//! `r(t+Δt) = tanh(A r(t) + W_in x(t) + 1)`, and its linear readout
//! `u = W_out r` is fitted so that `u(t)` reproduces the known forcing `f(t)`
//! that was acting when `x(t)` was observed. The state that has just
//! absorbed `x(t)` is paired with `f(t)`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, rescale_to_radius, stream, DenseMatrix, RidgeAccumulator, RngSeed, SparseMatrix};
use crate::metrics::nrmse;
use crate::series::TimeSeries;

pub const DEFAULT_WASHOUT: usize = 2500;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReservoirConfig {
    /// Number of reservoir units `M`.
    #[serde(alias = "M")]
    pub size: usize,
    /// Probability that an entry of `A` is nonzero; `6 / size` when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density: Option<f64>,
    /// Nonzero entries of `A` are drawn from `[-entry_range, entry_range]`
    /// before rescaling.
    pub entry_range: f64,
    pub spectral_radius: f64,
    /// Entries of `W_in` are uniform on `[-input_scale, input_scale]`.
    pub input_scale: f64,
    pub lambda: f64,
    pub input_dim: usize,
    /// State components the readout estimates, in output order.
    pub outputs: Vec<usize>,
    pub washout: usize,
    #[serde(skip)]
    pub seed: RngSeed,
}

impl Default for ReservoirConfig {
    fn default() -> Self {
        ReservoirConfig {
            size: 1000,
            density: None,
            entry_range: 0.5,
            spectral_radius: 1.2,
            input_scale: 0.01,
            lambda: 1e-6,
            input_dim: 3,
            outputs: vec![0, 1],
            washout: DEFAULT_WASHOUT,
            seed: RngSeed(0),
        }
    }
}

impl ReservoirConfig {
    pub fn density(&self) -> f64 {
        self.density.unwrap_or_else(|| (6.0 / self.size as f64).min(1.0))
    }

    pub fn output_dim(&self) -> usize {
        self.outputs.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.size == 0 {
            return Err(Error::config("reservoir.size must be at least 1"));
        }
        let d = self.density();
        if !(d > 0.0 && d <= 1.0) {
            return Err(Error::config(format!("reservoir.density {d} not in (0, 1]")));
        }
        if !(self.entry_range > 0.0) {
            return Err(Error::config("reservoir.entry_range must be positive"));
        }
        if !(self.spectral_radius > 0.0 && self.spectral_radius.is_finite()) {
            return Err(Error::config("reservoir.spectral_radius must be positive"));
        }
        if !(self.input_scale >= 0.0 && self.input_scale.is_finite()) {
            return Err(Error::config("reservoir.input_scale must be non-negative"));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::config("reservoir.lambda must be non-negative"));
        }
        if self.input_dim == 0 {
            return Err(Error::config("reservoir.input_dim must be at least 1"));
        }
        if self.outputs.is_empty() {
            return Err(Error::config("reservoir.outputs must name at least one component"));
        }
        for (i, &c) in self.outputs.iter().enumerate() {
            if c >= self.input_dim || self.outputs[..i].contains(&c) {
                return Err(Error::config(format!(
                    "reservoir.outputs entry {c} is out of range or repeated"
                )));
            }
        }
        Ok(())
    }
}

/// Outcome of fitting the readout.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainingReport {
    pub samples: usize,
    /// In-sample NRMSE per output channel; `None` for a constant target.
    pub nrmse: Vec<Option<f64>>,
}

#[derive(Debug, Clone)]
pub struct Reservoir {
    config: ReservoirConfig,
    internal: SparseMatrix,
    input: DenseMatrix,
    readout: Option<DenseMatrix>,
    state: Vec<f64>,
    scratch: Vec<f64>,
}

impl Reservoir {
    /// Draws `A` and `W_in` from the configured distributions and rescales
    /// `A` to the target spectral radius. The state starts at zero.
    pub fn build(config: ReservoirConfig) -> Result<Self> {
        config.validate()?;
        let m = config.size;
        let r = config.entry_range;
        let raw = linalg::random_sparse_stream(m, config.density(), -r, r, config.seed, stream::RESERVOIR_INTERNAL)?;
        let internal = rescale_to_radius(&raw, config.spectral_radius)?;

        let mut rng = config.seed.rng(stream::RESERVOIR_INPUT);
        let s = config.input_scale;
        let mut input = DenseMatrix::zeros(m, config.input_dim);
        for i in 0..m {
            for j in 0..config.input_dim {
                input[(i, j)] = -s + 2.0 * s * rng.random::<f64>();
            }
        }
        Ok(Self::from_parts(config, internal, input, None))
    }

    fn from_parts(
        config: ReservoirConfig,
        internal: SparseMatrix,
        input: DenseMatrix,
        readout: Option<DenseMatrix>,
    ) -> Self {
        let m = config.size;
        Reservoir {
            config,
            internal,
            input,
            readout,
            state: vec![0.0; m],
            scratch: vec![0.0; m],
        }
    }

    pub fn config(&self) -> &ReservoirConfig {
        &self.config
    }

    pub fn internal(&self) -> &SparseMatrix {
        &self.internal
    }

    pub fn input(&self) -> &DenseMatrix {
        &self.input
    }

    pub fn readout(&self) -> Option<&DenseMatrix> {
        self.readout.as_ref()
    }

    pub fn state(&self) -> &[f64] {
        &self.state
    }

    pub fn is_trained(&self) -> bool {
        self.readout.is_some()
    }

    pub fn reset(&mut self) {
        self.state.fill(0.0);
    }

    /// `r ← tanh(A r + W_in x + 1)`
    pub fn step(&mut self, x: &[f64]) -> Result<()> {
        if x.len() != self.config.input_dim {
            return Err(Error::Dimension {
                expected: self.config.input_dim,
                got: x.len(),
            });
        }
        self.internal.mul_vec_into(&self.state, &mut self.scratch);
        for (j, &xj) in x.iter().enumerate() {
            let col = self.input.column(j);
            for (acc, w) in self.scratch.iter_mut().zip(col.iter()) {
                *acc += w * xj;
            }
        }
        for (r, a) in self.state.iter_mut().zip(&self.scratch) {
            *r = (a + 1.0).tanh();
        }
        Ok(())
    }

    /// `u = W_out r` for the current state.
    pub fn output_into(&self, out: &mut [f64]) -> Result<()> {
        let w = self.readout.as_ref().ok_or(Error::Untrained)?;
        for (k, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, r) in self.state.iter().enumerate() {
                acc += w[(k, j)] * r;
            }
            *o = acc;
        }
        Ok(())
    }

    /// Advances the state with `x` and returns the readout; streaming, so
    /// the state carries over between calls.
    pub fn infer(&mut self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.config.output_dim()];
        self.infer_into(x, &mut out)?;
        Ok(out)
    }

    pub fn infer_into(&mut self, x: &[f64], out: &mut [f64]) -> Result<()> {
        if self.readout.is_none() {
            return Err(Error::Untrained);
        }
        self.step(x)?;
        self.output_into(out)
    }

    /// Drives a freshly reset reservoir through `observations` and returns
    /// the readout series, one sample per observation.
    pub fn infer_series(&mut self, observations: &TimeSeries) -> Result<TimeSeries> {
        let labels =
            crate::dynamics::prefixed_labels("u", &self.config.outputs, self.config.input_dim.max(observations.dim()));
        let mut out = TimeSeries::with_capacity(observations.dt(), observations.start(), labels, observations.len());
        let mut u = vec![0.0; self.config.output_dim()];
        self.reset();
        for x in observations.iter() {
            self.infer_into(x, &mut u)?;
            out.push(&u)?;
        }
        Ok(out)
    }

    /// Fits `W_out` so that the readout reproduces `forcing` (one channel per
    /// configured output) while the reservoir is driven by `observations`.
    /// The first `washout` states are discarded. The state is reset before
    /// and after.
    pub fn train(&mut self, observations: &TimeSeries, forcing: &TimeSeries, washout: usize) -> Result<TrainingReport> {
        if observations.len() != forcing.len() {
            return Err(Error::SeriesMismatch(format!(
                "{} observations vs {} forcing samples",
                observations.len(),
                forcing.len()
            )));
        }
        if !observations.same_grid(forcing) {
            return Err(Error::SeriesMismatch(
                "observations and forcing are on different time grids".into(),
            ));
        }
        if forcing.dim() != self.config.output_dim() {
            return Err(Error::Dimension {
                expected: self.config.output_dim(),
                got: forcing.dim(),
            });
        }
        if washout >= observations.len() {
            return Err(Error::SeriesMismatch(format!(
                "washout {washout} leaves no samples out of {}",
                observations.len()
            )));
        }

        let mut acc = RidgeAccumulator::new(self.config.size, self.config.output_dim());
        self.reset();
        for (i, (x, f)) in observations.iter().zip(forcing.iter()).enumerate() {
            self.step(x)?;
            if i >= washout {
                acc.push(&self.state, f)?;
            }
        }
        self.readout = Some(acc.solve(self.config.lambda)?);

        let replay = self.infer_series(observations)?;
        self.reset();
        Ok(TrainingReport {
            samples: acc.samples(),
            nrmse: nrmse(&replay, forcing, washout)?,
        })
    }

    pub fn set_readout(&mut self, readout: DenseMatrix) -> Result<()> {
        if readout.shape() != (self.config.output_dim(), self.config.size) {
            return Err(Error::Dimension {
                expected: self.config.output_dim() * self.config.size,
                got: readout.len(),
            });
        }
        self.readout = Some(readout);
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_from(&mut BufReader::new(File::open(path)?))
    }

    /// Binary layout (little endian): magic, format version, seed, config as
    /// JSON, `A` as row-major triplets, `W_in`, optional `W_out`, state.
    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_u32::<LittleEndian>(FORMAT_VERSION)?;
        w.write_u64::<LittleEndian>(self.config.seed.0)?;
        let json = serde_json::to_vec(&self.config).map_err(|e| Error::Format(e.to_string()))?;
        w.write_u64::<LittleEndian>(json.len() as u64)?;
        w.write_all(&json)?;

        w.write_u64::<LittleEndian>(self.internal.rows() as u64)?;
        w.write_u64::<LittleEndian>(self.internal.nnz() as u64)?;
        for (r, c, v) in self.internal.triplets() {
            w.write_u32::<LittleEndian>(r as u32)?;
            w.write_u32::<LittleEndian>(c as u32)?;
            w.write_f64::<LittleEndian>(v)?;
        }
        write_dense(w, &self.input)?;
        match &self.readout {
            Some(m) => {
                w.write_u8(1)?;
                write_dense(w, m)?;
            }
            None => w.write_u8(0)?,
        }
        for &v in &self.state {
            w.write_f64::<LittleEndian>(v)?;
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("not a reservoir file".into()));
        }
        let version = r.read_u32::<LittleEndian>()?;
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported format version {version}")));
        }
        let seed = RngSeed(r.read_u64::<LittleEndian>()?);
        let json_len = r.read_u64::<LittleEndian>()? as usize;
        let mut json = vec![0u8; json_len];
        r.read_exact(&mut json)?;
        let mut config: ReservoirConfig = serde_json::from_slice(&json).map_err(|e| Error::Format(e.to_string()))?;
        config.seed = seed;
        config.validate()?;

        let m = r.read_u64::<LittleEndian>()? as usize;
        if m != config.size {
            return Err(Error::Format(format!(
                "matrix size {m} does not match config {}",
                config.size
            )));
        }
        let nnz = r.read_u64::<LittleEndian>()? as usize;
        let mut triplets = Vec::with_capacity(nnz.min(1 << 24));
        for _ in 0..nnz {
            let row = r.read_u32::<LittleEndian>()? as usize;
            let col = r.read_u32::<LittleEndian>()? as usize;
            triplets.push((row, col, r.read_f64::<LittleEndian>()?));
        }
        let internal = SparseMatrix::from_triplets(m, m, triplets).map_err(|e| Error::Format(e.to_string()))?;
        let input = read_dense(r)?;
        if input.shape() != (m, config.input_dim) {
            return Err(Error::Format("input matrix shape does not match config".into()));
        }
        let readout = match r.read_u8()? {
            0 => None,
            1 => {
                let w = read_dense(r)?;
                if w.shape() != (config.output_dim(), m) {
                    return Err(Error::Format("readout shape does not match config".into()));
                }
                Some(w)
            }
            b => return Err(Error::Format(format!("bad readout flag {b}"))),
        };
        let mut res = Self::from_parts(config, internal, input, readout);
        for v in res.state.iter_mut() {
            *v = r.read_f64::<LittleEndian>()?;
        }
        Ok(res)
    }
}

const MAGIC: &[u8; 4] = b"RDRS";
const FORMAT_VERSION: u32 = 1;

fn write_dense(w: &mut impl Write, m: &DenseMatrix) -> Result<()> {
    w.write_u64::<LittleEndian>(m.nrows() as u64)?;
    w.write_u64::<LittleEndian>(m.ncols() as u64)?;
    for &v in m.as_slice() {
        w.write_f64::<LittleEndian>(v)?;
    }
    Ok(())
}

fn read_dense(r: &mut impl Read) -> Result<DenseMatrix> {
    let rows = r.read_u64::<LittleEndian>()? as usize;
    let cols = r.read_u64::<LittleEndian>()? as usize;
    let n = rows
        .checked_mul(cols)
        .filter(|&n| n < (1 << 32))
        .ok_or_else(|| Error::Format("matrix too large".into()))?;
    let mut data = Vec::with_capacity(n);
    for _ in 0..n {
        data.push(r.read_f64::<LittleEndian>()?);
    }
    Ok(DenseMatrix::from_vec(rows, cols, data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{spectral_radius, POWER_MAX_ITERS, POWER_TOL};
    use approx::assert_relative_eq;

    fn small(size: usize, seed: u64) -> ReservoirConfig {
        ReservoirConfig {
            size,
            density: Some(0.3),
            input_scale: 0.5,
            spectral_radius: 0.9,
            lambda: 1e-4,
            seed: RngSeed(seed),
            ..Default::default()
        }
    }

    fn toy_series(n: usize) -> (TimeSeries, TimeSeries) {
        let mut obs = TimeSeries::labeled(0.01, 0.0, &["x", "y", "z"]);
        let mut f = TimeSeries::labeled(0.01, 0.0, &["f_x", "f_y"]);
        for i in 0..n {
            let t = i as f64 * 0.01;
            obs.push(&[t.sin(), (2.0 * t).cos(), 0.3 * (0.5 * t).sin()]).unwrap();
            f.push(&[t.sin() * 0.5, (2.0 * t).cos() - 0.2]).unwrap();
        }
        (obs, f)
    }

    #[test]
    fn default_build_matches_parameters() {
        let res = Reservoir::build(ReservoirConfig {
            seed: RngSeed(1),
            ..Default::default()
        })
        .unwrap();
        let rho = spectral_radius(res.internal(), POWER_TOL, POWER_MAX_ITERS).unwrap();
        assert_relative_eq!(rho, 1.2, max_relative = 1e-5);
        assert!(res.input().iter().all(|v| v.abs() <= 0.01));
        assert_eq!(res.input().shape(), (1000, 3));
        assert!(res.state().iter().all(|&v| v == 0.0));
        assert!(!res.is_trained());
    }

    #[test]
    fn scalar_reservoir() {
        let res = Reservoir::build(ReservoirConfig {
            size: 1,
            density: Some(1.0),
            ..Default::default()
        })
        .unwrap();
        assert_relative_eq!(res.internal().get(0, 0).abs(), 1.2, max_relative = 1e-12);
    }

    #[test]
    fn build_is_deterministic() {
        let a = Reservoir::build(small(40, 3)).unwrap();
        let b = Reservoir::build(small(40, 3)).unwrap();
        assert_eq!(a.internal(), b.internal());
        assert_eq!(a.input(), b.input());
        let c = Reservoir::build(small(40, 4)).unwrap();
        assert_ne!(a.input(), c.input());
    }

    #[test]
    fn bias_only_step() {
        let mut res = Reservoir::build(ReservoirConfig {
            size: 5,
            density: Some(1.0),
            input_scale: 0.0,
            ..Default::default()
        })
        .unwrap();
        // r = 0 and x = 0: A r and W_in x both vanish
        res.step(&[0.0; 3]).unwrap();
        for &r in res.state() {
            assert_relative_eq!(r, 1.0f64.tanh(), max_relative = 1e-15);
            assert_relative_eq!(r, 0.76159, max_relative = 1e-5);
        }
        assert!(res.step(&[0.0; 2]).is_err());
    }

    #[test]
    fn contracting_reservoir_reaches_fixed_point() {
        let mut res = Reservoir::build(ReservoirConfig {
            size: 10,
            density: Some(0.5),
            spectral_radius: 0.1,
            input_scale: 0.5,
            ..Default::default()
        })
        .unwrap();
        let x = [0.3, -0.2, 0.9];
        let mut prev = res.state().to_vec();
        let mut gap = f64::INFINITY;
        for _ in 0..100 {
            res.step(&x).unwrap();
            gap = res
                .state()
                .iter()
                .zip(&prev)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            prev = res.state().to_vec();
        }
        assert!(gap < 1e-10, "gap {gap}");
    }

    #[test]
    fn states_stay_inside_tanh_range() {
        let mut res = Reservoir::build(small(30, 8)).unwrap();
        let (obs, _) = toy_series(500);
        for x in obs.iter() {
            let big: Vec<f64> = x.iter().map(|v| v * 100.0).collect();
            res.step(&big).unwrap();
            assert!(res.state().iter().all(|r| r.abs() <= 1.0));
        }
    }

    #[test]
    fn zero_targets_give_zero_readout() {
        let mut res = Reservoir::build(small(20, 1)).unwrap();
        let (obs, _) = toy_series(300);
        let mut zero = TimeSeries::labeled(0.01, 0.0, &["f_x", "f_y"]);
        for _ in 0..300 {
            zero.push(&[0.0, 0.0]).unwrap();
        }
        let report = res.train(&obs, &zero, 50).unwrap();
        assert!(res.readout().unwrap().iter().all(|&v| v == 0.0));
        assert_eq!(report.nrmse, vec![None, None]);
    }

    #[test]
    fn infer_requires_training() {
        let mut res = Reservoir::build(small(10, 1)).unwrap();
        assert!(matches!(res.infer(&[0.0; 3]), Err(Error::Untrained)));
    }

    #[test]
    fn train_validates_series() {
        let mut res = Reservoir::build(small(10, 1)).unwrap();
        let (obs, f) = toy_series(100);
        let (short, _) = toy_series(90);
        assert!(res.train(&short, &f, 10).is_err());
        assert!(res.train(&obs, &f, 100).is_err());
        assert!(res.train(&obs, &obs, 10).is_err());
    }

    #[test]
    fn replay_reproduces_training_fit() {
        let mut res = Reservoir::build(small(60, 2)).unwrap();
        let (obs, f) = toy_series(2000);
        let report = res.train(&obs, &f, 100).unwrap();
        assert_eq!(report.samples, 1900);
        let replay = res.infer_series(&obs).unwrap();
        let again = nrmse(&replay, &f, 100).unwrap();
        assert_eq!(again, report.nrmse);
        for v in report.nrmse.iter().flatten() {
            assert!(*v < 0.1, "training nrmse {v}");
        }
    }

    #[test]
    fn infer_is_causal() {
        let mut res = Reservoir::build(small(30, 6)).unwrap();
        let (obs, f) = toy_series(600);
        res.train(&obs, &f, 50).unwrap();
        let full = res.infer_series(&obs).unwrap();
        // perturb the future; outputs up to the perturbation are unchanged
        let mut later = TimeSeries::labeled(0.01, 0.0, &["x", "y", "z"]);
        for (i, x) in obs.iter().enumerate() {
            if i >= 400 {
                later.push(&[5.0, 5.0, 5.0]).unwrap();
            } else {
                later.push(x).unwrap();
            }
        }
        let cut = res.infer_series(&later).unwrap();
        for i in 0..400 {
            assert_eq!(full.sample(i), cut.sample(i));
        }
        assert_ne!(full.sample(400), cut.sample(400));
    }

    #[test]
    fn doubled_window_equals_half_lambda() {
        // Counting every sample twice doubles R Rᵀ and F Rᵀ, which is the
        // single-window problem with λ/2.
        let mut res = Reservoir::build(small(25, 9)).unwrap();
        let (obs, f) = toy_series(800);
        let lambda = 1e-4;
        let mut once = RidgeAccumulator::new(25, 2);
        let mut twice = RidgeAccumulator::new(25, 2);
        for (x, t) in obs.iter().zip(f.iter()) {
            res.step(x).unwrap();
            once.push(res.state(), t).unwrap();
            twice.push(res.state(), t).unwrap();
            twice.push(res.state(), t).unwrap();
        }
        let w1 = once.solve(lambda / 2.0).unwrap();
        let w2 = twice.solve(lambda).unwrap();
        for (a, b) in w1.iter().zip(w2.iter()) {
            assert!((a - b).abs() <= 1e-6 * a.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn persistence_reproduces_inference_bit_for_bit() {
        let mut res = Reservoir::build(small(50, 12)).unwrap();
        let (obs, f) = toy_series(700);
        res.train(&obs, &f, 50).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("res.bin");
        res.save(&path).unwrap();
        let mut loaded = Reservoir::load(&path).unwrap();
        assert_eq!(loaded.config(), res.config());
        let a = res.infer_series(&obs).unwrap();
        let b = loaded.infer_series(&obs).unwrap();
        for (x, y) in a.iter().zip(b.iter()) {
            for (p, q) in x.iter().zip(y) {
                assert_eq!(p.to_bits(), q.to_bits());
            }
        }
    }

    #[test]
    fn rejects_corrupt_files() {
        let mut bytes = Vec::new();
        Reservoir::build(small(5, 1)).unwrap().write_to(&mut bytes).unwrap();
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(Reservoir::read_from(&mut bad.as_slice()).is_err());
        let mut bad = bytes.clone();
        bad[4] = 9;
        assert!(Reservoir::read_from(&mut bad.as_slice()).is_err());
        assert!(Reservoir::read_from(&mut &bytes[..bytes.len() - 3]).is_err());
        assert!(Reservoir::read_from(&mut bytes.as_slice()).is_ok());
    }

    #[test]
    fn config_validation() {
        let bad = [
            ReservoirConfig {
                size: 0,
                ..Default::default()
            },
            ReservoirConfig {
                density: Some(0.0),
                ..Default::default()
            },
            ReservoirConfig {
                spectral_radius: 0.0,
                ..Default::default()
            },
            ReservoirConfig {
                lambda: -1.0,
                ..Default::default()
            },
            ReservoirConfig {
                outputs: vec![3],
                ..Default::default()
            },
            ReservoirConfig {
                outputs: vec![0, 0],
                ..Default::default()
            },
            ReservoirConfig {
                outputs: vec![],
                ..Default::default()
            },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
        assert_eq!(ReservoirConfig::default().density(), 0.006);
    }
}
