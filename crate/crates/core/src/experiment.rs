//! Configured experiment runs: identification, suppression, gain sweeps and
//! identification from recorded data.
//!
//! A run is a pure function of its [`ExperimentConfig`]. Every run writes
//! its CSV artifacts, a `summary.json`, and a `manifest.toml` holding the
//! resolved config together with SHA-256 checksums of the artifacts. A
//! manifest is itself a valid config, so rerunning it reproduces the
//! artifacts.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::control::{run_loop, ControlLoopConfig, LoopRecord, Scheme, DEFAULT_SYNC};
use crate::dynamics::{
    integrate_forced_from, steps_for, ForcingKind, ForcingSignal, Lorenz, Rossler, Trajectory, DEFAULT_DT,
    DEFAULT_DURATION, DEFAULT_TRANSIENT, DEFAULT_X0,
};
use crate::error::{Error, Result};
use crate::linalg::RngSeed;
use crate::metrics::{attractor_distance, coverage_ratio, moving_average, nrmse, AttractorReference, SweepResult};
use crate::reservoir::{Reservoir, ReservoirConfig, TrainingReport};
use crate::series::TimeSeries;

const TRAINING_SALT: u64 = 1;
const DISTURBANCE_SALT: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Identify,
    Suppress,
    Sweep,
    IdentifyExternal,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Identify => "identify",
            ExperimentKind::Suppress => "suppress",
            ExperimentKind::Sweep => "sweep",
            ExperimentKind::IdentifyExternal => "identify-external",
        }
    }
}

/// Time grid shared by every simulated run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub dt: f64,
    /// Recorded window after the transient.
    pub duration: f64,
    pub transient: f64,
    pub x0: Vec<f64>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt: DEFAULT_DT,
            duration: DEFAULT_DURATION,
            transient: DEFAULT_TRANSIENT,
            x0: DEFAULT_X0.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControlSection {
    pub scheme: Scheme,
    pub alpha: f64,
    pub tau: f64,
    pub sync: f64,
}

impl Default for ControlSection {
    fn default() -> Self {
        ControlSection {
            scheme: Scheme::Delayed,
            alpha: 100.0,
            tau: 2.0,
            sync: DEFAULT_SYNC,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub alphas: Vec<f64>,
    pub schemes: Vec<Scheme>,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            alphas: vec![0.0, 1.0, 10.0, 100.0],
            schemes: vec![Scheme::Delayed],
        }
    }
}

/// Recorded data for `identify-external`. Relative paths are resolved
/// against the config file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalSection {
    pub training_observations: PathBuf,
    pub training_forcing: PathBuf,
    pub observations: PathBuf,
    /// Known disturbance on the observation grid, used only for scoring.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disturbance: Option<PathBuf>,
    /// Moving-average window in the data's time units.
    #[serde(default = "default_filter_window")]
    pub filter_window: f64,
}

fn default_filter_window() -> f64 {
    0.02
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub sim: SimConfig,
    #[serde(default)]
    pub system: Lorenz,
    /// Known forcing `f` applied while collecting training data.
    #[serde(default = "default_training")]
    pub training: ForcingKind,
    /// Unknown disturbance `g`; defaults to the Rössler drive at scale 0.1
    /// for identification and 24 for suppression.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disturbance: Option<ForcingKind>,
    #[serde(default)]
    pub reservoir: ReservoirConfig,
    #[serde(default)]
    pub control: ControlSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub external: Option<ExternalSection>,
}

fn default_training() -> ForcingKind {
    ForcingKind::SinusoidPair {
        frequency: 0.05,
        amplitude: 1.0,
    }
}

fn rossler_drive(scale: f64) -> ForcingKind {
    ForcingKind::RosslerScaled {
        scale,
        rossler: Rossler::default(),
        transient: DEFAULT_TRANSIENT,
    }
}

impl ExperimentConfig {
    /// Defaults for `kind`, as used by the reproduction runs.
    pub fn new(kind: ExperimentKind) -> Self {
        ExperimentConfig {
            experiment: kind,
            seed: 0,
            sim: SimConfig::default(),
            system: Lorenz::default(),
            training: default_training(),
            disturbance: None,
            reservoir: ReservoirConfig::default(),
            control: ControlSection::default(),
            sweep: SweepSection::default(),
            external: None,
        }
    }

    /// Parses a config or a manifest written by a previous run.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::config(e.to_string()))?;
        let table = match (table.get("config"), table.contains_key("artifacts")) {
            (Some(toml::Value::Table(inner)), true) => inner.clone(),
            _ => table,
        };
        let cfg: ExperimentConfig = table
            .try_into()
            .map_err(|e: toml::de::Error| Error::config(e.to_string()))?;
        Ok(cfg)
    }

    /// Reads `path`, resolving relative data paths against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut cfg = Self::from_toml_str(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base)?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Format(e.to_string()))
    }

    fn resolve_paths(&mut self, base: &Path) -> Result<()> {
        let fix = |p: &mut PathBuf| -> Result<()> {
            if p.is_relative() {
                *p = std::path::absolute(base.join(&*p))?;
            }
            Ok(())
        };
        for kind in [Some(&mut self.training), self.disturbance.as_mut()]
            .into_iter()
            .flatten()
        {
            if let ForcingKind::ExternalSeries { path } = kind {
                fix(path)?;
            }
        }
        if let Some(ext) = self.external.as_mut() {
            fix(&mut ext.training_observations)?;
            fix(&mut ext.training_forcing)?;
            fix(&mut ext.observations)?;
            if let Some(p) = ext.disturbance.as_mut() {
                fix(p)?;
            }
        }
        Ok(())
    }

    pub fn disturbance(&self) -> ForcingKind {
        self.disturbance.clone().unwrap_or_else(|| match self.experiment {
            ExperimentKind::Suppress | ExperimentKind::Sweep => rossler_drive(24.0),
            _ => rossler_drive(0.1),
        })
    }

    /// The config with every default that depends on the experiment made
    /// explicit, as recorded in the manifest.
    pub fn resolved(&self) -> Self {
        let mut cfg = self.clone();
        if cfg.experiment != ExperimentKind::IdentifyExternal {
            cfg.disturbance = Some(self.disturbance());
        }
        cfg
    }

    pub fn reservoir_config(&self) -> ReservoirConfig {
        ReservoirConfig {
            seed: RngSeed(self.seed),
            ..self.reservoir.clone()
        }
    }

    pub fn control_config(&self, scheme: Scheme, alpha: f64) -> ControlLoopConfig {
        ControlLoopConfig {
            scheme,
            alpha,
            tau: self.control.tau,
            dt: self.sim.dt,
            duration: self.sim.duration,
            transient: self.sim.transient,
            sync: self.control.sync,
        }
    }

    fn transient_steps(&self) -> Result<usize> {
        steps_for(self.sim.transient, self.sim.dt)
    }

    fn record_steps(&self) -> Result<usize> {
        steps_for(self.sim.duration, self.sim.dt)
    }

    pub fn validate(&self) -> Result<()> {
        let sim = &self.sim;
        let record = steps_for(sim.duration, sim.dt)?;
        self.transient_steps()?;
        if record == 0 {
            return Err(Error::config("sim.duration must cover at least one step"));
        }
        if sim.x0.len() != 3 || sim.x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("sim.x0 must be three finite numbers"));
        }
        self.reservoir.validate()?;
        if self.reservoir.input_dim != 3 {
            return Err(Error::config("reservoir.input_dim must be 3 for the Lorenz system"));
        }
        if self.experiment != ExperimentKind::IdentifyExternal && self.reservoir.washout >= record {
            return Err(Error::config(format!(
                "reservoir.washout ({}) must be shorter than the recorded window ({record} steps)",
                self.reservoir.washout
            )));
        }
        match self.experiment {
            ExperimentKind::Suppress => {
                self.control_config(self.control.scheme, self.control.alpha)
                    .validate()?;
            }
            ExperimentKind::Sweep => {
                if self.sweep.alphas.is_empty() || self.sweep.schemes.is_empty() {
                    return Err(Error::config("sweep.alphas and sweep.schemes must be non-empty"));
                }
                for &scheme in &self.sweep.schemes {
                    for &a in &self.sweep.alphas {
                        self.control_config(scheme, a).validate()?;
                    }
                }
            }
            ExperimentKind::IdentifyExternal => {
                let ext = self
                    .external
                    .as_ref()
                    .ok_or_else(|| Error::config("identify-external needs an [external] section"))?;
                if !(ext.filter_window > 0.0) {
                    return Err(Error::config("external.filter_window must be positive"));
                }
            }
            ExperimentKind::Identify => {}
        }
        Ok(())
    }
}

/// Where a run's files went and what they hash to.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub dir: PathBuf,
    /// File name → lowercase hex SHA-256.
    pub artifacts: BTreeMap<String, String>,
    pub summary: serde_json::Value,
    /// Set when a single closed-loop run diverged.
    pub diverged_at: Option<usize>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    config: &'a ExperimentConfig,
    artifacts: &'a BTreeMap<String, String>,
}

struct Writer {
    dir: PathBuf,
    artifacts: BTreeMap<String, String>,
}

impl Writer {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Writer {
            dir: dir.to_path_buf(),
            artifacts: BTreeMap::new(),
        })
    }

    fn bytes(&mut self, name: &str, data: &[u8]) -> Result<()> {
        fs::write(self.dir.join(name), data)?;
        self.artifacts
            .insert(name.to_string(), hex::encode(Sha256::digest(data)));
        Ok(())
    }

    fn series(&mut self, name: &str, s: &TimeSeries) -> Result<()> {
        let mut buf = Vec::new();
        s.write_csv_to(&mut buf)?;
        self.bytes(name, &buf)
    }

    fn finish(
        mut self,
        cfg: &ExperimentConfig,
        summary: serde_json::Value,
        diverged_at: Option<usize>,
    ) -> Result<RunOutput> {
        let text = serde_json::to_string_pretty(&summary).map_err(|e| Error::Format(e.to_string()))?;
        self.bytes("summary.json", text.as_bytes())?;
        let manifest = toml::to_string(&Manifest {
            config: cfg,
            artifacts: &self.artifacts,
        })
        .map_err(|e| Error::Format(e.to_string()))?;
        fs::write(self.dir.join("manifest.toml"), manifest)?;
        Ok(RunOutput {
            dir: self.dir,
            artifacts: self.artifacts,
            summary,
            diverged_at,
        })
    }
}

/// SHA-256 of a file, hex encoded.
pub fn file_digest(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

/// Runs whichever experiment `cfg` names and writes its artifacts to `out`.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<RunOutput> {
    let cfg = cfg.resolved();
    cfg.validate()?;
    match cfg.experiment {
        ExperimentKind::Identify => run_identify(&cfg, out),
        ExperimentKind::Suppress => run_suppress(&cfg, out),
        ExperimentKind::Sweep => run_sweep(&cfg, out),
        ExperimentKind::IdentifyExternal => run_identify_external(&cfg, out),
    }
}

/// A forced Lorenz run over transient plus window, keeping the window.
fn simulate(cfg: &ExperimentConfig, kind: &ForcingKind, seed: RngSeed) -> Result<Trajectory> {
    let (skip, record) = (cfg.transient_steps()?, cfg.record_steps()?);
    let total = skip + record;
    let outputs = cfg.reservoir.outputs.clone();
    let signal = ForcingSignal::build(kind, 3, outputs, cfg.sim.dt, total, seed)?;
    let tr = integrate_forced_from(&cfg.system, &signal, &cfg.sim.x0, 0.0, cfg.sim.dt, total)?;
    Ok(Trajectory {
        states: tr.states.skip(skip),
        forcing: tr.forcing.skip(skip),
    })
}

/// The configured disturbance over transient plus window, from `t = 0`.
pub fn disturbance_signal(cfg: &ExperimentConfig) -> Result<ForcingSignal> {
    let total = cfg.transient_steps()? + cfg.record_steps()?;
    ForcingSignal::build(
        &cfg.disturbance(),
        3,
        cfg.reservoir.outputs.clone(),
        cfg.sim.dt,
        total,
        RngSeed(cfg.seed).derive(DISTURBANCE_SALT),
    )
}

fn labelled(series: TimeSeries, prefix: &str, outputs: &[usize]) -> TimeSeries {
    let labels = crate::dynamics::prefixed_labels(prefix, outputs, 3);
    series.relabel(labels)
}

/// Trains a fresh reservoir on the configured training forcing.
pub fn train_reservoir(cfg: &ExperimentConfig) -> Result<(Reservoir, Trajectory, TrainingReport)> {
    let training = simulate(cfg, &cfg.training, RngSeed(cfg.seed).derive(TRAINING_SALT))?;
    let outputs = &cfg.reservoir.outputs;
    let forcing = labelled(training.forcing.channels(outputs), "f", outputs);
    let mut res = Reservoir::build(cfg.reservoir_config())?;
    let report = res.train(&training.states, &forcing, cfg.reservoir.washout)?;
    Ok((
        res,
        Trajectory {
            states: training.states,
            forcing,
        },
        report,
    ))
}

fn optional_list(v: &[Option<f64>]) -> serde_json::Value {
    serde_json::Value::Array(v.iter().map(|x| serde_json::json!(x)).collect())
}

pub fn run_identify(cfg: &ExperimentConfig, out: &Path) -> Result<RunOutput> {
    let outputs = cfg.reservoir.outputs.clone();
    let (mut res, training, report) = train_reservoir(cfg)?;
    let disturbed = simulate(cfg, &cfg.disturbance(), RngSeed(cfg.seed).derive(DISTURBANCE_SALT))?;
    let truth = labelled(disturbed.forcing.channels(&outputs), "g", &outputs);
    let estimate = labelled(res.infer_series(&disturbed.states)?, "u", &outputs);
    let errors = nrmse(&estimate, &truth, cfg.reservoir.washout)?;

    let mut w = Writer::new(out)?;
    w.series("training_observations.csv", &training.states)?;
    w.series("training_forcing.csv", &training.forcing)?;
    w.series("observations.csv", &disturbed.states)?;
    w.series("disturbance.csv", &truth)?;
    w.series("estimate.csv", &estimate)?;

    let mut summary = serde_json::json!({
        "experiment": "identify",
        "training": cfg.training.label(),
        "disturbance": cfg.disturbance().label(),
        "training_nrmse": optional_list(&report.nrmse),
        "nrmse": optional_list(&errors),
    });
    if outputs.len() == 2 {
        let cov = coverage_ratio(&training.forcing, &truth)?;
        summary["coverage"] = serde_json::json!({
            "ratio": if cov.ratio.is_finite() { Some(cov.ratio) } else { None },
            "aspect": cov.aspect,
            "degenerate": cov.degenerate,
        });
    }
    w.finish(cfg, summary, None)
}

/// Undisturbed trajectory over the recorded window.
pub fn undisturbed_reference(cfg: &ExperimentConfig) -> Result<AttractorReference> {
    let undisturbed = simulate(cfg, &ForcingKind::Zero, RngSeed(cfg.seed))?;
    AttractorReference::new(undisturbed.states)
}

fn loop_csv(rec: &LoopRecord) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    rec.write_csv(&mut buf)?;
    Ok(buf)
}

pub fn run_suppress(cfg: &ExperimentConfig, out: &Path) -> Result<RunOutput> {
    let (mut res, _, report) = train_reservoir(cfg)?;
    let g = disturbance_signal(cfg)?;
    let lc = cfg.control_config(cfg.control.scheme, cfg.control.alpha);
    let rec = run_loop(&cfg.system, &g, &mut res, &cfg.sim.x0, &lc)?;
    let distance = match rec.diverged_at {
        None => Some(attractor_distance(&rec.states, &undisturbed_reference(cfg)?)?),
        Some(_) => None,
    };
    let mut w = Writer::new(out)?;
    w.bytes("loop.csv", &loop_csv(&rec)?)?;
    let summary = serde_json::json!({
        "experiment": "suppress",
        "scheme": lc.scheme.as_str(),
        "alpha": lc.alpha,
        "tau_over_dt": lc.tau / lc.dt,
        "training_nrmse": optional_list(&report.nrmse),
        "distance": distance,
        "diverged_at": rec.diverged_at,
    });
    w.finish(cfg, summary, rec.diverged_at)
}

/// d(α) for each gain, one cloned reservoir per run.
pub fn sweep_gains(
    cfg: &ExperimentConfig,
    res: &Reservoir,
    disturbance: &ForcingSignal,
    reference: &AttractorReference,
    scheme: Scheme,
    alphas: &[f64],
) -> Result<SweepResult> {
    let runs: Vec<(Option<f64>, Option<usize>)> = alphas
        .par_iter()
        .map(|&alpha| {
            let mut r = res.clone();
            let rec = run_loop(
                &cfg.system,
                disturbance,
                &mut r,
                &cfg.sim.x0,
                &cfg.control_config(scheme, alpha),
            )?;
            Ok(match rec.diverged_at {
                None => (Some(attractor_distance(&rec.states, reference)?), None),
                Some(step) => (None, Some(step)),
            })
        })
        .collect::<Result<_>>()?;
    Ok(SweepResult {
        alphas: alphas.to_vec(),
        distances: runs.iter().map(|r| r.0).collect(),
        diverged_at: runs.iter().map(|r| r.1).collect(),
    })
}

pub fn run_sweep(cfg: &ExperimentConfig, out: &Path) -> Result<RunOutput> {
    let (res, _, report) = train_reservoir(cfg)?;
    let g = disturbance_signal(cfg)?;
    let reference = undisturbed_reference(cfg)?;
    let mut w = Writer::new(out)?;
    let mut per_scheme = serde_json::Map::new();
    for &scheme in &cfg.sweep.schemes {
        let result = sweep_gains(cfg, &res, &g, &reference, scheme, &cfg.sweep.alphas)?;
        w.bytes(&format!("sweep_{}.csv", scheme.as_str()), result.to_csv().as_bytes())?;
        per_scheme.insert(
            scheme.as_str().to_string(),
            serde_json::to_value(&result).map_err(|e| Error::Format(e.to_string()))?,
        );
    }
    let summary = serde_json::json!({
        "experiment": "sweep",
        "training_nrmse": optional_list(&report.nrmse),
        "sweeps": per_scheme,
    });
    w.finish(cfg, summary, None)
}

fn data_channels(series: &TimeSeries, wanted: usize, what: &str) -> Result<()> {
    if series.dim() != wanted {
        return Err(Error::SeriesMismatch(format!(
            "{what} has {} channels, expected {wanted}",
            series.dim()
        )));
    }
    Ok(())
}

pub fn run_identify_external(cfg: &ExperimentConfig, out: &Path) -> Result<RunOutput> {
    let ext = cfg
        .external
        .as_ref()
        .ok_or_else(|| Error::config("identify-external needs an [external] section"))?;
    let outputs = cfg.reservoir.outputs.clone();
    let train_obs = TimeSeries::read_csv(&ext.training_observations)?;
    let train_f = TimeSeries::read_csv(&ext.training_forcing)?;
    let obs = TimeSeries::read_csv(&ext.observations)?;
    data_channels(&train_obs, cfg.reservoir.input_dim, "training observations")?;
    data_channels(&train_f, outputs.len(), "training forcing")?;
    data_channels(&obs, cfg.reservoir.input_dim, "observations")?;
    if !train_obs.same_grid(&train_f) {
        return Err(Error::SeriesMismatch(
            "training observations and forcing are on different time grids".into(),
        ));
    }
    if cfg.reservoir.washout >= train_obs.len() {
        return Err(Error::config(format!(
            "reservoir.washout ({}) leaves no training samples out of {}",
            cfg.reservoir.washout,
            train_obs.len()
        )));
    }

    let mut res = Reservoir::build(cfg.reservoir_config())?;
    let report = res.train(&train_obs, &train_f, cfg.reservoir.washout)?;
    let estimate = labelled(res.infer_series(&obs)?, "u", &outputs);
    let filtered = moving_average(&estimate, ext.filter_window)?;

    let mut w = Writer::new(out)?;
    w.series("estimate.csv", &estimate)?;
    w.series("estimate_filtered.csv", &filtered)?;
    let mut summary = serde_json::json!({
        "experiment": "identify-external",
        "training_nrmse": optional_list(&report.nrmse),
        "filter_window": ext.filter_window,
    });
    if let Some(path) = &ext.disturbance {
        let truth = TimeSeries::read_csv(path)?;
        data_channels(&truth, outputs.len(), "disturbance")?;
        if !truth.same_grid(&obs) {
            return Err(Error::SeriesMismatch(
                "disturbance and observations are on different time grids".into(),
            ));
        }
        let discard = cfg.reservoir.washout.min(obs.len() - 1);
        summary["nrmse"] = optional_list(&nrmse(&estimate, &truth, discard)?);
        summary["nrmse_filtered"] = optional_list(&nrmse(&filtered, &truth, discard)?);
    }
    w.finish(cfg, summary, None)
}
