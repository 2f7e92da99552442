//! Experiment orchestration and report emission.
//!
//! A run is one independent matrix draw; run `r` uses seed
//! `derive_seed(seed, r)`. Runs execute in parallel and results are collected
//! by run index, so a report is a pure function of its configuration (the
//! optional wall-clock timing aside).

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::bounds;
use crate::data::{self, SyntheticSpec};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::eval::{self, DistanceMatrix};
use crate::genmat;
use crate::moments;
use crate::projector::{Matrix, ModelFamily, ModelKind, ProjectionModel};
use crate::rng::derive_seed;

/// Stream index reserved for synthetic data, away from run indices.
const DATA_STREAM: u64 = 0xDA7A_5EED;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Variance,
    Mse,
    Retrieval,
    Bounds,
    Project,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Variance => "variance",
            Experiment::Mse => "mse",
            Experiment::Retrieval => "retrieval",
            Experiment::Bounds => "bounds",
            Experiment::Project => "project",
        }
    }

    fn projects(self) -> bool {
        self != Experiment::Bounds
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Output dimension, absolute or as a fraction of `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MSpec {
    Rows(usize),
    Ratio(f64),
}

impl MSpec {
    /// A ratio resolves to `round(ratio·d)`, at least 1.
    pub fn resolve(self, d: usize) -> usize {
        match self {
            MSpec::Rows(m) => m,
            MSpec::Ratio(r) => ((r * d as f64).round() as usize).max(1),
        }
    }
}

impl FromStr for MSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Ok(m) = s.parse::<usize>() {
            return if m == 0 { Err(Error::Config("m must be at least 1".into())) } else { Ok(MSpec::Rows(m)) };
        }
        match s.parse::<f64>() {
            Ok(r) if r > 0.0 && r <= 1.0 => Ok(MSpec::Ratio(r)),
            _ => Err(Error::Config(format!("m must be a positive integer or a ratio in (0, 1], got {s:?}"))),
        }
    }
}

impl Serialize for MSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            MSpec::Rows(m) => s.serialize_u64(*m as u64),
            MSpec::Ratio(r) => s.serialize_str(&format!("{r}d")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    Dense,
    Sparse,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DataSource {
    File { path: PathBuf, format: DataFormat },
    Synthetic(SyntheticSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

fn serialize_models<S: Serializer>(models: &[ModelFamily], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(models.iter().map(|m| m.name()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(serialize_with = "serialize_models")]
    pub models: Vec<ModelFamily>,
    /// Required for bounds and sparse files; otherwise taken from the data.
    pub d: Option<usize>,
    pub m: MSpec,
    pub p_grid: Vec<f64>,
    /// When empty, fixed and Bourgain use `c = ⌊d·p⌋` over `p_grid`.
    pub c_grid: Vec<usize>,
    pub r: usize,
    pub runs: usize,
    /// Monte Carlo trials per vector in the variance experiment.
    pub trials: usize,
    /// Vectors that get a Monte Carlo estimate in the variance experiment.
    pub mc_samples: usize,
    pub seed: u64,
    /// Point count for the bounds experiment; defaults to the data size.
    pub n: Option<u64>,
    pub eps: f64,
    pub data: Option<DataSource>,
    pub format: Format,
    #[serde(skip)]
    pub timing: bool,
    #[serde(skip)]
    pub matrix_out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            models: vec![ModelFamily::Gaussian, ModelFamily::Bernoulli, ModelFamily::FixedSparsity],
            d: None,
            m: MSpec::Ratio(0.5),
            p_grid: vec![0.1, 0.3, 0.5],
            c_grid: Vec::new(),
            r: 10,
            runs: 100,
            trials: 100,
            mc_samples: 10,
            seed: 0,
            n: None,
            eps: 0.1,
            data: None,
            format: Format::Json,
            timing: true,
            matrix_out: None,
        }
    }

    /// Checks that need no data.
    pub fn validate(&self) -> Result<()> {
        let cfg = |msg: String| Err(Error::Config(msg));
        if self.models.is_empty() {
            return cfg("model list is empty".into());
        }
        if self.p_grid.is_empty() && self.c_grid.is_empty() {
            return cfg("p-grid and c-grid are both empty".into());
        }
        if self.p_grid.is_empty() && self.models.contains(&ModelFamily::Bernoulli) {
            return cfg("bernoulli needs a non-empty p-grid".into());
        }
        if let Some(p) = self.p_grid.iter().find(|p| !(**p > 0.0 && **p <= 0.5)) {
            return cfg(format!("p-grid values must lie in (0, 1/2], got {p}"));
        }
        if self.c_grid.contains(&0) {
            return cfg("c-grid values must be at least 1".into());
        }
        if self.runs == 0 {
            return cfg("runs must be at least 1".into());
        }
        if self.d == Some(0) {
            return cfg("d must be positive".into());
        }
        match self.experiment {
            Experiment::Variance => {
                if self.trials < 2 {
                    return cfg(format!("trials must be at least 2, got {}", self.trials));
                }
            }
            Experiment::Retrieval => {
                if self.r == 0 {
                    return cfg("r must be at least 1".into());
                }
            }
            Experiment::Bounds => {
                if self.d.is_none() && self.data.is_none() {
                    return cfg("bounds needs --d or a data source".into());
                }
                if !(self.eps.is_finite() && self.eps > 0.0) {
                    return cfg(format!("eps must be positive, got {}", self.eps));
                }
            }
            Experiment::Project => {
                if self.models.len() != 1 {
                    return cfg("project takes exactly one model".into());
                }
            }
            Experiment::Mse => {}
        }
        if self.experiment.projects() && self.data.is_none() {
            return cfg(format!("{} needs --data or --synthetic", self.experiment));
        }
        if let Some(DataSource::File { format: DataFormat::Sparse, .. }) = &self.data {
            if self.d.is_none() {
                return cfg("sparse data files need --d".into());
            }
        }
        if let Some(DataSource::Synthetic(spec)) = &self.data {
            spec.validate()?;
            if self.d.is_some_and(|d| d != spec.d) {
                return cfg(format!("--d {} disagrees with synthetic d={}", self.d.unwrap_or(0), spec.d));
            }
        }
        Ok(())
    }

    /// The (model, p, c) grid at dimension `d`.
    pub fn grid(&self, d: usize) -> Result<Vec<GridPoint>> {
        let mut out = Vec::new();
        for &family in &self.models {
            match family {
                ModelFamily::Bernoulli => {
                    out.extend(self.p_grid.iter().map(|&p| GridPoint { kind: ModelKind::Bernoulli { p }, p: Some(p) }));
                }
                ModelFamily::FixedSparsity | ModelFamily::Bourgain => {
                    let make = |c| match family {
                        ModelFamily::Bourgain => ModelKind::Bourgain { c },
                        _ => ModelKind::FixedSparsity { c },
                    };
                    if self.c_grid.is_empty() {
                        for &p in &self.p_grid {
                            out.push(GridPoint { kind: make(c_from_p(d, p)), p: Some(p) });
                        }
                    } else {
                        out.extend(self.c_grid.iter().map(|&c| GridPoint { kind: make(c), p: None }));
                    }
                }
                ModelFamily::Gaussian => out.push(GridPoint { kind: ModelKind::Gaussian, p: None }),
                ModelFamily::Achlioptas => out.push(GridPoint { kind: ModelKind::Achlioptas, p: None }),
                ModelFamily::Ping => out.push(GridPoint { kind: ModelKind::Ping, p: None }),
            }
        }
        for g in &out {
            if let Some(c) = g.kind.c() {
                if c == 0 || 2 * c > d {
                    return Err(Error::Config(format!(
                        "{}: c={c} outside [1, d/2] at d={d}{}",
                        g.kind.family(),
                        g.p.map(|p| format!(" (from p={p})")).unwrap_or_default()
                    )));
                }
            }
        }
        Ok(out)
    }
}

/// `⌊d·p⌋`, tolerant of products like `0.29·300` landing just below an integer.
pub fn c_from_p(d: usize, p: f64) -> usize {
    let x = d as f64 * p;
    (x + 1e-9 * x.max(1.0)).floor() as usize
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub kind: ModelKind,
    /// The p the point came from, if any.
    pub p: Option<f64>,
}

/// Rounds to 9 significant digits.
pub fn sig9(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

fn opt9(x: Option<f64>) -> Option<f64> {
    x.map(sig9)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceRecord {
    pub model: &'static str,
    pub p: Option<f64>,
    pub c: Option<usize>,
    pub m: usize,
    pub samples: usize,
    /// Mean closed-form variance over all samples.
    pub closed_form: f64,
    pub mc_samples: usize,
    pub trials: usize,
    /// Mean closed-form variance over the Monte Carlo subset.
    pub closed_form_subset: f64,
    /// Mean Monte Carlo variance over the same subset.
    pub mc_variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MseRecord {
    pub model: &'static str,
    pub p: Option<f64>,
    pub c: Option<usize>,
    pub m: usize,
    pub runs: usize,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RetrievalRecord {
    pub model: &'static str,
    pub p: Option<f64>,
    pub c: Option<usize>,
    pub m: usize,
    pub r: usize,
    pub runs: usize,
    pub mean: f64,
    pub std: f64,
}

/// Empty fields mean the bound is not defined at that point (for example
/// `c < 5` or `ε` beyond the proven range).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsRecord {
    pub model: &'static str,
    pub p: Option<f64>,
    pub c: Option<usize>,
    pub d: usize,
    pub n: u64,
    pub eps: f64,
    pub eps_max: f64,
    pub m: usize,
    pub min_m: Option<u64>,
    pub two_sided: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Records {
    Variance(Vec<VarianceRecord>),
    Mse(Vec<MseRecord>),
    Retrieval(Vec<RetrievalRecord>),
    Bounds(Vec<BoundsRecord>),
    Project(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Timing {
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub config: ExperimentConfig,
    pub experiment: Experiment,
    pub records: Records,
    pub timing: Option<Timing>,
}

fn std_dev(values: &[f64], mean: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (values.len() - 1) as f64).sqrt()
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn load_data(source: &DataSource, d: Option<usize>, seed: u64) -> Result<Dataset> {
    match source {
        DataSource::File { path, format: DataFormat::Dense } => data::load_dense(path),
        DataSource::File { path, format: DataFormat::Sparse } => {
            let d = d.ok_or_else(|| Error::Config("sparse data files need d".into()))?;
            data::load_sparse(path, d)
        }
        DataSource::Synthetic(spec) => {
            let spec = SyntheticSpec { seed: derive_seed(seed ^ spec.seed, DATA_STREAM), ..*spec };
            data::gen_synthetic(&spec)
        }
    }
}

/// Distance MSE of each run; run `r` draws its matrix with seed `derive_seed(seed, r)`.
pub fn mse_runs(
    data: &Dataset,
    original: &DistanceMatrix,
    kind: ModelKind,
    m: usize,
    seed: u64,
    runs: usize,
) -> Result<Vec<f64>> {
    let model = ProjectionModel::new(kind, data.d(), m, seed)?;
    (0..runs as u64)
        .into_par_iter()
        .map(|r| {
            let projected = model.with_seed(derive_seed(seed, r)).materialize()?.project_batch(data)?;
            eval::distance_mse(original, &eval::pairwise_distances(&projected))
        })
        .collect()
}

/// Mean retrieval error of each run.
pub fn retrieval_runs(
    data: &Dataset,
    original: &DistanceMatrix,
    kind: ModelKind,
    m: usize,
    r: usize,
    seed: u64,
    runs: usize,
) -> Result<Vec<f64>> {
    let model = ProjectionModel::new(kind, data.d(), m, seed)?;
    (0..runs as u64)
        .into_par_iter()
        .map(|run| {
            let projected = model.with_seed(derive_seed(seed, run)).materialize()?.project_batch(data)?;
            Ok(eval::retrieval_report(original, &eval::pairwise_distances(&projected), r)?.mean)
        })
        .collect()
}

fn resolve_m(cfg: &ExperimentConfig, d: usize) -> Result<usize> {
    let m = cfg.m.resolve(d);
    if cfg.experiment.projects() && m >= d {
        return Err(Error::Config(format!("m={m} must be below d={d}")));
    }
    Ok(m)
}

fn check_data(cfg: &ExperimentConfig, data: &Dataset) -> Result<()> {
    if data.is_empty() {
        return Err(Error::Config("data set is empty".into()));
    }
    if let Some(d) = cfg.d {
        if d != data.d() {
            return Err(Error::Config(format!("--d {d} disagrees with data dimension {}", data.d())));
        }
    }
    if data.d() < 2 {
        return Err(Error::Config(format!("data dimension must be at least 2, got {}", data.d())));
    }
    match cfg.experiment {
        Experiment::Mse | Experiment::Retrieval if data.n() < 2 => {
            Err(Error::Config(format!("{} needs at least 2 samples", cfg.experiment)))
        }
        Experiment::Retrieval if cfg.r >= data.n() => {
            Err(Error::Config(format!("r={} must be below n={}", cfg.r, data.n())))
        }
        _ => Ok(()),
    }
}

fn run_variance(cfg: &ExperimentConfig, data: &Dataset, grid: &[GridPoint], m: usize) -> Result<Records> {
    let subset = cfg.mc_samples.min(data.n());
    let mut records = Vec::with_capacity(grid.len());
    for g in grid {
        let closed: Vec<f64> = data
            .rows()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|x| moments::model_variance(g.kind, x, m))
            .collect::<Result<_>>()?;
        let model = ProjectionModel::new(g.kind, data.d(), m, cfg.seed)?;
        let mc = (0..subset)
            .map(|i| eval::mc_variance(&model, data.row(i), cfg.trials, derive_seed(cfg.seed, i as u64)))
            .collect::<Result<Vec<_>>>()?;
        let mc_mean = if subset == 0 { f64::NAN } else { mc.iter().map(|s| s.variance).sum::<f64>() / subset as f64 };
        let subset_closed = if subset == 0 { f64::NAN } else { mean(&closed[..subset]) };
        records.push(VarianceRecord {
            model: g.kind.family().name(),
            p: opt9(g.p),
            c: g.kind.c(),
            m,
            samples: data.n(),
            closed_form: sig9(mean(&closed)),
            mc_samples: subset,
            trials: cfg.trials,
            closed_form_subset: sig9(subset_closed),
            mc_variance: sig9(mc_mean),
        });
    }
    Ok(Records::Variance(records))
}

fn run_mse(cfg: &ExperimentConfig, data: &Dataset, grid: &[GridPoint], m: usize) -> Result<Records> {
    let original = eval::pairwise_distances(data);
    let mut records = Vec::with_capacity(grid.len());
    for g in grid {
        let values = mse_runs(data, &original, g.kind, m, cfg.seed, cfg.runs)?;
        let mu = mean(&values);
        records.push(MseRecord {
            model: g.kind.family().name(),
            p: opt9(g.p),
            c: g.kind.c(),
            m,
            runs: cfg.runs,
            mean: sig9(mu),
            std: sig9(std_dev(&values, mu)),
        });
    }
    Ok(Records::Mse(records))
}

fn run_retrieval(cfg: &ExperimentConfig, data: &Dataset, grid: &[GridPoint], m: usize) -> Result<Records> {
    let original = eval::pairwise_distances(data);
    let mut records = Vec::with_capacity(grid.len());
    for g in grid {
        let values = retrieval_runs(data, &original, g.kind, m, cfg.r, cfg.seed, cfg.runs)?;
        let mu = mean(&values);
        records.push(RetrievalRecord {
            model: g.kind.family().name(),
            p: opt9(g.p),
            c: g.kind.c(),
            m,
            r: cfg.r,
            runs: cfg.runs,
            mean: sig9(mu),
            std: sig9(std_dev(&values, mu)),
        });
    }
    Ok(Records::Retrieval(records))
}

fn defined<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Domain(msg)) => {
            log::debug!("bound undefined: {msg}");
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn run_bounds(cfg: &ExperimentConfig, d: usize, n: u64, grid: &[GridPoint]) -> Result<Records> {
    let m = cfg.m.resolve(d);
    let mut records = Vec::new();
    for g in grid {
        let (min_m, two_sided, eps_max) = match g.kind {
            ModelKind::Bernoulli { p } => (
                defined(bounds::min_m_bernoulli(n, cfg.eps, p))?,
                defined(bounds::bernoulli_two_sided(cfg.eps, m, d, p))?,
                bounds::bernoulli_eps_max(d, p),
            ),
            ModelKind::FixedSparsity { c } => (
                defined(bounds::min_m_fixed(n, cfg.eps, d, c))?,
                defined(bounds::fixed_two_sided(cfg.eps, m, d, c))?,
                bounds::fixed_eps_max(c),
            ),
            other => {
                log::warn!("bounds: no bound for {}, skipped", other.family());
                continue;
            }
        };
        records.push(BoundsRecord {
            model: g.kind.family().name(),
            p: opt9(g.p),
            c: g.kind.c(),
            d,
            n,
            eps: sig9(cfg.eps),
            eps_max: sig9(eps_max),
            m,
            min_m,
            two_sided: opt9(two_sided),
        });
    }
    Ok(Records::Bounds(records))
}

fn run_project(cfg: &ExperimentConfig, data: &Dataset, grid: &[GridPoint], m: usize) -> Result<Records> {
    let [g] = grid else {
        return Err(Error::Config(format!("project takes exactly one (model, parameter) pair, got {}", grid.len())));
    };
    let projector = ProjectionModel::new(g.kind, data.d(), m, cfg.seed)?.materialize()?;
    if let Some(path) = &cfg.matrix_out {
        let text = match projector.matrix() {
            Matrix::Binary(w) => genmat::export_binary(w),
            Matrix::Signed(w) => genmat::export_signed(w),
            Matrix::Dense(_) => {
                return Err(Error::Config("matrix export covers sparse models only".into()));
            }
        };
        write_atomic(path, text.as_bytes())?;
    }
    let projected = projector.project_batch(data)?;
    Ok(Records::Project(projected.rows().map(|r| r.iter().map(|&v| sig9(v)).collect()).collect()))
}

/// Validates, loads data and runs. Configuration problems surface as
/// [`Error::Config`] before any projection is computed.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let start = Instant::now();
    let data = cfg.data.as_ref().map(|src| load_data(src, cfg.d, cfg.seed)).transpose()?;
    let records = if cfg.experiment == Experiment::Bounds {
        let d = match (&data, cfg.d) {
            (Some(data), Some(d)) if data.d() != d => {
                return Err(Error::Config(format!("--d {d} disagrees with data dimension {}", data.d())));
            }
            (_, Some(d)) => d,
            (Some(data), None) => data.d(),
            (None, None) => unreachable!("validated"),
        };
        let n = cfg.n.or(data.as_ref().map(|x| x.n() as u64)).unwrap_or(10_000);
        let grid = cfg.grid(d)?;
        run_bounds(cfg, d, n, &grid)?
    } else {
        let data = data.expect("validated");
        check_data(cfg, &data)?;
        let m = resolve_m(cfg, data.d())?;
        let grid = cfg.grid(data.d())?;
        for g in &grid {
            ProjectionModel::new(g.kind, data.d(), m, cfg.seed).map_err(|e| Error::Config(e.to_string()))?;
        }
        match cfg.experiment {
            Experiment::Variance => run_variance(cfg, &data, &grid, m)?,
            Experiment::Mse => run_mse(cfg, &data, &grid, m)?,
            Experiment::Retrieval => run_retrieval(cfg, &data, &grid, m)?,
            Experiment::Project => run_project(cfg, &data, &grid, m)?,
            Experiment::Bounds => unreachable!(),
        }
    };
    let timing = cfg.timing.then(|| Timing { seconds: sig9(start.elapsed().as_secs_f64()) });
    Ok(Report { config: cfg.clone(), experiment: cfg.experiment, records, timing })
}

fn csv_rows<T: Serialize>(rows: &[T], header: &[&str]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header).map_err(|e| Error::Report(e.to_string()))?;
    for row in rows {
        w.serialize(row).map_err(|e| Error::Report(e.to_string()))?;
    }
    w.into_inner().map_err(|e| Error::Report(e.to_string()))
}

pub const VARIANCE_COLUMNS: [&str; 10] =
    ["model", "p", "c", "m", "samples", "closed_form", "mc_samples", "trials", "closed_form_subset", "mc_variance"];
pub const MSE_COLUMNS: [&str; 7] = ["model", "p", "c", "m", "runs", "mean", "std"];
pub const RETRIEVAL_COLUMNS: [&str; 8] = ["model", "p", "c", "m", "r", "runs", "mean", "std"];
pub const BOUNDS_COLUMNS: [&str; 10] = ["model", "p", "c", "d", "n", "eps", "eps_max", "m", "min_m", "two_sided"];

impl Report {
    /// CSV carries the records only; projected vectors are written without a header.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        match &self.records {
            Records::Variance(r) => csv_rows(r, &VARIANCE_COLUMNS),
            Records::Mse(r) => csv_rows(r, &MSE_COLUMNS),
            Records::Retrieval(r) => csv_rows(r, &RETRIEVAL_COLUMNS),
            Records::Bounds(r) => csv_rows(r, &BOUNDS_COLUMNS),
            Records::Project(rows) => {
                let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
                for row in rows {
                    w.serialize(row).map_err(|e| Error::Report(e.to_string()))?;
                }
                w.into_inner().map_err(|e| Error::Report(e.to_string()))
            }
        }
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        let mut out = serde_json::to_vec_pretty(self).map_err(|e| Error::Report(e.to_string()))?;
        out.push(b'\n');
        Ok(out)
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Writes to a temporary file beside `path` and renames it into place, so a
/// failure never leaves a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let report = |e: std::io::Error| Error::Report(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(report)?;
    tmp.write_all(bytes).map_err(report)?;
    tmp.as_file().sync_all().map_err(report)?;
    tmp.persist(path).map_err(|e| report(e.error))?;
    Ok(())
}
