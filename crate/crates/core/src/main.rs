use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use sbproj::data::SyntheticSpec;
use sbproj::experiment::{self, DataFormat, DataSource, Experiment, ExperimentConfig, Format, MSpec};
use sbproj::{Error, ModelFamily};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExperimentArg {
    Variance,
    Mse,
    Retrieval,
    Bounds,
    Project,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DataFormatArg {
    Dense,
    Sparse,
}

/// Sparse binary random projections: experiments, bounds and projection.
#[derive(Debug, Parser)]
#[command(name = "sbproj", version)]
struct Cli {
    experiment: ExperimentArg,

    /// Comma-separated models: bernoulli, fixed, gaussian, achlioptas, ping, bourgain.
    #[arg(long, default_value = "gaussian,bernoulli,fixed")]
    model: String,

    #[arg(long)]
    d: Option<usize>,

    /// Output dimension: an integer, or a ratio of d in (0, 1].
    #[arg(long, default_value = "0.5")]
    m: String,

    #[arg(long, default_value = "0.1,0.3,0.5")]
    p_grid: String,

    /// Explicit c values; without it c = floor(d*p) over the p-grid.
    #[arg(long)]
    c_grid: Option<String>,

    /// Neighbors per query in the retrieval experiment.
    #[arg(long, default_value_t = 10)]
    r: usize,

    #[arg(long, default_value_t = 100)]
    runs: usize,

    /// Monte Carlo trials per vector in the variance experiment.
    #[arg(long, default_value_t = 100)]
    trials: usize,

    /// Vectors that get a Monte Carlo variance estimate.
    #[arg(long, default_value_t = 10)]
    mc_samples: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Data file, one sample per line.
    #[arg(long, conflicts_with = "synthetic")]
    data: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "dense")]
    data_format: DataFormatArg,

    /// Synthetic data: kind,n,d[,density] with kind dense-gaussian or sparse-nonnegative.
    #[arg(long)]
    synthetic: Option<String>,

    /// Point count for the bounds experiment.
    #[arg(long)]
    n: Option<u64>,

    /// Distortion for the bounds experiment.
    #[arg(long, default_value_t = 0.1)]
    eps: f64,

    /// Report path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,

    /// Omit wall-clock timing so reports are byte-for-byte reproducible.
    #[arg(long)]
    no_timing: bool,

    /// With `project`, also write the sparse matrix in text form.
    #[arg(long)]
    matrix_out: Option<PathBuf>,
}

fn list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, Error> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Error::Config(format!("bad {what} value {t:?}"))))
        .collect()
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut cfg = ExperimentConfig::new(match cli.experiment {
        ExperimentArg::Variance => Experiment::Variance,
        ExperimentArg::Mse => Experiment::Mse,
        ExperimentArg::Retrieval => Experiment::Retrieval,
        ExperimentArg::Bounds => Experiment::Bounds,
        ExperimentArg::Project => Experiment::Project,
    });
    cfg.models = cli.model.split(',').map(|s| s.parse::<ModelFamily>()).collect::<Result<_, _>>()?;
    cfg.d = cli.d;
    cfg.m = cli.m.parse::<MSpec>()?;
    cfg.p_grid = list(&cli.p_grid, "p-grid")?;
    cfg.c_grid = match &cli.c_grid {
        Some(s) => {
            let v = list(s, "c-grid")?;
            if v.is_empty() {
                return Err(Error::Config("c-grid is empty".into()));
            }
            v
        }
        None => Vec::new(),
    };
    cfg.r = cli.r;
    cfg.runs = cli.runs;
    cfg.trials = cli.trials;
    cfg.mc_samples = cli.mc_samples;
    cfg.seed = cli.seed;
    cfg.n = cli.n;
    cfg.eps = cli.eps;
    cfg.data = match (&cli.data, &cli.synthetic) {
        (Some(path), None) => Some(DataSource::File {
            path: path.clone(),
            format: match cli.data_format {
                DataFormatArg::Dense => DataFormat::Dense,
                DataFormatArg::Sparse => DataFormat::Sparse,
            },
        }),
        (None, Some(spec)) => Some(DataSource::Synthetic(spec.parse::<SyntheticSpec>()?)),
        _ => None,
    };
    cfg.format = match cli.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    cfg.timing = !cli.no_timing;
    cfg.matrix_out = cli.matrix_out.clone();
    Ok(cfg)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Parameter(_) | Error::Domain(_) => 2,
        Error::Parse { .. } | Error::Io { .. } | Error::Dimension { .. } | Error::NonFinite { .. } => 3,
        Error::Report(_) => 1,
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    let cfg = build_config(cli)?;
    let report = experiment::run_experiment(&cfg)?;
    let bytes = report.render(cfg.format)?;
    match &cli.out {
        Some(path) => experiment::write_atomic(path, &bytes),
        None => std::io::stdout().write_all(&bytes).map_err(|e| Error::Report(e.to_string())),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sbproj: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
