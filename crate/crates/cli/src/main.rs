use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kaczeros::experiments::{
    run, write_csv, write_ell_table, write_json, ExperimentConfig, Mode, OutputFormat,
};
use kaczeros::{CoefficientModel, KacError, RegionSpec};

const EXIT_OTHER: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NON_CONVERGENCE: u8 = 3;

/// Expected number of real zeros of random polynomials with fractional
/// Gaussian noise coefficients.
#[derive(Parser, Debug)]
#[command(name = "kaczeros", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Kac-Rice quadrature of the expected zero count.
    Expected(Overrides),
    /// Monte Carlo root counting.
    Simulate(Overrides),
    /// Leading-order asymptotic formulas.
    Asymptotics(Overrides),
    /// Quadrature, Monte Carlo and asymptotics side by side, with residuals.
    Compare(Overrides),
    /// Run whatever mode the config (or --mode) names.
    Run {
        #[arg(long)]
        mode: Option<String>,
        #[command(flatten)]
        overrides: Overrides,
    },
}

/// Flags overriding fields of the JSON config.
#[derive(Args, Debug, Default)]
struct Overrides {
    /// JSON config file; flags given alongside it take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, conflicts_with = "limit_zero")]
    hurst: Option<f64>,
    /// Use the H -> 0 limit sequence.
    #[arg(long)]
    limit_zero: bool,
    /// Comma-separated polynomial lengths, ascending.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    /// all, negative, positive, or one of the four unit-circle pieces.
    #[arg(long)]
    region: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
    /// Write an l(x) sampling table here (asymptotics, fractional models).
    #[arg(long)]
    ell_table: Option<PathBuf>,
    /// Points per side of the l table.
    #[arg(long, default_value_t = 200)]
    ell_points: usize,
}

impl Overrides {
    fn apply(&self, mut cfg: ExperimentConfig) -> kaczeros::Result<ExperimentConfig> {
        if let Some(h) = self.hurst {
            cfg.model = CoefficientModel::fractional(h)?;
        }
        if self.limit_zero {
            cfg.model = CoefficientModel::LimitZero;
        }
        if let Some(n) = &self.n {
            cfg.n_values = n.clone();
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(t) = self.tol {
            cfg.tol = t;
        }
        if let Some(r) = &self.region {
            cfg.region = r.parse::<RegionSpec>()?;
        }
        if let Some(out) = &self.out {
            cfg.output_path = Some(out.to_string_lossy().into_owned());
        }
        if let Some(f) = &self.format {
            cfg.output_format = f.parse::<OutputFormat>()?;
        }
        if self.workers.is_some() {
            cfg.workers = self.workers;
        }
        if self.ell_table.is_some() {
            cfg.ell_points = self.ell_points;
        }
        Ok(cfg)
    }
}

fn load(overrides: &Overrides, mode: Option<Mode>) -> kaczeros::Result<ExperimentConfig> {
    let base = match &overrides.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None => ExperimentConfig::default(),
    };
    let mut cfg = overrides.apply(base)?;
    if let Some(m) = mode {
        cfg.mode = m;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: Cli) -> kaczeros::Result<u8> {
    let (overrides, cfg) = match &cli.command {
        Command::Expected(o) => (o, load(o, Some(Mode::Expected))?),
        Command::Simulate(o) => (o, load(o, Some(Mode::Simulate))?),
        Command::Asymptotics(o) => (o, load(o, Some(Mode::Asymptotics))?),
        Command::Compare(o) => (o, load(o, Some(Mode::Compare))?),
        Command::Run { mode, overrides } => {
            let mode = mode.as_deref().map(str::parse::<Mode>).transpose()?;
            (overrides, load(overrides, mode)?)
        }
    };
    log::info!(
        "running {} for {} on n = {:?}",
        cfg.mode.as_str(),
        cfg.model,
        cfg.n_values
    );

    let output = run(&cfg)?;

    let sink: Box<dyn Write> = match &cfg.output_path {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    match cfg.output_format {
        OutputFormat::Csv => write_csv(&mut sink, &output.records)?,
        OutputFormat::Json => write_json(&mut sink, &output.records)?,
    }
    sink.flush()?;

    if let Some(path) = &overrides.ell_table {
        match &output.ell_table {
            Some(table) => write_ell_table(BufWriter::new(File::create(path)?), table)?,
            None => log::warn!("no l table produced; {} not written", path.display()),
        }
    }

    for f in &output.failures {
        log::error!("n = {}, {}, {}: {}", f.n, f.region, f.method, f.error);
    }
    if output.has_non_convergence() {
        return Ok(EXIT_NON_CONVERGENCE);
    }
    if !output.failures.is_empty() {
        return Ok(EXIT_OTHER);
    }
    Ok(0)
}

fn exit_code(err: &KacError) -> u8 {
    if err.is_config_error() {
        EXIT_CONFIG
    } else if matches!(err, KacError::NonConvergence { .. }) {
        EXIT_NON_CONVERGENCE
    } else {
        EXIT_OTHER
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
