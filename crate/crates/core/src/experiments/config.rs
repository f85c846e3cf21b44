use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::covariance::CoefficientModel;
use crate::error::{KacError, Result};
use crate::moments::RegionSpec;

/// Environment variable giving the default Monte Carlo worker count.
pub const WORKERS_ENV: &str = "KACZEROS_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Expected,
    Simulate,
    Asymptotics,
    Compare,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Expected => "expected",
            Mode::Simulate => "simulate",
            Mode::Asymptotics => "asymptotics",
            Mode::Compare => "compare",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = KacError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "expected" => Ok(Mode::Expected),
            "simulate" => Ok(Mode::Simulate),
            "asymptotics" => Ok(Mode::Asymptotics),
            "compare" => Ok(Mode::Compare),
            _ => Err(KacError::Config(format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = KacError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(KacError::Config(format!("unknown output format {s:?}"))),
        }
    }
}

/// One experiment, fully described by a single JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub model: CoefficientModel,
    pub n_values: Vec<usize>,
    /// Monte Carlo trials per `n`.
    pub trials: u64,
    pub seed: u64,
    /// Absolute quadrature tolerance on the integral.
    pub tol: f64,
    pub region: RegionSpec,
    /// `None` writes to standard output.
    pub output_path: Option<String>,
    pub output_format: OutputFormat,
    /// Monte Carlo worker threads; `None` defers to `KACZEROS_WORKERS`.
    pub workers: Option<usize>,
    /// Points per half-line of the `l` table emitted by the asymptotics mode;
    /// zero disables the table.
    pub ell_points: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Expected,
            model: CoefficientModel::independent(),
            n_values: vec![2],
            trials: 1000,
            seed: 0,
            tol: 1e-8,
            region: RegionSpec::All,
            output_path: None,
            output_format: OutputFormat::Csv,
            workers: None,
            ell_points: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| {
            KacError::Config(format!("cannot read {}: {e}", path.as_ref().display()))
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() {
            return Err(KacError::Config("n_values must not be empty".into()));
        }
        if self.n_values.contains(&0) {
            return Err(KacError::Config("n_values must be positive".into()));
        }
        if self.n_values.windows(2).any(|w| w[0] > w[1]) {
            return Err(KacError::Config("n_values must be sorted ascending".into()));
        }
        if self.trials == 0 {
            return Err(KacError::Config("trials must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(KacError::Config(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.workers == Some(0) {
            return Err(KacError::Config("workers must be at least 1".into()));
        }
        Ok(())
    }

    /// Worker count: the config value, then `KACZEROS_WORKERS`, then the
    /// available parallelism.
    pub fn resolved_workers(&self) -> Result<usize> {
        if let Some(w) = self.workers {
            return Ok(w);
        }
        match std::env::var(WORKERS_ENV) {
            Ok(v) => match v.trim().parse::<usize>() {
                Ok(w) if w > 0 => Ok(w),
                _ => Err(KacError::Config(format!(
                    "{WORKERS_ENV} must be a positive integer, got {v:?}"
                ))),
            },
            Err(_) => Ok(std::thread::available_parallelism().map_or(1, |p| p.get())),
        }
    }
}

/// Regions reported for a requested region: `All` expands to the total plus
/// the two half-lines.
pub(crate) fn reported_regions(region: RegionSpec) -> Vec<RegionSpec> {
    match region {
        RegionSpec::All => vec![
            RegionSpec::All,
            RegionSpec::NegativeAxis,
            RegionSpec::PositiveAxis,
        ],
        r => vec![r],
    }
}
