use serde::{Deserialize, Serialize};

use crate::covariance::CoefficientModel;
use crate::error::{KacError, Result};
use crate::moments::RegionSpec;

/// Where a row's value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Quadrature,
    Montecarlo,
    Asymptotic,
    /// Quadrature minus the leading-order asymptote.
    ResidualQuadratureAsymptotic,
    /// Monte Carlo minus quadrature in units of the effective standard error.
    ResidualMontecarloQuadrature,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Quadrature,
        Method::Montecarlo,
        Method::Asymptotic,
        Method::ResidualQuadratureAsymptotic,
        Method::ResidualMontecarloQuadrature,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Quadrature => "quadrature",
            Method::Montecarlo => "montecarlo",
            Method::Asymptotic => "asymptotic",
            Method::ResidualQuadratureAsymptotic => "residual_quadrature_asymptotic",
            Method::ResidualMontecarloQuadrature => "residual_montecarlo_quadrature",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = KacError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| KacError::Config(format!("unknown method {s:?}")))
    }
}

mod descriptor {
    use std::str::FromStr;

    use serde::{Deserialize, Deserializer, Serializer};

    use crate::covariance::CoefficientModel;

    pub fn serialize<S: Serializer>(m: &CoefficientModel, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(m)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CoefficientModel, D::Error> {
        let text = String::deserialize(d)?;
        CoefficientModel::from_str(&text).map_err(serde::de::Error::custom)
    }
}

/// One persisted result row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub n: usize,
    #[serde(with = "descriptor")]
    pub model: CoefficientModel,
    pub region: RegionSpec,
    pub method: Method,
    pub value: f64,
    /// Quadrature error bound or Monte Carlo standard error.
    pub err: f64,
    /// Zero for rows without sampling.
    pub trials: u64,
    pub seed: u64,
    pub wall_time_ms: f64,
    /// Fraction of trials whose root count was flagged, Monte Carlo rows only.
    pub suspect_fraction: Option<f64>,
}

impl ExperimentRecord {
    pub const COLUMNS: [&'static str; 10] = [
        "n",
        "model",
        "region",
        "method",
        "value",
        "err",
        "trials",
        "seed",
        "wall_time_ms",
        "suspect_fraction",
    ];

    /// True when every column except `wall_time_ms` matches bit for bit.
    pub fn same_result(&self, other: &Self) -> bool {
        self.n == other.n
            && self.model == other.model
            && self.region == other.region
            && self.method == other.method
            && self.value.to_bits() == other.value.to_bits()
            && self.err.to_bits() == other.err.to_bits()
            && self.trials == other.trials
            && self.seed == other.seed
            && self.suspect_fraction.map(f64::to_bits) == other.suspect_fraction.map(f64::to_bits)
    }
}
