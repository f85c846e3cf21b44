//! Coefficient covariance for fractional-Gaussian-noise coefficients and the
//! `H = 0` limit sequence.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{KacError, Result};

/// Hurst index strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Hurst(f64);

impl Hurst {
    pub fn new(h: f64) -> Result<Self> {
        if h > 0.0 && h < 1.0 {
            Ok(Self(h))
        } else {
            Err(KacError::InvalidHurst(h))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// `1 - H`, the reflected index.
    pub fn reflected(self) -> Self {
        Self(1.0 - self.0)
    }
}

impl<'de> Deserialize<'de> for Hurst {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let h = f64::deserialize(d)?;
        Hurst::new(h).map_err(serde::de::Error::custom)
    }
}

/// Gaussian law generating the coefficients `a_0, ..., a_{n-1}`.
///
/// `FractionalIncrement` is the increment sequence `X(k+1) - X(k)` of a
/// fractional Brownian motion. `LimitZero` is the degenerate `H = 0` sequence
/// with `E[X(k) X(j)] = 1/2` for `k != j`, whose increments have a
/// tridiagonal covariance with `-1/2` off the diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoefficientModel {
    FractionalIncrement { hurst: Hurst },
    LimitZero,
}

impl CoefficientModel {
    pub fn fractional(h: f64) -> Result<Self> {
        Ok(Self::FractionalIncrement {
            hurst: Hurst::new(h)?,
        })
    }

    /// Independent standard normal coefficients (`H = 1/2`).
    pub fn independent() -> Self {
        Self::FractionalIncrement { hurst: Hurst(0.5) }
    }

    pub fn hurst(&self) -> Option<f64> {
        match self {
            Self::FractionalIncrement { hurst } => Some(hurst.get()),
            Self::LimitZero => None,
        }
    }
}

impl fmt::Display for CoefficientModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::FractionalIncrement { hurst } => write!(f, "fgn:{}", hurst.get()),
            Self::LimitZero => f.write_str("limit-zero"),
        }
    }
}

impl FromStr for CoefficientModel {
    type Err = KacError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "limit-zero" {
            return Ok(Self::LimitZero);
        }
        let h = s
            .strip_prefix("fgn:")
            .unwrap_or(s)
            .parse::<f64>()
            .map_err(|_| KacError::Config(format!("unrecognised model descriptor {s:?}")))?;
        Self::fractional(h)
    }
}

/// `E[a_i a_j]` for `|i - j| = lag`.
///
/// For `FractionalIncrement(H)` this is the fGn autocovariance
/// `-lag^{2H} + ((lag+1)^{2H} + |lag-1|^{2H}) / 2`. For `lag >= 2` it is
/// evaluated as `lag^{2H}/2 * [(1+1/lag)^{2H} - 2 + (1-1/lag)^{2H}]` through
/// `expm1`/`ln_1p`, which keeps full relative accuracy in the far tail where
/// the naive second difference cancels.
pub fn increment_covariance(lag: usize, model: CoefficientModel) -> f64 {
    if lag == 0 {
        return 1.0;
    }
    match model {
        CoefficientModel::LimitZero => {
            if lag == 1 {
                -0.5
            } else {
                0.0
            }
        }
        CoefficientModel::FractionalIncrement { hurst } => {
            let p = 2.0 * hurst.get();
            if p == 1.0 {
                return 0.0;
            }
            if lag == 1 {
                return 0.5 * 2f64.powf(p) - 1.0;
            }
            let l = lag as f64;
            let u = 1.0 / l;
            let bracket = (p * u.ln_1p()).exp_m1() + (p * (-u).ln_1p()).exp_m1();
            0.5 * l.powf(p) * bracket
        }
    }
}

/// Dense `n x n` covariance matrix of the coefficient vector, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl CovarianceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Row-major storage.
    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }
}

/// Covariance of the first `lags` entries of the Toeplitz first row.
pub fn autocovariance(lags: usize, model: CoefficientModel) -> Vec<f64> {
    (0..lags).map(|l| increment_covariance(l, model)).collect()
}

pub fn covariance_matrix(n: usize, model: CoefficientModel) -> Result<CovarianceMatrix> {
    if n == 0 {
        return Err(KacError::EmptyLength);
    }
    let acv = autocovariance(n, model);
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            entries[i * n + j] = acv[i.abs_diff(j)];
        }
    }
    Ok(CovarianceMatrix { n, entries })
}
