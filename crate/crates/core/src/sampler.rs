//! Reproducible Gaussian coefficient vectors.
//!
//! Every trial draws from its own ChaCha8 stream selected by
//! `(seed, trial_index)`, so trials can be generated in any order or on any
//! thread and still reproduce bit-for-bit.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::covariance::{autocovariance, covariance_matrix, CoefficientModel};
use crate::error::{KacError, Result};

/// Pivots below this signal a covariance bug rather than roundoff.
pub const CHOLESKY_PIVOT_TOL: f64 = -1e-10;
/// Circulant eigenvalues below this trigger the Cholesky fallback.
pub const CIRCULANT_EIGEN_TOL: f64 = -1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SamplingMethod {
    #[default]
    Cholesky,
    CirculantEmbedding,
    /// `X(k) = (Z_0 + Z_k)/sqrt(2)` construction for the `H = 0` sequence.
    ExplicitLimitZero,
}

/// One realised coefficient vector `(a_0, ..., a_{n-1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSample {
    pub coeffs: Vec<f64>,
    pub model: CoefficientModel,
    pub seed: u64,
    pub trial_index: u64,
    /// Method that actually produced `coeffs`.
    pub method: SamplingMethod,
    /// Set when circulant embedding was requested but fell back to Cholesky.
    pub fallback: bool,
}

/// Random stream for one trial.
pub fn trial_rng(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

/// Lower-triangular Cholesky factor, row-major. Pivots in
/// `[CHOLESKY_PIVOT_TOL, 0]` are treated as exact zeros (semidefinite input).
pub fn cholesky_lower(a: &[f64], n: usize) -> Result<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let row_j = &l[j * n..j * n + j];
        let d = a[j * n + j] - row_j.iter().map(|v| v * v).sum::<f64>();
        if d < CHOLESKY_PIVOT_TOL {
            return Err(KacError::CholeskyPivot { index: j, pivot: d });
        }
        let ljj = d.max(0.0).sqrt();
        l[j * n + j] = ljj;
        if ljj == 0.0 {
            continue;
        }
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / ljj;
        }
    }
    Ok(l)
}

enum Backend {
    Cholesky(Vec<f64>),
    Circulant {
        sqrt_eigs: Vec<f64>,
        fft: Arc<dyn Fft<f64>>,
    },
}

/// Pre-factored sampler for a fixed `(n, model)`.
pub struct Sampler {
    n: usize,
    model: CoefficientModel,
    backend: Backend,
    fallback: bool,
}

impl std::fmt::Debug for Sampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Sampler")
            .field("n", &self.n)
            .field("model", &self.model)
            .field("method", &self.method())
            .field("fallback", &self.fallback)
            .finish()
    }
}

impl Sampler {
    pub fn new(n: usize, model: CoefficientModel, method: SamplingMethod) -> Result<Self> {
        if n == 0 {
            return Err(KacError::EmptyLength);
        }
        match method {
            SamplingMethod::Cholesky => Self::cholesky(n, model, false),
            SamplingMethod::CirculantEmbedding => {
                if model == CoefficientModel::LimitZero {
                    return Err(KacError::Unsupported(
                        "circulant embedding is only offered for fractional-increment models",
                    ));
                }
                Self::circulant(n, model)
            }
            SamplingMethod::ExplicitLimitZero => Err(KacError::Unsupported(
                "use sample_limit_zero_explicit for the explicit H = 0 construction",
            )),
        }
    }

    fn cholesky(n: usize, model: CoefficientModel, fallback: bool) -> Result<Self> {
        let cov = covariance_matrix(n, model)?;
        let lower = cholesky_lower(cov.as_slice(), n)?;
        Ok(Self {
            n,
            model,
            backend: Backend::Cholesky(lower),
            fallback,
        })
    }

    fn circulant(n: usize, model: CoefficientModel) -> Result<Self> {
        // Embed the Toeplitz first row r_0..r_m into a circulant of size 2m.
        let m = n.max(2).next_power_of_two();
        let size = 2 * m;
        let acv = autocovariance(m + 1, model);
        let mut row: Vec<Complex<f64>> = (0..size)
            .map(|k| {
                let lag = if k <= m { k } else { size - k };
                Complex::new(acv[lag], 0.0)
            })
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(size);
        fft.process(&mut row);

        let min_eig = row.iter().map(|c| c.re).fold(f64::INFINITY, f64::min);
        if min_eig < CIRCULANT_EIGEN_TOL {
            log::warn!(
                "circulant embedding for n = {n}, {model} has eigenvalue {min_eig:e}; falling back to Cholesky"
            );
            return Self::cholesky(n, model, true);
        }
        let scale = 1.0 / size as f64;
        let sqrt_eigs = row.iter().map(|c| (c.re.max(0.0) * scale).sqrt()).collect();
        Ok(Self {
            n,
            model,
            backend: Backend::Circulant { sqrt_eigs, fft },
            fallback: false,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn model(&self) -> CoefficientModel {
        self.model
    }

    pub fn method(&self) -> SamplingMethod {
        match self.backend {
            Backend::Cholesky(_) => SamplingMethod::Cholesky,
            Backend::Circulant { .. } => SamplingMethod::CirculantEmbedding,
        }
    }

    /// Draws trial `trial_index` of stream `seed`.
    pub fn sample(&self, seed: u64, trial_index: u64) -> CoefficientSample {
        let mut rng = trial_rng(seed, trial_index);
        let n = self.n;
        let coeffs = match &self.backend {
            Backend::Cholesky(lower) => {
                let z: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
                (0..n)
                    .map(|i| {
                        lower[i * n..i * n + i + 1]
                            .iter()
                            .zip(&z)
                            .map(|(l, z)| l * z)
                            .sum()
                    })
                    .collect()
            }
            Backend::Circulant { sqrt_eigs, fft } => {
                let mut buf: Vec<Complex<f64>> = sqrt_eigs
                    .iter()
                    .map(|&s| {
                        let re: f64 = StandardNormal.sample(&mut rng);
                        let im: f64 = StandardNormal.sample(&mut rng);
                        Complex::new(s * re, s * im)
                    })
                    .collect();
                fft.process(&mut buf);
                buf[..n].iter().map(|c| c.re).collect()
            }
        };
        CoefficientSample {
            coeffs,
            model: self.model,
            seed,
            trial_index,
            method: self.method(),
            fallback: self.fallback,
        }
    }
}

/// One-shot Cholesky sample. Prefer [`Sampler`] when drawing many trials.
pub fn sample(
    n: usize,
    model: CoefficientModel,
    seed: u64,
    trial_index: u64,
) -> Result<CoefficientSample> {
    Ok(Sampler::new(n, model, SamplingMethod::Cholesky)?.sample(seed, trial_index))
}

/// `H = 0` coefficients built from `X(k) = (Z_0 + Z_k)/sqrt(2)`, `X(0) = 0`,
/// `a_k = X(k+1) - X(k)`. Independent of the covariance-matrix path.
pub fn sample_limit_zero_explicit(
    n: usize,
    seed: u64,
    trial_index: u64,
) -> Result<CoefficientSample> {
    if n == 0 {
        return Err(KacError::EmptyLength);
    }
    let mut rng = trial_rng(seed, trial_index);
    let z0: f64 = StandardNormal.sample(&mut rng);
    let mut prev = 0.0;
    let mut coeffs = Vec::with_capacity(n);
    for _ in 0..n {
        let zk: f64 = StandardNormal.sample(&mut rng);
        let x = (z0 + zk) * std::f64::consts::FRAC_1_SQRT_2;
        coeffs.push(x - prev);
        prev = x;
    }
    Ok(CoefficientSample {
        coeffs,
        model: CoefficientModel::LimitZero,
        seed,
        trial_index,
        method: SamplingMethod::ExplicitLimitZero,
        fallback: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_trial() {
        let m = CoefficientModel::fractional(0.7).unwrap();
        let s = Sampler::new(16, m, SamplingMethod::Cholesky).unwrap();
        let a = s.sample(42, 7);
        let b = s.sample(42, 7);
        let c = s.sample(42, 8);
        assert_eq!(a.coeffs, b.coeffs);
        assert_ne!(a.coeffs, c.coeffs);
        // order of generation does not matter
        let later: Vec<_> = (0..10).rev().map(|t| s.sample(1, t).coeffs).collect();
        let earlier: Vec<_> = (0..10).map(|t| s.sample(1, t).coeffs).collect();
        assert_eq!(later.into_iter().rev().collect::<Vec<_>>(), earlier);
    }

    #[test]
    fn cholesky_reconstructs_matrix() {
        let m = CoefficientModel::fractional(0.2).unwrap();
        let n = 12;
        let cov = covariance_matrix(n, m).unwrap();
        let l = cholesky_lower(cov.as_slice(), n).unwrap();
        for i in 0..n {
            for j in 0..n {
                let v: f64 = (0..n).map(|k| l[i * n + k] * l[j * n + k]).sum();
                assert!((v - cov.get(i, j)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = [1.0, 2.0, 2.0, 1.0];
        assert!(matches!(
            cholesky_lower(&a, 2),
            Err(KacError::CholeskyPivot { index: 1, .. })
        ));
    }

    #[test]
    fn circulant_not_offered_for_limit_zero() {
        assert!(Sampler::new(
            8,
            CoefficientModel::LimitZero,
            SamplingMethod::CirculantEmbedding
        )
        .is_err());
    }

    #[test]
    fn circulant_has_no_fallback_for_fgn() {
        for h in [0.1, 0.5, 0.9] {
            let s = Sampler::new(
                100,
                CoefficientModel::fractional(h).unwrap(),
                SamplingMethod::CirculantEmbedding,
            )
            .unwrap();
            assert_eq!(s.method(), SamplingMethod::CirculantEmbedding);
            let x = s.sample(3, 0);
            assert_eq!(x.coeffs.len(), 100);
            assert!(!x.fallback);
        }
    }

    #[test]
    fn n_zero_rejected() {
        assert!(sample(0, CoefficientModel::LimitZero, 0, 0).is_err());
        assert!(sample_limit_zero_explicit(0, 0, 0).is_err());
    }
}
