//! Expected number of real zeros of random polynomials whose coefficients are
//! increments of fractional Brownian motion.
//!
//! Three independent routes are provided: exact Kac–Rice quadrature
//! ([`moments`]), limit formulas ([`asymptotics`]) and Monte Carlo with
//! dual-method root counting ([`sampler`], [`rootcount`]). The
//! [`experiments`] module runs and persists comparisons between them.

pub mod asymptotics;
pub mod covariance;
pub mod error;
pub mod experiments;
pub mod moments;
pub mod numerics;
pub mod quadrature;
pub mod rootcount;
pub mod sampler;

pub use asymptotics::{asymptotic_expected, constants, AsymptoticConstants};
pub use covariance::{
    covariance_matrix, increment_covariance, CoefficientModel, CovarianceMatrix, Hurst,
};
pub use error::{KacError, Result};
pub use moments::{expected_zeros, moment_triple, MomentTriple, RegionSpec, ZeroExpectation};
pub use rootcount::{count_real_zeros, count_with, CountMethod, RootCountConfig, ZeroCount};
pub use sampler::{sample, CoefficientSample, SamplingMethod};
