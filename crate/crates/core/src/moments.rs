//! Kac–Rice moments and the expected number of real zeros.
//!
//! For `P(x) = sum a_k x^k` with Toeplitz coefficient covariance `g(|i-j|)`,
//! the zero density is `sqrt(alpha*beta - gamma^2) / (pi*alpha)` with
//! `alpha = E[P^2]`, `beta = E[P'^2]`, `gamma = E[P P']`.
//!
//! Each moment is a sum over lags `L` of `g(L)` times a diagonal sum of
//! `x^{2k+L}`-type terms, and every diagonal sum is an O(1) combination of
//! the prefix sums `S_r[m] = sum_{k<=m} k^r x^{2k}` (`r = 0, 1, 2`):
//!
//! ```text
//! alpha = S0[n-1] + 2 sum_{L>=1} g(L) x^L S0[m]
//! beta  = B0 + 2 sum_{L>=1} g(L) x^{L-2} (S2[m] + L S1[m])
//! gamma = G0 + sum_{L>=1} g(L) x^{L-1} (2 S1[m] + L S0[m])      m = n-1-L
//! ```
//!
//! so a full evaluation costs O(n). Only `|x| <= 1` is evaluated directly;
//! the coefficient law is invariant under reversal, which gives
//! `f(x) = f(1/x) / x^2` for the density outside the unit interval.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::covariance::{covariance_matrix, increment_covariance, CoefficientModel};
use crate::error::{KacError, Result};
use crate::numerics::{two_prod, NeumaierSum};
use crate::quadrature::{integrate, QuadratureOptions, QuadratureResult};

/// Slack on `|x| <= 1` accepted by the direct evaluators.
pub const UNIT_SLACK: f64 = 1e-12;
/// Relative Cauchy–Schwarz violation tolerated as roundoff before clamping.
pub const DELTA_CLAMP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentTriple {
    pub x: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// `alpha*beta - gamma^2`, clamped at zero.
    pub delta: f64,
}

impl MomentTriple {
    fn from_parts(x: f64, alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let (g2, g2_err) = two_prod(gamma, gamma);
        let raw = alpha.mul_add(beta, -g2) - g2_err;
        let allowance = DELTA_CLAMP_TOL * (alpha * beta).abs();
        let delta = if raw >= 0.0 {
            raw
        } else if -raw <= allowance {
            0.0
        } else {
            return Err(KacError::CauchySchwarz {
                x,
                delta: raw,
                allowance,
            });
        };
        Ok(Self {
            x,
            alpha,
            beta,
            gamma,
            delta,
        })
    }

    /// Kac–Rice density `sqrt(delta)/alpha` (without the `1/pi`).
    pub fn density(&self) -> f64 {
        if self.delta == 0.0 {
            0.0
        } else {
            self.delta.sqrt() / self.alpha
        }
    }
}

/// Region of the real line over which zeros are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionSpec {
    NegInfToMinusOne,
    MinusOneToZero,
    ZeroToOne,
    OneToInf,
    NegativeAxis,
    PositiveAxis,
    All,
}

impl RegionSpec {
    pub const ALL: [RegionSpec; 7] = [
        RegionSpec::NegInfToMinusOne,
        RegionSpec::MinusOneToZero,
        RegionSpec::ZeroToOne,
        RegionSpec::OneToInf,
        RegionSpec::NegativeAxis,
        RegionSpec::PositiveAxis,
        RegionSpec::All,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            RegionSpec::NegInfToMinusOne => "neg_inf_to_minus_one",
            RegionSpec::MinusOneToZero => "minus_one_to_zero",
            RegionSpec::ZeroToOne => "zero_to_one",
            RegionSpec::OneToInf => "one_to_inf",
            RegionSpec::NegativeAxis => "negative_axis",
            RegionSpec::PositiveAxis => "positive_axis",
            RegionSpec::All => "all",
        }
    }

    /// Multiplicities of the folded pieces `(int_{-1}^0 f, int_0^1 f)`.
    ///
    /// Reversal maps `(1, inf)` onto `(0, 1)` and `(-inf, -1)` onto `(-1, 0)`
    /// with equal integrals.
    pub fn folded_weights(&self) -> (f64, f64) {
        match self {
            RegionSpec::NegInfToMinusOne | RegionSpec::MinusOneToZero => (1.0, 0.0),
            RegionSpec::ZeroToOne | RegionSpec::OneToInf => (0.0, 1.0),
            RegionSpec::NegativeAxis => (2.0, 0.0),
            RegionSpec::PositiveAxis => (0.0, 2.0),
            RegionSpec::All => (2.0, 2.0),
        }
    }
}

impl std::fmt::Display for RegionSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for RegionSpec {
    type Err = KacError;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        RegionSpec::ALL
            .into_iter()
            .find(|r| r.as_str() == norm)
            .or(match norm.as_str() {
                "negative" | "neg" => Some(RegionSpec::NegativeAxis),
                "positive" | "pos" => Some(RegionSpec::PositiveAxis),
                "total" => Some(RegionSpec::All),
                _ => None,
            })
            .ok_or_else(|| KacError::Config(format!("unknown region {s:?}")))
    }
}

fn check_inside(x: f64) -> Result<()> {
    if x.is_nan() || x.abs() > 1.0 + UNIT_SLACK {
        Err(KacError::OutOfDomain {
            what: "x",
            value: x,
            domain: "|x| <= 1",
        })
    } else {
        Ok(())
    }
}

/// Moment evaluator for a fixed `(n, model)`, caching the lag covariances.
#[derive(Debug, Clone)]
pub struct MomentEvaluator {
    n: usize,
    model: CoefficientModel,
    /// `(lag, g(lag))` for every nonzero off-diagonal covariance.
    lags: Vec<(usize, f64)>,
}

impl MomentEvaluator {
    pub fn new(n: usize, model: CoefficientModel) -> Result<Self> {
        if n == 0 {
            return Err(KacError::EmptyLength);
        }
        let lags = (1..n)
            .map(|l| (l, increment_covariance(l, model)))
            .filter(|&(_, g)| g != 0.0)
            .collect();
        Ok(Self { n, model, lags })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn model(&self) -> CoefficientModel {
        self.model
    }

    /// Moments at `|x| <= 1` in O(n).
    pub fn triple(&self, x: f64) -> Result<MomentTriple> {
        check_inside(x)?;
        let n = self.n;
        let x2 = x * x;

        // Prefix sums S_r[m] = sum_{k=0}^{m} k^r x^{2k}.
        let mut s0 = Vec::with_capacity(n);
        let mut s1 = Vec::with_capacity(n);
        let mut s2 = Vec::with_capacity(n);
        let (mut a0, mut a1, mut a2) = (NeumaierSum::new(), NeumaierSum::new(), NeumaierSum::new());
        let mut p = 1.0;
        for k in 0..n {
            let kf = k as f64;
            a0 += p;
            a1 += kf * p;
            a2 += kf * kf * p;
            s0.push(a0.value());
            s1.push(a1.value());
            s2.push(a2.value());
            p *= x2;
        }

        let alpha0 = s0[n - 1];
        let (beta0, gamma0) = if n >= 2 {
            let m = n - 2;
            (s2[m] + 2.0 * s1[m] + s0[m], x * (s1[m] + s0[m]))
        } else {
            (0.0, 0.0)
        };

        let mut alpha = NeumaierSum::new();
        let mut beta = NeumaierSum::new();
        let mut gamma = NeumaierSum::new();
        alpha += alpha0;
        beta += beta0;
        gamma += gamma0;

        // pows[k] = x^k
        let mut pows = Vec::with_capacity(n + 1);
        let mut q = 1.0;
        for _ in 0..=n {
            pows.push(q);
            q *= x;
        }

        for &(lag, g) in &self.lags {
            let m = n - 1 - lag;
            let lf = lag as f64;
            alpha += 2.0 * g * pows[lag] * s0[m];
            gamma += g * pows[lag - 1] * (2.0 * s1[m] + lf * s0[m]);
            let b = if lag == 1 {
                // sum_{k=1}^{n-2} k(k+1) x^{2k-1}
                if n >= 3 {
                    let m1 = n - 3;
                    x * (s2[m1] + 3.0 * s1[m1] + 2.0 * s0[m1])
                } else {
                    0.0
                }
            } else {
                pows[lag - 2] * (s2[m] + lf * s1[m])
            };
            beta += 2.0 * g * b;
        }

        MomentTriple::from_parts(x, alpha.value(), beta.value(), gamma.value())
    }

    /// Kac–Rice density `sqrt(delta)/alpha` at any real `x` (without `1/pi`).
    pub fn integrand(&self, x: f64) -> Result<f64> {
        if self.n == 1 {
            return Ok(0.0);
        }
        if x.abs() <= 1.0 {
            Ok(self.triple(x)?.density())
        } else {
            let y = 1.0 / x;
            Ok(self.triple(y)?.density() * y * y)
        }
    }
}

pub fn moment_triple(x: f64, n: usize, model: CoefficientModel) -> Result<MomentTriple> {
    MomentEvaluator::new(n, model)?.triple(x)
}

pub fn integrand(x: f64, n: usize, model: CoefficientModel) -> Result<f64> {
    MomentEvaluator::new(n, model)?.integrand(x)
}

/// Largest `n` accepted by the O(n^2) oracle.
pub const BRUTEFORCE_MAX_N: usize = 512;

/// Reference moments from the defining double sums over the covariance matrix.
pub fn moment_triple_bruteforce(x: f64, n: usize, model: CoefficientModel) -> Result<MomentTriple> {
    check_inside(x)?;
    if n > BRUTEFORCE_MAX_N {
        return Err(KacError::OutOfDomain {
            what: "n",
            value: n as f64,
            domain: "n <= 512 for the brute-force oracle",
        });
    }
    let cov = covariance_matrix(n, model)?;
    // pw[k] = x^k; derivative terms use x^{k-1} with k >= 1 only.
    let pw: Vec<f64> = (0..2 * n).map(|k| x.powi(k as i32)).collect();
    let mut alpha = NeumaierSum::new();
    let mut beta = NeumaierSum::new();
    let mut gamma = NeumaierSum::new();
    for i in 0..n {
        for j in 0..n {
            let g = cov.get(i, j);
            if g == 0.0 {
                continue;
            }
            alpha += g * pw[i + j];
            if i >= 1 && j >= 1 {
                beta += g * (i * j) as f64 * pw[i + j - 2];
            }
            if j >= 1 {
                gamma += g * j as f64 * pw[i + j - 1];
            }
        }
    }
    MomentTriple::from_parts(x, alpha.value(), beta.value(), gamma.value())
}

/// Closed-form moments of the `H = 0` limit model, valid away from `x in {0, 1, -1}`.
pub fn moments_h0_closed(x: f64, n: usize) -> Result<MomentTriple> {
    if n == 0 {
        return Err(KacError::EmptyLength);
    }
    if x.abs() <= 1e-6 || (x - 1.0).abs() <= 1e-6 || (x + 1.0).abs() <= 1e-6 || x.is_nan() {
        return Err(KacError::OutOfDomain {
            what: "x",
            value: x,
            domain: "x at least 1e-6 away from 0, 1 and -1",
        });
    }
    let nf = n as f64;
    let x2n = x.powi(2 * n as i32);
    let alpha = (x + x2n) / (x + x * x);
    let beta_num = x.powi(3) + (nf - 1.0) * nf * x2n + (nf - 2.0) * nf * x2n * x
        - (nf - 1.0) * nf * x2n * x * x
        - (nf - 1.0) * (nf - 1.0) * x2n * x.powi(3);
    let beta = -beta_num / ((x - 1.0) * x.powi(3) * (1.0 + x).powi(3));
    let gamma = (-x * x + (2.0 * nf - 1.0) * x2n + 2.0 * (nf - 1.0) * x2n * x)
        / (2.0 * x * x * (1.0 + x).powi(2));
    MomentTriple::from_parts(x, alpha, beta, gamma)
}

/// Expected zero count over a region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroExpectation {
    pub value: f64,
    pub abs_err_estimate: f64,
    pub evaluations: usize,
}

/// `(1/pi) int_region sqrt(delta)/alpha dx` with an absolute tolerance `tol`
/// on the integral before the `1/pi` factor and the default evaluation budget.
pub fn expected_zeros(
    n: usize,
    model: CoefficientModel,
    region: RegionSpec,
    tol: f64,
) -> Result<ZeroExpectation> {
    expected_zeros_with(
        n,
        model,
        region,
        &QuadratureOptions {
            abs_tol: tol,
            ..Default::default()
        },
    )
}

pub fn expected_zeros_with(
    n: usize,
    model: CoefficientModel,
    region: RegionSpec,
    opts: &QuadratureOptions,
) -> Result<ZeroExpectation> {
    if opts.abs_tol.is_nan() || opts.abs_tol <= 0.0 {
        return Err(KacError::Config(
            "quadrature tolerance must be positive".into(),
        ));
    }
    let eval = MomentEvaluator::new(n, model)?;
    if n == 1 {
        return Ok(ZeroExpectation {
            value: 0.0,
            abs_err_estimate: 0.0,
            evaluations: 0,
        });
    }
    let (w_neg, w_pos) = region.folded_weights();
    let total_weight = w_neg + w_pos;
    let pieces = usize::from(w_neg > 0.0) + usize::from(w_pos > 0.0);
    let piece_opts = QuadratureOptions {
        abs_tol: opts.abs_tol / total_weight,
        rel_tol: opts.rel_tol,
        max_evaluations: opts.max_evaluations / pieces,
    };

    let knee = 1.0 - 1.0 / n as f64;
    let run = |lo: f64, hi: f64, inner: f64| -> Result<QuadratureResult> {
        let pts: Vec<f64> = if inner > lo && inner < hi {
            vec![lo, inner, hi]
        } else {
            vec![lo, hi]
        };
        integrate(|x| eval.integrand(x), &pts, &piece_opts)
    };
    let zero = QuadratureResult {
        value: 0.0,
        abs_err: 0.0,
        evaluations: 0,
    };
    let (neg, pos) = rayon::join(
        || {
            if w_neg > 0.0 {
                run(-1.0, 0.0, -knee)
            } else {
                Ok(zero)
            }
        },
        || {
            if w_pos > 0.0 {
                run(0.0, 1.0, knee)
            } else {
                Ok(zero)
            }
        },
    );
    let (neg, pos) = (neg?, pos?);
    Ok(ZeroExpectation {
        value: (w_neg * neg.value + w_pos * pos.value) / PI,
        abs_err_estimate: (w_neg * neg.abs_err + w_pos * pos.abs_err) / PI,
        evaluations: neg.evaluations + pos.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn assert_triple_close(a: &MomentTriple, b: &MomentTriple, tol: f64) {
        assert!(
            rel(a.alpha, b.alpha) < tol,
            "alpha {} vs {}",
            a.alpha,
            b.alpha
        );
        assert!(rel(a.beta, b.beta) < tol, "beta {} vs {}", a.beta, b.beta);
        let gscale = b.gamma.abs().max((b.alpha * b.beta).sqrt() * 1e-3);
        assert!(
            (a.gamma - b.gamma).abs() / gscale < tol,
            "gamma {} vs {}",
            a.gamma,
            b.gamma
        );
    }

    #[test]
    fn at_origin_independent() {
        let t = moment_triple(0.0, 5, CoefficientModel::independent()).unwrap();
        assert_eq!((t.alpha, t.beta, t.gamma, t.delta), (1.0, 1.0, 0.0, 1.0));
    }

    #[test]
    fn at_origin_limit_zero() {
        let t = moment_triple(0.0, 5, CoefficientModel::LimitZero).unwrap();
        assert_eq!((t.alpha, t.beta, t.gamma), (1.0, 1.0, -0.5));
        assert!((t.delta - 0.75).abs() < 1e-15);
        let f = integrand(0.0, 5, CoefficientModel::LimitZero).unwrap();
        assert!((f - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn bruteforce_at_origin() {
        let m = CoefficientModel::fractional(0.9).unwrap();
        let t = moment_triple_bruteforce(0.0, 3, m).unwrap();
        assert_eq!(t.alpha, 1.0);
        assert_eq!(t.beta, 1.0);
        assert_eq!(t.gamma, increment_covariance(1, m));
    }

    #[test]
    fn bruteforce_linear_by_hand() {
        // alpha = 1 + x^2, beta = 1, gamma = x at H = 1/2, n = 2
        let t = moment_triple_bruteforce(0.5, 2, CoefficientModel::independent()).unwrap();
        assert!((t.alpha - 1.25).abs() < 1e-15);
        assert!((t.beta - 1.0).abs() < 1e-15);
        assert!((t.gamma - 0.5).abs() < 1e-15);
        assert!((t.delta - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fast_path_matches_oracle_example() {
        let m = CoefficientModel::fractional(0.3).unwrap();
        let a = moment_triple(0.7, 12, m).unwrap();
        let b = moment_triple_bruteforce(0.7, 12, m).unwrap();
        assert_triple_close(&a, &b, 1e-10);
    }

    #[test]
    fn fast_path_small_n_edge_cases() {
        for n in 1..6 {
            for model in [
                CoefficientModel::LimitZero,
                CoefficientModel::fractional(0.15).unwrap(),
                CoefficientModel::fractional(0.85).unwrap(),
            ] {
                for x in [-1.0, -0.6, 0.0, 0.3, 1.0] {
                    let a = moment_triple(x, n, model).unwrap();
                    let b = moment_triple_bruteforce(x, n, model).unwrap();
                    assert!((a.alpha - b.alpha).abs() < 1e-13, "n={n} x={x}");
                    assert!((a.beta - b.beta).abs() < 1e-12, "n={n} x={x}");
                    assert!((a.gamma - b.gamma).abs() < 1e-12, "n={n} x={x}");
                }
            }
        }
    }

    #[test]
    fn closed_h0_examples() {
        let c = moments_h0_closed(0.5, 4).unwrap();
        assert!((c.alpha - (0.5 + 0.5f64.powi(8)) / 0.75).abs() < 1e-15);
        let b = moment_triple_bruteforce(0.5, 4, CoefficientModel::LimitZero).unwrap();
        assert!((c.gamma - b.gamma).abs() < 1e-12);
        let c = moments_h0_closed(-0.9, 16).unwrap();
        let b = moment_triple_bruteforce(-0.9, 16, CoefficientModel::LimitZero).unwrap();
        assert_triple_close(&c, &b, 1e-10);
        let c = moments_h0_closed(-0.5, 64).unwrap();
        let b = moment_triple_bruteforce(-0.5, 64, CoefficientModel::LimitZero).unwrap();
        assert_triple_close(&c, &b, 1e-10);
    }

    #[test]
    fn closed_h0_rejects_singular_points() {
        for x in [0.0, 1.0, -1.0, 5e-7, 1.0 - 5e-7] {
            assert!(moments_h0_closed(x, 8).is_err());
        }
    }

    #[test]
    fn domain_checks() {
        let m = CoefficientModel::independent();
        assert!(moment_triple(1.1, 4, m).is_err());
        assert!(moment_triple(0.5, 0, m).is_err());
        assert!(moment_triple(1.0 + 1e-13, 4, m).is_ok());
        assert!(moment_triple_bruteforce(0.5, 513, m).is_err());
    }

    #[test]
    fn integrand_constant_polynomial() {
        for x in [-3.0, -0.2, 0.0, 0.9, 12.0] {
            assert_eq!(integrand(x, 1, CoefficientModel::LimitZero).unwrap(), 0.0);
        }
    }

    #[test]
    fn integrand_reversal() {
        let m = CoefficientModel::independent();
        let a = integrand(2.0, 32, m).unwrap();
        let b = integrand(0.5, 32, m).unwrap();
        assert_eq!(a, 0.25 * b);
    }

    #[test]
    fn integrand_limit_zero_approaches_limit() {
        let f = integrand(0.5, 200, CoefficientModel::LimitZero).unwrap();
        let lim = (3.5f64 / 0.5).sqrt() / 3.0;
        assert!((f - lim).abs() < 1e-3);
        assert!((lim - 0.88192).abs() < 1e-5);
    }

    #[test]
    fn expected_small_n() {
        for model in [
            CoefficientModel::LimitZero,
            CoefficientModel::independent(),
            CoefficientModel::fractional(0.2).unwrap(),
        ] {
            assert_eq!(
                expected_zeros(1, model, RegionSpec::All, 1e-8)
                    .unwrap()
                    .value,
                0.0
            );
            let e2 = expected_zeros(2, model, RegionSpec::All, 1e-8).unwrap();
            assert!((e2.value - 1.0).abs() < 1e-6, "{model}: {e2:?}");
        }
        let half = expected_zeros(
            2,
            CoefficientModel::independent(),
            RegionSpec::PositiveAxis,
            1e-8,
        )
        .unwrap();
        assert!((half.value - 0.5).abs() < 1e-6);
        let lz = expected_zeros(
            2,
            CoefficientModel::LimitZero,
            RegionSpec::PositiveAxis,
            1e-8,
        )
        .unwrap();
        assert!((lz.value - 2.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn region_pieces_are_consistent() {
        let m = CoefficientModel::fractional(0.35).unwrap();
        let n = 40;
        let get = |r| expected_zeros(n, m, r, 1e-10).unwrap().value;
        let (a, b, c, d) = (
            get(RegionSpec::NegInfToMinusOne),
            get(RegionSpec::MinusOneToZero),
            get(RegionSpec::ZeroToOne),
            get(RegionSpec::OneToInf),
        );
        assert_eq!(a, b);
        assert_eq!(c, d);
        assert!((get(RegionSpec::NegativeAxis) - (a + b)).abs() < 1e-12);
        assert!((get(RegionSpec::PositiveAxis) - (c + d)).abs() < 1e-12);
        assert!((get(RegionSpec::All) - (a + b + c + d)).abs() < 1e-9);
    }

    #[test]
    fn rejects_nonpositive_tolerance() {
        assert!(expected_zeros(4, CoefficientModel::LimitZero, RegionSpec::All, 0.0).is_err());
    }

    #[test]
    fn region_parse() {
        for r in RegionSpec::ALL {
            assert_eq!(r.as_str().parse::<RegionSpec>().unwrap(), r);
        }
        assert_eq!(
            "positive".parse::<RegionSpec>().unwrap(),
            RegionSpec::PositiveAxis
        );
        assert!("sideways".parse::<RegionSpec>().is_err());
    }
}
