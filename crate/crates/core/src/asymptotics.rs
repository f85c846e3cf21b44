//! Limit objects for large `n`: polylogarithm and Lerch series, the limit
//! shape `l(x)` of `(x^2-1)^2 * delta/alpha^2`, the slope constants, and the
//! `H = 0` limit density.

use std::f64::consts::PI;

use crate::covariance::CoefficientModel;
use crate::error::{KacError, Result};
use crate::moments::RegionSpec;
use crate::numerics::NeumaierSum;
use crate::quadrature::{integrate, QuadratureOptions, QuadratureResult};

/// Largest `|z|` accepted by the series evaluators. Slightly above `0.999` so
/// that `l(x)` can be evaluated down to `|x| = 1.001` (i.e. `|z| = 1/1.001`).
pub const MAX_ABS_Z: f64 = 0.999_001;

/// Smallest `|x|` accepted by [`ell`].
pub const ELL_MIN_ABS_X: f64 = 1.001;

/// Default absolute tolerance for the series.
pub const DEFAULT_SERIES_TOL: f64 = 1e-12;

/// `1/3 - ln(2 - sqrt 3)/pi`, the limit of the integral of the `H = 0`
/// limit density over the positive axis divided by `pi`.
pub const H0_POSITIVE_LIMIT: f64 = 0.752_534_051_612_316_1;

/// `pi/3 - ln(2 - sqrt 3)`.
pub const H0_LIMIT_INTEGRAL: f64 = 2.364_155_448_121_414_5;

/// Series order for the polylogarithm. Only `s <= 0` is used here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolylogOrder(f64);

impl PolylogOrder {
    pub fn new(s: f64) -> Result<Self> {
        if s <= 0.0 {
            Ok(Self(s))
        } else {
            Err(KacError::OutOfDomain {
                what: "s",
                value: s,
                domain: "s <= 0",
            })
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// `s = -1 - 2H`.
    pub fn first(h: f64) -> Self {
        Self(-1.0 - 2.0 * h)
    }

    /// `t = -2H`.
    pub fn second(h: f64) -> Self {
        Self(-2.0 * h)
    }
}

fn check_z(z: f64) -> Result<()> {
    if z.is_nan() || z.abs() > MAX_ABS_Z {
        Err(KacError::OutOfDomain {
            what: "z",
            value: z,
            domain: "|z| <= 0.999",
        })
    } else {
        Ok(())
    }
}

/// `sum_{k >= start} z^k (k + shift)^{-s}`, stopped once a geometric bound on
/// the remaining tail drops below `tol` (or below the rounding of the sum).
fn tail_bounded_series(z: f64, s: f64, shift: f64, start: u64, tol: f64) -> f64 {
    let exponent = -s;
    let az = z.abs();
    let mut acc = NeumaierSum::new();
    let mut zk = z.powi(start as i32);
    let mut k = start;
    loop {
        let base = k as f64 + shift;
        let term = if exponent == 0.0 {
            zk
        } else {
            zk * base.powf(exponent)
        };
        acc += term;
        // |t_{j+1}/t_j| <= az ((base+1)/base)^exponent, decreasing in j
        let ratio = az * ((base + 1.0) / base).powf(exponent);
        if ratio < 1.0 {
            let tail = term.abs() * ratio / (1.0 - ratio);
            if tail < tol || tail <= 0.25 * f64::EPSILON * acc.value().abs() {
                break;
            }
        }
        if zk == 0.0 {
            break;
        }
        zk *= z;
        k += 1;
    }
    acc.value()
}

/// `Li_s(z) - Li_t(z) = sum_{k>=2} z^k (k^{-s} - k^{-t})` to working precision.
fn polylog_difference(s: f64, t: f64, z: f64) -> f64 {
    let az = z.abs();
    let (a, b) = (-s, -t);
    let mut acc = NeumaierSum::new();
    let mut zk = z * z;
    let mut k = 2u64;
    loop {
        let kf = k as f64;
        let term = zk * (kf.powf(a) - kf.powf(b));
        acc += term;
        // both parts have ratio at most az ((k+1)/k)^max(a,b)
        let ratio = az * ((kf + 1.0) / kf).powf(a.max(b));
        if ratio < 1.0 {
            let bound = zk.abs() * az / (1.0 - ratio) * ((kf + 1.0).powf(a) + (kf + 1.0).powf(b));
            if bound <= 0.25 * f64::EPSILON * acc.value().abs() || zk == 0.0 {
                break;
            }
        }
        zk *= z;
        k += 1;
    }
    acc.value()
}

/// Polylogarithm `Li_s(z) = sum_{k>=1} z^k / k^s` for `s <= 0`, `|z| <= 0.999`.
pub fn polylog(s: f64, z: f64, tol: f64) -> Result<f64> {
    let s = PolylogOrder::new(s)?.get();
    check_z(z)?;
    Ok(tail_bounded_series(z, s, 0.0, 1, tol))
}

/// Lerch transcendent `Phi(z, s, a) = sum_{k>=0} z^k / (k + a)^s` for `s <= 0`, `a > 0`.
pub fn lerch_phi(z: f64, s: f64, a: f64, tol: f64) -> Result<f64> {
    let s = PolylogOrder::new(s)?.get();
    check_z(z)?;
    if a.is_nan() || a <= 0.0 {
        return Err(KacError::OutOfDomain {
            what: "a",
            value: a,
            domain: "a > 0",
        });
    }
    Ok(tail_bounded_series(z, s, a, 0, tol))
}

fn check_hurst(h: f64) -> Result<()> {
    if h > 0.0 && h < 1.0 {
        Ok(())
    } else {
        Err(KacError::InvalidHurst(h))
    }
}

/// Limit shape `l(x)` for `|x| >= 1.001`:
///
/// `1 - (1+x)^2 [(x-1) Li_s(1/x) - (1+x) Li_t(1/x)]^2 / (4 x^2 Li_t(1/x)^2)`
/// with `s = -1-2h`, `t = -2h`.
pub fn ell(x: f64, h: f64) -> Result<f64> {
    check_hurst(h)?;
    if x.is_nan() || x.abs() < ELL_MIN_ABS_X {
        return Err(KacError::OutOfDomain {
            what: "x",
            value: x,
            domain: "|x| >= 1.001",
        });
    }
    let z = 1.0 / x;
    let (s, t) = (PolylogOrder::first(h).get(), PolylogOrder::second(h).get());
    check_z(z)?;
    let ls = tail_bounded_series(z, s, 0.0, 1, 0.0);
    let lt = tail_bounded_series(z, t, 0.0, 1, 0.0);
    // (x-1) Li_s - (x+1) Li_t = x (Li_s - Li_t) - (Li_s + Li_t); for large |x|
    // the difference is O(z^2) and is summed on its own
    let bracket = x * polylog_difference(s, t, z) - (ls + lt);
    let ratio = (1.0 + x) * bracket / (2.0 * x * lt);
    Ok(1.0 - ratio * ratio)
}

/// `l(1/x)` for `0.001 <= |x| <= 0.999`, computed from the inside-the-disc
/// series `A1`, `B1`, `C1` (the limits of the normalised moment ratios) as
/// `(x^2+1)(1+A1)/(1+B1) - x^2 ((1+C1)/(1+B1))^2`.
pub fn ell_inside(x: f64, h: f64) -> Result<f64> {
    check_hurst(h)?;
    if x.is_nan() || x.abs() < 0.001 || x.abs() > 0.999 {
        return Err(KacError::OutOfDomain {
            what: "x",
            value: x,
            domain: "0.001 <= |x| <= 0.999",
        });
    }
    let ls = tail_bounded_series(x, PolylogOrder::first(h).get(), 0.0, 1, 0.0);
    let lt = tail_bounded_series(x, PolylogOrder::second(h).get(), 0.0, 1, 0.0);
    let xm1 = x - 1.0;
    let x2 = x * x;
    let x3 = x2 * x;
    let a1 = -(xm1.powi(3) * (1.0 + x) * ls + x * (1.0 + x2 + 2.0 * xm1 * xm1 * lt)) / (x + x3);
    let b1 = -1.0 + (-2.0 + 1.0 / x + x) * lt;
    let c1 = (-2.0 * x3 - xm1.powi(3) * (1.0 + x) * ls + xm1 * xm1 * (-1.0 - 2.0 * x + x2) * lt)
        / (2.0 * x3);
    let r = (1.0 + c1) / (1.0 + b1);
    Ok((x2 + 1.0) * (1.0 + a1) / (1.0 + b1) - x2 * r * r)
}

/// Slope and limit constants for a Hurst index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticConstants {
    /// `(1 + 2 sqrt(H(1-H)))/pi`, slope of `E_n` against `ln n`.
    pub k_h: f64,
    /// `sqrt(4H(1-H))`, limit of `sqrt(l)` at `1+`.
    pub c_h: f64,
    /// Limit of `sqrt(l)` at `+-infinity`.
    pub m_h: f64,
    pub h0_positive_limit: f64,
}

pub fn constants(h: f64) -> Result<AsymptoticConstants> {
    check_hurst(h)?;
    let hh = h * (1.0 - h);
    let s = PolylogOrder::first(h).get();
    let t = PolylogOrder::second(h).get();
    let m2 = 2f64.powf(-2.0 * (1.0 + s + t))
        * (2f64.powf(t) - 2f64.powf(s))
        * (2f64.powf(s) - 2f64.powf(t) + 2f64.powf(2.0 + s + t));
    Ok(AsymptoticConstants {
        k_h: (1.0 + 2.0 * hh.sqrt()) / PI,
        c_h: (4.0 * hh).sqrt(),
        m_h: m2.max(0.0).sqrt(),
        h0_positive_limit: H0_POSITIVE_LIMIT,
    })
}

/// Pointwise `n -> infinity` limit of the Kac–Rice density for the `H = 0` model.
pub fn h0_limit_integrand(x: f64) -> Result<f64> {
    if x.is_nan() || (x - 1.0).abs() <= 1e-9 || (x + 1.0).abs() <= 1e-9 {
        return Err(KacError::OutOfDomain {
            what: "x",
            value: x,
            domain: "x at least 1e-9 away from +-1",
        });
    }
    Ok(if x.abs() < 1.0 {
        ((3.0 + x) / (1.0 - x)).sqrt() / (2.0 + 2.0 * x)
    } else {
        ((1.0 + 3.0 * x) / (x - 1.0)).sqrt() / (2.0 * x + 2.0 * x * x)
    })
}

/// `int_0^inf h0_limit_integrand` by adaptive quadrature.
///
/// `(0,1)` is integrated directly after `x = 1 - u^2`, which removes the
/// inverse-square-root endpoint singularity; `(1, inf)` goes through
/// `x = 1/y`, `y = 1 - u^2`.
pub fn h0_limit_positive_integral(tol: f64) -> Result<QuadratureResult> {
    let opts = QuadratureOptions {
        abs_tol: tol,
        ..Default::default()
    };
    integrate(
        |u| {
            if u == 0.0 {
                return Ok(0.0);
            }
            let y = 1.0 - u * u;
            let inner = h0_limit_integrand(y)?;
            let outer = h0_limit_integrand(1.0 / y)? / (y * y);
            Ok(2.0 * u * (inner + outer))
        },
        &[0.0, 1.0],
        &opts,
    )
}

/// Leading-order expected zero count over `region` for polynomial length `n`.
///
/// Fractional increments: `(1/pi) ln n` on the negative axis and
/// `(2 sqrt(H(1-H))/pi) ln n` on the positive axis. `H = 0`: `(1/pi) ln n`
/// negative, the constant [`H0_POSITIVE_LIMIT`] positive. Sub-intervals take
/// half of their half-line.
pub fn asymptotic_expected(n: usize, model: CoefficientModel, region: RegionSpec) -> f64 {
    let ln_n = (n.max(1) as f64).ln();
    let negative = ln_n / PI;
    let positive = match model.hurst() {
        Some(h) => 2.0 * (h * (1.0 - h)).sqrt() / PI * ln_n,
        None => H0_POSITIVE_LIMIT,
    };
    match region {
        RegionSpec::All => negative + positive,
        RegionSpec::NegativeAxis => negative,
        RegionSpec::PositiveAxis => positive,
        RegionSpec::NegInfToMinusOne | RegionSpec::MinusOneToZero => 0.5 * negative,
        RegionSpec::ZeroToOne | RegionSpec::OneToInf => 0.5 * positive,
    }
}

/// One row of an `l` sampling table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllSample {
    pub x: f64,
    pub ell: f64,
    /// `sqrt(l(x)) / |x^2 - 1|`, the large-`n` density outside the unit interval.
    pub density: f64,
}

/// Samples `l` at `points` (each with `|x| >= 1.001`).
pub fn ell_table(h: f64, points: &[f64]) -> Result<Vec<EllSample>> {
    points
        .iter()
        .map(|&x| {
            let l = ell(x, h)?;
            Ok(EllSample {
                x,
                ell: l,
                density: l.max(0.0).sqrt() / (x * x - 1.0).abs(),
            })
        })
        .collect()
}

/// Default `l`-table grid: geometric in `|x| - 1` on both half-lines.
pub fn default_ell_grid(points_per_side: usize) -> Vec<f64> {
    let k = points_per_side.max(2);
    let (lo, hi) = ((1e-3f64).ln(), (1e3f64).ln());
    let pos: Vec<f64> = (0..k)
        .map(|i| (1.0 + (lo + (hi - lo) * i as f64 / (k - 1) as f64).exp()).max(ELL_MIN_ABS_X))
        .collect();
    pos.iter()
        .rev()
        .map(|x| -x)
        .chain(pos.iter().copied())
        .collect()
}
