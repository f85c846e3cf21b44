//! Real-zero counting for realised coefficient vectors.
//!
//! The primary count comes from the eigenvalues of the balanced companion
//! matrix; eigenvalues with `|Im| <= imag_tol * (1 + |Re|)` are taken as real.
//! When cross-checking is on, an independent sign-change scan audits the
//! result and wins on disagreement, with the `suspect` flag set.

mod companion;
mod signgrid;

use serde::{Deserialize, Serialize};

use crate::error::{KacError, Result};
use crate::numerics::NeumaierSum;

/// Trailing coefficients below this fraction of the largest are dropped.
pub const TRIM_RELATIVE: f64 = 1e-300;
/// Real roots closer to the origin than this are flagged.
pub const NEAR_ZERO_ROOT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMethod {
    Eigen,
    SignGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZeroCount {
    pub negative: usize,
    pub positive: usize,
    pub total: usize,
    pub method: CountMethod,
    /// Set when the two methods disagreed or a root sat at numerical zero.
    pub suspect: bool,
}

impl ZeroCount {
    fn new(negative: usize, positive: usize, method: CountMethod, suspect: bool) -> Self {
        Self {
            negative,
            positive,
            total: negative + positive,
            method,
            suspect,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootCountConfig {
    pub imag_tol: f64,
    pub grid_refine: usize,
    pub cross_check: bool,
}

impl Default for RootCountConfig {
    fn default() -> Self {
        Self {
            imag_tol: 1e-8,
            grid_refine: 3,
            cross_check: true,
        }
    }
}

/// Trimmed polynomial with exact roots at `0` and `+-1` divided out.
struct Prepared {
    reduced: Vec<f64>,
    zeros_at_origin: usize,
    at_minus_one: usize,
    at_plus_one: usize,
}

impl Prepared {
    /// Roots that were divided out, as `(negative, positive)`.
    fn removed(&self) -> (usize, usize) {
        (self.at_minus_one, self.zeros_at_origin + self.at_plus_one)
    }
}

/// Divides out `(x - r)` for `r = +-1` while `p(r)` sums to exactly zero.
/// Exact roots on the unit circle show up for integer coefficients and are
/// frequently multiple, which a sign scan cannot see.
fn deflate_unit(poly: &mut Vec<f64>, r: f64) -> usize {
    let mut found = 0;
    while poly.len() > 1 {
        let at_r: NeumaierSum = poly
            .iter()
            .enumerate()
            .map(|(k, &a)| if r < 0.0 && k % 2 == 1 { -a } else { a })
            .collect();
        if at_r.value() != 0.0 {
            break;
        }
        // synthetic division from the top: q_{k-1} = a_k + r q_k
        let d = poly.len() - 1;
        let mut q = vec![0.0; d];
        let mut carry = 0.0;
        for k in (1..=d).rev() {
            carry = poly[k] + r * carry;
            q[k - 1] = carry;
        }
        *poly = q;
        found += 1;
    }
    found
}

fn prepare(coeffs: &[f64]) -> Result<Prepared> {
    if coeffs.is_empty() {
        return Err(KacError::EmptyLength);
    }
    let scale = coeffs.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return Err(KacError::ZeroPolynomial);
    }
    let threshold = TRIM_RELATIVE * scale;
    let top = coeffs
        .iter()
        .rposition(|a| a.abs() >= threshold)
        .expect("nonzero polynomial has a nonzero coefficient");
    let trimmed = &coeffs[..=top];
    let zeros_at_origin = trimmed.iter().take_while(|a| **a == 0.0).count();
    let mut reduced = trimmed[zeros_at_origin..].to_vec();
    let at_plus_one = deflate_unit(&mut reduced, 1.0);
    let at_minus_one = deflate_unit(&mut reduced, -1.0);
    Ok(Prepared {
        reduced,
        zeros_at_origin,
        at_minus_one,
        at_plus_one,
    })
}

/// `(negative, positive, near_zero)` from the companion eigenvalues, or
/// `None` if the QR iteration failed.
fn eigen_split(reduced: &[f64], imag_tol: f64) -> Option<(usize, usize, bool)> {
    companion::polynomial_roots(reduced).map(|roots| {
        let mut neg = 0;
        let mut pos = 0;
        let mut near_zero = false;
        for (re, im) in roots {
            if im.abs() <= imag_tol * (1.0 + re.abs()) {
                near_zero |= re.abs() < NEAR_ZERO_ROOT;
                if re < 0.0 {
                    neg += 1;
                } else {
                    pos += 1;
                }
            }
        }
        (neg, pos, near_zero)
    })
}

/// Counts the real zeros of `sum coeffs[k] x^k`, split by sign.
///
/// Exact zero roots (vanishing low-order coefficients) count as positive and
/// mark the result suspect.
pub fn count_real_zeros(coeffs: &[f64], config: &RootCountConfig) -> Result<ZeroCount> {
    let prep = prepare(coeffs)?;
    let (rn, rp) = prep.removed();
    let reduced = &prep.reduced[..];
    let mut suspect = prep.zeros_at_origin > 0;
    if reduced.len() <= 1 {
        return Ok(ZeroCount::new(rn, rp, CountMethod::Eigen, suspect));
    }

    let Some((neg, pos, near_zero)) = eigen_split(reduced, config.imag_tol) else {
        log::debug!(
            "companion QR did not converge for degree {}",
            reduced.len() - 1
        );
        let g = signgrid::count(reduced, config.grid_refine);
        return Ok(ZeroCount::new(
            g.negative + rn,
            g.positive + rp,
            CountMethod::SignGrid,
            true,
        ));
    };
    let (neg, pos) = (neg + rn, pos + rp);
    suspect |= near_zero;

    if config.cross_check {
        let g = signgrid::count(reduced, config.grid_refine);
        let (gn, gp) = (g.negative + rn, g.positive + rp);
        if (gn, gp) != (neg, pos) {
            return Ok(ZeroCount::new(gn, gp, CountMethod::SignGrid, true));
        }
    }
    Ok(ZeroCount::new(neg, pos, CountMethod::Eigen, suspect))
}

/// Runs a single counting method without cross-checking.
///
/// `suspect` is set for roots at numerical zero, for an uncertified sign in
/// the grid scan, and for a failed eigenvalue iteration (reported as an
/// error).
pub fn count_with(
    coeffs: &[f64],
    method: CountMethod,
    config: &RootCountConfig,
) -> Result<ZeroCount> {
    let prep = prepare(coeffs)?;
    let (rn, rp) = prep.removed();
    let reduced = &prep.reduced[..];
    let suspect = prep.zeros_at_origin > 0;
    if reduced.len() <= 1 {
        return Ok(ZeroCount::new(rn, rp, method, suspect));
    }
    match method {
        CountMethod::Eigen => {
            let (neg, pos, near_zero) = eigen_split(reduced, config.imag_tol).ok_or(
                KacError::Unsupported("companion QR iteration did not converge"),
            )?;
            Ok(ZeroCount::new(
                neg + rn,
                pos + rp,
                method,
                suspect || near_zero,
            ))
        }
        CountMethod::SignGrid => {
            let g = signgrid::count(reduced, config.grid_refine);
            Ok(ZeroCount::new(
                g.negative + rn,
                g.positive + rp,
                method,
                suspect || g.uncertain,
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(c: &[f64]) -> ZeroCount {
        count_real_zeros(c, &RootCountConfig::default()).unwrap()
    }

    #[test]
    fn small_examples() {
        let z = count(&[-1.0, 0.0, 1.0]);
        assert_eq!((z.negative, z.positive, z.total), (1, 1, 2));
        assert!(!z.suspect);
        assert_eq!(count(&[1.0, 0.0, 1.0]).total, 0);
        let z = count(&[6.0, -5.0, 1.0]);
        assert_eq!((z.negative, z.positive), (0, 2));
    }

    #[test]
    fn constants_and_zero_polynomial() {
        let z = count(&[3.0]);
        assert_eq!(z.total, 0);
        assert!(matches!(
            count_real_zeros(&[0.0, 0.0], &RootCountConfig::default()),
            Err(KacError::ZeroPolynomial)
        ));
        assert!(count_real_zeros(&[], &RootCountConfig::default()).is_err());
    }

    #[test]
    fn trailing_zeros_are_trimmed() {
        let z = count(&[-1.0, 0.0, 1.0, 0.0, 0.0]);
        assert_eq!(z.total, 2);
    }

    #[test]
    fn root_at_origin_is_flagged() {
        // x (x - 2)
        let z = count(&[0.0, -2.0, 1.0]);
        assert_eq!(z.total, 2);
        assert!(z.suspect);
    }

    #[test]
    fn multiple_roots_on_the_unit_circle() {
        // (1 - x)^2 (1 + x)
        let z = count(&[1.0, -1.0, -1.0, 1.0]);
        assert_eq!((z.negative, z.positive), (1, 2));
        // (1 + x)^3 x^2
        let z = count(&[0.0, 0.0, 1.0, 3.0, 3.0, 1.0]);
        assert_eq!((z.negative, z.positive), (3, 2));
    }

    #[test]
    fn linear() {
        let z = count(&[3.0, 1.5]);
        assert_eq!((z.negative, z.positive), (1, 0));
        let z = count(&[3.0, -1.5]);
        assert_eq!((z.negative, z.positive), (0, 1));
    }

    #[test]
    fn without_cross_check_reports_eigen() {
        let cfg = RootCountConfig {
            cross_check: false,
            ..Default::default()
        };
        let z = count_real_zeros(&[-1.0, 0.0, 1.0], &cfg).unwrap();
        assert_eq!(z.method, CountMethod::Eigen);
    }
}
