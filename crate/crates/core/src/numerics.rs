//! Error-free transformations and compensated accumulation.
//!
//! The moment sums and polynomial evaluations in this crate run over
//! thousands of terms whose magnitudes span many orders near `|x| = 1`;
//! these helpers keep the rounding error independent of the term count.

use std::ops::AddAssign;

/// `a + b = s + e` exactly.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// `a * b = p + e` exactly (requires a hardware FMA for speed, correct either way).
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

/// Kahan–Babuška–Neumaier running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub const fn new() -> Self {
        Self {
            sum: 0.0,
            comp: 0.0,
        }
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl AddAssign<f64> for NeumaierSum {
    #[inline]
    fn add_assign(&mut self, rhs: f64) {
        self.add(rhs);
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Compensated sum of a sequence.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().collect::<NeumaierSum>().value()
}

/// Result of a compensated Horner evaluation.
#[derive(Debug, Clone, Copy)]
pub struct HornerEval {
    pub value: f64,
    /// A posteriori bound on `|value - p(x)|`.
    pub error_bound: f64,
}

impl HornerEval {
    /// Whether the sign of `value` is certified by the error bound.
    pub fn sign_is_certain(&self) -> bool {
        self.value.abs() > self.error_bound
    }
}

fn gamma(k: usize) -> f64 {
    let u = f64::EPSILON / 2.0;
    let ku = k as f64 * u;
    ku / (1.0 - ku)
}

/// Evaluates `sum coeffs[k] x^k` with compensated Horner (twice-working-precision
/// accuracy) and returns a rigorous error bound.
pub fn compensated_horner(coeffs: &[f64], x: f64) -> HornerEval {
    let Some((&lead, rest)) = coeffs.split_last() else {
        return HornerEval {
            value: 0.0,
            error_bound: 0.0,
        };
    };
    let mut s = lead;
    let mut c: f64 = 0.0;
    let mut abs_poly = lead.abs();
    let ax = x.abs();
    for &a in rest.iter().rev() {
        let (p, pi) = two_prod(s, x);
        let (sn, sigma) = two_sum(p, a);
        s = sn;
        c = c.mul_add(x, pi + sigma);
        abs_poly = abs_poly.mul_add(ax, a.abs());
    }
    let value = s + c;
    let degree = coeffs.len() - 1;
    let u = f64::EPSILON / 2.0;
    let g = gamma(2 * degree.max(1));
    let error_bound =
        u * value.abs() + (g * g * abs_poly) / (1.0 - 2.0 * (degree as f64 + 1.0) * u);
    HornerEval { value, error_bound }
}

/// Plain Horner evaluation.
#[inline]
pub fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &a| acc.mul_add(x, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let values = [1.0, 1e100, 1.0, -1e100];
        let naive: f64 = values.iter().sum();
        assert_eq!(naive, 0.0);
        assert_eq!(compensated_sum(values), 2.0);
    }

    #[test]
    fn two_prod_is_exact() {
        let a = 1.0 + f64::EPSILON;
        let (p, e) = two_prod(a, a);
        // (1 + eps)^2 = 1 + 2 eps + eps^2
        assert_eq!(p, 1.0 + 2.0 * f64::EPSILON);
        assert_eq!(e, f64::EPSILON * f64::EPSILON);
    }

    #[test]
    fn compensated_horner_near_multiple_root() {
        // (x - 1)^7 expanded; plain Horner is pure noise near x = 1.
        let coeffs = [-1.0, 7.0, -21.0, 35.0, -35.0, 21.0, -7.0, 1.0];
        let x = 1.0 + 1.0 / 1024.0;
        let exact = (x - 1.0f64).powi(7);
        let eval = compensated_horner(&coeffs, x);
        assert!((eval.value - exact).abs() <= eval.error_bound.max(1e-30));
        assert!(((eval.value - exact) / exact).abs() < 1e-6);
    }

    #[test]
    fn horner_constant() {
        assert_eq!(horner(&[3.5], 10.0), 3.5);
        assert_eq!(compensated_horner(&[3.5], 10.0).value, 3.5);
    }
}
