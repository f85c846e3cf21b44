//! Fixtures shared by the kernel benchmarks.

use kaczeros::{sample, CoefficientModel};

/// Models exercised by every benchmark group.
pub fn models() -> Vec<(&'static str, CoefficientModel)> {
    vec![
        (
            "h0.25",
            CoefficientModel::fractional(0.25).expect("valid Hurst index"),
        ),
        ("h0.5", CoefficientModel::independent()),
        (
            "h0.75",
            CoefficientModel::fractional(0.75).expect("valid Hurst index"),
        ),
        ("limit-zero", CoefficientModel::LimitZero),
    ]
}

/// Evaluation points in `[-1, 1]`, including the endpoint layers.
pub fn evaluation_points() -> [f64; 6] {
    [-1.0, -0.999, -0.4, 0.3, 0.995, 1.0]
}

/// `count` deterministic coefficient vectors of length `n`.
pub fn coefficient_batch(n: usize, model: CoefficientModel, count: usize) -> Vec<Vec<f64>> {
    (0..count as u64)
        .map(|t| {
            sample(n, model, 0xBE7C, t)
                .expect("sampling succeeds")
                .coeffs
        })
        .collect()
}
