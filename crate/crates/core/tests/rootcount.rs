use kaczeros::rootcount::{count_real_zeros, count_with, CountMethod, RootCountConfig, ZeroCount};
use kaczeros::sampler::{sample, Sampler, SamplingMethod};
use kaczeros::{expected_zeros, CoefficientModel, RegionSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn count(c: &[f64]) -> ZeroCount {
    count_real_zeros(c, &RootCountConfig::default()).unwrap()
}

fn split(z: &ZeroCount) -> (usize, usize) {
    (z.negative, z.positive)
}

#[test]
fn factored_examples() {
    let z = count(&[-1.0, 0.0, 1.0]);
    assert_eq!((z.negative, z.positive, z.total), (1, 1, 2));
    assert_eq!(count(&[1.0, 0.0, 1.0]).total, 0);
    let z = count(&[6.0, -5.0, 1.0]);
    assert_eq!((z.negative, z.positive), (0, 2));
}

#[test]
fn length_one_has_no_roots_and_zero_polynomial_is_rejected() {
    assert_eq!(count(&[-2.5]).total, 0);
    assert!(count_real_zeros(&[0.0; 4], &RootCountConfig::default()).is_err());
}

#[test]
fn methods_agree_on_small_integer_polynomials() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let cfg = RootCountConfig::default();
    let mut disagreements = Vec::new();
    for _ in 0..1000 {
        let deg = rng.random_range(1..=16usize);
        let mut c: Vec<f64> = (0..=deg).map(|_| rng.random_range(-1..=1) as f64).collect();
        if c.iter().all(|&a| a == 0.0) {
            c[0] = 1.0;
        }
        let e = count_with(&c, CountMethod::Eigen, &cfg).unwrap();
        let g = count_with(&c, CountMethod::SignGrid, &cfg).unwrap();
        if split(&e) != split(&g) {
            disagreements.push((c, split(&e), split(&g)));
        }
    }
    assert!(
        disagreements.is_empty(),
        "{} disagreements: {:?}",
        disagreements.len(),
        &disagreements[..disagreements.len().min(10)]
    );
}

fn gaussian_samples(n: usize, model: CoefficientModel, count: u64, seed: u64) -> Vec<Vec<f64>> {
    let s = Sampler::new(n, model, SamplingMethod::Cholesky).unwrap();
    (0..count).map(|t| s.sample(seed, t).coeffs).collect()
}

#[test]
fn scale_invariance_on_gaussian_samples() {
    for c in gaussian_samples(48, CoefficientModel::fractional(0.3).unwrap(), 100, 3) {
        let base = split(&count(&c));
        for scale in [1e-6, 1e6] {
            let scaled: Vec<f64> = c.iter().map(|a| a * scale).collect();
            assert_eq!(split(&count(&scaled)), base, "scale {scale}");
        }
    }
}

#[test]
fn reversal_preserves_signed_counts() {
    for c in gaussian_samples(40, CoefficientModel::fractional(0.7).unwrap(), 100, 4) {
        assert!(c[0].abs() > 1e-12 && c[c.len() - 1].abs() > 1e-12);
        let rev: Vec<f64> = c.iter().rev().copied().collect();
        assert_eq!(split(&count(&c)), split(&count(&rev)));
    }
}

#[test]
fn odd_degree_has_odd_count() {
    for model in [
        CoefficientModel::fractional(0.5).unwrap(),
        CoefficientModel::LimitZero,
    ] {
        for c in gaussian_samples(64, model, 100, 5) {
            let z = count(&c);
            assert_eq!(z.total % 2, 1, "{c:?}");
            assert!(z.total <= 63);
        }
    }
}

#[test]
fn mean_count_matches_quadrature() {
    let model = CoefficientModel::independent();
    let n = 64;
    let trials = 10_000u64;
    let totals: Vec<f64> = (0..trials)
        .map(|t| count(&sample(n, model, 99, t).unwrap().coeffs).total as f64)
        .collect();
    let mean = totals.iter().sum::<f64>() / trials as f64;
    let var = totals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
    let se = (var / trials as f64).sqrt();
    let q = expected_zeros(n, model, RegionSpec::All, 1e-8)
        .unwrap()
        .value;
    assert!(
        (mean - q).abs() <= 3.0 * se,
        "mean {mean} +- {se}, quadrature {q}"
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scaling_never_changes_counts(
        c in prop::collection::vec(-1.0f64..1.0, 2..40),
        e in -6i32..=6,
    ) {
        prop_assume!(c.iter().any(|a| a.abs() > 1e-3));
        let scale = 10f64.powi(e);
        let scaled: Vec<f64> = c.iter().map(|a| a * scale).collect();
        prop_assert_eq!(split(&count(&c)), split(&count(&scaled)));
    }

    #[test]
    fn reversal_symmetry(c in prop::collection::vec(-1.0f64..1.0, 2..40)) {
        prop_assume!(c[0].abs() > 1e-3 && c[c.len() - 1].abs() > 1e-3);
        let rev: Vec<f64> = c.iter().rev().copied().collect();
        prop_assert_eq!(split(&count(&c)), split(&count(&rev)));
    }

    #[test]
    fn parity_and_degree_bound(c in prop::collection::vec(-1.0f64..1.0, 2..40)) {
        let lead = c[c.len() - 1];
        prop_assume!(lead.abs() > 1e-3);
        let deg = c.len() - 1;
        let z = count(&c);
        prop_assert!(z.total <= deg);
        prop_assert_eq!(z.total, z.negative + z.positive);
        if deg % 2 == 1 {
            prop_assert_eq!(z.total % 2, 1);
        }
    }
}
