use std::time::Instant;

use rayon::prelude::*;

use super::config::{reported_regions, ExperimentConfig, Mode};
use super::record::{ExperimentRecord, Method};
use crate::asymptotics::{asymptotic_expected, default_ell_grid, ell_table, EllSample};
use crate::covariance::CoefficientModel;
use crate::error::{KacError, Result};
use crate::moments::{expected_zeros, RegionSpec};
use crate::numerics::NeumaierSum;
use crate::rootcount::{count_real_zeros, RootCountConfig, ZeroCount};
use crate::sampler::{Sampler, SamplingMethod};

/// A row that could not be produced.
#[derive(Debug)]
pub struct RowFailure {
    pub n: usize,
    pub region: RegionSpec,
    pub method: Method,
    pub error: KacError,
}

#[derive(Debug, Default)]
pub struct RunOutput {
    pub records: Vec<ExperimentRecord>,
    pub failures: Vec<RowFailure>,
    pub ell_table: Option<Vec<EllSample>>,
}

impl RunOutput {
    pub fn has_non_convergence(&self) -> bool {
        self.failures
            .iter()
            .any(|f| matches!(f.error, KacError::NonConvergence { .. }))
    }

    fn absorb(&mut self, other: RunOutput) {
        self.records.extend(other.records);
        self.failures.extend(other.failures);
        if other.ell_table.is_some() {
            self.ell_table = other.ell_table;
        }
    }

    /// Records matching `(n, region, method)`.
    pub fn find(&self, n: usize, region: RegionSpec, method: Method) -> Option<&ExperimentRecord> {
        self.records
            .iter()
            .find(|r| r.n == n && r.region == region && r.method == method)
    }
}

fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn require_mode(config: &ExperimentConfig, mode: Mode) -> Result<()> {
    config.validate()?;
    if config.mode != mode {
        return Err(KacError::Config(format!(
            "config mode is {} but {} was requested",
            config.mode.as_str(),
            mode.as_str()
        )));
    }
    Ok(())
}

fn require_sign_region(region: RegionSpec) -> Result<()> {
    match region {
        RegionSpec::All | RegionSpec::NegativeAxis | RegionSpec::PositiveAxis => Ok(()),
        r => Err(KacError::Config(format!(
            "Monte Carlo counts zeros by sign only; region {r} is not supported"
        ))),
    }
}

/// Runs whichever mode the config names.
pub fn run(config: &ExperimentConfig) -> Result<RunOutput> {
    match config.mode {
        Mode::Expected => run_expected(config),
        Mode::Simulate => run_simulate(config),
        Mode::Asymptotics => run_asymptotics(config),
        Mode::Compare => run_compare(config),
    }
}

/// Kac–Rice quadrature, one row per `(n, region)`.
pub fn run_expected(config: &ExperimentConfig) -> Result<RunOutput> {
    require_mode(config, Mode::Expected)?;
    let mut out = RunOutput::default();
    for &n in &config.n_values {
        out.absorb(quadrature_rows(n, config));
    }
    Ok(out)
}

fn quadrature_record(
    n: usize,
    config: &ExperimentConfig,
    region: RegionSpec,
    value: f64,
    err: f64,
    ms: f64,
) -> ExperimentRecord {
    ExperimentRecord {
        n,
        model: config.model,
        region,
        method: Method::Quadrature,
        value,
        err,
        trials: 0,
        seed: 0,
        wall_time_ms: ms,
        suspect_fraction: None,
    }
}

fn quadrature_rows(n: usize, config: &ExperimentConfig) -> RunOutput {
    let mut out = RunOutput::default();
    let fail = |region, error| RowFailure {
        n,
        region,
        method: Method::Quadrature,
        error,
    };
    if config.region != RegionSpec::All {
        let t = Instant::now();
        match expected_zeros(n, config.model, config.region, config.tol) {
            Ok(e) => out.records.push(quadrature_record(
                n,
                config,
                config.region,
                e.value,
                e.abs_err_estimate,
                elapsed_ms(t),
            )),
            Err(e) => out.failures.push(fail(config.region, e)),
        }
        return out;
    }
    // the total is assembled from the two half-lines, each at half the budget
    let half = |region| {
        let t = Instant::now();
        expected_zeros(n, config.model, region, 0.5 * config.tol).map(|e| (e, elapsed_ms(t)))
    };
    match (
        half(RegionSpec::NegativeAxis),
        half(RegionSpec::PositiveAxis),
    ) {
        (Ok((neg, tn)), Ok((pos, tp))) => {
            out.records.push(quadrature_record(
                n,
                config,
                RegionSpec::All,
                neg.value + pos.value,
                neg.abs_err_estimate + pos.abs_err_estimate,
                tn + tp,
            ));
            out.records.push(quadrature_record(
                n,
                config,
                RegionSpec::NegativeAxis,
                neg.value,
                neg.abs_err_estimate,
                tn,
            ));
            out.records.push(quadrature_record(
                n,
                config,
                RegionSpec::PositiveAxis,
                pos.value,
                pos.abs_err_estimate,
                tp,
            ));
        }
        (neg, pos) => {
            let mut all_failed = false;
            for (region, r) in [
                (RegionSpec::NegativeAxis, neg),
                (RegionSpec::PositiveAxis, pos),
            ] {
                match r {
                    Ok((e, ms)) => out.records.push(quadrature_record(
                        n,
                        config,
                        region,
                        e.value,
                        e.abs_err_estimate,
                        ms,
                    )),
                    Err(e) => {
                        if !all_failed {
                            out.failures.push(fail(
                                RegionSpec::All,
                                KacError::Config(format!("total unavailable: {region} failed")),
                            ));
                            all_failed = true;
                        }
                        out.failures.push(fail(region, e));
                    }
                }
            }
        }
    }
    out
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator key for the samples of length `n`, so runs at different `n`
/// do not share coefficient prefixes.
pub fn sample_key(seed: u64, n: usize) -> u64 {
    splitmix64(seed ^ splitmix64(n as u64))
}

fn build_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| KacError::Config(format!("cannot start {workers} workers: {e}")))
}

/// Per-trial zero counts for `trials` samples of length `n`, in trial order.
///
/// Trial `t` always uses the generator keyed by `(sample_key(seed, n), t)`,
/// so the result does not depend on `workers`.
pub fn simulate_counts(
    n: usize,
    model: CoefficientModel,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<Vec<ZeroCount>> {
    let sampler = Sampler::new(n, model, SamplingMethod::Cholesky)?;
    let key = sample_key(seed, n);
    let rc = RootCountConfig::default();
    build_pool(workers)?.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|t| count_real_zeros(&sampler.sample(key, t).coeffs, &rc))
            .collect()
    })
}

/// Sample mean and its standard error.
fn mean_se(values: impl Iterator<Item = f64> + Clone, count: u64) -> (f64, f64) {
    let m = count as f64;
    let mean = values.clone().collect::<NeumaierSum>().value() / m;
    if count < 2 {
        return (mean, 0.0);
    }
    let ss = values
        .map(|v| (v - mean) * (v - mean))
        .collect::<NeumaierSum>()
        .value();
    (mean, (ss / (m - 1.0) / m).sqrt())
}

fn simulate_rows(n: usize, config: &ExperimentConfig, workers: usize) -> RunOutput {
    let mut out = RunOutput::default();
    let t = Instant::now();
    let counts = match simulate_counts(n, config.model, config.trials, config.seed, workers) {
        Ok(c) => c,
        Err(e) => {
            out.failures.push(RowFailure {
                n,
                region: config.region,
                method: Method::Montecarlo,
                error: e,
            });
            return out;
        }
    };
    let ms = elapsed_ms(t);
    let suspect = counts.iter().filter(|c| c.suspect).count() as f64 / config.trials as f64;
    for region in reported_regions(config.region) {
        let pick = move |c: &ZeroCount| match region {
            RegionSpec::NegativeAxis => c.negative,
            RegionSpec::PositiveAxis => c.positive,
            _ => c.total,
        } as f64;
        let (mean, se) = mean_se(counts.iter().map(pick), config.trials);
        out.records.push(ExperimentRecord {
            n,
            model: config.model,
            region,
            method: Method::Montecarlo,
            value: mean,
            err: se,
            trials: config.trials,
            seed: config.seed,
            wall_time_ms: ms,
            suspect_fraction: Some(suspect),
        });
    }
    out
}

/// Monte Carlo zero counts: mean and standard error per `n` and sign.
pub fn run_simulate(config: &ExperimentConfig) -> Result<RunOutput> {
    require_mode(config, Mode::Simulate)?;
    require_sign_region(config.region)?;
    let workers = config.resolved_workers()?;
    let mut out = RunOutput::default();
    for &n in &config.n_values {
        out.absorb(simulate_rows(n, config, workers));
    }
    Ok(out)
}

fn asymptotic_rows(n: usize, config: &ExperimentConfig) -> Vec<ExperimentRecord> {
    reported_regions(config.region)
        .into_iter()
        .map(|region| {
            let t = Instant::now();
            let value = asymptotic_expected(n, config.model, region);
            ExperimentRecord {
                n,
                model: config.model,
                region,
                method: Method::Asymptotic,
                value,
                err: 0.0,
                trials: 0,
                seed: 0,
                wall_time_ms: elapsed_ms(t),
                suspect_fraction: None,
            }
        })
        .collect()
}

/// Leading-order asymptotic values, plus an `l` table when `ell_points > 0`.
pub fn run_asymptotics(config: &ExperimentConfig) -> Result<RunOutput> {
    require_mode(config, Mode::Asymptotics)?;
    let mut out = RunOutput::default();
    for &n in &config.n_values {
        out.records.extend(asymptotic_rows(n, config));
    }
    if config.ell_points > 0 {
        match config.model.hurst() {
            Some(h) => out.ell_table = Some(ell_table(h, &default_ell_grid(config.ell_points))?),
            None => log::warn!("the l table is defined for fractional increments only; skipped"),
        }
    }
    Ok(out)
}

/// Quadrature, Monte Carlo and asymptotic rows per `n`, followed by residual
/// rows: quadrature minus asymptote, and Monte Carlo minus quadrature in units
/// of `max(standard error, quadrature error, tol)`.
pub fn run_compare(config: &ExperimentConfig) -> Result<RunOutput> {
    require_mode(config, Mode::Compare)?;
    require_sign_region(config.region)?;
    let workers = config.resolved_workers()?;
    let mut out = RunOutput::default();
    for &n in &config.n_values {
        let quad = quadrature_rows(n, config);
        let mc = simulate_rows(n, config, workers);
        let asym = asymptotic_rows(n, config);
        let mut residuals = Vec::new();
        for region in reported_regions(config.region) {
            let Some(q) = quad.find(n, region, Method::Quadrature) else {
                continue;
            };
            if let Some(a) = asym.iter().find(|a| a.region == region) {
                residuals.push(ExperimentRecord {
                    method: Method::ResidualQuadratureAsymptotic,
                    value: q.value - a.value,
                    err: q.err,
                    wall_time_ms: 0.0,
                    ..q.clone()
                });
            }
            if let Some(m) = mc.find(n, region, Method::Montecarlo) {
                let sigma = m.err.max(q.err).max(config.tol);
                residuals.push(ExperimentRecord {
                    method: Method::ResidualMontecarloQuadrature,
                    value: (m.value - q.value) / sigma,
                    err: sigma,
                    wall_time_ms: 0.0,
                    ..m.clone()
                });
            }
        }
        out.absorb(quad);
        out.absorb(mc);
        out.records.extend(asym);
        out.records.extend(residuals);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(mode: Mode) -> ExperimentConfig {
        ExperimentConfig {
            mode,
            workers: Some(1),
            ..Default::default()
        }
    }

    #[test]
    fn expected_small_n() {
        let out = run_expected(&ExperimentConfig {
            n_values: vec![1, 2],
            ..cfg(Mode::Expected)
        })
        .unwrap();
        assert!(out.failures.is_empty());
        assert_eq!(
            out.find(1, RegionSpec::All, Method::Quadrature)
                .unwrap()
                .value,
            0.0
        );
        let two = out
            .find(2, RegionSpec::All, Method::Quadrature)
            .unwrap()
            .value;
        assert!((two - 1.0).abs() < 1e-6);
        let pos = out
            .find(2, RegionSpec::PositiveAxis, Method::Quadrature)
            .unwrap()
            .value;
        assert!((pos - 0.5).abs() < 1e-6);
    }

    #[test]
    fn mode_mismatch_is_config_error() {
        let err = run_simulate(&cfg(Mode::Expected)).unwrap_err();
        assert!(err.is_config_error());
    }

    #[test]
    fn simulate_rejects_sub_interval_region() {
        let err = run_simulate(&ExperimentConfig {
            region: RegionSpec::ZeroToOne,
            ..cfg(Mode::Simulate)
        })
        .unwrap_err();
        assert!(err.is_config_error());
    }

    #[test]
    fn simulate_linear_has_one_root() {
        let out = run_simulate(&ExperimentConfig {
            n_values: vec![2],
            trials: 500,
            ..cfg(Mode::Simulate)
        })
        .unwrap();
        let r = out.find(2, RegionSpec::All, Method::Montecarlo).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.err, 0.0);
        assert_eq!(r.suspect_fraction, Some(0.0));
    }

    #[test]
    fn asymptotics_at_e_to_the_pi() {
        // n is an integer, so compare the slope instead of the literal e^pi
        let out = run_asymptotics(&ExperimentConfig {
            n_values: vec![23],
            ..cfg(Mode::Asymptotics)
        })
        .unwrap();
        let v = out
            .find(23, RegionSpec::All, Method::Asymptotic)
            .unwrap()
            .value;
        assert!((v - 2.0 / std::f64::consts::PI * 23f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn compare_emits_residuals() {
        let out = run_compare(&ExperimentConfig {
            n_values: vec![2],
            trials: 2000,
            model: CoefficientModel::LimitZero,
            ..cfg(Mode::Compare)
        })
        .unwrap();
        for region in [
            RegionSpec::All,
            RegionSpec::NegativeAxis,
            RegionSpec::PositiveAxis,
        ] {
            let r = out
                .find(2, region, Method::ResidualMontecarloQuadrature)
                .unwrap();
            assert!(r.value.abs() < 3.0, "{region}: {}", r.value);
            assert!(out
                .find(2, region, Method::ResidualQuadratureAsymptotic)
                .is_some());
        }
    }

    #[test]
    fn sample_keys_differ_by_length() {
        assert_ne!(sample_key(7, 64), sample_key(7, 128));
        assert_eq!(sample_key(7, 64), sample_key(7, 64));
    }
}
