//! Experiment configuration, runners and persistence.
//!
//! A run is fully described by an [`ExperimentConfig`]; every row of its
//! output except `wall_time_ms` is reproducible bit for bit from the config.
//! Monte Carlo trial `t` at length `n` draws from the generator keyed by
//! `(sample_key(seed, n), t)`, independent of worker count and scheduling.

mod config;
mod io;
mod record;
mod run;

pub use config::{ExperimentConfig, Mode, OutputFormat, WORKERS_ENV};
pub use io::{
    read_csv, read_csv_file, read_json, write_csv, write_csv_file, write_ell_table, write_json,
    SCHEMA_HEADER,
};
pub use record::{ExperimentRecord, Method};
pub use run::{
    run, run_asymptotics, run_compare, run_expected, run_simulate, sample_key, simulate_counts,
    RowFailure, RunOutput,
};
