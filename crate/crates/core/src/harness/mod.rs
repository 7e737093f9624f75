//! Scenario runners behind the command-line tool.

mod config;
mod output;
mod runners;

pub use config::{
    default_n_list, parse_list, RunConfig, DEFAULT_DELTA0, DEFAULT_FLUCTUATE_LAMBDA_INV,
    DEFAULT_G_LIST, DEFAULT_K, DEFAULT_SEED, DEFAULT_TRIALS,
};
pub use output::{format_sig, write_fluctuation_csv, write_sweep_csv, write_trace_csv};
pub use runners::{
    classify_spec, corner_by_inversion, effective_spec, fit_through_origin, run_bound,
    run_classify, run_effective, run_fluctuate, run_simulate, run_sweep, BoundReport,
    EffectiveReport, FluctuationRow, MatrixEntry, SimulateOutcome, SimulateSummary, SweepMean,
    SweepResult, SweepRow, SWEEP_FIT_LIMIT,
};

use crate::error::Result;

/// Caps the number of worker threads used by sweeps and Monte Carlo runs.
pub const THREADS_ENV: &str = "ZENO_CHAIN_THREADS";

/// Order-preserving map over independent cells.
#[cfg(feature = "parallel")]
pub(crate) fn parallel_map<T, R, F>(items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    use rayon::prelude::*;

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        match raw.trim().parse::<usize>() {
            Ok(n) if n > 0 => builder = builder.num_threads(n),
            _ => {
                return Err(crate::error::Error::invalid(
                    "ZENO_CHAIN_THREADS",
                    format!("expected a positive integer, got {raw:?}"),
                ))
            }
        }
    }
    let pool = builder
        .build()
        .map_err(|e| crate::error::Error::Unsupported(format!("thread pool: {e}")))?;
    pool.install(|| items.par_iter().map(&f).collect())
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn parallel_map<T, R, F>(items: &[T], f: F) -> Result<Vec<R>>
where
    F: Fn(&T) -> Result<R>,
{
    items.iter().map(f).collect()
}
