//! Config-driven experiment runner for `gegenkrr`.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

use std::time::Instant;

pub use config::{Experiment, ExperimentConfig};
pub use error::{CliError, Result};
pub use output::{RunOutput, WrittenFiles};

/// Resolves `config` for `experiment`, runs it on a pool of `threads`
/// workers (0 picks the rayon default) and writes its files.
pub fn execute(experiment: Experiment, config: &ExperimentConfig, threads: usize) -> Result<WrittenFiles> {
    let resolved = config.resolve(experiment)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
    let start = Instant::now();
    let out = pool.install(|| run::run(&resolved))?;
    let wall = start.elapsed().as_secs_f64();
    output::write_run(&resolved, &out, wall, pool.current_num_threads())
}
