//! One module per subcommand. Each `run` takes a resolved [`Experiment`],
//! writes under `<output_dir>/<command>/`, and returns a summary; failed
//! checks are returned as [`CliError::Assertion`] after the files are written.

pub mod compare;
pub mod diagnose;
pub mod predict;
pub mod simulate;
pub mod verify;

use rayon::prelude::*;
use zerosum::stats::{simulate_instance, Instance};
use zerosum::{RootFindOptions, RootMeasure};

use crate::{CliError, Experiment, Result};

/// Stream index for trial `t` at the `k`-th configured degree, so that
/// changing the degree list does not reshuffle the other degrees' trials.
pub fn trial_stream(k: usize, t: usize) -> u64 {
    ((k as u64) << 32) | t as u64
}

/// Simulates `trials` instances at degree `n` in parallel, returned in trial order.
pub fn run_trials(
    measures: &[RootMeasure],
    n: usize,
    k: usize,
    trials: usize,
    seed: u64,
    opts: &RootFindOptions,
) -> Result<Vec<Instance>> {
    (0..trials)
        .into_par_iter()
        .map(|t| simulate_instance(measures, n, seed, trial_stream(k, t), opts).map_err(CliError::from))
        .collect()
}

pub(crate) fn header(exp: &Experiment, command: &'static str) -> RunHeader {
    RunHeader { command, versions: crate::VERSIONS, config_sha256: exp.hash(), seed: exp.seed }
}

/// Leading fields shared by every JSON output.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RunHeader {
    pub command: &'static str,
    pub versions: crate::Versions,
    pub config_sha256: String,
    pub seed: u64,
}
