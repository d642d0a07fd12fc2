//! Reference measure pairs and the Monte-Carlo statistics shared by the
//! pilot run and the acceptance suite. Both call the same functions with
//! different seeds.

use rayon::prelude::*;
use zerosum::stats::{ks_distance_to_cauchy, linear_statistic, simulate_instance, EmpiricalMeasure, TrialMeta};
use zerosum::{BumpFunction, Estimate, RootFindOptions, RootMeasure, C64};

use crate::{CliError, Result};

/// Unit disks centred at `1` and `-1`.
pub fn disk_pair() -> Vec<RootMeasure> {
    vec![
        RootMeasure::uniform_disk(C64::new(1.0, 0.0), 1.0).unwrap(),
        RootMeasure::uniform_disk(C64::new(-1.0, 0.0), 1.0).unwrap(),
    ]
}

/// Uniform measures on the circles `|z| = 1` and `|z| = 2`.
pub fn circle_pair() -> Vec<RootMeasure> {
    vec![
        RootMeasure::uniform_circle(C64::new(0.0, 0.0), 1.0).unwrap(),
        RootMeasure::uniform_circle(C64::new(0.0, 0.0), 2.0).unwrap(),
    ]
}

/// Atoms `{±1}` against `{±i}`.
pub fn line_pair() -> Vec<RootMeasure> {
    zerosum::limitlaw::line_pair_measures().to_vec()
}

/// Radius-3 bumps centred at `0`, `i` and `-2i`.
pub fn axis_bumps() -> Vec<BumpFunction> {
    [0.0, 1.0, -2.0].iter().map(|&y| BumpFunction::unit(C64::new(0.0, y), 3.0).unwrap()).collect()
}

/// Converged zeros of `trials` independent instances, in trial order.
pub fn empirical_zeros(measures: &[RootMeasure], n: usize, trials: usize, seed: u64) -> Result<Vec<EmpiricalMeasure>> {
    let opts = RootFindOptions::default();
    let labels: Vec<String> = measures.iter().map(|m| m.label()).collect();
    (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let inst = simulate_instance(measures, n, seed, t, &opts)?;
            if !inst.certified {
                return Err(CliError::NonConvergence(format!("n={n} trial={t} did not certify")));
            }
            let meta = TrialMeta { seed, trial: t, measures: labels.clone() };
            Ok(EmpiricalMeasure::from_report(&inst.report, meta)?)
        })
        .collect()
}

/// Trial mean and standard error of `(1/n) Σ φ(z_i)` for each bump.
pub fn linear_statistics(zeros: &[EmpiricalMeasure], bumps: &[BumpFunction]) -> Vec<Estimate> {
    bumps
        .iter()
        .map(|phi| Estimate::from_samples(&zeros.iter().map(|e| linear_statistic(e, phi)).collect::<Vec<_>>()))
        .collect()
}

/// Per-trial fraction of zeros in the closed disk `|z| <= radius`.
pub fn fractions_within(zeros: &[EmpiricalMeasure], radius: f64) -> Vec<f64> {
    zeros.iter().map(|e| e.points.iter().filter(|z| z.norm() <= radius).count() as f64 / e.n as f64).collect()
}

/// Per-trial Kolmogorov–Smirnov distance of the imaginary parts to the standard Cauchy law.
pub fn ks_distances(zeros: &[EmpiricalMeasure]) -> Vec<f64> {
    zeros.iter().map(|e| ks_distance_to_cauchy(e).distance).collect()
}

/// Linear-statistic runs at `n = 200` with 50 trials.
pub const LINEAR_N: usize = 200;
pub const LINEAR_TRIALS: usize = 50;
/// Mass-escape runs: circles, `n = 500`, 20 trials, `ε = 0.01`.
pub const ESCAPE_N: usize = 500;
pub const ESCAPE_TRIALS: usize = 20;
pub const ESCAPE_EPS: f64 = 0.01;
/// KS runs: disk pair, `n = 500`, 50 trials.
pub const KS_N: usize = 500;
pub const KS_TRIALS: usize = 50;

/// Acceptance stderrs may exceed the pilot's by this factor. With 50 trials
/// the sample standard deviation has a relative spread near 10%, so 1.5 sits
/// about five spreads out.
pub const STDERR_CEILING_FACTOR: f64 = 1.5;

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct PilotBump {
    pub center_im: f64,
    pub radius: f64,
    pub mean: f64,
    pub stderr: f64,
    pub reference: f64,
    pub stderr_ceiling: f64,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct PilotEscape {
    pub mean_fraction: f64,
    pub max_fraction: f64,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct PilotKs {
    pub median: f64,
    pub q90: f64,
    pub max: f64,
    pub fraction_within_0_15: f64,
}

/// Output of `cargo run --release -p zerosum-cli --example pilot`.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct Pilot {
    pub seed: u64,
    pub linear: Vec<PilotBump>,
    pub escape: PilotEscape,
    pub ks: PilotKs,
}

/// Order statistic at `q ∈ [0, 1]` (nearest rank).
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let k = ((q * v.len() as f64).ceil() as usize).clamp(1, v.len());
    v[k - 1]
}
