use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;
use zerosum::limitlaw::{
    cauchy_reference, grid_around_bump, line_pair_measures, lines_reference, weak_integral, LINES_H,
};
use zerosum::stats::{linear_statistic, EmpiricalMeasure, TrialMeta};
use zerosum::{BumpFunction, Estimate, RootMeasure};

use super::{header, run_trials, trial_stream, RunHeader};
use crate::config::{MeasureSpec, Reference};
use crate::output::{command_dir, create, write_json};
use crate::{CliError, Experiment, Result};

/// Largest `|z|` accepted by `compare`.
pub const Z_LIMIT: f64 = 3.0;

#[derive(Debug, Clone, Serialize)]
pub struct CompareRow {
    pub n: usize,
    pub bump: usize,
    pub center_re: f64,
    pub center_im: f64,
    pub radius: f64,
    pub mean: f64,
    pub stderr: f64,
    pub predicted: f64,
    /// Discretization error estimate of `predicted`.
    pub predicted_err: f64,
    pub z: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    #[serde(flatten)]
    pub header: RunHeader,
    pub trials: usize,
    pub reference: Reference,
    pub passed: bool,
    pub rows: Vec<CompareRow>,
}

/// `(mean - predicted) / sqrt(stderr² + predicted_err²)`. With both
/// uncertainties zero the score is 0 on exact agreement and infinite otherwise.
pub fn z_score(est: &Estimate, predicted: f64, predicted_err: f64) -> f64 {
    let diff = est.estimate - predicted;
    let sigma = est.stderr.hypot(predicted_err);
    if sigma > 0.0 {
        diff / sigma
    } else if diff == 0.0 {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    }
}

/// Predicted `∫ φ dρ` per bump, with `|W(h) - W(2h)|` as the error of a
/// weak integral `W` at spacing `h`. The Cauchy reference is adaptive
/// quadrature and carries no error term.
fn predictions(exp: &Experiment, measures: &[RootMeasure], bumps: &[BumpFunction]) -> Result<Vec<(f64, f64)>> {
    let cfg = &exp.compare;
    if cfg.predict_measures.is_some() && cfg.reference != Reference::Weak {
        return Err(CliError::Config("predict_measures needs reference = \"weak\"".into()));
    }
    let h = cfg.h.unwrap_or(exp.grid.h);
    if h.is_nan() || h <= 0.0 {
        return Err(CliError::Config(format!("compare.h must be positive, got {h}")));
    }
    let predict_from = match &cfg.predict_measures {
        Some(specs) => specs.iter().map(MeasureSpec::build).collect::<Result<Vec<_>>>()?,
        None => measures.to_vec(),
    };
    bumps
        .iter()
        .map(|phi| {
            let weak = |ms: &[RootMeasure], h: f64| weak_integral(ms, phi, &grid_around_bump(phi, h)?);
            Ok(match cfg.reference {
                Reference::Weak => {
                    let w = weak(&predict_from, h)?;
                    (w, (w - weak(&predict_from, 2.0 * h)?).abs())
                }
                Reference::Cauchy => (cauchy_reference(phi), 0.0),
                Reference::Lines => {
                    let w = lines_reference(phi)?;
                    (w, (w - weak(&line_pair_measures(), 2.0 * LINES_H)?).abs())
                }
            })
        })
        .collect()
}

/// Writes `compare.csv` and `compare.json`; fails with an assertion error
/// when some `|z| > 3`.
pub fn run(exp: &Experiment) -> Result<(PathBuf, CompareReport)> {
    let measures = exp.require_measures()?;
    let degrees = exp.require_degrees()?;
    let bumps = exp.bump_functions()?;
    if bumps.is_empty() {
        return Err(CliError::Config("compare needs at least one bump".into()));
    }
    if exp.trials < 2 {
        return Err(CliError::Config("compare needs at least 2 trials for a standard error".into()));
    }
    let opts = exp.rootfind_options()?;
    let predicted = predictions(exp, &measures, &bumps)?;
    let labels: Vec<String> = measures.iter().map(|m| m.label()).collect();

    let mut rows = Vec::new();
    for (k, &n) in degrees.iter().enumerate() {
        let instances = run_trials(&measures, n, k, exp.trials, exp.seed, &opts)?;
        let empirical = instances
            .iter()
            .enumerate()
            .map(|(t, inst)| {
                let meta = TrialMeta { seed: exp.seed, trial: trial_stream(k, t), measures: labels.clone() };
                EmpiricalMeasure::from_report(&inst.report, meta)
                    .map_err(|_| CliError::NonConvergence(format!("n={n} trial={t}")))
            })
            .collect::<Result<Vec<_>>>()?;
        for (b, phi) in bumps.iter().enumerate() {
            let stats: Vec<f64> = empirical.iter().map(|e| linear_statistic(e, phi)).collect();
            let est = Estimate::from_samples(&stats);
            let (pred, pred_err) = predicted[b];
            let z = z_score(&est, pred, pred_err);
            rows.push(CompareRow {
                n,
                bump: b,
                center_re: phi.center.re,
                center_im: phi.center.im,
                radius: phi.radius,
                mean: est.estimate,
                stderr: est.stderr,
                predicted: pred,
                predicted_err: pred_err,
                z,
                pass: z.abs() <= Z_LIMIT,
            });
        }
    }

    let dir = command_dir(&exp.output_dir, "compare")?;
    let mut w = create(&dir.join("compare.csv"))?;
    writeln!(w, "n,bump,center_re,center_im,radius,mean,stderr,predicted,predicted_err,z,pass")?;
    for r in &rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.bump,
            r.center_re,
            r.center_im,
            r.radius,
            r.mean,
            r.stderr,
            r.predicted,
            r.predicted_err,
            r.z,
            r.pass
        )?;
    }
    w.flush()?;
    let report = CompareReport {
        header: header(exp, "compare"),
        trials: exp.trials,
        reference: exp.compare.reference,
        passed: rows.iter().all(|r| r.pass),
        rows,
    };
    write_json(&dir.join("compare.json"), &report)?;
    if !report.passed {
        let worst = report.rows.iter().map(|r| r.z.abs()).fold(0.0, f64::max);
        return Err(CliError::Assertion(format!("largest |z| = {worst} exceeds {Z_LIMIT}")));
    }
    Ok((dir, report))
}
