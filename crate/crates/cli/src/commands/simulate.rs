use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;

use super::{header, run_trials, RunHeader};
use crate::output::{command_dir, create, write_json};
use crate::{CliError, Experiment, Result};

#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub n: usize,
    pub trial: usize,
    pub file: String,
    pub residual_ok: bool,
    pub certified: bool,
    pub iterations: usize,
    pub restarts_used: usize,
    pub max_newton_correction: f64,
    pub walsh_radius: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    #[serde(flatten)]
    pub header: RunHeader,
    pub measures: Vec<String>,
    /// False when some trial did not converge; its CSV is still written.
    pub complete: bool,
    pub trials: Vec<TrialRecord>,
}

/// Writes `trials/n{n}_t{trial}.csv` with columns `source,re,im` (`source`
/// is `p1..pm` for the component roots and `sum` for the zeros of the sum)
/// and `manifest.json`.
pub fn run(exp: &Experiment) -> Result<(PathBuf, Manifest)> {
    let measures = exp.require_measures()?;
    let degrees = exp.require_degrees()?;
    let opts = exp.rootfind_options()?;
    let dir = command_dir(&exp.output_dir, "simulate")?;
    let trial_dir = dir.join("trials");
    std::fs::create_dir_all(&trial_dir)?;

    let mut records = Vec::new();
    for (k, &n) in degrees.iter().enumerate() {
        let instances = run_trials(&measures, n, k, exp.trials, exp.seed, &opts)?;
        for (t, inst) in instances.iter().enumerate() {
            let name = format!("n{n}_t{t:04}.csv");
            let mut w = create(&trial_dir.join(&name))?;
            writeln!(w, "source,re,im")?;
            for (j, part) in inst.sum.parts().iter().enumerate() {
                for r in part.roots() {
                    writeln!(w, "p{},{},{}", j + 1, r.re, r.im)?;
                }
            }
            for z in &inst.report.roots {
                writeln!(w, "sum,{},{}", z.re, z.im)?;
            }
            w.flush()?;
            records.push(TrialRecord {
                n,
                trial: t,
                file: format!("trials/{name}"),
                residual_ok: inst.report.residual_ok,
                certified: inst.certified,
                iterations: inst.report.iterations,
                restarts_used: inst.report.restarts_used,
                max_newton_correction: inst.report.max_newton_correction,
                walsh_radius: inst.report.walsh_radius,
            });
        }
    }
    let manifest = Manifest {
        header: header(exp, "simulate"),
        measures: measures.iter().map(|m| m.label()).collect(),
        complete: records.iter().all(|r| r.residual_ok),
        trials: records,
    };
    write_json(&dir.join("manifest.json"), &manifest)?;
    if !manifest.complete {
        let bad: Vec<String> =
            manifest.trials.iter().filter(|r| !r.residual_ok).map(|r| format!("n={} trial={}", r.n, r.trial)).collect();
        return Err(CliError::NonConvergence(bad.join(", ")));
    }
    Ok((dir, manifest))
}
