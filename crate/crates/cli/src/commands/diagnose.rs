use std::path::PathBuf;

use serde::Serialize;
use zerosum::stats::{diagnose, DiagnosticsSetup, ProbeRegion};
use zerosum::DiagnosticsReport;

use super::{header, RunHeader};
use crate::output::{command_dir, write_json};
use crate::{CliError, Experiment, Result};

#[derive(Debug, Clone, Serialize)]
pub struct DiagnoseOutput {
    #[serde(flatten)]
    pub header: RunHeader,
    pub mu: String,
    pub nu: String,
    pub probe: ProbeRegion,
    pub k: ProbeRegion,
    pub gap_h: f64,
    pub reports: Vec<DiagnosticsReport>,
}

/// Ratio event, gap set and concentration moment for the first two measures
/// at every configured `n`. Writes `diagnostics.json`.
pub fn run(exp: &Experiment) -> Result<(PathBuf, DiagnoseOutput)> {
    let measures = exp.require_measures()?;
    if measures.len() < 2 {
        return Err(CliError::Config("diagnose needs two measures".into()));
    }
    let degrees = exp.require_degrees()?;
    let d = &exp.diagnose;
    let k = d.k.ok_or_else(|| CliError::Config("diagnose.k is required".into()))?;
    let k = ProbeRegion::rect(k[0], k[1], k[2], k[3]);
    let probe = d.probe.as_ref().map(|p| p.build()).unwrap_or(k);
    let setup = DiagnosticsSetup {
        mu: measures[0].clone(),
        nu: measures[1].clone(),
        probe,
        k,
        gap_h: d.gap_h,
        trials: d.trials.unwrap_or(exp.trials),
        seed: exp.seed,
    };
    let reports = degrees
        .iter()
        .map(|&n| diagnose(&setup, n).map_err(|e| CliError::Config(e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    let out = DiagnoseOutput {
        header: header(exp, "diagnose"),
        mu: setup.mu.label(),
        nu: setup.nu.label(),
        probe,
        k,
        gap_h: setup.gap_h,
        reports,
    };
    let dir = command_dir(&exp.output_dir, "diagnose")?;
    write_json(&dir.join("diagnostics.json"), &out)?;
    Ok((dir, out))
}
