use std::f64::consts::{PI, TAU};
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;
use zerosum::rootfinder::{find_roots, walsh_bound};
use zerosum::stats::simulate_instance;
use zerosum::{PolySum, RootFindOptions, RootMeasure, C64};

use super::{header, RunHeader};
use crate::output::{command_dir, write_json};
use crate::{CliError, Experiment, Result};

pub const COT_TOL: f64 = 1e-8;
pub const MODULUS_TOL: f64 = 1e-10;
pub const ARGUMENT_TOL: f64 = 1e-10;
pub const WALSH_DEGREES: [usize; 3] = [10, 50, 200];

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    /// The quantity compared against `tolerance` (an error, or a count of violations).
    pub metric: f64,
    pub tolerance: f64,
    pub detail: String,
}

/// `(z-1)^n + (z+1)^n` has zeros `-i cot((2k+1)π/(2n))`. All lie on the
/// imaginary axis, so sorting by imaginary part is the optimal matching.
pub fn cot_formula(n: usize, opts: &RootFindOptions) -> Result<SuiteResult> {
    let sum = PolySum::from_root_lists(vec![vec![C64::new(1.0, 0.0); n], vec![C64::new(-1.0, 0.0); n]])?;
    let report = find_roots(&sum, opts)?;
    let mut expected: Vec<f64> = (0..n).map(|k| -1.0 / ((2 * k + 1) as f64 * PI / (2 * n) as f64).tan()).collect();
    expected.sort_by(f64::total_cmp);
    let mut got = report.roots.clone();
    got.sort_by(|a, b| a.im.total_cmp(&b.im));
    let err = got.iter().zip(&expected).map(|(z, &y)| (z - C64::new(0.0, y)).norm()).fold(0.0, f64::max);
    Ok(SuiteResult {
        name: format!("cot_formula_n{n}"),
        passed: report.residual_ok && got.len() == n && err <= COT_TOL,
        metric: err,
        tolerance: COT_TOL,
        detail: format!("max matched error over {n} zeros, residual_ok = {}", report.residual_ok),
    })
}

/// `(z^n - 1) + (z^n - 2^n)` has zeros `((2^n + 1)/2)^{1/n} e^{2πik/n}`.
/// Each zero is matched to the nearest `k`; every `k` must occur once.
pub fn modulus_formula(n: usize, opts: &RootFindOptions) -> Result<SuiteResult> {
    let unity: Vec<C64> = (0..n).map(|k| C64::from_polar(1.0, TAU * k as f64 / n as f64)).collect();
    let sum = PolySum::from_root_lists(vec![unity.clone(), unity.iter().map(|w| 2.0 * w).collect()])?;
    let report = find_roots(&sum, opts)?;
    let nf = n as f64;
    let modulus = (((2f64).powi(n as i32) + 1.0).ln() - 2f64.ln()) / nf;
    let modulus = modulus.exp();
    let mut seen = vec![false; n];
    let (mut mod_err, mut arg_err) = (0.0f64, 0.0f64);
    for z in &report.roots {
        mod_err = mod_err.max((z.norm() - modulus).abs() / modulus);
        let arg = z.arg().rem_euclid(TAU);
        let k = (arg * nf / TAU).round() as usize % n;
        seen[k] = true;
        let d = (arg - TAU * k as f64 / nf).rem_euclid(TAU);
        arg_err = arg_err.max(d.min(TAU - d));
    }
    let all_k = seen.iter().all(|&s| s) && report.roots.len() == n;
    Ok(SuiteResult {
        name: format!("modulus_formula_n{n}"),
        passed: report.residual_ok && all_k && mod_err <= MODULUS_TOL && arg_err <= ARGUMENT_TOL,
        metric: mod_err.max(arg_err),
        tolerance: MODULUS_TOL.min(ARGUMENT_TOL),
        detail: format!("relative modulus error {mod_err:e}, argument error {arg_err:e}, all k hit: {all_k}"),
    })
}

/// Measures the Walsh fuzz cycles through.
pub fn catalog() -> Vec<RootMeasure> {
    let c = C64::new;
    vec![
        RootMeasure::uniform_disk(c(1.0, 0.0), 1.0).unwrap(),
        RootMeasure::uniform_disk(c(-1.0, 0.0), 1.0).unwrap(),
        RootMeasure::uniform_circle(c(0.0, 0.0), 1.0).unwrap(),
        RootMeasure::uniform_circle(c(0.0, 0.0), 2.0).unwrap(),
        RootMeasure::uniform_atoms(&[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap(),
        RootMeasure::uniform_atoms(&[c(0.0, 1.0), c(0.0, -1.0)]).unwrap(),
        RootMeasure::mixture(vec![
            (RootMeasure::uniform_disk(c(0.0, 0.0), 1.0).unwrap(), 0.5),
            (RootMeasure::uniform_circle(c(0.0, 0.0), 2.0).unwrap(), 0.5),
        ])
        .unwrap(),
    ]
}

/// Measures, `m` and `n` of fuzz instance `i`: `m` alternates 2, 3, `n`
/// cycles the degrees, and the measures step through the catalog with
/// distinct members per instance.
pub fn walsh_instance(i: usize) -> (Vec<RootMeasure>, usize) {
    let cat = catalog();
    let m = 2 + i % 2;
    let n = WALSH_DEGREES[(i / 2) % WALSH_DEGREES.len()];
    let measures = (0..m).map(|j| cat[(i + j * (1 + (i / 6) % 6)) % cat.len()].clone()).collect::<Vec<_>>();
    (measures, n)
}

#[derive(Debug, Clone, Serialize)]
pub struct WalshRecord {
    pub instance: usize,
    pub m: usize,
    pub n: usize,
    pub certified: bool,
    pub walsh_radius: f64,
    pub max_modulus: f64,
}

/// Every certified zero of every instance must lie in the closed Walsh
/// disk, and every instance must certify.
pub fn walsh_fuzz(instances: usize, seed: u64, opts: &RootFindOptions) -> Result<(SuiteResult, Vec<WalshRecord>)> {
    let records = (0..instances)
        .into_par_iter()
        .map(|i| {
            let (measures, n) = walsh_instance(i);
            let inst = simulate_instance(&measures, n, seed, i as u64, opts)?;
            let radius = walsh_bound(&inst.sum)?;
            let max_modulus = inst.report.roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
            Ok(WalshRecord {
                instance: i,
                m: measures.len(),
                n,
                certified: inst.certified,
                walsh_radius: radius,
                max_modulus,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let outside = records.iter().filter(|r| r.certified && r.max_modulus > r.walsh_radius).count();
    let uncertified = records.iter().filter(|r| !r.certified).count();
    let result = SuiteResult {
        name: format!("walsh_containment_{instances}"),
        passed: outside == 0 && uncertified == 0,
        metric: outside as f64,
        tolerance: 0.0,
        detail: format!("{outside} instances with a zero outside the bound, {uncertified} uncertified"),
    };
    Ok((result, records))
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    #[serde(flatten)]
    pub header: RunHeader,
    pub passed: bool,
    pub suites: Vec<SuiteResult>,
    pub walsh_instances: Vec<WalshRecord>,
}

/// Writes `verify.json`; fails with an assertion error unless every suite passes.
pub fn run(exp: &Experiment) -> Result<(PathBuf, VerifyReport)> {
    let opts = exp.rootfind_options()?;
    let v = &exp.verify;
    if v.cot_n < 2 || v.modulus_n < 2 {
        return Err(CliError::Config("verify degrees must be >= 2".into()));
    }
    let (walsh, records) = walsh_fuzz(v.walsh_instances, exp.seed, &opts)?;
    let suites = vec![cot_formula(v.cot_n, &opts)?, modulus_formula(v.modulus_n, &opts)?, walsh];
    let report = VerifyReport {
        header: header(exp, "verify"),
        passed: suites.iter().all(|s| s.passed),
        suites,
        walsh_instances: records,
    };
    let dir = command_dir(&exp.output_dir, "verify")?;
    write_json(&dir.join("verify.json"), &report)?;
    if !report.passed {
        let failed: Vec<&str> = report.suites.iter().filter(|s| !s.passed).map(|s| s.name.as_str()).collect();
        return Err(CliError::Assertion(format!("failed suites: {}", failed.join(", "))));
    }
    Ok((dir, report))
}
