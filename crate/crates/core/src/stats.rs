//! Linear statistics of computed zeros and Monte-Carlo diagnostics.
//!
//! Every estimator draws trial `t` from its own stream
//! ([`trial_rng`](crate::rng::trial_rng)`(seed, t)`); trials run in parallel and
//! are reduced in trial order with compensated summation, so results depend
//! only on the seed.

use std::f64::consts::{LN_2, PI, TAU};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::limitlaw::BumpFunction;
use crate::polyeval::{PolySum, RootPoly};
use crate::rng::trial_rng;
use crate::rootfinder::{certify, find_roots, RootFindOptions, RootFindReport};
use crate::sum::kahan;
use crate::{Error, Result, RootMeasure, C64};

/// Mean of a Monte-Carlo sample with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub estimate: f64,
    pub stderr: f64,
}

impl Estimate {
    /// Sample mean and `sd/√N` (unbiased variance).
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = kahan(xs.iter().copied()) / n;
        let var = if xs.len() > 1 { kahan(xs.iter().map(|x| (x - mean).powi(2))) / (n - 1.0) } else { 0.0 };
        Self { estimate: mean, stderr: (var / n).sqrt() }
    }

    /// Binomial proportion `p̂` with `√(p̂(1-p̂)/N)`.
    pub fn proportion(hits: usize, trials: usize) -> Self {
        let p = hits as f64 / trials as f64;
        Self { estimate: p, stderr: (p * (1.0 - p) / trials as f64).sqrt() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialMeta {
    pub seed: u64,
    pub trial: u64,
    pub measures: Vec<String>,
}

/// The uniform measure on the computed zeros of one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    pub points: Vec<C64>,
    pub n: usize,
    pub meta: TrialMeta,
}

impl EmpiricalMeasure {
    pub fn new(points: Vec<C64>, meta: TrialMeta) -> Self {
        Self { n: points.len(), points, meta }
    }

    /// Takes the zeros of a converged report; fails when the report is not
    /// `residual_ok` (which also guarantees Walsh containment).
    pub fn from_report(report: &RootFindReport, meta: TrialMeta) -> Result<Self> {
        if !report.residual_ok {
            return Err(Error::DidNotConverge { sweeps: report.iterations });
        }
        Ok(Self::new(report.roots.clone(), meta))
    }

    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "re,im")?;
        for p in &self.points {
            writeln!(out, "{},{}", p.re, p.im)?;
        }
        Ok(())
    }
}

/// One simulated instance: the component root lists and the zeros of their sum.
#[derive(Debug, Clone)]
pub struct Instance {
    pub sum: PolySum,
    pub report: RootFindReport,
    pub certified: bool,
}

/// Draws `n` roots from each measure (in order) on stream `(seed, trial)`,
/// then finds and certifies the zeros of the sum.
pub fn simulate_instance(
    measures: &[RootMeasure],
    n: usize,
    seed: u64,
    trial: u64,
    opts: &RootFindOptions,
) -> Result<Instance> {
    if measures.is_empty() || n == 0 {
        return Err(Error::InvalidArgument("need at least one measure and n >= 1".into()));
    }
    let mut rng = trial_rng(seed, trial);
    let lists = measures.iter().map(|m| m.sample(n, &mut rng)).collect();
    let sum = PolySum::from_root_lists(lists)?;
    let opts = RootFindOptions { seed: opts.seed ^ trial, ..opts.clone() };
    let report = find_roots(&sum, &opts)?;
    let certified = report.residual_ok && certify(&sum, &report);
    Ok(Instance { sum, report, certified })
}

pub fn linear_statistic(emp: &EmpiricalMeasure, phi: &BumpFunction) -> f64 {
    if emp.points.is_empty() {
        return 0.0;
    }
    kahan(emp.points.iter().map(|&z| phi.eval(z))) / emp.points.len() as f64
}

/// Region a random probe `Z` is drawn uniformly from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ProbeRegion {
    Rect { x_min: f64, x_max: f64, y_min: f64, y_max: f64 },
    Disk { center: C64, radius: f64 },
    Annulus { center: C64, inner: f64, outer: f64 },
}

impl ProbeRegion {
    pub fn rect(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Self::Rect { x_min, x_max, y_min, y_max }
    }

    /// The disk support of a bump function.
    pub fn bump_support(phi: &BumpFunction) -> Self {
        Self::Disk { center: phi.center, radius: phi.radius }
    }

    pub fn area(&self) -> f64 {
        match *self {
            Self::Rect { x_min, x_max, y_min, y_max } => (x_max - x_min).max(0.0) * (y_max - y_min).max(0.0),
            Self::Disk { radius, .. } => PI * radius.max(0.0).powi(2),
            Self::Annulus { inner, outer, .. } => PI * (outer.powi(2) - inner.max(0.0).powi(2)).max(0.0),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.area() > 0.0 && self.area().is_finite() {
            Ok(())
        } else {
            Err(Error::DegenerateRegion)
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> C64 {
        match *self {
            Self::Rect { x_min, x_max, y_min, y_max } => {
                C64::new(x_min + (x_max - x_min) * rng.random::<f64>(), y_min + (y_max - y_min) * rng.random::<f64>())
            }
            Self::Disk { center, radius } => {
                center + C64::from_polar(radius * rng.random::<f64>().sqrt(), TAU * rng.random::<f64>())
            }
            Self::Annulus { center, inner, outer } => {
                let (a, b) = (inner * inner, outer * outer);
                let r = (a + (b - a) * rng.random::<f64>()).sqrt();
                center + C64::from_polar(r, TAU * rng.random::<f64>())
            }
        }
    }
}

fn log_ratio(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        a - b
    }
}

/// `P(1/2 <= |p_n(Z)/q_n(Z)| <= 2)` over fresh roots `X ~ μ`, `Y ~ ν` and a
/// uniform probe `Z`.
pub fn ratio_event_probability(
    mu: &RootMeasure,
    nu: &RootMeasure,
    n: usize,
    region: &ProbeRegion,
    trials: usize,
    seed: u64,
) -> Result<Estimate> {
    if trials < 100 {
        return Err(Error::InvalidArgument(format!("need at least 100 trials, got {trials}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    region.validate()?;
    let hits: Vec<bool> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let p = RootPoly::new(mu.sample(n, &mut rng)).expect("n >= 1");
            let q = RootPoly::new(nu.sample(n, &mut rng)).expect("n >= 1");
            let z = region.sample(&mut rng);
            log_ratio(p.log_abs(z), q.log_abs(z)).abs() <= LN_2
        })
        .collect();
    Ok(Estimate::proportion(hits.iter().filter(|&&h| h).count(), trials))
}

/// Lebesgue measure of `{z ∈ K : |U_μ(z) - U_ν(z)| <= log²n/√n}`, counted on
/// cell centres. The spacing is adjusted down so the cells tile `K` exactly.
pub fn gap_set_measure(mu: &RootMeasure, nu: &RootMeasure, k: &ProbeRegion, n: usize, h: f64) -> Result<f64> {
    let ProbeRegion::Rect { x_min, x_max, y_min, y_max } = *k else {
        return Err(Error::InvalidArgument("gap set is measured on a rectangle".into()));
    };
    k.validate()?;
    if h.is_nan() || h <= 0.0 {
        return Err(Error::InvalidArgument("h must be positive".into()));
    }
    let (nx, ny) = (((x_max - x_min) / h).round() as usize, ((y_max - y_min) / h).round() as usize);
    if nx < 100 || ny < 100 {
        return Err(Error::InvalidArgument(format!("h = {h} gives fewer than 100 cells per side")));
    }
    let (hx, hy) = ((x_max - x_min) / nx as f64, (y_max - y_min) / ny as f64);
    let threshold = (n as f64).ln().powi(2) / (n as f64).sqrt();
    let count: usize = (0..ny)
        .into_par_iter()
        .map(|j| {
            let y = y_min + (j as f64 + 0.5) * hy;
            (0..nx)
                .filter(|&i| {
                    let z = C64::new(x_min + (i as f64 + 0.5) * hx, y);
                    log_ratio(mu.potential(z), nu.potential(z)).abs() <= threshold
                })
                .count()
        })
        .sum();
    Ok(count as f64 * hx * hy)
}

/// `E |(1/n) log|p_n(Z)| - U_μ(Z)|²` with fresh roots each trial and `Z`
/// uniform on `K`.
pub fn concentration_second_moment(
    mu: &RootMeasure,
    k: &ProbeRegion,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<Estimate> {
    if trials < 100 {
        return Err(Error::InvalidArgument(format!("need at least 100 trials, got {trials}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    k.validate()?;
    let samples: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let p = RootPoly::new(mu.sample(n, &mut rng)).expect("n >= 1");
            let z = k.sample(&mut rng);
            let dev = log_ratio(p.log_abs(z) / n as f64, mu.potential(z));
            dev * dev
        })
        .collect();
    Ok(Estimate::from_samples(&samples))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsReport {
    /// Kolmogorov–Smirnov distance of the imaginary parts to the standard Cauchy law.
    pub distance: f64,
    /// `max |Re z|`, how tightly the points hug the imaginary axis.
    pub max_abs_real: f64,
}

pub fn cauchy_cdf(y: f64) -> f64 {
    0.5 + y.atan() / PI
}

pub fn ks_distance_to_cauchy(emp: &EmpiricalMeasure) -> KsReport {
    let mut ys: Vec<f64> = emp.points.iter().map(|z| z.im).collect();
    ys.sort_by(f64::total_cmp);
    let n = ys.len() as f64;
    let distance = ys
        .iter()
        .enumerate()
        .map(|(i, &y)| {
            let f = cauchy_cdf(y);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    let max_abs_real = emp.points.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    KsReport { distance, max_abs_real }
}

/// The three diagnostics at one degree `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsReport {
    pub n: usize,
    pub trials: usize,
    pub ratio_event_prob: Estimate,
    pub gap_set_measure: f64,
    pub concentration_second_moment: Estimate,
}

#[derive(Debug, Clone)]
pub struct DiagnosticsSetup {
    pub mu: RootMeasure,
    pub nu: RootMeasure,
    pub probe: ProbeRegion,
    pub k: ProbeRegion,
    pub gap_h: f64,
    pub trials: usize,
    pub seed: u64,
}

pub fn diagnose(setup: &DiagnosticsSetup, n: usize) -> Result<DiagnosticsReport> {
    Ok(DiagnosticsReport {
        n,
        trials: setup.trials,
        ratio_event_prob: ratio_event_probability(&setup.mu, &setup.nu, n, &setup.probe, setup.trials, setup.seed)?,
        gap_set_measure: gap_set_measure(&setup.mu, &setup.nu, &setup.k, n, setup.gap_h)?,
        concentration_second_moment: concentration_second_moment(&setup.mu, &setup.k, n, setup.trials, setup.seed)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limitlaw::quad::integrate;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn meta() -> TrialMeta {
        TrialMeta { seed: 0, trial: 0, measures: vec![] }
    }

    #[test]
    fn linear_statistic_examples() {
        let phi = BumpFunction::unit(c(0.0, 0.0), 2.0).unwrap();
        let emp = EmpiricalMeasure::new(vec![c(0.0, 1.0), c(0.0, -1.0)], meta());
        assert!((linear_statistic(&emp, &phi) - phi.eval(c(0.0, 1.0))).abs() < 1e-16);
        let far = BumpFunction::unit(c(10.0, 0.0), 1.0).unwrap();
        assert_eq!(linear_statistic(&emp, &far), 0.0);
    }

    #[test]
    fn linear_statistic_is_linear_and_bounded() {
        let pts: Vec<C64> = (0..50).map(|k| C64::from_polar(0.05 * k as f64, k as f64)).collect();
        let emp = EmpiricalMeasure::new(pts, meta());
        let a = BumpFunction::new(c(0.2, 0.1), 1.5, 2.0).unwrap();
        let b = BumpFunction::new(c(0.2, 0.1), 1.5, -0.5).unwrap();
        let ab = BumpFunction::new(c(0.2, 0.1), 1.5, 1.5).unwrap();
        let (la, lb, lab) = (linear_statistic(&emp, &a), linear_statistic(&emp, &b), linear_statistic(&emp, &ab));
        assert!((la + lb - lab).abs() < 1e-15);
        assert!(la.abs() <= a.max_abs());
    }

    #[test]
    fn identical_point_masses_always_hit_ratio_event() {
        let m = RootMeasure::point_mass(c(0.0, 0.0));
        let e = ratio_event_probability(&m, &m, 50, &ProbeRegion::rect(-1.0, 1.0, -1.0, 1.0), 200, 1).unwrap();
        assert_eq!(e, Estimate { estimate: 1.0, stderr: 0.0 });
    }

    #[test]
    fn separated_circles_avoid_ratio_event() {
        // On 1.2 <= |z| <= 1.8, U_ν - U_μ = log 2 - log|z| >= log(2/1.8) ≈ 0.105,
        // so log|q/p| ≈ 0.105 n ≫ log 2 for n >= 50 barring large deviations.
        let mu = RootMeasure::uniform_circle(c(0.0, 0.0), 1.0).unwrap();
        let nu = RootMeasure::uniform_circle(c(0.0, 0.0), 2.0).unwrap();
        let region = ProbeRegion::Annulus { center: c(0.0, 0.0), inner: 1.2, outer: 1.8 };
        let e = ratio_event_probability(&mu, &nu, 200, &region, 400, 2).unwrap();
        assert!(e.estimate <= 0.02, "{e:?}");
    }

    #[test]
    fn argument_checks() {
        let m = RootMeasure::point_mass(c(0.0, 0.0));
        let flat = ProbeRegion::rect(0.0, 1.0, 0.0, 0.0);
        assert!(matches!(ratio_event_probability(&m, &m, 5, &flat, 100, 0), Err(Error::DegenerateRegion)));
        let sq = ProbeRegion::rect(0.0, 1.0, 0.0, 1.0);
        assert!(ratio_event_probability(&m, &m, 5, &sq, 99, 0).is_err());
        assert!(concentration_second_moment(&m, &sq, 5, 10, 0).is_err());
        assert!(gap_set_measure(&m, &m, &sq, 100, 0.02).is_err());
    }

    #[test]
    fn gap_set_examples() {
        let k = ProbeRegion::rect(-2.0, 2.0, -2.0, 2.0);
        let mu = RootMeasure::uniform_disk(c(0.5, 0.0), 1.0).unwrap();
        assert!((gap_set_measure(&mu, &mu, &k, 1000, 0.02).unwrap() - 16.0).abs() < 1e-12);

        let [a, b] = crate::limitlaw::line_pair_measures();
        let small = gap_set_measure(&a, &b, &k, 10_000, 0.01).unwrap();
        let smaller = gap_set_measure(&a, &b, &k, 1_000_000, 0.01).unwrap();
        assert!(smaller < small, "{small} -> {smaller}");

        // Far-apart point masses: |U_μ - U_ν| >= 0.5 on K.
        let p = RootMeasure::point_mass(c(30.0, 0.0));
        let q = RootMeasure::point_mass(c(-30.0, 0.0));
        let near = ProbeRegion::rect(20.0, 21.0, -0.5, 0.5);
        for n in [1000usize, 10_000, 100_000] {
            assert_eq!(gap_set_measure(&p, &q, &near, n, 0.005).unwrap(), 0.0);
        }
    }

    #[test]
    fn gap_set_is_monotone_in_n() {
        let k = ProbeRegion::rect(-2.0, 2.0, -2.0, 2.0);
        let [a, b] = crate::limitlaw::line_pair_measures();
        let mut prev = f64::INFINITY;
        for n in [100usize, 200, 400, 1000, 5000, 20_000, 100_000] {
            let v = gap_set_measure(&a, &b, &k, n, 0.02).unwrap();
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn concentration_of_point_mass_is_zero() {
        let m = RootMeasure::point_mass(c(1.0, 1.0));
        let k = ProbeRegion::rect(2.0, 3.0, 0.0, 1.0);
        let e = concentration_second_moment(&m, &k, 64, 200, 3).unwrap();
        assert!(e.estimate < 1e-25, "{e:?}");
    }

    /// `E_Z Var_X log|Z - X|` for X uniform on the unit disk and Z uniform on
    /// [2,3]x[0,1], by nested Gauss–Kronrod quadrature (polar in X).
    fn n1_oracle() -> f64 {
        let tol = 1e-9;
        let inner = |z: C64| {
            let mom = |p: i32| {
                integrate(
                    |r| r * integrate(|t| (z - C64::from_polar(r, t)).norm().ln().powi(p), 0.0, TAU, tol),
                    0.0,
                    1.0,
                    tol,
                ) / PI
            };
            let m1 = mom(1);
            mom(2) - m1 * m1
        };
        integrate(|x| integrate(|y| inner(c(x, y)), 0.0, 1.0, 1e-8), 2.0, 3.0, 1e-8)
    }

    #[test]
    fn concentration_n1_matches_quadrature() {
        let mu = RootMeasure::uniform_disk(c(0.0, 0.0), 1.0).unwrap();
        let k = ProbeRegion::rect(2.0, 3.0, 0.0, 1.0);
        let e = concentration_second_moment(&mu, &k, 1, 40_000, 4).unwrap();
        let oracle = n1_oracle();
        assert!((e.estimate - oracle).abs() <= 3.0 * e.stderr, "{e:?} vs {oracle}");
    }

    #[test]
    fn estimators_are_seed_deterministic_and_stderr_scales() {
        let mu = RootMeasure::uniform_disk(c(0.0, 0.0), 1.0).unwrap();
        let k = ProbeRegion::rect(2.0, 3.0, 0.0, 1.0);
        let a = concentration_second_moment(&mu, &k, 50, 2000, 9).unwrap();
        assert_eq!(a, concentration_second_moment(&mu, &k, 50, 2000, 9).unwrap());
        let b = concentration_second_moment(&mu, &k, 50, 4000, 9).unwrap();
        let ratio = a.stderr / b.stderr;
        assert!((ratio / 2f64.sqrt() - 1.0).abs() < 0.2, "{ratio}");

        let [d1, d2] = [
            RootMeasure::uniform_disk(c(1.0, 0.0), 1.0).unwrap(),
            RootMeasure::uniform_disk(c(-1.0, 0.0), 1.0).unwrap(),
        ];
        let region = ProbeRegion::rect(-0.5, 0.5, -0.5, 0.5);
        let p = ratio_event_probability(&d1, &d2, 50, &region, 2000, 5).unwrap();
        assert_eq!(p, ratio_event_probability(&d1, &d2, 50, &region, 2000, 5).unwrap());
        let q = ratio_event_probability(&d1, &d2, 50, &region, 4000, 5).unwrap();
        assert!((p.stderr / q.stderr / 2f64.sqrt() - 1.0).abs() < 0.2);
    }

    fn cauchy_quantile(u: f64) -> f64 {
        (PI * (u - 0.5)).tan()
    }

    #[test]
    fn ks_of_cauchy_quantiles_is_half_step() {
        for n in [10usize, 100, 1000] {
            let pts = (1..=n).map(|k| c(0.0, cauchy_quantile((k as f64 - 0.5) / n as f64))).collect();
            let r = ks_distance_to_cauchy(&EmpiricalMeasure::new(pts, meta()));
            assert!((r.distance - 0.5 / n as f64).abs() < 1e-12, "{}", r.distance);
            assert_eq!(r.max_abs_real, 0.0);
        }
    }

    #[test]
    fn ks_of_exact_cot_roots() {
        let n = 1000;
        let pts = (1..=n).map(|k| c(0.0, -1.0 / ((2 * k + 1) as f64 * PI / (2 * n) as f64).tan())).collect();
        let r = ks_distance_to_cauchy(&EmpiricalMeasure::new(pts, meta()));
        assert!(r.distance <= 0.01, "{}", r.distance);
    }

    #[test]
    fn probe_regions_sample_inside() {
        let mut rng = trial_rng(12, 0);
        let ann = ProbeRegion::Annulus { center: c(1.0, 1.0), inner: 0.5, outer: 0.7 };
        let disk = ProbeRegion::Disk { center: c(-1.0, 0.0), radius: 0.3 };
        for _ in 0..1000 {
            let z = ann.sample(&mut rng);
            let r = (z - c(1.0, 1.0)).norm();
            assert!((0.5 - 1e-12..=0.7 + 1e-12).contains(&r));
            assert!((disk.sample(&mut rng) - c(-1.0, 0.0)).norm() <= 0.3 + 1e-12);
        }
        assert!((ann.area() - PI * (0.49 - 0.25)).abs() < 1e-12);
        let phi = BumpFunction::unit(c(0.0, 0.0), 2.0).unwrap();
        assert!((ProbeRegion::bump_support(&phi).area() - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn simulated_instance_is_certified() {
        let measures = [
            RootMeasure::uniform_disk(c(1.0, 0.0), 1.0).unwrap(),
            RootMeasure::uniform_disk(c(-1.0, 0.0), 1.0).unwrap(),
        ];
        let inst = simulate_instance(&measures, 60, 1, 0, &RootFindOptions::default()).unwrap();
        assert!(inst.report.residual_ok && inst.certified);
        let emp = EmpiricalMeasure::from_report(&inst.report, meta()).unwrap();
        assert_eq!(emp.n, 60);
    }
}
