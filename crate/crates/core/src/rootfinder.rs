//! All zeros of `S = Σ_k p_k` by simultaneous Aberth–Ehrlich iteration.
//!
//! Each sweep updates every unconverged iterate with
//! `z_j ← z_j − w_j / (1 − w_j Σ_{l≠j} 1/(z_j − z_l))`, where `w_j = S/S'`
//! comes from [`PolySum::sum_newton_ratio`]. Sweeps are Jacobi-style (every
//! update reads the previous iterate) except on the last restart, which falls
//! back to Gauss–Seidel. An iterate is frozen once its own Newton correction
//! passes the relative tolerance; the correction depends only on `S` and the
//! iterate, so frozen roots keep satisfying the test.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::polyeval::PolySum;
use crate::{Error, Result, C64};

const PARALLEL_MIN_DEGREE: usize = 32;
const MAX_PERTURB_ATTEMPTS: u64 = 8;
const CERTIFY_PROBES: usize = 5;
const CERTIFY_PROBE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootFindOptions {
    pub tol: f64,
    pub max_iters: usize,
    pub restarts: usize,
    pub init_radius_factor: f64,
    /// Seeds the restart offsets and the collision/root-hit perturbations.
    pub seed: u64,
}

impl Default for RootFindOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_iters: 500, restarts: 3, init_radius_factor: 1.5, seed: 0x5eed }
    }
}

impl RootFindOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 1e-3) {
            return Err(Error::InvalidArgument(format!("tol must lie in (0, 1e-3), got {}", self.tol)));
        }
        if self.max_iters < 10 {
            return Err(Error::InvalidArgument(format!("max_iters must be >= 10, got {}", self.max_iters)));
        }
        if !(self.init_radius_factor > 0.0 && self.init_radius_factor.is_finite()) {
            return Err(Error::InvalidArgument("init_radius_factor must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootFindReport {
    pub roots: Vec<C64>,
    /// Total sweeps over all restarts.
    pub iterations: usize,
    pub max_newton_correction: f64,
    pub residual_ok: bool,
    pub walsh_radius: f64,
    /// Relative Newton-correction tolerance the roots were accepted at.
    pub tol: f64,
    pub restarts_used: usize,
}

impl RootFindReport {
    /// Wraps externally supplied roots (e.g. closed-form zeros) for [`certify`].
    pub fn from_roots(sum: &PolySum, roots: Vec<C64>, tol: f64) -> Self {
        let walsh_radius = containment_radius(sum);
        Self {
            roots,
            iterations: 0,
            max_newton_correction: f64::NAN,
            residual_ok: false,
            walsh_radius,
            tol,
            restarts_used: 0,
        }
    }

    pub fn into_result(self) -> Result<Self> {
        if self.residual_ok {
            Ok(self)
        } else {
            Err(Error::DidNotConverge { sweeps: self.iterations })
        }
    }
}

/// Radius `2^{m-1} M / sin(π/n)^{m-1}` of the origin-centred disk that
/// contains every zero of a sum of `m` monic degree-`n` polynomials whose
/// zeros lie in `B(M)`.
pub fn walsh_bound(sum: &PolySum) -> Result<f64> {
    let n = sum.degree();
    if n < 2 {
        return Err(Error::DegreeTooSmall(n));
    }
    let k = (sum.num_parts() - 1) as i32;
    Ok(2f64.powi(k) * sum.max_root_modulus() / (PI / n as f64).sin().powi(k))
}

/// Walsh radius, or `M` itself for linear parts where the zero is the mean root.
fn containment_radius(sum: &PolySum) -> f64 {
    walsh_bound(sum).unwrap_or_else(|_| sum.max_root_modulus())
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Deterministic pseudo-random unit phase keyed by a tuple of counters.
fn unit_phase(key: &[u64]) -> C64 {
    let h = key.iter().fold(0u64, |acc, &k| splitmix(acc ^ k));
    let u = (h >> 11) as f64 / (1u64 << 53) as f64;
    C64::from_polar(1.0, TAU * u)
}

/// Newton ratio at `z`, nudging `z` off exact component-root hits and
/// critical points. Returns the possibly moved point and the ratio.
fn newton_at(sum: &PolySum, mut z: C64, key: [u64; 3]) -> (C64, Option<C64>) {
    for attempt in 0..=MAX_PERTURB_ATTEMPTS {
        match sum.sum_newton_ratio(z) {
            Ok(w) if w.re.is_finite() && w.im.is_finite() => return (z, Some(w)),
            _ if attempt < MAX_PERTURB_ATTEMPTS => {
                z += 1e-12 * (1.0 + z.norm()) * unit_phase(&[key[0], key[1], key[2], attempt]);
            }
            _ => {}
        }
    }
    (z, None)
}

fn aberth_step(z: C64, w: C64, others: impl Iterator<Item = C64>) -> C64 {
    let repulsion: C64 = others.map(|o| (z - o).inv()).sum();
    let denom = C64::new(1.0, 0.0) - w * repulsion;
    let step = w / denom;
    if step.re.is_finite() && step.im.is_finite() && denom.norm() > 0.0 {
        z - step
    } else {
        z - w
    }
}

struct Attempt {
    roots: Vec<C64>,
    sweeps: usize,
    max_correction: f64,
    converged: bool,
}

fn separate_collisions(z: &mut [C64], locked: &[bool], key: [u64; 2]) {
    let n = z.len();
    for j in 0..n {
        if locked[j] {
            continue;
        }
        for l in 0..n {
            if l != j && (z[j] - z[l]).norm() < 1e-14 * (1.0 + z[j].norm()) {
                z[j] += 1e-10 * (1.0 + z[j].norm()) * unit_phase(&[key[0], key[1], j as u64, 0xc0111de]);
                break;
            }
        }
    }
}

fn run_attempt(sum: &PolySum, opts: &RootFindOptions, restart: usize, gauss_seidel: bool) -> Attempt {
    let n = sum.degree();
    let radius = opts.init_radius_factor * (sum.max_root_modulus() + 1.0);
    let eta = (splitmix(opts.seed ^ splitmix(restart as u64 + 1)) >> 11) as f64 / (1u64 << 53) as f64;
    let mut z: Vec<C64> = (0..n).map(|j| C64::from_polar(radius, TAU * (j as f64 + eta) / n as f64)).collect();
    let mut locked = vec![false; n];
    let mut corrections = vec![f64::INFINITY; n];
    let converged_at = |z: C64, w: C64| w.norm() <= opts.tol * (1.0 + z.norm());

    for sweep in 0..opts.max_iters {
        let key = |j: usize| [opts.seed ^ restart as u64, sweep as u64, j as u64];
        if gauss_seidel {
            for j in 0..n {
                if locked[j] {
                    continue;
                }
                let (zj, w) = newton_at(sum, z[j], key(j));
                z[j] = zj;
                let Some(w) = w else { continue };
                corrections[j] = w.norm();
                if converged_at(zj, w) {
                    locked[j] = true;
                } else {
                    let others = z.iter().enumerate().filter(|&(l, _)| l != j).map(|(_, &o)| o);
                    z[j] = aberth_step(zj, w, others);
                }
            }
        } else {
            let snapshot = &z;
            let update = |j: usize| -> Option<(C64, f64, bool)> {
                if locked[j] {
                    return None;
                }
                let (zj, w) = newton_at(sum, snapshot[j], key(j));
                let Some(w) = w else { return Some((zj, f64::INFINITY, false)) };
                if converged_at(zj, w) {
                    return Some((zj, w.norm(), true));
                }
                let others = snapshot.iter().enumerate().filter(|&(l, _)| l != j).map(|(_, &o)| o);
                Some((aberth_step(zj, w, others), w.norm(), false))
            };
            let updates: Vec<Option<(C64, f64, bool)>> = if n >= PARALLEL_MIN_DEGREE {
                (0..n).into_par_iter().map(update).collect()
            } else {
                (0..n).map(update).collect()
            };
            for (j, u) in updates.into_iter().enumerate() {
                if let Some((zj, c, lock)) = u {
                    z[j] = zj;
                    corrections[j] = c;
                    locked[j] = lock;
                }
            }
        }

        if z.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Attempt { roots: z, sweeps: sweep + 1, max_correction: f64::INFINITY, converged: false };
        }
        if locked.iter().all(|&l| l) {
            let max_correction = corrections.iter().cloned().fold(0.0, f64::max);
            return Attempt { roots: z, sweeps: sweep + 1, max_correction, converged: true };
        }
        separate_collisions(&mut z, &locked, [opts.seed ^ restart as u64, sweep as u64]);
    }
    let max_correction = corrections.iter().cloned().fold(0.0, f64::max);
    Attempt { roots: z, sweeps: opts.max_iters, max_correction, converged: false }
}

/// Finds all `n` zeros of `sum`. Non-convergence is not an error here: the
/// report comes back with `residual_ok = false` (see
/// [`RootFindReport::into_result`]). Only invalid options fail.
pub fn find_roots(sum: &PolySum, opts: &RootFindOptions) -> Result<RootFindReport> {
    opts.validate()?;
    let n = sum.degree();
    let walsh_radius = containment_radius(sum);

    if n == 1 {
        let m = sum.num_parts() as f64;
        let root = sum.parts().iter().map(|p| p.roots()[0]).sum::<C64>() / m;
        return Ok(RootFindReport {
            roots: vec![root],
            iterations: 0,
            max_newton_correction: 0.0,
            residual_ok: root.norm() <= walsh_radius,
            walsh_radius,
            tol: opts.tol,
            restarts_used: 0,
        });
    }

    let mut total = 0;
    let mut last = None;
    for restart in 0..=opts.restarts {
        let gauss_seidel = opts.restarts > 0 && restart == opts.restarts;
        let attempt = run_attempt(sum, opts, restart, gauss_seidel);
        total += attempt.sweeps;
        let inside = attempt.roots.iter().all(|r| r.norm() <= walsh_radius);
        if attempt.converged && inside {
            return Ok(RootFindReport {
                roots: attempt.roots,
                iterations: total,
                max_newton_correction: attempt.max_correction,
                residual_ok: true,
                walsh_radius,
                tol: opts.tol,
                restarts_used: restart,
            });
        }
        last = Some((attempt, restart));
    }
    let (attempt, restart) = last.expect("at least one attempt runs");
    Ok(RootFindReport {
        roots: attempt.roots,
        iterations: total,
        max_newton_correction: attempt.max_correction,
        residual_ok: false,
        walsh_radius,
        tol: opts.tol,
        restarts_used: restart,
    })
}

/// Independent acceptance check of a set of zeros: count, per-root Newton
/// correction, Walsh containment, and reconstruction `S ≈ m Π (z - z_j)` at
/// probe points outside all zeros.
pub fn certify(sum: &PolySum, report: &RootFindReport) -> bool {
    let n = sum.degree();
    if report.roots.len() != n {
        return false;
    }
    let radius = containment_radius(sum);
    for (j, &r) in report.roots.iter().enumerate() {
        if r.norm().is_nan() || r.norm() > radius {
            return false;
        }
        match newton_at(sum, r, [0xce27, j as u64, 0]) {
            (zj, Some(w)) if w.norm() <= report.tol * (1.0 + zj.norm()) => {}
            _ => return false,
        }
    }

    let extent = report.roots.iter().map(|r| r.norm()).fold(sum.max_root_modulus(), f64::max);
    let probe_radius = 1.5 * extent + 1.0;
    let log_m = (sum.num_parts() as f64).ln();
    let roots = crate::polyeval::RootPoly::new(report.roots.clone()).expect("n >= 1 roots");
    (0..CERTIFY_PROBES).all(|k| {
        let probe = probe_radius * unit_phase(&[0x9e0be, k as u64]);
        let s = sum.eval_scaled(probe).to_log();
        let r = roots.log_eval(probe);
        if s.is_zero() || r.is_zero() {
            return false;
        }
        let ratio = C64::from_polar((r.log_mag + log_m - s.log_mag).exp(), r.phase - s.phase);
        (ratio - 1.0).norm() <= CERTIFY_PROBE_TOL
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rng::trial_rng, RootMeasure};
    use proptest::prelude::*;
    use std::f64::consts::SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn lists_sum(lists: Vec<Vec<C64>>) -> PolySum {
        PolySum::from_root_lists(lists).unwrap()
    }

    fn pm_one(n: usize) -> PolySum {
        lists_sum(vec![vec![c(1.0, 0.0); n], vec![c(-1.0, 0.0); n]])
    }

    fn cot_roots(n: usize) -> Vec<C64> {
        (1..=n).map(|k| c(0.0, -1.0 / ((2 * k + 1) as f64 * PI / (2 * n) as f64).tan())).collect()
    }

    /// Max distance under the best one-to-one matching, greedy on sorted
    /// candidates; adequate for well-separated root sets.
    fn matched_error(a: &[C64], b: &[C64]) -> f64 {
        assert_eq!(a.len(), b.len());
        let mut used = vec![false; b.len()];
        let mut worst: f64 = 0.0;
        for &x in a {
            let (best, d) = b
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .map(|(i, &y)| (i, (x - y).norm()))
                .min_by(|p, q| p.1.total_cmp(&q.1))
                .unwrap();
            used[best] = true;
            worst = worst.max(d);
        }
        worst
    }

    #[test]
    fn walsh_examples() {
        let s = lists_sum(vec![vec![c(1.0, 0.0); 4], vec![c(0.0, 1.0); 4]]);
        assert!((walsh_bound(&s).unwrap() - 2.0 * SQRT_2).abs() < 1e-12);
        let s = lists_sum(vec![vec![c(2.0, 0.0); 6], vec![c(0.0, 0.0); 6], vec![c(-1.0, 0.0); 6]]);
        assert!((walsh_bound(&s).unwrap() - 32.0).abs() < 1e-12);
        let s = lists_sum(vec![vec![c(0.5, 0.0), c(0.0, -3.0)]]);
        assert_eq!(walsh_bound(&s).unwrap(), 3.0);
        let s = lists_sum(vec![vec![c(0.5, 0.0)], vec![c(1.0, 0.0)]]);
        assert!(matches!(walsh_bound(&s), Err(Error::DegreeTooSmall(1))));
    }

    #[test]
    fn quadratic_pair() {
        let s = pm_one(2);
        let rep = find_roots(&s, &RootFindOptions::default()).unwrap();
        assert!(rep.residual_ok);
        assert!(matched_error(&rep.roots, &[c(0.0, 1.0), c(0.0, -1.0)]) <= 1e-12);
        assert!(certify(&s, &rep));
    }

    #[test]
    fn modulus_formula_n4() {
        let n = 4;
        let unity: Vec<C64> = (0..n).map(|k| C64::from_polar(1.0, TAU * k as f64 / n as f64)).collect();
        let s = lists_sum(vec![unity.clone(), unity.iter().map(|w| w * 2.0).collect()]);
        let rep = find_roots(&s, &RootFindOptions::default()).unwrap();
        assert!(rep.residual_ok);
        let r = 8.5f64.powf(0.25);
        let expected: Vec<C64> = unity.iter().map(|w| w * r).collect();
        assert!(matched_error(&rep.roots, &expected) <= 1e-12);
    }

    #[test]
    fn cot_formula_n100() {
        let n = 100;
        let s = pm_one(n);
        let rep = find_roots(&s, &RootFindOptions::default()).unwrap();
        assert!(rep.residual_ok, "{:?}", rep.max_newton_correction);
        assert!(rep.roots.iter().all(|r| r.re.abs() <= 1e-8));
        assert!(matched_error(&rep.roots, &cot_roots(n)) <= 1e-8);
        assert!(certify(&s, &rep));
    }

    #[test]
    fn certify_examples() {
        let n = 40;
        let s = pm_one(n);
        let exact = RootFindReport::from_roots(&s, cot_roots(n), 1e-12);
        assert!(certify(&s, &exact));
        let shifted = RootFindReport::from_roots(&s, cot_roots(n).iter().map(|r| r + 0.1).collect(), 1e-12);
        assert!(!certify(&s, &shifted));
        let short = RootFindReport::from_roots(&s, cot_roots(n)[1..].to_vec(), 1e-12);
        assert!(!certify(&s, &short));
    }

    #[test]
    fn linear_parts_have_mean_root() {
        let s = lists_sum(vec![vec![c(1.0, 0.0)], vec![c(0.0, 3.0)]]);
        let rep = find_roots(&s, &RootFindOptions::default()).unwrap();
        assert_eq!(rep.roots, vec![c(0.5, 1.5)]);
        assert!(rep.residual_ok);
    }

    #[test]
    fn invalid_options_rejected() {
        let s = pm_one(3);
        let bad = RootFindOptions { tol: 1e-2, ..Default::default() };
        assert!(find_roots(&s, &bad).is_err());
        let bad = RootFindOptions { max_iters: 5, ..Default::default() };
        assert!(find_roots(&s, &bad).is_err());
    }

    #[test]
    fn non_convergence_is_reported() {
        // A 60-fold root converges only linearly, far slower than 10 sweeps.
        let s = lists_sum(vec![vec![c(0.0, 0.0); 60], vec![c(0.0, 0.0); 60]]);
        let opts = RootFindOptions { max_iters: 10, restarts: 1, ..Default::default() };
        let rep = find_roots(&s, &opts).unwrap();
        assert!(!rep.residual_ok);
        assert_eq!(rep.iterations, 20);
        assert!(matches!(rep.into_result(), Err(Error::DidNotConverge { sweeps: 20 })));
    }

    #[test]
    fn gauss_seidel_path_converges() {
        let s = pm_one(30);
        let opts = RootFindOptions { restarts: 0, ..Default::default() };
        let jacobi = find_roots(&s, &opts).unwrap();
        let gs = run_attempt(&s, &opts, 0, true);
        assert!(jacobi.residual_ok && gs.converged);
        assert!(matched_error(&jacobi.roots, &gs.roots) <= 1e-9);
    }

    fn random_sum(seed: u64, m: usize, n: usize) -> PolySum {
        let catalog = [
            RootMeasure::uniform_disk(c(1.0, 0.0), 1.0).unwrap(),
            RootMeasure::uniform_disk(c(-1.0, 0.0), 1.0).unwrap(),
            RootMeasure::uniform_circle(c(0.0, 0.0), 2.0).unwrap(),
            RootMeasure::uniform_atoms(&[c(0.0, 1.0), c(0.0, -1.0), c(0.5, 0.5)]).unwrap(),
        ];
        let mut rng = trial_rng(seed, 0);
        lists_sum((0..m).map(|k| catalog[(seed as usize + k) % 4].sample(n, &mut rng)).collect())
    }

    #[test]
    fn permutation_invariance() {
        let s = random_sum(3, 3, 40);
        let mut parts = s.parts().to_vec();
        parts.reverse();
        let t = PolySum::new(parts).unwrap();
        let a = find_roots(&s, &RootFindOptions::default()).unwrap();
        let b = find_roots(&t, &RootFindOptions::default()).unwrap();
        assert!(a.residual_ok && b.residual_ok);
        assert!(matched_error(&a.roots, &b.roots) <= 1e-9);
    }

    #[test]
    fn conjugation_equivariance() {
        let mut rng = trial_rng(9, 0);
        let disk = RootMeasure::uniform_disk(c(0.5, 0.0), 1.0).unwrap();
        let half: Vec<C64> = disk.sample(20, &mut rng);
        let closed: Vec<C64> = half.iter().flat_map(|&z| [z, z.conj()]).collect();
        let other: Vec<C64> = (0..40).map(|k| c(-1.0 + k as f64 * 0.01, 0.0)).collect();
        let s = lists_sum(vec![closed, other]);
        let rep = find_roots(&s, &RootFindOptions::default()).unwrap();
        assert!(rep.residual_ok);
        let conj: Vec<C64> = rep.roots.iter().map(|z| z.conj()).collect();
        assert!(matched_error(&rep.roots, &conj) <= 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn certified_roots_inside_walsh_disk(seed in any::<u64>(), m in 2usize..=3, n in 3usize..60) {
            let s = random_sum(seed, m, n);
            let rep = find_roots(&s, &RootFindOptions::default()).unwrap();
            prop_assert!(rep.residual_ok);
            prop_assert!(certify(&s, &rep));
            let bound = walsh_bound(&s).unwrap();
            prop_assert!(rep.roots.iter().all(|r| r.norm() <= bound));
        }
    }
}
