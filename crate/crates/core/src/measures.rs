//! Root distributions: exact samplers, closed-form logarithmic potentials
//! `U(z) = ∫ log|z - w| dμ(w)`, and support bounds.

use std::f64::consts::TAU;

use rand::Rng;

use crate::{Error, Result, C64};

const WEIGHT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureKind {
    UniformDisk { center: C64, radius: f64 },
    UniformCircle { center: C64, radius: f64 },
    Atomic { atoms: Vec<(C64, f64)> },
    Mixture { components: Vec<(RootMeasure, f64)> },
}

/// A compactly supported probability measure on the plane.
///
/// Immutable once built; `support_radius` is computed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct RootMeasure {
    kind: MeasureKind,
    support_radius: f64,
}

fn check_weights(weights: impl Iterator<Item = f64>, what: &str) -> Result<()> {
    let mut total = 0.0;
    let mut count = 0usize;
    for w in weights {
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::InvalidMeasure(format!("{what} weight {w} is not positive")));
        }
        total += w;
        count += 1;
    }
    if count == 0 {
        return Err(Error::InvalidMeasure(format!("{what} list is empty")));
    }
    if (total - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::InvalidMeasure(format!("{what} weights sum to {total}, not 1")));
    }
    Ok(())
}

fn finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

impl RootMeasure {
    pub fn uniform_disk(center: C64, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !finite(center) {
            return Err(Error::InvalidMeasure(format!("disk radius must be positive, got {radius}")));
        }
        Ok(Self { kind: MeasureKind::UniformDisk { center, radius }, support_radius: center.norm() + radius })
    }

    pub fn uniform_circle(center: C64, radius: f64) -> Result<Self> {
        if !(radius >= 0.0 && radius.is_finite()) || !finite(center) {
            return Err(Error::InvalidMeasure(format!("circle radius must be nonnegative, got {radius}")));
        }
        Ok(Self { kind: MeasureKind::UniformCircle { center, radius }, support_radius: center.norm() + radius })
    }

    pub fn atomic(atoms: Vec<(C64, f64)>) -> Result<Self> {
        check_weights(atoms.iter().map(|a| a.1), "atom")?;
        if atoms.iter().any(|a| !finite(a.0)) {
            return Err(Error::InvalidMeasure("atom location is not finite".into()));
        }
        let support_radius = atoms.iter().map(|a| a.0.norm()).fold(0.0, f64::max);
        Ok(Self { kind: MeasureKind::Atomic { atoms }, support_radius })
    }

    /// Equal-weight atoms at the given points.
    pub fn uniform_atoms(points: &[C64]) -> Result<Self> {
        let w = 1.0 / points.len() as f64;
        Self::atomic(points.iter().map(|&p| (p, w)).collect())
    }

    pub fn point_mass(at: C64) -> Self {
        Self { kind: MeasureKind::Atomic { atoms: vec![(at, 1.0)] }, support_radius: at.norm() }
    }

    pub fn mixture(components: Vec<(RootMeasure, f64)>) -> Result<Self> {
        check_weights(components.iter().map(|c| c.1), "mixture component")?;
        let support_radius = components.iter().map(|c| c.0.support_radius).fold(0.0, f64::max);
        Ok(Self { kind: MeasureKind::Mixture { components }, support_radius })
    }

    pub fn kind(&self) -> &MeasureKind {
        &self.kind
    }

    /// Smallest `R` such that the support lies in the closed disk of radius
    /// `R` about the origin.
    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    /// Axis-aligned bounding box `(x_min, x_max, y_min, y_max)` of the support.
    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        match &self.kind {
            MeasureKind::UniformDisk { center, radius } | MeasureKind::UniformCircle { center, radius } => {
                (center.re - radius, center.re + radius, center.im - radius, center.im + radius)
            }
            MeasureKind::Atomic { atoms } => {
                atoms.iter().fold((f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY), |b, (p, _)| {
                    (b.0.min(p.re), b.1.max(p.re), b.2.min(p.im), b.3.max(p.im))
                })
            }
            MeasureKind::Mixture { components } => components.iter().fold(
                (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
                |b, (c, _)| {
                    let cb = c.bounding_box();
                    (b.0.min(cb.0), b.1.max(cb.1), b.2.min(cb.2), b.3.max(cb.3))
                },
            ),
        }
    }

    /// Short human-readable identifier, used in trial metadata.
    pub fn label(&self) -> String {
        match &self.kind {
            MeasureKind::UniformDisk { center, radius } => format!("disk({},{};{})", center.re, center.im, radius),
            MeasureKind::UniformCircle { center, radius } => format!("circle({},{};{})", center.re, center.im, radius),
            MeasureKind::Atomic { atoms } => {
                let parts: Vec<String> = atoms.iter().map(|(p, w)| format!("{}@({},{})", w, p.re, p.im)).collect();
                format!("atoms[{}]", parts.join(" "))
            }
            MeasureKind::Mixture { components } => {
                let parts: Vec<String> = components.iter().map(|(c, w)| format!("{}*{}", w, c.label())).collect();
                format!("mix[{}]", parts.join(" + "))
            }
        }
    }

    /// Draws one point. The result is clamped onto the closed support disk so
    /// that `|z| <= support_radius` holds exactly and not only up to rounding.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> C64 {
        let z = match &self.kind {
            MeasureKind::UniformDisk { center, radius } => {
                let r = radius * rng.random::<f64>().sqrt();
                center + C64::from_polar(r, TAU * rng.random::<f64>())
            }
            MeasureKind::UniformCircle { center, radius } => {
                if *radius == 0.0 {
                    *center
                } else {
                    center + C64::from_polar(*radius, TAU * rng.random::<f64>())
                }
            }
            MeasureKind::Atomic { atoms } => pick(atoms, rng.random::<f64>()).0,
            MeasureKind::Mixture { components } => {
                let u = rng.random::<f64>();
                return pick(components, u).0.sample_one(rng);
            }
        };
        clamp_to_radius(z, self.support_radius)
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<C64> {
        (0..n).map(|_| self.sample_one(rng)).collect()
    }

    /// Closed-form logarithmic potential; `-inf` at an atom.
    pub fn potential(&self, z: C64) -> f64 {
        match &self.kind {
            MeasureKind::UniformDisk { center, radius } => {
                let d = (z - center).norm();
                if d > *radius {
                    d.ln()
                } else {
                    0.5 * ((d / radius).powi(2) - 1.0) + radius.ln()
                }
            }
            MeasureKind::UniformCircle { center, radius } => (z - center).norm().max(*radius).ln(),
            MeasureKind::Atomic { atoms } => atoms.iter().map(|(a, w)| w * (z - a).norm().ln()).sum(),
            MeasureKind::Mixture { components } => components.iter().map(|(c, w)| w * c.potential(z)).sum(),
        }
    }
}

fn pick<T>(items: &[(T, f64)], u: f64) -> &(T, f64) {
    let mut acc = 0.0;
    for item in items {
        acc += item.1;
        if u < acc {
            return item;
        }
    }
    items.last().expect("weights validated nonempty")
}

fn clamp_to_radius(mut z: C64, radius: f64) -> C64 {
    let mut norm = z.norm();
    while norm > radius {
        z *= (radius / norm) * (1.0 - f64::EPSILON);
        norm = z.norm();
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest};
    use std::f64::consts::LN_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn catalog() -> Vec<RootMeasure> {
        let disk = RootMeasure::uniform_disk(c(1.0, 0.0), 1.0).unwrap();
        let disk2 = RootMeasure::uniform_disk(c(-0.5, 2.0), 0.7).unwrap();
        let circle = RootMeasure::uniform_circle(c(0.0, 0.0), 2.0).unwrap();
        let circle2 = RootMeasure::uniform_circle(c(1.0, -1.0), 0.5).unwrap();
        let atoms = RootMeasure::uniform_atoms(&[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        let atoms2 = RootMeasure::atomic(vec![(c(0.0, 1.0), 0.25), (c(0.3, -0.4), 0.75)]).unwrap();
        let mix = RootMeasure::mixture(vec![(disk.clone(), 0.5), (atoms2.clone(), 0.5)]).unwrap();
        vec![disk, disk2, circle, circle2, atoms, atoms2, mix]
    }

    #[test]
    fn two_point_sampling() {
        let m = RootMeasure::uniform_atoms(&[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        let draws = m.sample(1000, &mut trial_rng(1, 0));
        assert!(draws.iter().all(|&z| z == c(1.0, 0.0) || z == c(-1.0, 0.0)));
        let plus = draws.iter().filter(|z| z.re > 0.0).count() as f64 / 1000.0;
        assert!((0.45..=0.55).contains(&plus), "fraction {plus}");
    }

    #[test]
    fn circle_sampling_stays_on_circle() {
        let m = RootMeasure::uniform_circle(C64::new(0.0, 0.0), 1.0).unwrap();
        for z in m.sample(500, &mut trial_rng(2, 0)) {
            assert!((z.norm() - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn disk_sample_mean_is_center() {
        // Per-coordinate sd of the unit disk is 1/2, so the standard error of
        // the mean of 10^4 draws is 0.005; 0.05 is ten of those.
        let m = RootMeasure::uniform_disk(c(1.0, 0.0), 1.0).unwrap();
        let draws = m.sample(10_000, &mut trial_rng(3, 0));
        let mean = draws.iter().sum::<C64>() / draws.len() as f64;
        assert!((mean - c(1.0, 0.0)).norm() < 0.05, "mean {mean}");
    }

    #[test]
    fn paper_potential_values() {
        let disk = RootMeasure::uniform_disk(c(1.0, 0.0), 1.0).unwrap();
        assert!((disk.potential(c(3.0, 0.0)) - LN_2).abs() < 1e-15);
        assert!((disk.potential(c(1.0, 0.0)) + 0.5).abs() < 1e-15);
        let atoms = RootMeasure::uniform_atoms(&[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        assert!((atoms.potential(c(0.0, 1.0)) - 0.5 * LN_2).abs() < 1e-15);
        assert_eq!(atoms.potential(c(1.0, 0.0)), f64::NEG_INFINITY);
    }

    #[test]
    fn circle_potential_at_center_matches_monte_carlo() {
        let circle = RootMeasure::uniform_circle(c(0.0, 0.0), 2.0).unwrap();
        let w = circle.sample(1_000_000, &mut trial_rng(4, 0));
        let vals: Vec<f64> = w.iter().map(|w| w.norm().ln()).collect();
        let (mean, se) = mean_se(&vals);
        let exact = circle.potential(c(0.0, 0.0));
        assert!((exact - LN_2).abs() < 1e-15);
        assert!((mean - exact).abs() <= 3.0 * se.max(1e-15), "mc {mean} exact {exact} se {se}");
    }

    fn mean_se(vals: &[f64]) -> (f64, f64) {
        let n = vals.len() as f64;
        let mean = crate::sum::kahan(vals.iter().copied()) / n;
        let var = crate::sum::kahan(vals.iter().map(|v| (v - mean).powi(2))) / (n - 1.0);
        (mean, (var / n).sqrt())
    }

    #[test]
    fn support_radii() {
        assert_eq!(RootMeasure::uniform_disk(c(1.0, 0.0), 1.0).unwrap().support_radius(), 2.0);
        let atoms = RootMeasure::uniform_atoms(&[c(0.0, 1.0), c(0.0, -1.0)]).unwrap();
        assert_eq!(atoms.support_radius(), 1.0);
        let mix = RootMeasure::mixture(vec![(RootMeasure::uniform_disk(c(1.0, 0.0), 1.0).unwrap(), 0.5), (atoms, 0.5)])
            .unwrap();
        assert_eq!(mix.support_radius(), 2.0);
    }

    #[test]
    fn rejects_invalid_construction() {
        assert!(RootMeasure::uniform_disk(c(0.0, 0.0), 0.0).is_err());
        assert!(RootMeasure::uniform_circle(c(0.0, 0.0), -1.0).is_err());
        assert!(RootMeasure::atomic(vec![(c(0.0, 0.0), 0.5)]).is_err());
        assert!(RootMeasure::atomic(vec![]).is_err());
        assert!(RootMeasure::mixture(vec![]).is_err());
        assert!(RootMeasure::atomic(vec![(c(0.0, 0.0), 1.5), (c(1.0, 0.0), -0.5)]).is_err());
    }

    #[test]
    fn closed_forms_match_monte_carlo() {
        const N: usize = 100_000;
        for (mi, m) in catalog().iter().enumerate() {
            let w = m.sample(N, &mut trial_rng(10, mi as u64));
            let mut probe_rng = trial_rng(11, mi as u64);
            for _ in 0..20 {
                // Probes within a few radii of the support; skip exact atom hits.
                let r = 3.0 * (m.support_radius() + 1.0) * probe_rng.random::<f64>().sqrt();
                let z = C64::from_polar(r, TAU * probe_rng.random::<f64>());
                let vals: Vec<f64> = w.iter().map(|w| (z - w).norm().ln()).collect();
                let (mean, se) = mean_se(&vals);
                let exact = m.potential(z);
                assert!(
                    (mean - exact).abs() <= 4.0 * se + 1e-12,
                    "{}: z={z} mc={mean} exact={exact} se={se}",
                    m.label()
                );
            }
        }
    }

    #[test]
    fn far_field_matches_log_modulus() {
        for m in catalog() {
            let mut worst: f64 = 0.0;
            for k in 0..=40 {
                let r = 10f64.powf(1.0 + 3.0 * k as f64 / 40.0);
                if r < 2.0 * m.support_radius() + 2.0 {
                    continue;
                }
                for j in 0..8 {
                    let z = C64::from_polar(r, TAU * j as f64 / 8.0 + 0.1);
                    worst = worst.max((m.potential(z) - r.ln()).abs() * r);
                }
            }
            // |U(z) - log|z|| <= C/|z| with C bounded by roughly the support radius.
            assert!(worst <= 2.0 * m.support_radius() + 1.0, "{}: C = {worst}", m.label());
        }
    }

    #[test]
    fn radial_symmetry_of_disk_and_circle() {
        let ms = [
            RootMeasure::uniform_disk(c(0.3, -1.2), 1.7).unwrap(),
            RootMeasure::uniform_circle(c(-2.0, 0.5), 0.8).unwrap(),
        ];
        for m in &ms {
            let center = match m.kind() {
                MeasureKind::UniformDisk { center, .. } | MeasureKind::UniformCircle { center, .. } => *center,
                _ => unreachable!(),
            };
            for r in [0.1, 0.79, 0.81, 1.5, 1.71, 4.0] {
                let base = m.potential(center + C64::from_polar(r, 0.0));
                for k in 1..32 {
                    let v = m.potential(center + C64::from_polar(r, TAU * k as f64 / 32.0));
                    assert!((v - base).abs() <= 1e-12, "r={r} k={k}");
                }
            }
        }
    }

    #[test]
    fn max_with_neg_infinity_is_identity() {
        assert_eq!(f64::NEG_INFINITY.max(0.25), 0.25);
    }

    proptest! {
        #[test]
        fn samples_lie_in_support_disk(seed in any::<u64>(), which in 0usize..7, n in 1usize..200) {
            let m = &catalog()[which];
            for z in m.sample(n, &mut trial_rng(seed, 0)) {
                prop_assert!(z.norm() <= m.support_radius());
            }
        }

        #[test]
        fn sampling_is_deterministic(seed in any::<u64>(), which in 0usize..7) {
            let m = &catalog()[which];
            prop_assert_eq!(m.sample(16, &mut trial_rng(seed, 1)), m.sample(16, &mut trial_rng(seed, 1)));
        }
    }
}
