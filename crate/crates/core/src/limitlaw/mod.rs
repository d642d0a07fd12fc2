//! The predicted limit measure `ρ = (1/2π) Δ U`, `U = max_k U_{μ_k}`.
//!
//! Two discretisations are provided. [`weak_integral`] pairs `U` with the
//! closed-form Laplacian of a bump function (midpoint rule), which is how `ρ`
//! is tested against smooth `φ`. [`grid_density`] applies the 5-point stencil
//! to `U` sampled at cell centres and yields cell masses. Both read `U` only
//! through closed-form potentials.

mod bump;
mod grid;
pub mod quad;

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

pub use bump::BumpFunction;
pub use grid::{GridField, GridHeader, GridSpec};

use crate::sum::{kahan, KahanSum};
use crate::{Error, Result, RootMeasure, C64};

/// Default spacing for grids built around bump supports.
pub const DEFAULT_H: f64 = 0.01;
/// Default inflation of the supports' bounding box.
pub const DEFAULT_MARGIN: f64 = 2.0;
/// Spacing used by [`lines_reference`].
pub const LINES_H: f64 = 0.0025;

pub fn max_potential(measures: &[RootMeasure], z: C64) -> f64 {
    measures.iter().map(|m| m.potential(z)).fold(f64::NEG_INFINITY, f64::max)
}

fn nonempty(measures: &[RootMeasure]) -> Result<()> {
    if measures.is_empty() {
        Err(Error::InvalidArgument("at least one measure is required".into()))
    } else {
        Ok(())
    }
}

/// Union of the supports' bounding boxes.
pub fn supports_bbox(measures: &[RootMeasure]) -> (f64, f64, f64, f64) {
    measures
        .iter()
        .map(RootMeasure::bounding_box)
        .fold((f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY), |a, b| {
            (a.0.min(b.0), a.1.max(b.1), a.2.min(b.2), a.3.max(b.3))
        })
}

/// Grid over the supports' bounding box inflated by `margin`.
pub fn default_grid(measures: &[RootMeasure], margin: f64, h: f64) -> Result<GridSpec> {
    nonempty(measures)?;
    GridSpec::inflated(supports_bbox(measures), margin, h)
}

/// Smallest grid on the lattice `hℤ²` covering `B(c, R)` with a `2h` margin.
/// Lattice alignment puts cell edges on the coordinate axes.
pub fn grid_around_bump(phi: &BumpFunction, h: f64) -> Result<GridSpec> {
    let lo = |v: f64| ((v - phi.radius - 2.0 * h) / h).floor() * h;
    let hi = |v: f64| ((v + phi.radius + 2.0 * h) / h).ceil() * h;
    GridSpec::new(lo(phi.center.re), hi(phi.center.re), lo(phi.center.im), hi(phi.center.im), h)
}

/// `(1/2π) ∫ Δφ · U dλ` by the midpoint rule on `grid`. Cells where `U = -inf`
/// (an atom shared by every measure) contribute nothing.
pub fn weak_integral(measures: &[RootMeasure], phi: &BumpFunction, grid: &GridSpec) -> Result<f64> {
    nonempty(measures)?;
    grid.validate()?;
    if !grid.contains_disk(phi.center, phi.radius) {
        return Err(Error::SupportNotCovered);
    }
    let h = grid.h;
    let index_range = |lo: f64, origin: f64, count: usize| {
        let first = (((lo - origin) / h).floor().max(0.0)) as usize;
        let last = ((((lo + 2.0 * phi.radius) - origin) / h).ceil() as usize).min(count);
        first..last
    };
    let cols = index_range(phi.center.re - phi.radius, grid.x_min, grid.nx());
    let rows: Vec<usize> = index_range(phi.center.im - phi.radius, grid.y_min, grid.ny()).collect();
    let row_sums: Vec<f64> = rows
        .par_iter()
        .map(|&j| {
            let mut acc = KahanSum::default();
            for i in cols.clone() {
                let z = grid.cell_center(i, j);
                let lap = phi.laplacian(z);
                if lap == 0.0 {
                    continue;
                }
                let u = max_potential(measures, z);
                if u.is_finite() {
                    acc.add(lap * u);
                }
            }
            acc.value()
        })
        .collect();
    Ok(kahan(row_sums) * h * h / TAU)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    /// Cell masses.
    pub field: GridField,
    pub total_mass: f64,
    pub min_mass: f64,
    pub masked_cells: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DensitySummary {
    pub total_mass: f64,
    pub min_mass: f64,
    pub masked_cells: usize,
    pub cells: usize,
}

impl DensityField {
    pub fn summary(&self) -> DensitySummary {
        DensitySummary {
            total_mass: self.total_mass,
            min_mass: self.min_mass,
            masked_cells: self.masked_cells,
            cells: self.field.values.len(),
        }
    }

    /// Mass of the unmasked cells whose centres satisfy `pred`.
    pub fn mass_where(&self, pred: impl Fn(C64) -> bool) -> f64 {
        kahan(self.field.cells().filter(|(z, _)| pred(*z)).map(|(_, v)| v))
    }

    /// `Σ mass · φ(centre)`, the grid counterpart of [`weak_integral`].
    pub fn integrate(&self, phi: &BumpFunction) -> f64 {
        kahan(self.field.cells().map(|(z, v)| v * phi.eval(z)))
    }

    /// Row sums divided by `h`: the density of the `y`-marginal at each row centre.
    pub fn y_marginal(&self) -> Vec<(f64, f64)> {
        let f = &self.field;
        (0..f.ny)
            .map(|j| {
                let y = f.cell_center(0, j).im;
                (y, kahan((0..f.nx).filter_map(|i| f.get(i, j))) / f.spec.h)
            })
            .collect()
    }
}

/// Cell masses `(1/2π)(5-point Laplacian of U)·h²` at the cell centres of
/// `grid`. A cell is masked when any of its five stencil samples is `-inf`.
pub fn grid_density(measures: &[RootMeasure], grid: &GridSpec) -> Result<DensityField> {
    nonempty(measures)?;
    grid.validate()?;
    let (nx, ny) = (grid.nx(), grid.ny());
    let h = grid.h;
    // Potentials on the (nx+2) x (ny+2) lattice of centres incl. a ghost ring.
    let (px, py) = (nx + 2, ny + 2);
    let potentials: Vec<Vec<f64>> = (0..py)
        .into_par_iter()
        .map(|jj| {
            let y = grid.y_min + (jj as f64 - 0.5) * h;
            (0..px).map(|ii| max_potential(measures, C64::new(grid.x_min + (ii as f64 - 0.5) * h, y))).collect()
        })
        .collect();

    let rows: Vec<(Vec<f64>, Vec<bool>)> = (0..ny)
        .into_par_iter()
        .map(|j| {
            let (below, here, above) = (&potentials[j], &potentials[j + 1], &potentials[j + 2]);
            let mut vals = Vec::with_capacity(nx);
            let mut mask = Vec::with_capacity(nx);
            for i in 0..nx {
                let c = here[i + 1];
                let stencil = [here[i], here[i + 2], below[i + 1], above[i + 1]];
                if !c.is_finite() || stencil.iter().any(|v| !v.is_finite()) {
                    vals.push(0.0);
                    mask.push(true);
                } else {
                    // Pair differences first: far from the supports U is large and smooth.
                    let lap = (stencil[0] - c) + (stencil[1] - c) + (stencil[2] - c) + (stencil[3] - c);
                    vals.push(lap / TAU);
                    mask.push(false);
                }
            }
            (vals, mask)
        })
        .collect();

    let mut field = GridField::zeros(*grid);
    for (j, (vals, mask)) in rows.into_iter().enumerate() {
        let start = j * nx;
        field.values[start..start + nx].copy_from_slice(&vals);
        field.mask[start..start + nx].copy_from_slice(&mask);
    }
    let total_mass = kahan(field.values.iter().copied());
    let min_mass =
        field.values.iter().zip(&field.mask).filter(|(_, &m)| !m).map(|(&v, _)| v).fold(f64::INFINITY, f64::min);
    let masked_cells = field.masked_count();
    Ok(DensityField { field, total_mass, min_mass, masked_cells })
}

/// `(1/π) ∫ φ(iy)/(1 + y²) dy`, the standard Cauchy law on the imaginary axis
/// paired with `φ`.
pub fn cauchy_reference(phi: &BumpFunction) -> f64 {
    let cx = phi.center.re;
    if cx.abs() >= phi.radius {
        return 0.0;
    }
    let half = (phi.radius * phi.radius - cx * cx).sqrt();
    let (a, b) = (phi.center.im - half, phi.center.im + half);
    quad::integrate(|y| phi.eval(C64::new(0.0, y)) / (1.0 + y * y), a, b, 1e-12) / PI
}

/// The two-line limit law of the atom pairs `{±1}` and `{±i}`, evaluated as a
/// fine-grid weak integral.
pub fn lines_reference(phi: &BumpFunction) -> Result<f64> {
    let pair = line_pair_measures();
    weak_integral(&pair, phi, &grid_around_bump(phi, LINES_H)?)
}

pub fn line_pair_measures() -> [RootMeasure; 2] {
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [
        RootMeasure::uniform_atoms(&[one, -one]).expect("valid atoms"),
        RootMeasure::uniform_atoms(&[i, -i]).expect("valid atoms"),
    ]
}
