use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;
use zerosum::limitlaw::{default_grid, grid_around_bump, grid_density, weak_integral, DensitySummary, GridHeader};
use zerosum::GridSpec;

use super::{header, RunHeader};
use crate::output::{command_dir, create, write_json};
use crate::{Experiment, Result};

#[derive(Debug, Clone, Serialize)]
pub struct WeakRow {
    pub center_re: f64,
    pub center_im: f64,
    pub radius: f64,
    pub amplitude: f64,
    /// Weak-form integral on a lattice grid around the bump at spacing `grid.h`.
    pub weak: f64,
    /// `Σ mass · φ` over the density grid.
    pub grid: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PredictSummary {
    #[serde(flatten)]
    pub header: RunHeader,
    pub grid: GridHeader,
    pub density: DensitySummary,
    pub weak_integrals: Vec<WeakRow>,
}

/// Writes `density.csv` (cell masses), `density_header.json`,
/// `weak_integrals.csv` and `summary.json`.
pub fn run(exp: &Experiment) -> Result<(PathBuf, PredictSummary)> {
    let measures = exp.require_measures()?;
    let bumps = exp.bump_functions()?;
    let spec = match exp.grid.bounds {
        Some(b) => GridSpec::new(b[0], b[1], b[2], b[3], exp.grid.h)?,
        None => default_grid(&measures, exp.grid.margin, exp.grid.h)?,
    };
    let density = grid_density(&measures, &spec)?;
    let dir = command_dir(&exp.output_dir, "predict")?;

    let mut w = create(&dir.join("density.csv"))?;
    density.field.write_csv(&mut w)?;
    w.flush()?;
    let mut w = create(&dir.join("density_header.json"))?;
    density.field.write_header_json(&mut w)?;
    writeln!(w)?;
    w.flush()?;

    let mut rows = Vec::with_capacity(bumps.len());
    for phi in &bumps {
        let weak = weak_integral(&measures, phi, &grid_around_bump(phi, exp.grid.h)?)?;
        rows.push(WeakRow {
            center_re: phi.center.re,
            center_im: phi.center.im,
            radius: phi.radius,
            amplitude: phi.amplitude,
            weak,
            grid: density.integrate(phi),
        });
    }
    let mut w = create(&dir.join("weak_integrals.csv"))?;
    writeln!(w, "center_re,center_im,radius,amplitude,weak,grid")?;
    for r in &rows {
        writeln!(w, "{},{},{},{},{},{}", r.center_re, r.center_im, r.radius, r.amplitude, r.weak, r.grid)?;
    }
    w.flush()?;

    let summary = PredictSummary {
        header: header(exp, "predict"),
        grid: density.field.header(),
        density: density.summary(),
        weak_integrals: rows,
    };
    write_json(&dir.join("summary.json"), &summary)?;
    Ok((dir, summary))
}
