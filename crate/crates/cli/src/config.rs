//! TOML experiment configuration.
//!
//! ```toml
//! seed = 20240611
//! n = [100, 400]            # or a single integer
//! trials = 50
//! output_dir = "out"
//!
//! [[measures]]
//! kind = "uniform_disk"
//! center = [1.0, 0.0]
//! radius = 1.0
//!
//! [[measures]]
//! kind = "atomic"
//! atoms = [[0.0, 1.0], [0.0, -1.0]]
//! weights = [0.5, 0.5]      # optional, equal weights by default
//!
//! [[measures]]
//! kind = "mixture"
//! components = [
//!   { weight = 0.5, kind = "uniform_circle", center = [0.0, 0.0], radius = 2.0 },
//!   { weight = 0.5, kind = "uniform_disk", center = [0.0, 0.0], radius = 1.0 },
//! ]
//!
//! [grid]                    # density grid for `predict`
//! bounds = [-4.0, 4.0, -4.0, 4.0]   # optional; else support box + margin
//! h = 0.01
//! margin = 2.0
//!
//! [[bumps]]
//! center = [0.0, 0.0]
//! radius = 3.0
//! amplitude = 1.0           # optional
//!
//! [rootfind]                # all optional
//! tol = 1e-12
//! max_iters = 500
//! restarts = 3
//! init_radius_factor = 1.5
//!
//! [compare]
//! reference = "weak"        # weak | cauchy | lines
//! h = 0.005                 # weak-integral spacing, default grid.h
//! predict_measures = [...]  # predict from other measures (negative control)
//!
//! [diagnose]                # uses the first two measures
//! probe = { shape = "rect", bounds = [-0.5, 0.5, -0.5, 0.5] }
//! k = [-0.5, 0.5, -0.5, 0.5]
//! gap_h = 0.01
//! trials = 1000             # default: top-level trials
//!
//! [verify]
//! cot_n = 100
//! modulus_n = 64
//! walsh_instances = 100
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use zerosum::stats::ProbeRegion;
use zerosum::{BumpFunction, RootFindOptions, RootMeasure, C64};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureSpec {
    UniformDisk {
        #[serde(default)]
        center: [f64; 2],
        radius: f64,
    },
    UniformCircle {
        #[serde(default)]
        center: [f64; 2],
        radius: f64,
    },
    Atomic {
        atoms: Vec<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
    },
    Mixture {
        components: Vec<Component>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub weight: f64,
    #[serde(flatten)]
    pub measure: MeasureSpec,
}

fn point(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

impl MeasureSpec {
    pub fn build(&self) -> Result<RootMeasure, CliError> {
        let m = match self {
            Self::UniformDisk { center, radius } => RootMeasure::uniform_disk(point(*center), *radius),
            Self::UniformCircle { center, radius } => RootMeasure::uniform_circle(point(*center), *radius),
            Self::Atomic { atoms, weights: None } => {
                RootMeasure::uniform_atoms(&atoms.iter().copied().map(point).collect::<Vec<_>>())
            }
            Self::Atomic { atoms, weights: Some(w) } => {
                if w.len() != atoms.len() {
                    return Err(CliError::Config(format!("{} atoms but {} weights", atoms.len(), w.len())));
                }
                RootMeasure::atomic(atoms.iter().copied().map(point).zip(w.iter().copied()).collect())
            }
            Self::Mixture { components } => {
                let parts = components
                    .iter()
                    .map(|c| Ok((c.measure.build()?, c.weight)))
                    .collect::<Result<Vec<_>, CliError>>()?;
                RootMeasure::mixture(parts)
            }
        };
        m.map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Degrees {
    One(usize),
    Many(Vec<usize>),
}

impl Degrees {
    fn to_vec(&self) -> Vec<usize> {
        match self {
            Self::One(n) => vec![*n],
            Self::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub bounds: Option<[f64; 4]>,
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default = "default_margin")]
    pub margin: f64,
}

fn default_h() -> f64 {
    zerosum::limitlaw::DEFAULT_H
}

fn default_margin() -> f64 {
    zerosum::limitlaw::DEFAULT_MARGIN
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { bounds: None, h: default_h(), margin: default_margin() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpSpec {
    pub center: [f64; 2],
    pub radius: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
}

fn one() -> f64 {
    1.0
}

impl BumpSpec {
    pub fn build(&self) -> Result<BumpFunction, CliError> {
        BumpFunction::new(point(self.center), self.radius, self.amplitude).map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RootFindConfig {
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub restarts: Option<usize>,
    pub init_radius_factor: Option<f64>,
}

impl RootFindConfig {
    pub fn options(&self, seed: u64) -> Result<RootFindOptions, CliError> {
        let d = RootFindOptions::default();
        let opts = RootFindOptions {
            tol: self.tol.unwrap_or(d.tol),
            max_iters: self.max_iters.unwrap_or(d.max_iters),
            restarts: self.restarts.unwrap_or(d.restarts),
            init_radius_factor: self.init_radius_factor.unwrap_or(d.init_radius_factor),
            seed,
        };
        opts.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(opts)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    /// Weak integral of the configured (or `predict_measures`) potentials.
    #[default]
    Weak,
    /// Closed-form Cauchy reference for the pair of unit disks at ±1.
    Cauchy,
    /// Reference for atoms at {±1} against {±i}.
    Lines,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    #[serde(default)]
    pub reference: Reference,
    pub h: Option<f64>,
    pub predict_measures: Option<Vec<MeasureSpec>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionSpec {
    Rect { bounds: [f64; 4] },
    Disk { center: [f64; 2], radius: f64 },
    Annulus { center: [f64; 2], inner: f64, outer: f64 },
}

impl RegionSpec {
    pub fn build(&self) -> ProbeRegion {
        match self {
            Self::Rect { bounds: b } => ProbeRegion::rect(b[0], b[1], b[2], b[3]),
            Self::Disk { center, radius } => ProbeRegion::Disk { center: point(*center), radius: *radius },
            Self::Annulus { center, inner, outer } => {
                ProbeRegion::Annulus { center: point(*center), inner: *inner, outer: *outer }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnoseConfig {
    pub probe: Option<RegionSpec>,
    pub k: Option<[f64; 4]>,
    #[serde(default = "default_h")]
    pub gap_h: f64,
    pub trials: Option<usize>,
}

impl Default for DiagnoseConfig {
    fn default() -> Self {
        Self { probe: None, k: None, gap_h: default_h(), trials: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "default_cot_n")]
    pub cot_n: usize,
    #[serde(default = "default_modulus_n")]
    pub modulus_n: usize,
    #[serde(default = "default_walsh_instances")]
    pub walsh_instances: usize,
}

fn default_cot_n() -> usize {
    100
}
fn default_modulus_n() -> usize {
    64
}
fn default_walsh_instances() -> usize {
    100
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { cot_n: default_cot_n(), modulus_n: default_modulus_n(), walsh_instances: default_walsh_instances() }
    }
}

/// The file as written. See [`Experiment`] for the resolved form.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: Option<u64>,
    pub m: Option<usize>,
    pub n: Option<Degrees>,
    pub trials: Option<usize>,
    #[serde(default)]
    pub measures: Vec<MeasureSpec>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub bumps: Vec<BumpSpec>,
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub rootfind: RootFindConfig,
    #[serde(default)]
    pub compare: CompareConfig,
    #[serde(default)]
    pub diagnose: DiagnoseConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub n: Option<Vec<usize>>,
    pub trials: Option<usize>,
    pub grid_h: Option<f64>,
}

/// Environment variable that overrides `output_dir` (but not `--out`).
pub const OUT_DIR_ENV: &str = "ZEROSUM_OUT_DIR";

/// A config with overrides applied and defaults filled in. Its JSON form
/// (which excludes the output directory) is what the config hash covers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Experiment {
    pub seed: u64,
    pub n: Vec<usize>,
    pub trials: usize,
    pub measures: Vec<MeasureSpec>,
    pub grid: GridConfig,
    pub bumps: Vec<BumpSpec>,
    pub rootfind: RootFindConfig,
    pub compare: CompareConfig,
    pub diagnose: DiagnoseConfig,
    pub verify: VerifyConfig,
    #[serde(skip)]
    pub output_dir: PathBuf,
}

impl Experiment {
    pub fn resolve(cfg: ExperimentConfig, o: &Overrides, env_out: Option<PathBuf>) -> Result<Self, CliError> {
        let seed = o
            .seed
            .or(cfg.seed)
            .ok_or_else(|| CliError::Config("a seed is required (config `seed` or --seed)".into()))?;
        if let Some(m) = cfg.m {
            if m != cfg.measures.len() {
                return Err(CliError::Config(format!("m = {m} but {} measures are listed", cfg.measures.len())));
            }
        }
        let n = o.n.clone().or_else(|| cfg.n.as_ref().map(Degrees::to_vec)).unwrap_or_default();
        if let Some(bad) = n.iter().find(|&&n| n < 2) {
            return Err(CliError::Config(format!("every n must be >= 2, got {bad}")));
        }
        let trials = o.trials.or(cfg.trials).unwrap_or(1);
        if trials == 0 {
            return Err(CliError::Config("trials must be positive".into()));
        }
        let mut grid = cfg.grid;
        if let Some(h) = o.grid_h {
            grid.h = h;
        }
        if !(grid.h > 0.0 && grid.h.is_finite()) {
            return Err(CliError::Config(format!("grid.h must be positive, got {}", grid.h)));
        }
        let output_dir = o.out.clone().or(env_out).or(cfg.output_dir).unwrap_or_else(|| PathBuf::from("out"));
        let exp = Self {
            seed,
            n,
            trials,
            measures: cfg.measures,
            grid,
            bumps: cfg.bumps,
            rootfind: cfg.rootfind,
            compare: cfg.compare,
            diagnose: cfg.diagnose,
            verify: cfg.verify,
            output_dir,
        };
        exp.root_measures()?;
        exp.rootfind_options()?;
        exp.bump_functions()?;
        Ok(exp)
    }

    pub fn root_measures(&self) -> Result<Vec<RootMeasure>, CliError> {
        self.measures.iter().map(MeasureSpec::build).collect()
    }

    pub fn bump_functions(&self) -> Result<Vec<BumpFunction>, CliError> {
        self.bumps.iter().map(BumpSpec::build).collect()
    }

    pub fn rootfind_options(&self) -> Result<RootFindOptions, CliError> {
        self.rootfind.options(self.seed)
    }

    pub fn require_measures(&self) -> Result<Vec<RootMeasure>, CliError> {
        if self.measures.is_empty() {
            return Err(CliError::Config("at least one measure is required".into()));
        }
        self.root_measures()
    }

    pub fn require_degrees(&self) -> Result<&[usize], CliError> {
        if self.n.is_empty() {
            return Err(CliError::Config("n is required (config `n` or --n)".into()));
        }
        Ok(&self.n)
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }
}
