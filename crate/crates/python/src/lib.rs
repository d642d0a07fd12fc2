//! Python module `pyzerosum`: measures, root finding, limit-measure
//! prediction and the Monte-Carlo estimators. Complex numbers cross the
//! boundary as Python `complex`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use zerosum::limitlaw::{self, grid_around_bump};
use zerosum::rootfinder::{self, RootFindOptions, RootFindReport};
use zerosum::stats::{self, EmpiricalMeasure, ProbeRegion, TrialMeta};
use zerosum::{BumpFunction, GridSpec, PolySum, RootMeasure, C64};

fn err(e: zerosum::Error) -> PyErr {
    match e {
        zerosum::Error::DidNotConverge { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

#[pyclass(name = "RootMeasure", module = "pyzerosum", frozen, from_py_object)]
#[derive(Clone)]
struct PyRootMeasure {
    inner: RootMeasure,
}

#[pymethods]
impl PyRootMeasure {
    #[staticmethod]
    fn uniform_disk(center: C64, radius: f64) -> PyResult<Self> {
        Ok(Self { inner: RootMeasure::uniform_disk(center, radius).map_err(err)? })
    }

    #[staticmethod]
    fn uniform_circle(center: C64, radius: f64) -> PyResult<Self> {
        Ok(Self { inner: RootMeasure::uniform_circle(center, radius).map_err(err)? })
    }

    /// `atoms` is a list of `(point, weight)` pairs with weights summing to 1.
    #[staticmethod]
    fn atomic(atoms: Vec<(C64, f64)>) -> PyResult<Self> {
        Ok(Self { inner: RootMeasure::atomic(atoms).map_err(err)? })
    }

    #[staticmethod]
    fn uniform_atoms(points: Vec<C64>) -> PyResult<Self> {
        Ok(Self { inner: RootMeasure::uniform_atoms(&points).map_err(err)? })
    }

    #[staticmethod]
    fn point_mass(at: C64) -> Self {
        Self { inner: RootMeasure::point_mass(at) }
    }

    /// `components` is a list of `(RootMeasure, weight)` pairs.
    #[staticmethod]
    fn mixture(components: Vec<(PyRootMeasure, f64)>) -> PyResult<Self> {
        let parts = components.into_iter().map(|(m, w)| (m.inner, w)).collect();
        Ok(Self { inner: RootMeasure::mixture(parts).map_err(err)? })
    }

    #[getter]
    fn support_radius(&self) -> f64 {
        self.inner.support_radius()
    }

    fn potential(&self, z: C64) -> f64 {
        self.inner.potential(z)
    }

    /// `n` points from stream `(seed, trial)`.
    #[pyo3(signature = (n, seed, trial = 0))]
    fn sample(&self, n: usize, seed: u64, trial: u64) -> Vec<C64> {
        self.inner.sample(n, &mut zerosum::rng::trial_rng(seed, trial))
    }

    fn __repr__(&self) -> String {
        format!("RootMeasure({})", self.inner.label())
    }
}

#[pyclass(name = "BumpFunction", module = "pyzerosum", frozen, from_py_object)]
#[derive(Clone)]
struct PyBump {
    inner: BumpFunction,
}

#[pymethods]
impl PyBump {
    #[new]
    #[pyo3(signature = (center, radius, amplitude = 1.0))]
    fn new(center: C64, radius: f64, amplitude: f64) -> PyResult<Self> {
        Ok(Self { inner: BumpFunction::new(center, radius, amplitude).map_err(err)? })
    }

    #[getter]
    fn center(&self) -> C64 {
        self.inner.center
    }

    #[getter]
    fn radius(&self) -> f64 {
        self.inner.radius
    }

    #[getter]
    fn amplitude(&self) -> f64 {
        self.inner.amplitude
    }

    fn __call__(&self, z: C64) -> f64 {
        self.inner.eval(z)
    }

    fn laplacian(&self, z: C64) -> f64 {
        self.inner.laplacian(z)
    }

    fn __repr__(&self) -> String {
        let b = &self.inner;
        format!("BumpFunction(center={}, radius={}, amplitude={})", b.center, b.radius, b.amplitude)
    }
}

/// `Σ_k Π_j (z - r_kj)` from `m` equal-length root lists.
#[pyclass(name = "PolySum", module = "pyzerosum", frozen, from_py_object)]
#[derive(Clone)]
struct PyPolySum {
    inner: PolySum,
}

#[pymethods]
impl PyPolySum {
    #[new]
    fn new(root_lists: Vec<Vec<C64>>) -> PyResult<Self> {
        Ok(Self { inner: PolySum::from_root_lists(root_lists).map_err(err)? })
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    #[getter]
    fn num_parts(&self) -> usize {
        self.inner.num_parts()
    }

    /// `(mantissa, log_scale)` with `S(z) = mantissa · exp(log_scale)`.
    fn eval(&self, z: C64) -> (C64, f64) {
        self.inner.sum_eval(z)
    }

    fn newton_ratio(&self, z: C64) -> PyResult<C64> {
        self.inner.sum_newton_ratio(z).map_err(err)
    }
}

#[pyclass(name = "RootFindReport", module = "pyzerosum", frozen, get_all, from_py_object)]
#[derive(Clone)]
struct PyReport {
    roots: Vec<C64>,
    iterations: usize,
    max_newton_correction: f64,
    residual_ok: bool,
    walsh_radius: f64,
    tol: f64,
}

impl From<RootFindReport> for PyReport {
    fn from(r: RootFindReport) -> Self {
        Self {
            roots: r.roots,
            iterations: r.iterations,
            max_newton_correction: r.max_newton_correction,
            residual_ok: r.residual_ok,
            walsh_radius: r.walsh_radius,
            tol: r.tol,
        }
    }
}

#[pyfunction]
fn walsh_bound(sum: PyPolySum) -> PyResult<f64> {
    rootfinder::walsh_bound(&sum.inner).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (sum, tol = 1e-12, max_iters = 500, restarts = 3, init_radius_factor = 1.5, seed = 0x5eed))]
fn find_roots(
    py: Python<'_>,
    sum: PyPolySum,
    tol: f64,
    max_iters: usize,
    restarts: usize,
    init_radius_factor: f64,
    seed: u64,
) -> PyResult<PyReport> {
    let opts = RootFindOptions { tol, max_iters, restarts, init_radius_factor, seed };
    py.detach(|| rootfinder::find_roots(&sum.inner, &opts)).map(PyReport::from).map_err(err)
}

/// Checks candidate zeros: Newton test at `tol`, Walsh containment and
/// reconstruction of `S` at probe points.
#[pyfunction]
#[pyo3(signature = (sum, roots, tol = 1e-12))]
fn certify(sum: PyPolySum, roots: Vec<C64>, tol: f64) -> bool {
    rootfinder::certify(&sum.inner, &RootFindReport::from_roots(&sum.inner, roots, tol))
}

fn unwrap_measures(measures: Vec<PyRootMeasure>) -> Vec<RootMeasure> {
    measures.into_iter().map(|m| m.inner).collect()
}

/// One instance on stream `(seed, trial)`: `(component root lists, zeros, certified)`.
#[pyfunction]
#[pyo3(signature = (measures, n, seed, trial = 0))]
fn simulate(
    py: Python<'_>,
    measures: Vec<PyRootMeasure>,
    n: usize,
    seed: u64,
    trial: u64,
) -> PyResult<(Vec<Vec<C64>>, Vec<C64>, bool)> {
    let ms = unwrap_measures(measures);
    let inst = py.detach(|| stats::simulate_instance(&ms, n, seed, trial, &RootFindOptions::default())).map_err(err)?;
    let parts = inst.sum.parts().iter().map(|p| p.roots().to_vec()).collect();
    Ok((parts, inst.report.roots, inst.certified))
}

/// `(1/2π) ∫ Δφ · max_k U_k` on a lattice grid of spacing `h` around the bump.
#[pyfunction]
#[pyo3(signature = (measures, bump, h = limitlaw::DEFAULT_H))]
fn weak_integral(py: Python<'_>, measures: Vec<PyRootMeasure>, bump: PyBump, h: f64) -> PyResult<f64> {
    let ms = unwrap_measures(measures);
    py.detach(|| {
        let grid = grid_around_bump(&bump.inner, h)?;
        limitlaw::weak_integral(&ms, &bump.inner, &grid)
    })
    .map_err(err)
}

#[pyfunction]
fn cauchy_reference(bump: PyBump) -> f64 {
    limitlaw::cauchy_reference(&bump.inner)
}

#[pyfunction]
fn lines_reference(py: Python<'_>, bump: PyBump) -> PyResult<f64> {
    py.detach(|| limitlaw::lines_reference(&bump.inner)).map_err(err)
}

/// Cell masses on `bounds = (x_min, x_max, y_min, y_max)` at spacing `h`.
/// Returns a dict with the grid header, the row-major `values` (NaN where
/// masked) and the mass summary.
#[pyfunction]
fn grid_density<'py>(
    py: Python<'py>,
    measures: Vec<PyRootMeasure>,
    bounds: (f64, f64, f64, f64),
    h: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let ms = unwrap_measures(measures);
    let d = py
        .detach(|| {
            let spec = GridSpec::new(bounds.0, bounds.1, bounds.2, bounds.3, h)?;
            limitlaw::grid_density(&ms, &spec)
        })
        .map_err(err)?;
    let f = &d.field;
    let values: Vec<f64> = f.values.iter().zip(&f.mask).map(|(&v, &m)| if m { f64::NAN } else { v }).collect();
    let out = PyDict::new(py);
    out.set_item("x_min", f.spec.x_min)?;
    out.set_item("y_min", f.spec.y_min)?;
    out.set_item("h", f.spec.h)?;
    out.set_item("nx", f.nx)?;
    out.set_item("ny", f.ny)?;
    out.set_item("values", values)?;
    out.set_item("total_mass", d.total_mass)?;
    out.set_item("min_mass", d.min_mass)?;
    out.set_item("masked_cells", d.masked_cells)?;
    Ok(out)
}

fn empirical(points: Vec<C64>) -> EmpiricalMeasure {
    EmpiricalMeasure::new(points, TrialMeta { seed: 0, trial: 0, measures: Vec::new() })
}

#[pyfunction]
fn linear_statistic(points: Vec<C64>, bump: PyBump) -> f64 {
    stats::linear_statistic(&empirical(points), &bump.inner)
}

/// `(KS distance of the imaginary parts to the standard Cauchy law, max |Re z|)`.
#[pyfunction]
fn ks_distance_to_cauchy(points: Vec<C64>) -> (f64, f64) {
    let r = stats::ks_distance_to_cauchy(&empirical(points));
    (r.distance, r.max_abs_real)
}

/// A rectangle `(x_min, x_max, y_min, y_max)` or a disk `(center, radius)`.
#[derive(FromPyObject)]
enum Region {
    Rect((f64, f64, f64, f64)),
    Disk((C64, f64)),
}

impl Region {
    fn build(self) -> ProbeRegion {
        match self {
            Self::Rect((a, b, c, d)) => ProbeRegion::rect(a, b, c, d),
            Self::Disk((center, radius)) => ProbeRegion::Disk { center, radius },
        }
    }
}

/// `(estimate, stderr)` of `P(1/2 <= |p_n(Z)/q_n(Z)| <= 2)`.
#[pyfunction]
fn ratio_event_probability(
    py: Python<'_>,
    mu: PyRootMeasure,
    nu: PyRootMeasure,
    n: usize,
    region: Region,
    trials: usize,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let region = region.build();
    let e =
        py.detach(|| stats::ratio_event_probability(&mu.inner, &nu.inner, n, &region, trials, seed)).map_err(err)?;
    Ok((e.estimate, e.stderr))
}

/// Area of `{z ∈ K : |U_μ - U_ν| <= log²n/√n}` for a rectangle `K`.
#[pyfunction]
fn gap_set_measure(
    py: Python<'_>,
    mu: PyRootMeasure,
    nu: PyRootMeasure,
    k: (f64, f64, f64, f64),
    n: usize,
    h: f64,
) -> PyResult<f64> {
    let k = ProbeRegion::rect(k.0, k.1, k.2, k.3);
    py.detach(|| stats::gap_set_measure(&mu.inner, &nu.inner, &k, n, h)).map_err(err)
}

/// `(estimate, stderr)` of `E |(1/n) log|p_n(Z)| - U_μ(Z)|²`.
#[pyfunction]
fn concentration_second_moment(
    py: Python<'_>,
    mu: PyRootMeasure,
    k: Region,
    n: usize,
    trials: usize,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let k = k.build();
    let e = py.detach(|| stats::concentration_second_moment(&mu.inner, &k, n, trials, seed)).map_err(err)?;
    Ok((e.estimate, e.stderr))
}

#[pymodule]
fn pyzerosum(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", zerosum::VERSION)?;
    m.add_class::<PyRootMeasure>()?;
    m.add_class::<PyBump>()?;
    m.add_class::<PyPolySum>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(walsh_bound, m)?)?;
    m.add_function(wrap_pyfunction!(find_roots, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(weak_integral, m)?)?;
    m.add_function(wrap_pyfunction!(cauchy_reference, m)?)?;
    m.add_function(wrap_pyfunction!(lines_reference, m)?)?;
    m.add_function(wrap_pyfunction!(grid_density, m)?)?;
    m.add_function(wrap_pyfunction!(linear_statistic, m)?)?;
    m.add_function(wrap_pyfunction!(ks_distance_to_cauchy, m)?)?;
    m.add_function(wrap_pyfunction!(ratio_event_probability, m)?)?;
    m.add_function(wrap_pyfunction!(gap_set_measure, m)?)?;
    m.add_function(wrap_pyfunction!(concentration_second_moment, m)?)?;
    Ok(())
}
