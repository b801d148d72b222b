//! Python bindings: detectors, pairs, the reduced observables, sweeps and the
//! oracle suite.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use udw_harvest as core;
use udw_harvest::sweep::{emit_table, run_oracle_suite, thread_pool, OracleGrid, TableFormat};
use udw_harvest::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Config(_) | Error::Domain { .. } | Error::Json(_) | Error::Io { .. } => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(format!("{} ({})", e, e.code())),
    }
}

#[pyclass(frozen, name = "CircularDetector", from_py_object)]
#[derive(Clone, Copy)]
struct PyDetector(core::CircularDetector);

#[pymethods]
impl PyDetector {
    #[new]
    fn new(energy_gap: f64, accel: f64, radius: f64) -> PyResult<Self> {
        core::CircularDetector::new(energy_gap, accel, radius).map(Self).map_err(to_py)
    }

    fn with_gap(&self, energy_gap: f64) -> PyResult<Self> {
        self.0.with_gap(energy_gap).map(Self).map_err(to_py)
    }

    #[getter]
    fn energy_gap(&self) -> f64 {
        self.0.energy_gap()
    }
    #[getter]
    fn accel(&self) -> f64 {
        self.0.accel()
    }
    #[getter]
    fn radius(&self) -> f64 {
        self.0.radius()
    }
    #[getter]
    fn omega(&self) -> f64 {
        self.0.omega()
    }
    #[getter]
    fn speed(&self) -> f64 {
        self.0.speed()
    }
    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma()
    }

    fn __repr__(&self) -> String {
        format!(
            "CircularDetector(energy_gap={}, accel={}, radius={})",
            self.0.energy_gap(),
            self.0.accel(),
            self.0.radius()
        )
    }
}

/// Detector A at `boundary_distance` (None: no mirror), B at `boundary_distance + sep`.
#[pyclass(frozen, name = "PairConfig", from_py_object)]
#[derive(Clone)]
struct PyPair(core::PairConfig);

#[pymethods]
impl PyPair {
    #[new]
    #[pyo3(signature = (det_a, det_b, sep, boundary_distance=None))]
    fn new(det_a: PyDetector, det_b: PyDetector, sep: f64, boundary_distance: Option<f64>) -> PyResult<Self> {
        core::PairConfig::new(det_a.0, det_b.0, boundary_distance, sep)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn det_a(&self) -> PyDetector {
        PyDetector(*self.0.det_a())
    }
    #[getter]
    fn det_b(&self) -> PyDetector {
        PyDetector(*self.0.det_b())
    }
    #[getter]
    fn sep(&self) -> f64 {
        self.0.sep()
    }
    #[getter]
    fn boundary_distance(&self) -> Option<f64> {
        self.0.dz()
    }

    fn __repr__(&self) -> String {
        format!(
            "PairConfig(det_a={}, det_b={}, sep={}, boundary_distance={:?})",
            self.det_a().__repr__(),
            self.det_b().__repr__(),
            self.0.sep(),
            self.0.dz()
        )
    }
}

/// Transition probability in units of the squared coupling.
#[pyfunction]
#[pyo3(signature = (det, boundary_distance=None, tol=1e-9))]
fn transition_probability(det: PyDetector, boundary_distance: Option<f64>, tol: f64) -> PyResult<f64> {
    core::infomeasure::response_with_error(&det.0, boundary_distance, tol)
        .map(|(p, _)| p)
        .map_err(to_py)
}

/// The four pieces of the near-mirror transition probability.
#[pyfunction]
#[pyo3(signature = (det, boundary_distance, tol=1e-9))]
fn response_breakdown<'py>(
    py: Python<'py>,
    det: PyDetector,
    boundary_distance: f64,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let b = core::transition_probability(&det.0, boundary_distance, tol).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("bounded", b.term_bounded)?;
    d.set_item("principal_value", b.term_pv)?;
    d.set_item("inertial", b.term_inertial)?;
    d.set_item("pole", b.term_pole)?;
    d.set_item("total", b.total)?;
    d.set_item("error_estimate", b.error_estimate)?;
    d.set_item("pole_s", b.pole_s)?;
    Ok(d)
}

fn correlation_dict<'py>(py: Python<'py>, c: &core::CorrelationResult) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("c", c.c_total)?;
    d.set_item("c_free", c.c_free)?;
    d.set_item("c_boundary", c.c_boundary)?;
    d.set_item("error_estimate", c.error_estimate)?;
    Ok(d)
}

/// `C = C1 - C2` with its free and mirror parts.
#[pyfunction]
#[pyo3(signature = (pair, tol=1e-9))]
fn correlation<'py>(py: Python<'py>, pair: PyPair, tol: f64) -> PyResult<Bound<'py, PyDict>> {
    let c = core::correlation(&pair.0, tol).map_err(to_py)?;
    correlation_dict(py, &c)
}

/// Mutual information of the block built from `p_a`, `p_b` and `c`.
#[pyfunction]
fn mutual_information<'py>(py: Python<'py>, p_a: f64, p_b: f64, c: Complex64) -> PyResult<Bound<'py, PyDict>> {
    let block = core::assemble_density_block(p_a, p_b, c).map_err(to_py)?;
    let mi = core::mutual_information(&block).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("l_plus", mi.l_plus)?;
    d.set_item("l_minus", mi.l_minus)?;
    d.set_item("mutual_info", mi.mutual_info)?;
    d.set_item("slack", mi.positivity_slack)?;
    Ok(d)
}

/// Probabilities, correlation and mutual information at one point.
#[pyfunction]
#[pyo3(signature = (pair, tol=1e-9, coupling=1.0))]
fn harvest<'py>(py: Python<'py>, pair: PyPair, tol: f64, coupling: f64) -> PyResult<Bound<'py, PyDict>> {
    let h = py
        .detach(|| core::infomeasure::mutual_information_point_with(&pair.0, tol, coupling))
        .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("p_a", h.p_a)?;
    d.set_item("p_b", h.p_b)?;
    d.set_item("correlation", correlation_dict(py, &h.correlation)?)?;
    d.set_item("l_plus", h.mi.l_plus)?;
    d.set_item("l_minus", h.mi.l_minus)?;
    d.set_item("mutual_info", h.mi.mutual_info)?;
    d.set_item("slack", h.block.positivity_slack)?;
    d.set_item("error_estimate", h.error_estimate)?;
    d.set_item("warnings", h.warnings)?;
    Ok(d)
}

/// Runs a sweep from its JSON config text; returns the table as CSV or JSON text.
#[pyfunction]
#[pyo3(signature = (config, format="csv", workers=1))]
fn run_sweep(py: Python<'_>, config: &str, format: &str, workers: usize) -> PyResult<String> {
    let spec = core::SweepSpec::from_json(config).map_err(to_py)?;
    let format: TableFormat = format.parse().map_err(to_py)?;
    let rows = py
        .detach(|| core::run_sweep_with_workers(&spec, workers))
        .map_err(to_py)?;
    let mut out = Vec::new();
    emit_table(&rows, format, &mut out).map_err(to_py)?;
    String::from_utf8(out).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Oracle suite over a JSON grid (the standard grid when None); returns the
/// JSON report.
#[pyfunction]
#[pyo3(signature = (grid=None, workers=1))]
fn verify(py: Python<'_>, grid: Option<&str>, workers: usize) -> PyResult<String> {
    let grid = match grid {
        Some(text) => OracleGrid::from_json(text).map_err(to_py)?,
        None => OracleGrid::standard(),
    };
    let pool = thread_pool(workers).map_err(to_py)?;
    let report = py.detach(|| pool.install(|| run_oracle_suite(&grid)));
    serde_json::to_string_pretty(&report).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pymodule]
fn udw_harvest_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDetector>()?;
    m.add_class::<PyPair>()?;
    m.add_function(wrap_pyfunction!(transition_probability, m)?)?;
    m.add_function(wrap_pyfunction!(response_breakdown, m)?)?;
    m.add_function(wrap_pyfunction!(correlation, m)?)?;
    m.add_function(wrap_pyfunction!(mutual_information, m)?)?;
    m.add_function(wrap_pyfunction!(harvest, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
