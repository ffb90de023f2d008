//! Python bindings: trigonometric polynomials, certificate checks, runs and
//! the randomized verification suites.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use thinfilm::config::RunConfig;
use thinfilm::harness::{self, CommandOptions, HarnessError};
use thinfilm::{NormOrder, SpectralError, TrigPoly};

fn spectral_err(e: SpectralError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn harness_err(e: HarnessError) -> PyErr {
    match e.exit_status().code() {
        2 => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn toml_to_py<'py>(py: Python<'py>, v: &toml::Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        toml::Value::String(s) => s.into_pyobject(py)?.into_any(),
        toml::Value::Integer(i) => i.into_pyobject(py)?.into_any(),
        toml::Value::Float(x) => x.into_pyobject(py)?.into_any(),
        toml::Value::Boolean(b) => b.into_pyobject(py)?.to_owned().into_any(),
        toml::Value::Datetime(d) => d.to_string().into_pyobject(py)?.into_any(),
        toml::Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(toml_to_py(py, item)?)?;
            }
            list.into_any()
        }
        toml::Value::Table(t) => table_to_py(py, t)?.into_any(),
    })
}

fn table_to_py<'py>(py: Python<'py>, t: &toml::Table) -> PyResult<Bound<'py, PyDict>> {
    let dict = PyDict::new(py);
    for (k, v) in t {
        dict.set_item(k, toml_to_py(py, v)?)?;
    }
    Ok(dict)
}

fn document_to_py<'py>(py: Python<'py>, doc: &str) -> PyResult<Bound<'py, PyDict>> {
    let table: toml::Table = doc
        .parse()
        .map_err(|e: toml::de::Error| PyRuntimeError::new_err(e.to_string()))?;
    table_to_py(py, &table)
}

fn parse_config(text: &str) -> PyResult<RunConfig> {
    RunConfig::from_toml_str(text).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Real trigonometric polynomial stored by its non-negative modes.
#[pyclass(name = "TrigPoly", module = "thinfilm_py", frozen, from_py_object)]
#[derive(Clone)]
struct PyTrigPoly(TrigPoly);

#[pymethods]
impl PyTrigPoly {
    /// Builds from `[û(0), û(1), …, û(K)]`; `û(0)` must be real.
    #[new]
    fn new(half_spectrum: Vec<Complex64>) -> PyResult<Self> {
        TrigPoly::from_half_spectrum(half_spectrum)
            .map(Self)
            .map_err(spectral_err)
    }

    #[staticmethod]
    fn zeros(bandwidth: usize) -> Self {
        Self(TrigPoly::zeros(bandwidth))
    }

    #[staticmethod]
    fn cosine(bandwidth: usize, k: usize, amplitude: f64) -> PyResult<Self> {
        TrigPoly::cosine(bandwidth, k, amplitude)
            .map(Self)
            .map_err(spectral_err)
    }

    #[staticmethod]
    fn sine(bandwidth: usize, k: usize, amplitude: f64) -> PyResult<Self> {
        TrigPoly::sine(bandwidth, k, amplitude)
            .map(Self)
            .map_err(spectral_err)
    }

    #[getter]
    fn bandwidth(&self) -> usize {
        self.0.bandwidth()
    }

    #[getter]
    fn mean(&self) -> f64 {
        self.0.mean()
    }

    fn coeff(&self, k: i64) -> Complex64 {
        self.0.coeff(k)
    }

    fn half_spectrum(&self) -> Vec<Complex64> {
        self.0.half_spectrum().to_vec()
    }

    fn wiener_norm(&self, order: f64) -> PyResult<f64> {
        NormOrder::new(order)
            .and_then(|s| self.0.wiener_norm(s))
            .map_err(spectral_err)
    }

    fn sobolev_norm(&self, order: f64) -> PyResult<f64> {
        NormOrder::new(order)
            .and_then(|s| self.0.sobolev_norm(s))
            .map_err(spectral_err)
    }

    fn l2_norm(&self) -> f64 {
        self.0.l2_norm()
    }

    fn sup_norm(&self) -> f64 {
        self.0.sup_norm()
    }

    fn derivative(&self, n: u32) -> Self {
        Self(self.0.derivative(n))
    }

    /// Exact product truncated to `|k| ≤ k_out` (default: full degree).
    #[pyo3(signature = (other, k_out = None))]
    fn product(&self, other: &Self, k_out: Option<usize>) -> Self {
        let k = k_out.unwrap_or(self.0.bandwidth() + other.0.bandwidth());
        Self(self.0.product(&other.0, k))
    }

    fn project(&self, k_max: usize) -> Self {
        Self(self.0.project(k_max))
    }

    fn eval(&self, x: f64) -> f64 {
        self.0.eval(x)
    }

    fn grid_values(&self, points: usize) -> PyResult<Vec<f64>> {
        self.0.grid_values(points).map_err(spectral_err)
    }

    fn __add__(&self, other: &Self) -> Self {
        Self(self.0.axpy(1.0, &other.0))
    }

    fn __sub__(&self, other: &Self) -> Self {
        Self(self.0.axpy(-1.0, &other.0))
    }

    fn __mul__(&self, factor: f64) -> Self {
        Self(self.0.scale(factor))
    }

    fn __rmul__(&self, factor: f64) -> Self {
        Self(self.0.scale(factor))
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("TrigPoly(bandwidth={}, mean={})", self.0.bandwidth(), self.0.mean())
    }
}

/// Certificate report for the initial datum of a TOML config string.
#[pyfunction]
#[pyo3(signature = (config, seed = None))]
fn check<'py>(py: Python<'py>, config: &str, seed: Option<u64>) -> PyResult<Bound<'py, PyDict>> {
    let cfg = parse_config(config)?;
    let opts = CommandOptions { seed, force: false };
    let out = harness::check(&cfg, &opts).map_err(harness_err)?;
    document_to_py(py, &out.report_document().map_err(harness_err)?)
}

/// Integrates a config and returns `(report, csv)`.
#[pyfunction]
#[pyo3(signature = (config, seed = None, force = false))]
fn run<'py>(
    py: Python<'py>,
    config: &str,
    seed: Option<u64>,
    force: bool,
) -> PyResult<(Bound<'py, PyDict>, String)> {
    let cfg = parse_config(config)?;
    let opts = CommandOptions { seed, force };
    let out = py
        .detach(|| harness::run(&cfg, &opts))
        .map_err(harness_err)?;
    let report = document_to_py(py, &out.report_document().map_err(harness_err)?)?;
    Ok((report, out.series.to_csv()))
}

/// Runs the randomized inequality and oracle suites.
#[pyfunction]
#[pyo3(signature = (seed = None))]
fn verify<'py>(py: Python<'py>, seed: Option<u64>) -> PyResult<Bound<'py, PyDict>> {
    let opts = CommandOptions { seed, force: false };
    let report = py.detach(|| harness::verify(&opts));
    let doc = harness::report_document("verify", report.passed(), &report).map_err(harness_err)?;
    document_to_py(py, &doc)
}

#[pymodule]
fn thinfilm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTrigPoly>()?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("SCHEMA_VERSION", harness::SCHEMA_VERSION)?;
    Ok(())
}
