//! Python bindings: states, stepping, runs, diagnostics and the acceptance
//! checks.

use std::path::PathBuf;

use hallmhd_core::diagnostics::{
    energy_functionals, hall_cancellation_residual, DiagnosticsOptions, DiagnosticsRecord,
    DiagnosticsTracker,
};
use hallmhd_core::integrate::{
    load_checkpoint, run, save_checkpoint, step_dt, DtMode, Scheme, StepperConfig,
};
use hallmhd_core::scenario::{generate_scenario, ScenarioName, ScenarioSpec};
use hallmhd_core::spectral::GridSpec;
use hallmhd_core::splitting::{
    beta_convolution_bound as beta_bound, log_times, verify_splitting_decay as splitting_decay,
    DEFAULT_FIT_WINDOW,
};
use hallmhd_core::{config::RunSpec, runner, verify, Error, MhdState, ModelTag};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidInput(_) | Error::Config(_) | Error::GridMismatch(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn parse<T: std::str::FromStr>(what: &str, text: &str) -> PyResult<T>
where
    T::Err: std::fmt::Display,
{
    text.parse()
        .map_err(|e| PyValueError::new_err(format!("{what}: {e}")))
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    use serde_json::Value;
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, json_to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn record_to_py<'py>(py: Python<'py>, r: &DiagnosticsRecord) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(r).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    json_to_py(py, &v)
}

/// Viscosity `nu`, resistivity `eta` and Hall parameter `hall`.
#[pyclass(name = "PhysParams", from_py_object)]
#[derive(Clone, Copy)]
struct PyPhysParams {
    inner: hallmhd_core::PhysParams,
}

#[pymethods]
impl PyPhysParams {
    #[new]
    #[pyo3(signature = (nu, eta, hall))]
    fn new(nu: f64, eta: f64, hall: f64) -> PyResult<Self> {
        let inner = hallmhd_core::PhysParams::new(nu, eta, hall).map_err(py_err)?;
        Ok(PyPhysParams { inner })
    }

    #[getter]
    fn nu(&self) -> f64 {
        self.inner.nu
    }

    #[getter]
    fn eta(&self) -> f64 {
        self.inner.eta
    }

    #[getter]
    fn hall(&self) -> f64 {
        self.inner.hall
    }

    fn __repr__(&self) -> String {
        format!(
            "PhysParams(nu={}, eta={}, hall={})",
            self.inner.nu, self.inner.eta, self.inner.hall
        )
    }
}

/// A model state: Fourier coefficients of every component plus the time.
#[pyclass(name = "State", from_py_object)]
#[derive(Clone)]
struct PyState {
    inner: MhdState,
}

#[pymethods]
impl PyState {
    /// Initial data of a named scenario on a `dim`-dimensional `n`-point grid.
    #[staticmethod]
    #[pyo3(signature = (scenario, model, dim, n, params, seed=0, amplitude=1.0))]
    fn scenario(
        scenario: &str,
        model: &str,
        dim: usize,
        n: usize,
        params: PyPhysParams,
        seed: u64,
        amplitude: f64,
    ) -> PyResult<Self> {
        let name: ScenarioName = parse("scenario", scenario)?;
        let tag: ModelTag = parse("model", model)?;
        let grid = GridSpec::new(dim, n).build().map_err(py_err)?;
        let spec = ScenarioSpec::new(name)
            .with_seed(seed)
            .with_amplitude(amplitude);
        let inner = generate_scenario(&spec, tag, &grid, &params.inner).map_err(py_err)?;
        Ok(PyState { inner })
    }

    /// Loads a checkpoint; returns `(state, params)`.
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<(Self, PyPhysParams)> {
        let ck = load_checkpoint(&path).map_err(py_err)?;
        Ok((
            PyState { inner: ck.state },
            PyPhysParams { inner: ck.params },
        ))
    }

    fn save(&self, path: PathBuf, params: PyPhysParams) -> PyResult<()> {
        save_checkpoint(&self.inner, &params.inner, &path).map_err(py_err)
    }

    #[getter]
    fn time(&self) -> f64 {
        self.inner.time
    }

    #[getter]
    fn model(&self) -> &'static str {
        self.inner.tag().as_str()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.grid().dim()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.grid().n()
    }

    fn component_names(&self) -> Vec<&'static str> {
        hallmhd_core::Fields::component_names(self.inner.tag()).to_vec()
    }

    /// Grid-point values of one component, flattened row-major.
    fn component(&self, name: &str) -> PyResult<Vec<f64>> {
        let names = hallmhd_core::Fields::component_names(self.inner.tag());
        let idx = names
            .iter()
            .position(|n| *n == name)
            .ok_or_else(|| PyValueError::new_err(format!("no component {name:?} in {names:?}")))?;
        Ok(self.inner.fields.components()[idx].to_physical())
    }

    /// `{"energy_u", "energy_b", "diss_u", "diss_b"}`: squared L² norms of the
    /// fields and of their gradients.
    fn energy<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let e = energy_functionals(&self.inner).map_err(py_err)?;
        let d = PyDict::new(py);
        d.set_item("energy_u", e.energy_u)?;
        d.set_item("energy_b", e.energy_b)?;
        d.set_item("diss_u", e.diss_u)?;
        d.set_item("diss_b", e.diss_b)?;
        Ok(d)
    }

    /// One integrating-factor Runge–Kutta step of size `dt`.
    #[pyo3(signature = (params, dt, scheme="if_rk4"))]
    fn step(&self, params: PyPhysParams, dt: f64, scheme: &str) -> PyResult<Self> {
        let cfg = StepperConfig {
            scheme: scheme_of(scheme)?,
            ..StepperConfig::default()
        };
        let inner = step_dt(&self.inner, &params.inner, &cfg, dt).map_err(py_err)?;
        Ok(PyState { inner })
    }

    fn __repr__(&self) -> String {
        format!(
            "State(model={}, dim={}, n={}, time={})",
            self.inner.tag(),
            self.inner.grid().dim(),
            self.inner.grid().n(),
            self.inner.time
        )
    }
}

fn scheme_of(text: &str) -> PyResult<Scheme> {
    match text {
        "if_rk4" => Ok(Scheme::IfRk4),
        "if_rk2" => Ok(Scheme::IfRk2),
        other => Err(PyValueError::new_err(format!(
            "scheme must be \"if_rk4\" or \"if_rk2\", got {other:?}"
        ))),
    }
}

/// Integrates to `t_end`, recording every `diag_interval`. Returns the final
/// state and the list of diagnostic records (dicts). `dt=None` selects the
/// CFL step.
#[pyfunction]
#[pyo3(name = "run", signature = (state, params, t_end, diag_interval, dt=None, scheme="if_rk4"))]
fn run_py<'py>(
    py: Python<'py>,
    state: &PyState,
    params: PyPhysParams,
    t_end: f64,
    diag_interval: f64,
    dt: Option<f64>,
    scheme: &str,
) -> PyResult<(PyState, Bound<'py, PyList>)> {
    let cfg = StepperConfig {
        scheme: scheme_of(scheme)?,
        dt: dt.map_or(DtMode::Auto, DtMode::Fixed),
        t_end,
        diag_interval,
        ..StepperConfig::default()
    };
    let mut tracker =
        DiagnosticsTracker::new(params.inner, DiagnosticsOptions::default()).map_err(py_err)?;
    let mut records: Vec<DiagnosticsRecord> = Vec::new();
    let out = run(
        &state.inner,
        &params.inner,
        &cfg,
        &mut tracker,
        &mut records,
    )
    .map_err(py_err)?;
    let list = PyList::empty(py);
    for r in &records {
        list.append(record_to_py(py, r)?)?;
    }
    Ok((PyState { inner: out.state }, list))
}

/// Relative residual of the Hall-term cancellation in the magneto-vorticity
/// equation.
#[pyfunction(name = "hall_cancellation_residual")]
fn hall_cancellation_residual_py(state: &PyState, params: PyPhysParams) -> PyResult<f64> {
    hall_cancellation_residual(&state.inner, &params.inner).map_err(py_err)
}

/// `∫₀¹ (1−s)^(−α) s^(−β) ds`.
#[pyfunction]
fn beta_convolution_bound(alpha: f64, beta: f64) -> PyResult<f64> {
    beta_bound(alpha, beta).map_err(py_err)
}

/// Fitted heat-decay exponent of the radial splitting surrogate; returns
/// `(fitted, expected)`.
#[pyfunction]
#[pyo3(signature = (sigma, nu=1.0, points=41))]
fn verify_splitting_decay(sigma: f64, nu: f64, points: usize) -> PyResult<(f64, f64)> {
    let t = log_times(DEFAULT_FIT_WINDOW, points).map_err(py_err)?;
    let d = splitting_decay(sigma, nu, &t).map_err(py_err)?;
    Ok((d.exponent, d.expected()))
}

/// Runs one acceptance criterion (`"A1"`..`"A11"`); returns
/// `(passed, line)`.
#[pyfunction]
fn run_criterion(id: &str) -> PyResult<(bool, String)> {
    let c = verify::criterion(id)
        .ok_or_else(|| PyValueError::new_err(format!("unknown criterion {id:?}")))?;
    let outcome = c.run();
    Ok((outcome.passed, outcome.line()))
}

/// Runs a TOML configuration file and returns its summary report as a dict
/// of strings.
#[pyfunction]
fn run_config<'py>(py: Python<'py>, path: PathBuf) -> PyResult<Bound<'py, PyDict>> {
    let spec = RunSpec::from_path(&path).map_err(py_err)?;
    let summary = runner::cmd_run(&spec).map_err(py_err)?;
    let d = PyDict::new(py);
    for (k, v) in &summary.report.entries {
        d.set_item(k, v)?;
    }
    Ok(d)
}

#[pymodule]
fn hallmhd(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPhysParams>()?;
    m.add_class::<PyState>()?;
    m.add_function(wrap_pyfunction!(run_py, m)?)?;
    m.add_function(wrap_pyfunction!(hall_cancellation_residual_py, m)?)?;
    m.add_function(wrap_pyfunction!(beta_convolution_bound, m)?)?;
    m.add_function(wrap_pyfunction!(verify_splitting_decay, m)?)?;
    m.add_function(wrap_pyfunction!(run_criterion, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}
