//! Python bindings: run experiments from JSON configs and probe single fibers.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use microlocal::asymptotics::{localized_fiber, EpsilonSchedule, FiberOptions};
use microlocal::cli::{self, config, registry, report, ExperimentConfig, Failure};

fn to_py(f: Failure) -> PyErr {
    match f {
        Failure::Config(m) => PyValueError::new_err(m),
        Failure::Numerical(m) => PyRuntimeError::new_err(m),
        Failure::Io(m) => PyOSError::new_err(m),
    }
}

fn config_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Names accepted by `example_config`.
#[pyfunction]
fn list_experiments() -> Vec<&'static str> {
    registry::REGISTRY.iter().filter(|e| e.listed).map(|e| e.name).collect()
}

/// The default experiment config for `name` as JSON, with optional
/// parameter overrides.
#[pyfunction]
#[pyo3(signature = (name, params = None))]
fn example_config(name: &str, params: Option<BTreeMap<String, f64>>) -> PyResult<String> {
    let cfg = registry::default_experiment(name, params.unwrap_or_default()).map_err(config_err)?;
    serde_json::to_string_pretty(&cfg).map_err(config_err)
}

/// Run an experiment config (JSON text) and return the report as JSON text,
/// byte-identical to what the CLI writes.
#[pyfunction]
fn run_experiment(py: Python<'_>, config_json: &str) -> PyResult<String> {
    let cfg: ExperimentConfig = serde_json::from_str(config_json).map_err(config_err)?;
    let out = py.detach(|| cli::run_experiment(&cfg)).map_err(to_py)?;
    String::from_utf8(report::to_json_bytes(&out.report)).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// `Σ_x` of the net named by `net` (e.g. `"delta_pow:m=2"`) at one point.
#[pyfunction]
#[pyo3(signature = (net, x, target = "c0", delta = 0.1))]
fn fiber<'py>(py: Python<'py>, net: &str, x: Vec<f64>, target: &str, delta: f64) -> PyResult<Bound<'py, PyDict>> {
    let spec = registry::parse_net_spec(net).map_err(config_err)?;
    let u = registry::build_net(&spec).map_err(config_err)?;
    let target = config::parse_target(target).map_err(config_err)?;
    let f = py
        .detach(|| localized_fiber(&u, &x, target, &EpsilonSchedule::default(), delta, &FiberOptions::default()))
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let d = PyDict::new(py);
    d.set_item("R", f.r)?;
    d.set_item("endpoint", f.endpoint.as_str())?;
    d.set_item("classification", f.classification.as_str())?;
    d.set_item("residual", f.residual)?;
    d.set_item("radius", f.radius)?;
    d.set_item("contains_R", f.contains_endpoint())?;
    Ok(d)
}

#[pymodule]
fn microlocal_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SCHEMA_VERSION", report::SCHEMA_VERSION)?;
    m.add_function(wrap_pyfunction!(list_experiments, m)?)?;
    m.add_function(wrap_pyfunction!(example_config, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(fiber, m)?)?;
    Ok(())
}
