//! Thin Python bindings. Reports cross the boundary as JSON strings.

use growthlab::growth::ball::{enumerate_ball, enumerate_closure, Caps, Closure};
use growthlab::growth::entropy::{entropy_report, DEFAULT_RESIDUAL_RATIO};
use growthlab::models::spec::load_group_spec;
use growthlab::spectra::default_tolerance;
use growthlab::spectra::screen::{virtual_nilpotency_screen, DEFAULT_ORDER_BUDGET};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn err(e: growthlab::Error) -> PyErr {
    match e {
        growthlab::Error::Parameter(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Cumulative ball sizes |B(0)|, ..., |B(radius)|.
#[pyfunction]
#[pyo3(signature = (spec, radius, cap_elements = None))]
fn ball_census(spec: &str, radius: usize, cap_elements: Option<usize>) -> PyResult<Vec<u64>> {
    let loaded = load_group_spec(spec).map_err(err)?;
    let caps = cap_elements.map(Caps::with_max_elements).unwrap_or_default();
    Ok(enumerate_ball(&loaded.model, radius, &caps).map_err(err)?.cumulative)
}

#[pyfunction]
fn entropy(spec: &str, radius: usize) -> PyResult<String> {
    let loaded = load_group_spec(spec).map_err(err)?;
    let census = enumerate_ball(&loaded.model, radius, &Caps::default()).map_err(err)?;
    json(&entropy_report(&census, DEFAULT_RESIDUAL_RATIO).map_err(err)?)
}

#[pyfunction]
fn screen(spec: &str) -> PyResult<String> {
    let loaded = load_group_spec(spec).map_err(err)?;
    json(&virtual_nilpotency_screen(&loaded.model, DEFAULT_ORDER_BUDGET, &default_tolerance()).map_err(err)?)
}

/// Order of the generated group, or None if `cap` elements were exceeded.
#[pyfunction]
fn closure_order(spec: &str, cap: usize) -> PyResult<Option<u64>> {
    let loaded = load_group_spec(spec).map_err(err)?;
    Ok(match enumerate_closure(&loaded.model, cap).map_err(err)? {
        Closure::Finite { order } => Some(order),
        Closure::CapExceeded { .. } => None,
    })
}

/// Runs the command-line tool with `args` (without the program name) and
/// returns its exit code.
#[pyfunction]
fn run_cli(args: Vec<String>) -> i32 {
    growthlab::cli::run(std::iter::once("growthlab".to_string()).chain(args))
}

#[pymodule]
fn growthlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(ball_census, m)?)?;
    m.add_function(wrap_pyfunction!(entropy, m)?)?;
    m.add_function(wrap_pyfunction!(screen, m)?)?;
    m.add_function(wrap_pyfunction!(closure_order, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
