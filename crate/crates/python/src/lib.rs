//! Python bindings: problem-file analysis, raw prefixes and the Fano
//! threefold table. Reports cross the boundary as JSON strings.

use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use splitorder::cli::{cmd_analyze, ProblemFile, RunOptions};
use splitorder::polyring::{parse_poly, RingSpec};
use splitorder::splitting::{splitting_prefix as prefix, SplitLimits};
use splitorder::verdicts;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Verdict report for a problem file given as text, as a JSON string.
#[pyfunction]
#[pyo3(signature = (text, n_max=None, allow_ill_formed=false))]
fn analyze(py: Python<'_>, text: &str, n_max: Option<usize>, allow_ill_formed: bool) -> PyResult<String> {
    let problem = ProblemFile::parse(text).map_err(value_error)?;
    let opts = RunOptions { n_max, ceiling: None, allow_ill_formed };
    let rep = py.detach(|| cmd_analyze(&problem, &opts)).map_err(value_error)?;
    serde_json::to_string(&rep).map_err(value_error)
}

/// `(s_1, ..., s_n)` and whether every entry stayed below `p`.
#[pyfunction]
#[pyo3(signature = (p, weights, f, n_max, e=2))]
fn splitting_prefix(
    py: Python<'_>,
    p: u64,
    weights: Vec<u64>,
    f: &str,
    n_max: usize,
    e: u32,
) -> PyResult<(Vec<u64>, bool)> {
    let ring = Arc::new(RingSpec::new(p, e, weights).map_err(value_error)?);
    let f = parse_poly(f, ring).map_err(value_error)?;
    let pre = py.detach(|| prefix(&f, n_max, SplitLimits::default())).map_err(value_error)?;
    Ok((pre.s, pre.bounded))
}

/// Whether `(weights, d)` is a row of the Fano threefold table.
#[pyfunction]
fn classify_fano_threefold(weights: Vec<u64>, d: u64) -> PyResult<bool> {
    Ok(verdicts::classify_fano_threefold(&weights, d).map_err(value_error)?.is_some())
}

#[pyfunction]
fn version() -> &'static str {
    verdicts::VERSION
}

#[pymodule]
fn splitorder_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(splitting_prefix, m)?)?;
    m.add_function(wrap_pyfunction!(classify_fano_threefold, m)?)?;
    m.add_function(wrap_pyfunction!(version, m)?)?;
    Ok(())
}
