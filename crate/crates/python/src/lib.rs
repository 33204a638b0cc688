//! Python bindings: plain functions returning ints, strings, lists and dicts.

use num_bigint::BigInt;
use pellrank::f2linalg::{self, Rational};
use pellrank::quadform::{self, NegPell, SolveOutcome};
use pellrank::scan::{self, ScanOptions};
use pellrank::{arith, model, redei, Error};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Invariant(_) | Error::CorruptCheckpoint(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    let cls = py.import("fractions")?.getattr("Fraction")?;
    cls.call1((r.numer().clone(), r.denom().clone()))
}

#[pyfunction]
fn jacobi(a: i64, n: i64) -> PyResult<i32> {
    arith::jacobi(a, n).map_err(py_err)
}

#[pyfunction]
fn kronecker(a: i64, n: i64) -> i32 {
    arith::kronecker(a, n)
}

/// "yes" or the first failed condition.
#[pyfunction]
fn in_family(d: u64, l: i64) -> PyResult<&'static str> {
    arith::in_family(d, l).map(|s| s.as_str()).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (d, l, max_digits = quadform::DEFAULT_MAX_DIGITS))]
fn solve<'py>(py: Python<'py>, d: u64, l: i64, max_digits: usize) -> PyResult<Bound<'py, PyDict>> {
    let out = quadform::solve_generalized_capped(d, l, Some(max_digits)).map_err(py_err)?;
    let dict = PyDict::new(py);
    dict.set_item("status", out.status())?;
    match out {
        SolveOutcome::NotInFamily(r) | SolveOutcome::QInsoluble(r) => dict.set_item("reason", r.as_str())?,
        SolveOutcome::Soluble(w) => dict.set_item("witness", w)?,
        SolveOutcome::Insoluble => {}
    }
    Ok(dict)
}

/// Fundamental solution of x² − d y² = −1, or None.
#[pyfunction]
fn negative_pell(d: u64) -> PyResult<Option<(BigInt, BigInt)>> {
    match quadform::negative_pell(d).map_err(py_err)? {
        NegPell::Yes(Some(w)) => Ok(Some(w)),
        NegPell::Yes(None) => Err(PyValueError::new_err("solution exceeds the digit cap")),
        NegPell::No => Ok(None),
    }
}

#[pyfunction]
fn class_group<'py>(py: Python<'py>, delta: i64) -> PyResult<Bound<'py, PyDict>> {
    let cg = quadform::narrow_class_group(delta).map_err(py_err)?;
    let dict = PyDict::new(py);
    dict.set_item("delta", cg.delta)?;
    dict.set_item("h_plus", cg.h_plus)?;
    dict.set_item("h", cg.h)?;
    dict.set_item("narrow", cg.narrow)?;
    dict.set_item("ordinary", cg.ordinary)?;
    dict.set_item("rk2plus", cg.rk2plus)?;
    dict.set_item("rk4plus", cg.rk4plus)?;
    dict.set_item("rk8plus", cg.rk8plus)?;
    dict.set_item("rk2ord", cg.rk2ord)?;
    dict.set_item("rk4ord", cg.rk4ord)?;
    dict.set_item("rk8ord", cg.rk8ord)?;
    dict.set_item("negative_pell", cg.negative_pell)?;
    Ok(dict)
}

#[pyfunction]
fn redei_matrix<'py>(py: Python<'py>, d: u64) -> PyResult<Bound<'py, PyDict>> {
    let p = redei::redei_matrix(d).map_err(py_err)?;
    let rows: Vec<Vec<u32>> = p
        .matrix
        .row_list()
        .into_iter()
        .map(|r| r.into_iter().map(u32::from).collect())
        .collect();
    let dict = PyDict::new(py);
    dict.set_item("primes", p.field.ramified_primes())?;
    dict.set_item("matrix", rows)?;
    dict.set_item("rk4", p.rk4)?;
    Ok(dict)
}

#[pyfunction]
fn redei_symbol(a: i64, b: i64, c: i64) -> PyResult<u8> {
    redei::redei_symbol(a, b, c).map_err(py_err)
}

#[pyfunction]
fn rank8(d: u64) -> PyResult<usize> {
    redei::rank8_via_symbols(d).map_err(py_err)
}

/// Model constants by name.
#[pyfunction]
#[pyo3(signature = (tol = 1e-12))]
fn constants<'py>(py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyDict>> {
    let dict = PyDict::new(py);
    for row in model::constants_table(tol).map_err(py_err)? {
        dict.set_item(row.name, row.value)?;
    }
    Ok(dict)
}

/// P(m, n, j) as a `fractions.Fraction`.
#[pyfunction]
fn prob_kernel_rank(py: Python<'_>, m: usize, n: usize, j: usize) -> PyResult<Bound<'_, PyAny>> {
    fraction(py, &f2linalg::prob_kernel_rank(m, n, j))
}

#[pyfunction]
fn g_exact(py: Python<'_>, n: usize, m: usize) -> PyResult<Bound<'_, PyAny>> {
    if m > n {
        return Err(PyValueError::new_err("g_exact needs m <= n"));
    }
    fraction(py, &f2linalg::g_exact(n, m))
}

/// Per i: (hits, events) of the simulated pairing experiment.
#[pyfunction]
fn simulate_tu(n: usize, trials: u64, seed: u64) -> PyResult<Vec<(u64, u64)>> {
    f2linalg::simulate_tu(n, trials, seed).map(|c| c.counts).map_err(py_err)
}

#[pyfunction]
fn enumerate_family(n: u64, l: i64) -> PyResult<Vec<u64>> {
    Ok(scan::enumerate_family(n, l).map_err(py_err)?.collect())
}

/// Run a scan and return its summary as a JSON string.
#[pyfunction]
#[pyo3(signature = (n, l, with_classgroup = false, workers = 1, out = None))]
fn scan_summary_json(
    py: Python<'_>,
    n: u64,
    l: i64,
    with_classgroup: bool,
    workers: usize,
    out: Option<std::path::PathBuf>,
) -> PyResult<String> {
    let opts = ScanOptions {
        with_classgroup,
        workers,
        out,
        keep_records: false,
        ..Default::default()
    };
    let res = py.detach(|| scan::scan(n, l, &opts)).map_err(py_err)?;
    Ok(res.summary.to_json().to_string())
}

#[pymodule]
fn pellrank_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(jacobi, m)?)?;
    m.add_function(wrap_pyfunction!(kronecker, m)?)?;
    m.add_function(wrap_pyfunction!(in_family, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(negative_pell, m)?)?;
    m.add_function(wrap_pyfunction!(class_group, m)?)?;
    m.add_function(wrap_pyfunction!(redei_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(redei_symbol, m)?)?;
    m.add_function(wrap_pyfunction!(rank8, m)?)?;
    m.add_function(wrap_pyfunction!(constants, m)?)?;
    m.add_function(wrap_pyfunction!(prob_kernel_rank, m)?)?;
    m.add_function(wrap_pyfunction!(g_exact, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_tu, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_family, m)?)?;
    m.add_function(wrap_pyfunction!(scan_summary_json, m)?)?;
    Ok(())
}
