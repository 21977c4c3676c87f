//! Python bindings: `import pycollatz`.

use num_bigint::BigUint;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use collatz_sieve::numeric::{self, default_max_steps, NumericError, RangeOptions};
use collatz_sieve::properties::PropertyId;
use collatz_sieve::reports::{self, TreeFormat};
use collatz_sieve::sieve::{self, NodeStatus, SieveBudget, SieveError};
use collatz_sieve::ResidueClass;

create_exception!(pycollatz, CollatzError, PyException);
create_exception!(pycollatz, BudgetExceeded, CollatzError);
create_exception!(pycollatz, MismatchFound, CollatzError);

fn numeric_err(e: NumericError) -> PyErr {
    match e {
        NumericError::BudgetExceeded { .. } => BudgetExceeded::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn sieve_err(e: SieveError) -> PyErr {
    match e {
        SieveError::Numeric(n) => numeric_err(n),
        SieveError::MismatchFound(_) => MismatchFound::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn other_err(e: impl std::fmt::Display) -> PyErr {
    CollatzError::new_err(e.to_string())
}

/// Route serde output through `json.loads` so results arrive as plain dicts.
fn to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(other_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn budget(max_steps: Option<u64>) -> u64 {
    max_steps.unwrap_or_else(default_max_steps)
}

#[pyfunction]
fn collatz_step(n: BigUint) -> BigUint {
    numeric::collatz_step(&n)
}

#[pyfunction]
#[pyo3(signature = (n, max_steps=None))]
fn trajectory(n: BigUint, max_steps: Option<u64>) -> PyResult<Vec<BigUint>> {
    numeric::trajectory(&n, budget(max_steps)).map_err(numeric_err)
}

#[pyfunction]
#[pyo3(signature = (n, max_steps=None))]
fn tso(n: BigUint, max_steps: Option<u64>) -> PyResult<u64> {
    numeric::tso(&n, budget(max_steps)).map_err(numeric_err)
}

/// `(order, term)` of the first drop below `n`.
#[pyfunction]
#[pyo3(signature = (n, max_steps=None))]
fn pso(n: BigUint, max_steps: Option<u64>) -> PyResult<(u64, BigUint)> {
    let p = numeric::pso(&n, budget(max_steps)).map_err(numeric_err)?;
    Ok((p.order, p.pst))
}

#[pyfunction]
#[pyo3(signature = (n, max_steps=None))]
fn peak(n: BigUint, max_steps: Option<u64>) -> PyResult<BigUint> {
    numeric::peak(&n, budget(max_steps)).map_err(numeric_err)
}

#[pyfunction]
#[pyo3(signature = (lo, hi, chunk=65536))]
fn verify_range<'py>(
    py: Python<'py>,
    lo: u64,
    hi: u64,
    chunk: usize,
) -> PyResult<Bound<'py, PyAny>> {
    if chunk == 0 {
        return Err(PyValueError::new_err("chunk must be positive"));
    }
    let opts = RangeOptions {
        chunk,
        ..RangeOptions::default()
    };
    let report = py
        .detach(|| numeric::verify_range(lo, hi, &opts))
        .map_err(numeric_err)?;
    to_py(py, &report)
}

/// Run property checks up to `limit`; `only` selects ids such as `"no-repeat"`.
#[pyfunction]
#[pyo3(signature = (limit, only=None))]
fn properties<'py>(
    py: Python<'py>,
    limit: u64,
    only: Option<Vec<String>>,
) -> PyResult<Bound<'py, PyAny>> {
    let ids = match only {
        None => PropertyId::ALL.to_vec(),
        Some(names) => names
            .iter()
            .map(|n| {
                PropertyId::from_name(n)
                    .ok_or_else(|| PyValueError::new_err(format!("unknown property {n:?}")))
            })
            .collect::<PyResult<_>>()?,
    };
    let reports = py
        .detach(|| {
            ids.iter()
                .map(|p| p.check(limit))
                .collect::<Result<Vec<_>, _>>()
        })
        .map_err(numeric_err)?;
    to_py(py, &reports)
}

/// `(n, pso, tso)` rows as CSV text, with `NA` for the PSO of 1.
#[pyfunction]
fn table_summary(lo: u64, hi: u64) -> PyResult<String> {
    let doc = reports::table_summary(lo, hi).map_err(numeric_err)?;
    doc.to_csv().map_err(other_err)
}

/// PSO counts of `modulus*x + remainder` over `x_lo..=x_hi`: `{pso: count}`.
#[pyfunction]
#[pyo3(signature = (modulus, remainder, x_lo, x_hi, parity="all"))]
fn pso_histogram(
    modulus: BigUint,
    remainder: BigUint,
    x_lo: u64,
    x_hi: u64,
    parity: &str,
) -> PyResult<std::collections::BTreeMap<u64, u64>> {
    let class =
        ResidueClass::new(modulus, remainder).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let filter = parity.parse().map_err(PyValueError::new_err)?;
    let hist = reports::pso_histogram(&class, x_lo, x_hi, filter).map_err(numeric_err)?;
    Ok(hist.counts())
}

/// Explored tree of one residue class.
#[pyclass(frozen, name = "SieveResult")]
struct PySieveResult {
    inner: sieve::SieveResult,
}

#[pymethods]
impl PySieveResult {
    #[getter]
    fn root(&self) -> (BigUint, BigUint) {
        (
            self.inner.root.modulus().clone(),
            self.inner.root.remainder().clone(),
        )
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.nodes.len()
    }

    /// One dict per leaf: modulus, remainder, step, status and pso.
    fn leaves<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.inner
            .leaves()
            .map(|leaf| {
                let d = PyDict::new(py);
                d.set_item("modulus", leaf.class.modulus().clone())?;
                d.set_item("remainder", leaf.class.remainder().clone())?;
                d.set_item("step", leaf.step)?;
                let status = match &leaf.status {
                    NodeStatus::Terminal { .. } => "terminal",
                    NodeStatus::EventuallyTerminal { .. } => "eventually_terminal",
                    NodeStatus::Exhausted(_) => "exhausted",
                    NodeStatus::Split => unreachable!(),
                };
                d.set_item("status", status)?;
                d.set_item("pso", leaf.status.pso())?;
                Ok(d)
            })
            .collect()
    }

    /// Classified density relative to the root, as a `fractions.Fraction`.
    fn coverage<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let ledger = sieve::coverage(
            &self.inner,
            &num_rational::BigRational::from_integer(1.into()),
        );
        let fraction = py.import("fractions")?.getattr("Fraction")?;
        fraction.call1((
            ledger.terminal.numer().clone(),
            ledger.terminal.denom().clone(),
        ))
    }

    #[pyo3(signature = (samples=100))]
    fn cross_check<'py>(&self, py: Python<'py>, samples: usize) -> PyResult<Bound<'py, PyDict>> {
        let report = py
            .detach(|| sieve::leaf_cross_check(&self.inner, samples))
            .map_err(sieve_err)?;
        let d = PyDict::new(py);
        d.set_item("leaves_checked", report.leaves_checked)?;
        d.set_item("members_checked", report.members_checked)?;
        d.set_item("exceptional_verified", report.exceptional_verified)?;
        Ok(d)
    }

    fn export_json(&self) -> PyResult<String> {
        reports::export_tree(&self.inner, TreeFormat::Json).map_err(other_err)
    }

    fn export_dot(&self) -> PyResult<String> {
        reports::export_tree(&self.inner, TreeFormat::Dot).map_err(other_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "SieveResult(root={}, budget={}, nodes={})",
            self.inner.root,
            self.inner.budget,
            self.inner.nodes.len()
        )
    }
}

#[pyfunction(name = "sieve")]
fn run_sieve(
    py: Python<'_>,
    modulus: BigUint,
    remainder: BigUint,
    max_steps: u64,
    max_modulus: BigUint,
) -> PyResult<PySieveResult> {
    let root =
        ResidueClass::new(modulus, remainder).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let budget = SieveBudget::new(max_steps, max_modulus);
    let inner = py
        .detach(|| sieve::sieve(&root, &budget))
        .map_err(sieve_err)?;
    Ok(PySieveResult { inner })
}

#[pymodule]
fn pycollatz(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("CollatzError", py.get_type::<CollatzError>())?;
    m.add("BudgetExceeded", py.get_type::<BudgetExceeded>())?;
    m.add("MismatchFound", py.get_type::<MismatchFound>())?;
    m.add_class::<PySieveResult>()?;
    m.add_function(wrap_pyfunction!(collatz_step, m)?)?;
    m.add_function(wrap_pyfunction!(trajectory, m)?)?;
    m.add_function(wrap_pyfunction!(tso, m)?)?;
    m.add_function(wrap_pyfunction!(pso, m)?)?;
    m.add_function(wrap_pyfunction!(peak, m)?)?;
    m.add_function(wrap_pyfunction!(verify_range, m)?)?;
    m.add_function(wrap_pyfunction!(properties, m)?)?;
    m.add_function(wrap_pyfunction!(table_summary, m)?)?;
    m.add_function(wrap_pyfunction!(pso_histogram, m)?)?;
    m.add_function(wrap_pyfunction!(run_sieve, m)?)?;
    Ok(())
}
