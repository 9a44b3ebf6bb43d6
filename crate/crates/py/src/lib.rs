//! Python bindings: finite posets, the valid-triple calculus, fixed limits,
//! staged runs and their audits.

use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;

use forge_core::chain::{run_scheduler, RunConfig};
use forge_core::io::{export_dot, export_json, RunSnapshot};
use forge_core::poset::{enumerate_posets, ElemId, ElementSet, FinitePoset, Relation};
use forge_core::types::{self, adapter_by_name, ValidTriple};
use forge_core::verify::{run_suite, Suite};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rel_str(r: Relation) -> &'static str {
    match r {
        Relation::Lt => "<",
        Relation::Gt => ">",
        Relation::Inc => "|",
    }
}

/// A finite strict partial order on integer ids.
#[pyclass(name = "Poset", module = "forge_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPoset(FinitePoset);

#[pymethods]
impl PyPoset {
    /// Transitive closure of `lt` over `elements`.
    #[new]
    #[pyo3(signature = (elements, lt=vec![]))]
    fn new(elements: Vec<ElemId>, lt: Vec<(ElemId, ElemId)>) -> PyResult<Self> {
        FinitePoset::transitive_close(elements, &lt).map(PyPoset).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("Poset({:?}, hasse={:?})", self.0.elements(), self.0.hasse_edges())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn elements(&self) -> Vec<ElemId> {
        self.0.elements().to_vec()
    }

    fn lt(&self, x: ElemId, y: ElemId) -> bool {
        self.0.lt(x, y)
    }

    /// `"<"`, `">"` or `"|"`.
    fn rel(&self, x: ElemId, y: ElemId) -> PyResult<&'static str> {
        self.0.rel(x, y).map(rel_str).map_err(err)
    }

    fn hasse_edges(&self) -> Vec<(ElemId, ElemId)> {
        self.0.hasse_edges()
    }

    fn opposite(&self) -> Self {
        PyPoset(self.0.opposite())
    }

    #[pyo3(signature = (bound=720))]
    fn automorphisms(&self, bound: usize) -> PyResult<Vec<Vec<ElemId>>> {
        self.0.automorphisms(bound).map_err(err)
    }
}

type Triple = (Vec<ElemId>, Vec<ElemId>, Vec<ElemId>);

fn triple(t: Triple) -> ValidTriple {
    let set = |v: Vec<ElemId>| v.into_iter().collect::<ElementSet>();
    ValidTriple::from_parts(set(t.0), set(t.1), set(t.2))
}

fn untriple(t: ValidTriple) -> Triple {
    (
        t.u.iter().collect(),
        t.v.iter().collect(),
        t.w.iter().collect(),
    )
}

/// Every labeled poset on `0..n`.
#[pyfunction]
fn posets(n: usize) -> PyResult<Vec<PyPoset>> {
    Ok(enumerate_posets(n).map_err(err)?.map(PyPoset).collect())
}

/// Whether `(U, V, W)`, a partition of the host, is a valid triple.
#[pyfunction]
fn is_valid_triple(host: &PyPoset, t: Triple) -> PyResult<bool> {
    types::is_valid_triple(&host.0, &triple(t)).map_err(err)
}

#[pyfunction]
fn all_valid_triples(host: &PyPoset) -> Vec<Triple> {
    types::all_valid_triples(&host.0).into_iter().map(untriple).collect()
}

#[pyfunction]
fn lt_valid(p: Triple, q: Triple) -> PyResult<bool> {
    types::lt_valid(&triple(p), &triple(q)).map_err(err)
}

#[pyfunction]
fn inc_valid(p: Triple, q: Triple) -> PyResult<bool> {
    types::inc_valid(&triple(p), &triple(q)).map_err(err)
}

#[pyfunction]
fn ll(p: Triple, q: Triple) -> PyResult<bool> {
    types::ll(&triple(p), &triple(q)).map_err(err)
}

#[pyfunction]
fn meet(p: Triple, q: Triple) -> PyResult<Triple> {
    types::meet(&triple(p), &triple(q)).map(untriple).map_err(err)
}

#[pyfunction]
fn join(p: Triple, q: Triple) -> PyResult<Triple> {
    types::join(&triple(p), &triple(q)).map(untriple).map_err(err)
}

/// `(descriptor_json, mode)` for a built-in adapter.
#[pyfunction]
fn fixed_limit(adapter: &str) -> PyResult<(String, String)> {
    let a = adapter_by_name(adapter)
        .ok_or_else(|| PyKeyError::new_err(format!("unknown adapter {adapter}")))?;
    let (p, mode) = types::fixed_limit(a.as_ref()).map_err(err)?;
    Ok((
        serde_json::to_string(&p).map_err(err)?,
        serde_json::to_value(mode).map_err(err)?.as_str().unwrap_or_default().to_string(),
    ))
}

/// A frozen staged run.
#[pyclass(name = "Run", module = "forge_py", frozen)]
struct PyRun(RunSnapshot);

#[pymethods]
impl PyRun {
    #[staticmethod]
    #[pyo3(signature = (adapter, stages=40, seed=7, orbit_budget=64, support_bound=3))]
    fn build(
        py: Python<'_>,
        adapter: &str,
        stages: u32,
        seed: u64,
        orbit_budget: usize,
        support_bound: usize,
    ) -> PyResult<Self> {
        let mut config = RunConfig::new(adapter, stages, seed);
        config.orbit_budget = orbit_budget;
        config.support_bound = support_bound;
        py.detach(|| run_scheduler(&config).map(|out| RunSnapshot::capture(&out)))
            .map(PyRun)
            .map_err(err)
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        RunSnapshot::from_json(s).map(PyRun).map_err(err)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn host(&self) -> String {
        self.0.host.clone()
    }

    #[getter]
    fn exhausted(&self) -> bool {
        self.0.exhausted
    }

    #[getter]
    fn last_stage(&self) -> u32 {
        self.0.last_stage()
    }

    fn __len__(&self) -> usize {
        self.0.elements.len()
    }

    fn labels(&self) -> Vec<String> {
        self.0.elements.iter().map(|e| e.label.clone()).collect()
    }

    /// Truncation at a frozen stage; ids are element positions.
    fn stage_poset(&self, stage: u32) -> PyResult<PyPoset> {
        self.0.stage_poset(stage).map(PyPoset).map_err(err)
    }

    /// `"dot"` or `"json"` text of one stage.
    #[pyo3(signature = (stage=0, format="dot"))]
    fn export(&self, stage: u32, format: &str) -> PyResult<String> {
        match format {
            "dot" => export_dot(&self.0, stage).map_err(err),
            "json" => {
                let p = export_json(&self.0, stage).map_err(err)?;
                serde_json::to_string(&p).map_err(err)
            }
            _ => Err(PyValueError::new_err(format!("unknown format {format}"))),
        }
    }

    /// Audit reports as a JSON list.
    #[pyo3(signature = (suite="all"))]
    fn audit(&self, py: Python<'_>, suite: &str) -> PyResult<String> {
        let suite: Suite = suite.parse().map_err(PyValueError::new_err)?;
        let reports = py.detach(|| run_suite(&self.0, suite));
        serde_json::to_string(&reports).map_err(err)
    }
}

#[pymodule]
fn forge_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPoset>()?;
    m.add_class::<PyRun>()?;
    m.add_function(wrap_pyfunction!(posets, m)?)?;
    m.add_function(wrap_pyfunction!(is_valid_triple, m)?)?;
    m.add_function(wrap_pyfunction!(all_valid_triples, m)?)?;
    m.add_function(wrap_pyfunction!(lt_valid, m)?)?;
    m.add_function(wrap_pyfunction!(inc_valid, m)?)?;
    m.add_function(wrap_pyfunction!(ll, m)?)?;
    m.add_function(wrap_pyfunction!(meet, m)?)?;
    m.add_function(wrap_pyfunction!(join, m)?)?;
    m.add_function(wrap_pyfunction!(fixed_limit, m)?)?;
    m.add("BUILTIN_ADAPTERS", forge_core::types::BUILTIN_ADAPTERS.to_vec())?;
    Ok(())
}
