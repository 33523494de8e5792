//! Python module `treeot`. Operations, trees and envelopes cross the
//! boundary as plain dicts and lists in their JSON encoding.

pub mod json_api;

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyTuple;
use serde_json::Value;
use treeot_core::verify::SimConfig;

use json_api::ApiError;

create_exception!(treeot, OtError, PyValueError, "An operation, document or envelope was rejected.");

fn err(e: ApiError) -> PyErr {
    OtError::new_err(e.to_string())
}

fn to_value(obj: &Bound<'_, PyAny>) -> PyResult<Value> {
    let text: String = obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&text).map_err(|e| OtError::new_err(format!("not JSON-compatible: {e}")))
}

fn to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).expect("values encode");
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// Transforms two concurrent list operations; returns `(o1', o2')`.
#[pyfunction]
fn xform_l(py: Python<'_>, o1: &Bound<'_, PyAny>, s1: u64, o2: &Bound<'_, PyAny>, s2: u64) -> PyResult<(Py<PyAny>, Py<PyAny>)> {
    let (a, b) = json_api::xform_l(to_value(o1)?, s1, to_value(o2)?, s2).map_err(err)?;
    Ok((to_py(py, &a)?, to_py(py, &b)?))
}

/// Transforms two concurrent tree operations; returns `(o1', o2')`.
#[pyfunction]
fn xform_t(py: Python<'_>, o1: &Bound<'_, PyAny>, s1: u64, o2: &Bound<'_, PyAny>, s2: u64) -> PyResult<(Py<PyAny>, Py<PyAny>)> {
    let (a, b) = json_api::xform_t(to_value(o1)?, s1, to_value(o2)?, s2).map_err(err)?;
    Ok((to_py(py, &a)?, to_py(py, &b)?))
}

#[pyfunction]
fn transformation_point(p1: Vec<usize>, p2: Vec<usize>) -> PyResult<usize> {
    json_api::transformation_point(p1, p2).map_err(err)
}

#[pyfunction]
fn effect_independent(p1: Vec<usize>, p2: Vec<usize>) -> PyResult<bool> {
    json_api::effect_independent(p1, p2).map_err(err)
}

/// Applies a tree operation to a tree.
#[pyfunction]
fn apply(py: Python<'_>, op: &Bound<'_, PyAny>, tree: &Bound<'_, PyAny>) -> PyResult<Py<PyAny>> {
    to_py(py, &json_api::apply(to_value(op)?, to_value(tree)?).map_err(err)?)
}

#[pyfunction]
fn apply_list(py: Python<'_>, op: &Bound<'_, PyAny>, items: &Bound<'_, PyAny>) -> PyResult<Py<PyAny>> {
    to_py(py, &json_api::apply_list(to_value(op)?, to_value(items)?).map_err(err)?)
}

#[pyfunction]
fn json_to_tree(py: Python<'_>, value: &Bound<'_, PyAny>) -> PyResult<Py<PyAny>> {
    to_py(py, &json_api::json_to_tree(&to_value(value)?))
}

#[pyfunction]
fn tree_to_json(py: Python<'_>, tree: &Bound<'_, PyAny>) -> PyResult<Py<PyAny>> {
    to_py(py, &json_api::tree_to_json(to_value(tree)?).map_err(err)?)
}

/// Operations implementing an edit intent on a document tree.
#[pyfunction]
fn edit_to_op(py: Python<'_>, doc: &Bound<'_, PyAny>, intent: &Bound<'_, PyAny>) -> PyResult<Py<PyAny>> {
    to_py(py, &json_api::edit_to_op(to_value(doc)?, to_value(intent)?).map_err(err)?)
}

/// Exhaustive convergence check; returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (target="trees", max_nodes=6, max_branch=3, max_depth=3, max_len=4, alphabet=None))]
fn verify(
    py: Python<'_>,
    target: &str,
    max_nodes: usize,
    max_branch: usize,
    max_depth: usize,
    max_len: usize,
    alphabet: Option<String>,
) -> PyResult<Py<PyAny>> {
    let lists = match target {
        "lists" => true,
        "trees" => false,
        other => return Err(PyValueError::new_err(format!("target must be 'lists' or 'trees', not {other:?}"))),
    };
    let args = json_api::VerifyArgs { lists, max_nodes, max_branch, max_depth, max_len, alphabet };
    let report = py.detach(|| json_api::verify(&args)).map_err(err)?;
    to_py(py, &report)
}

/// Randomized sessions; `clients` is a count or a `(min, max)` pair.
#[pyfunction]
#[pyo3(signature = (clients=None, ops=20, sessions=100, seed=42))]
fn simulate(py: Python<'_>, clients: Option<&Bound<'_, PyAny>>, ops: usize, sessions: usize, seed: u64) -> PyResult<Py<PyAny>> {
    let (min_clients, max_clients) = match clients {
        None => (2, 4),
        Some(c) if c.is_instance_of::<PyTuple>() => c.extract::<(usize, usize)>()?,
        Some(c) => {
            let n = c.extract::<usize>()?;
            (n, n)
        }
    };
    let cfg = SimConfig { min_clients, max_clients, max_ops: ops, sessions, seed };
    let report = py.detach(|| json_api::simulate(&cfg)).map_err(err)?;
    to_py(py, &report)
}

/// The authoritative replica: orders envelopes and returns broadcasts.
#[pyclass(name = "Server")]
struct PyServer(json_api::Server);

#[pymethods]
impl PyServer {
    #[new]
    fn new(initial: &Bound<'_, PyAny>) -> PyResult<Self> {
        json_api::Server::new(to_value(initial)?).map(PyServer).map_err(err)
    }

    fn ingest(&mut self, py: Python<'_>, envelope: &Bound<'_, PyAny>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.0.ingest(to_value(envelope)?).map_err(err)?)
    }

    #[getter]
    fn doc(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.0.doc())
    }

    #[getter]
    fn head(&self) -> u64 {
        self.0.head()
    }

    fn doc_at(&self, py: Python<'_>, rev: u64) -> PyResult<Option<Py<PyAny>>> {
        self.0.doc_at(rev).map(|d| to_py(py, &d)).transpose()
    }

    fn history(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.0.history())
    }
}

/// A replica that edits optimistically and reconciles with broadcasts.
#[pyclass(name = "Client")]
struct PyClient(json_api::Client);

#[pymethods]
impl PyClient {
    #[new]
    #[pyo3(signature = (site, snapshot, rev=0))]
    fn new(site: u64, snapshot: &Bound<'_, PyAny>, rev: u64) -> PyResult<Self> {
        json_api::Client::new(site, to_value(snapshot)?, rev).map(PyClient).map_err(err)
    }

    #[getter]
    fn site(&self) -> u64 {
        self.0.site()
    }

    fn local_edit(&mut self, py: Python<'_>, op: &Bound<'_, PyAny>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.0.local_edit(to_value(op)?).map_err(err)?)
    }

    fn ingest_remote(&mut self, broadcast: &Bound<'_, PyAny>) -> PyResult<()> {
        self.0.ingest_remote(to_value(broadcast)?).map_err(err)
    }

    #[getter]
    fn doc(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.0.doc())
    }

    #[getter]
    fn synced_revision(&self) -> u64 {
        self.0.synced_revision()
    }

    #[getter]
    fn pending(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.0.pending())
    }
}

#[pymodule]
fn treeot(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("OtError", m.py().get_type::<OtError>())?;
    m.add_function(wrap_pyfunction!(xform_l, m)?)?;
    m.add_function(wrap_pyfunction!(xform_t, m)?)?;
    m.add_function(wrap_pyfunction!(transformation_point, m)?)?;
    m.add_function(wrap_pyfunction!(effect_independent, m)?)?;
    m.add_function(wrap_pyfunction!(apply, m)?)?;
    m.add_function(wrap_pyfunction!(apply_list, m)?)?;
    m.add_function(wrap_pyfunction!(json_to_tree, m)?)?;
    m.add_function(wrap_pyfunction!(tree_to_json, m)?)?;
    m.add_function(wrap_pyfunction!(edit_to_op, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_class::<PyServer>()?;
    m.add_class::<PyClient>()?;
    Ok(())
}
