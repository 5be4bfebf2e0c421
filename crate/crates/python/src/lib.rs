//! Python bindings. Results are the same JSON shapes the HTTP service
//! returns, converted to plain dicts and lists.

use std::path::PathBuf;

use facetforge::ops;
use facetforge::ApiError;
use facetforge_core::store::TriplePattern;
use facetforge_core::{demo, Term, Triple, TripleStore, Workspace};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;
use serde::Serialize;
use serde_json::Value;

create_exception!(facetforge_py, FacetforgeError, PyException, "Base class of engine errors.");
create_exception!(facetforge_py, NotFoundError, FacetforgeError, "An unknown user, portlet, concept or node.");
create_exception!(facetforge_py, StorageError, FacetforgeError, "The store file could not be read or written.");

fn raise(e: impl Into<ApiError>) -> PyErr {
    let e = e.into();
    let text = format!("{}: {}", e.code, e.message);
    match e.status {
        404 => NotFoundError::new_err(text),
        503 => StorageError::new_err(text),
        _ => FacetforgeError::new_err(text),
    }
}

fn json_to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    match v {
        Value::Null => Ok(py.None().into_bound(py)),
        Value::Bool(b) => b.into_bound_py_any(py),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_bound_py_any(py),
            None => n.as_f64().unwrap_or(f64::NAN).into_bound_py_any(py),
        },
        Value::String(s) => s.into_bound_py_any(py),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            Ok(list.into_any())
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, json_to_py(py, item)?)?;
            }
            Ok(dict.into_any())
        }
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| FacetforgeError::new_err(e.to_string()))?;
    json_to_py(py, &v)
}

/// A workspace over one triple store, optionally backed by an N-Triples file.
#[pyclass(name = "Workspace", module = "facetforge_py")]
struct PyWorkspace {
    inner: Workspace,
    path: Option<PathBuf>,
}

#[pymethods]
impl PyWorkspace {
    /// Opens `path` if given (an absent file starts empty), else an in-memory workspace.
    #[new]
    #[pyo3(signature = (path=None))]
    fn new(path: Option<PathBuf>) -> PyResult<Self> {
        let inner = match &path {
            Some(p) => Workspace::open_or_default(p).map_err(raise)?,
            None => Workspace::new(),
        };
        Ok(PyWorkspace { inner, path })
    }

    /// The seeded demo community.
    #[staticmethod]
    fn demo() -> PyResult<Self> {
        Ok(PyWorkspace { inner: demo::seed().map_err(raise)?, path: None })
    }

    #[pyo3(signature = (path=None))]
    fn save(&mut self, path: Option<PathBuf>) -> PyResult<()> {
        let target = path
            .or_else(|| self.path.clone())
            .ok_or_else(|| FacetforgeError::new_err("no path given and the workspace was not opened from a file"))?;
        self.inner.save(&target).map_err(raise)?;
        self.path = Some(target);
        Ok(())
    }

    fn ingest<'py>(&mut self, py: Python<'py>, ntriples: &str) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &ops::ingest(&mut self.inner, ntriples).map_err(raise)?)
    }

    #[pyo3(signature = (id, interests=Vec::new(), friends=Vec::new()))]
    fn add_user<'py>(
        &mut self,
        py: Python<'py>,
        id: String,
        interests: Vec<String>,
        friends: Vec<String>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let r = ops::add_user(&mut self.inner, ops::UserBody { id, interests, friends }).map_err(raise)?;
        to_py(py, &r)
    }

    /// `facets` are `name=value` strings.
    #[pyo3(signature = (id, kind, owner, tags=Vec::new(), facets=Vec::new(), children=Vec::new(), payload_ref=String::new()))]
    #[allow(clippy::too_many_arguments)]
    fn add_portlet<'py>(
        &mut self,
        py: Python<'py>,
        id: String,
        kind: String,
        owner: String,
        tags: Vec<String>,
        facets: Vec<String>,
        children: Vec<String>,
        payload_ref: String,
    ) -> PyResult<Bound<'py, PyAny>> {
        let body = ops::PortletBody { id, kind, payload_ref, owner, tags, facets, children };
        to_py(py, &ops::add_portlet(&mut self.inner, body).map_err(raise)?)
    }

    fn portlets<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let registry = self.inner.portlets().map_err(raise)?;
        let out: Vec<ops::PortletSummary> = registry.iter().map(ops::PortletSummary::from).collect();
        to_py(py, &out)
    }

    #[pyo3(signature = (portlet, label, owner=None))]
    fn tag<'py>(
        &mut self,
        py: Python<'py>,
        portlet: String,
        label: String,
        owner: Option<String>,
    ) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &ops::add_tag(&mut self.inner, ops::TagBody { portlet, label, owner }).map_err(raise)?)
    }

    fn load_ontology<'py>(&mut self, py: Python<'py>, ntriples: String) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &ops::load_ontology(&mut self.inner, ops::OntologyBody { ntriples }).map_err(raise)?)
    }

    /// `training` holds `conceptA,conceptB,{0|1}` lines; `config` is `key=value` text.
    #[pyo3(signature = (training, config=None))]
    fn learn<'py>(&mut self, py: Python<'py>, training: String, config: Option<String>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &ops::learn(&mut self.inner, ops::LearnBody { training, config }).map_err(raise)?)
    }

    #[pyo3(signature = (theta=None))]
    fn superconcepts<'py>(&self, py: Python<'py>, theta: Option<f64>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &ops::superconcepts(&self.inner, ops::SuperconceptBody { theta }).map_err(raise)?)
    }

    #[pyo3(signature = (viewer, portlet, speaker=None))]
    fn view<'py>(&self, py: Python<'py>, viewer: &str, portlet: &str, speaker: Option<&str>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &ops::view(&self.inner, viewer, portlet, speaker).map_err(raise)?)
    }

    /// Every user's view of `portlet`, keyed by user id.
    #[pyo3(signature = (portlet, speaker=None))]
    fn resolve<'py>(&self, py: Python<'py>, portlet: &str, speaker: Option<&str>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &ops::resolve_all(&self.inner, portlet, speaker).map_err(raise)?)
    }

    /// Node ids after `start` on the shortest path to the nearest goal.
    #[pyo3(signature = (start, goals, user=None))]
    fn navigate(&self, start: String, goals: Vec<String>, user: Option<String>) -> PyResult<Vec<String>> {
        let q = ops::NavigateQuery { start, goals: goals.join(","), user };
        Ok(ops::navigate(&self.inner, &q).map_err(raise)?.path)
    }

    /// Applies the filters, then the zooms, to a fresh view of all portlets.
    #[pyo3(signature = (filters=Vec::new(), zoom=Vec::new()))]
    fn browse<'py>(
        &self,
        py: Python<'py>,
        filters: Vec<(String, String)>,
        zoom: Vec<String>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let mut v = self.inner.browse().map_err(raise)?;
        for (facet, value) in &filters {
            v = v.filter(facet, value);
        }
        for facet in &zoom {
            v = v.zoom(facet).map_err(raise)?;
        }
        let out = to_py(py, &ops::browse_out("", &v))?;
        out.cast::<PyDict>()?.del_item("user")?;
        Ok(out)
    }

    fn to_ntriples(&self) -> String {
        self.inner.store().to_ntriples()
    }

    fn __len__(&self) -> usize {
        self.inner.store().len()
    }

    fn __repr__(&self) -> String {
        match &self.path {
            Some(p) => format!("Workspace({:?}, triples={})", p.display().to_string(), self.inner.store().len()),
            None => format!("Workspace(triples={})", self.inner.store().len()),
        }
    }
}

fn pattern_term(text: &str, object: bool) -> Term {
    if let Some(name) = text.strip_prefix('?') {
        Term::var(name)
    } else if let Some(lit) = text.strip_prefix('"').and_then(|t| t.strip_suffix('"')).filter(|_| object) {
        Term::literal(lit)
    } else {
        Term::iri(text)
    }
}

/// A bare triple store. In query patterns `?name` is a variable and a
/// double-quoted object is a literal.
#[pyclass(name = "TripleStore", module = "facetforge_py")]
#[derive(Default)]
struct PyTripleStore {
    inner: TripleStore,
}

#[pymethods]
impl PyTripleStore {
    #[new]
    fn new() -> Self {
        Self::default()
    }

    #[staticmethod]
    fn from_ntriples(text: &str) -> PyResult<Self> {
        Ok(PyTripleStore { inner: TripleStore::from_ntriples(text).map_err(raise)? })
    }

    /// Returns whether the triple was new.
    #[pyo3(signature = (subject, predicate, object, literal=false))]
    fn add(&mut self, subject: &str, predicate: &str, object: &str, literal: bool) -> PyResult<bool> {
        let t = if literal {
            Triple::with_literal(subject, predicate, object)
        } else {
            Triple::iris(subject, predicate, object)
        };
        self.inner.insert(t.map_err(raise)?).map_err(raise)
    }

    #[pyo3(signature = (subject, predicate, object, literal=false))]
    fn remove(&mut self, subject: &str, predicate: &str, object: &str, literal: bool) -> PyResult<bool> {
        let object = if literal { Term::literal(object) } else { Term::iri(object) };
        let t = Triple::new(Term::iri(subject), Term::iri(predicate), object).map_err(raise)?;
        Ok(self.inner.remove(&t))
    }

    /// One dict per solution, mapping variable names (without `?`) to term text.
    fn query(&self, patterns: Vec<(String, String, String)>) -> PyResult<Vec<std::collections::BTreeMap<String, String>>> {
        let patterns: Vec<TriplePattern> = patterns
            .iter()
            .map(|(s, p, o)| TriplePattern::new(pattern_term(s, false), pattern_term(p, false), pattern_term(o, true)))
            .collect();
        let answers = self.inner.query(&patterns).map_err(raise)?;
        Ok(answers.iter().map(|row| row.iter().map(|(k, t)| (k.clone(), t.text().to_owned())).collect()).collect())
    }

    fn to_ntriples(&self) -> String {
        self.inner.to_ntriples()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// The normalized form under which tag labels are compared.
#[pyfunction]
fn normalize_label(label: &str) -> String {
    facetforge_core::taxonomy::normalize_label(label)
}

/// Scores a usability matrix given as `(name, score, weight)` rows.
#[pyfunction]
#[pyo3(signature = (task, rows))]
fn score_task<'py>(py: Python<'py>, task: String, rows: Vec<(String, f64, f64)>) -> PyResult<Bound<'py, PyAny>> {
    use facetforge_core::evaluation::{Attribute, EvaluationMatrix};
    let attributes = rows.into_iter().map(|(n, s, w)| Attribute::new(n, s, w)).collect();
    let matrix = EvaluationMatrix::new(task, attributes).map_err(raise)?;
    to_py(py, &ops::eval(ops::EvalBody::Matrix(matrix)).map_err(raise)?)
}

#[pymodule]
fn facetforge_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<PyWorkspace>()?;
    m.add_class::<PyTripleStore>()?;
    m.add_function(wrap_pyfunction!(normalize_label, m)?)?;
    m.add_function(wrap_pyfunction!(score_task, m)?)?;
    m.add("FacetforgeError", py.get_type::<FacetforgeError>())?;
    m.add("NotFoundError", py.get_type::<NotFoundError>())?;
    m.add("StorageError", py.get_type::<StorageError>())?;
    Ok(())
}
