//! Python bindings. Form documents are passed as dicts (or JSON strings) in
//! the same format the command line reads, and reports come back as dicts.

use maforms_core::cases::{cs_demo, s6_invariant as s6_invariant_at, TangentFrame};
use maforms_core::cli::{classify_document, split_document, symplectic_space, FormDocument, JsonScalar, ScalarMode};
use maforms_core::hitchin::{hitchin_k as k_map, pfaffian as pfaffian_of};
use maforms_core::invariants::q_form as q_form_of;
use maforms_core::linalg::LinearMap6;
use maforms_core::scalar::parse_rational;
use maforms_core::Error;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyString;
use serde_json::Value;

create_exception!(maforms, NotEffectiveError, PyValueError);
create_exception!(maforms, DegenerateError, PyValueError);

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::NotEffective => NotEffectiveError::new_err(e.to_string()),
        Error::Degenerate => DegenerateError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn document(doc: &Bound<'_, PyAny>) -> PyResult<FormDocument> {
    let text: String = if doc.is_instance_of::<PyString>() {
        doc.extract()?
    } else {
        doc.py().import("json")?.call_method1("dumps", (doc,))?.extract()?
    };
    FormDocument::parse(&text).map_err(to_py_err)
}

fn to_python<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

fn scalar_mode(scalar: Option<&str>) -> PyResult<Option<ScalarMode>> {
    match scalar {
        None => Ok(None),
        Some("exact") => Ok(Some(ScalarMode::Exact)),
        Some("float") => Ok(Some(ScalarMode::Float)),
        Some(other) => Err(PyValueError::new_err(format!("scalar must be 'exact' or 'float', got {other:?}"))),
    }
}

fn matrix<'py, S: JsonScalar>(py: Python<'py>, m: &LinearMap6<S>) -> PyResult<Bound<'py, PyAny>> {
    let rows: Vec<Value> = m.to_rows().iter().map(|r| Value::Array(r.iter().map(JsonScalar::json).collect())).collect();
    to_python(py, &Value::Array(rows))
}

/// λ, signature and orbit class of an effective 3-form.
#[pyfunction]
#[pyo3(signature = (doc, project = false, scalar = None))]
fn classify<'py>(
    py: Python<'py>,
    doc: &Bound<'py, PyAny>,
    project: bool,
    scalar: Option<&str>,
) -> PyResult<Bound<'py, PyAny>> {
    let o = classify_document(&document(doc)?, scalar_mode(scalar)?, project).map_err(to_py_err)?;
    to_python(py, &o.report)
}

/// α/β split, dual form and normalized structure of a non-degenerate form.
#[pyfunction]
#[pyo3(signature = (doc, scalar = None))]
fn split<'py>(py: Python<'py>, doc: &Bound<'py, PyAny>, scalar: Option<&str>) -> PyResult<Bound<'py, PyAny>> {
    let o = split_document(&document(doc)?, scalar_mode(scalar)?).map_err(to_py_err)?;
    to_python(py, &o.report)
}

/// Hitchin's pfaffian as an exact rational string.
#[pyfunction]
fn pfaffian(doc: &Bound<'_, PyAny>) -> PyResult<String> {
    let d = document(doc)?;
    let s = symplectic_space(&d).map_err(to_py_err)?;
    let lambda = pfaffian_of(&d.form().map_err(to_py_err)?, s.theta()).map_err(to_py_err)?;
    Ok(maforms_core::scalar::format_rational(&lambda))
}

/// The K-map as a 6×6 matrix of rational strings.
#[pyfunction]
fn hitchin_k<'py>(py: Python<'py>, doc: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let d = document(doc)?;
    let s = symplectic_space(&d).map_err(to_py_err)?;
    matrix(py, &k_map(&d.form().map_err(to_py_err)?, s.theta()).map_err(to_py_err)?)
}

/// Gram matrix of q_ω.
#[pyfunction]
fn q_form<'py>(py: Python<'py>, doc: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let d = document(doc)?;
    let s = symplectic_space(&d).map_err(to_py_err)?;
    matrix(py, &q_form_of(&d.form().map_err(to_py_err)?, &s).map_err(to_py_err)?.m)
}

#[pyfunction]
fn is_effective(doc: &Bound<'_, PyAny>) -> PyResult<bool> {
    let d = document(doc)?;
    Ok(symplectic_space(&d).map_err(to_py_err)?.is_effective(&d.form().map_err(to_py_err)?))
}

/// The effective part of a form, as a document.
#[pyfunction]
fn project_effective<'py>(py: Python<'py>, doc: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let d = document(doc)?;
    let s = symplectic_space(&d).map_err(to_py_err)?;
    let w = s.project_effective(&d.form().map_err(to_py_err)?).map_err(to_py_err)?;
    to_python(py, &FormDocument::from_form(&w).to_json())
}

/// λ, K and I_x for the associative form at a point of S⁶.
#[pyfunction]
fn s6_invariant<'py>(py: Python<'py>, x: [f64; 7]) -> PyResult<Bound<'py, PyAny>> {
    let inv = TangentFrame::standard(&x).and_then(|f| s6_invariant_at(&f)).map_err(to_py_err)?;
    let dict = pyo3::types::PyDict::new(py);
    dict.set_item("lambda", inv.lambda)?;
    dict.set_item("k", matrix(py, &inv.k)?)?;
    dict.set_item("i_x", matrix(py, &inv.i_x)?)?;
    Ok(dict.into_any())
}

/// The Chynoweth–Sewell worked example.
#[pyfunction]
#[pyo3(signature = (gamma = "2", b = 1.0, samples = 64, seed = 0, h = 1e-4, tol = 1e-6))]
fn demo_cs<'py>(
    py: Python<'py>,
    gamma: &str,
    b: f64,
    samples: usize,
    seed: u64,
    h: f64,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let g = parse_rational(gamma).map_err(to_py_err)?;
    let r = cs_demo(&g, b, samples, seed, h, tol).map_err(to_py_err)?;
    to_python(py, &serde_json::to_value(&r).expect("serializable"))
}

#[pymodule]
#[pyo3(name = "maforms")]
fn maforms_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NotEffectiveError", m.py().get_type::<NotEffectiveError>())?;
    m.add("DegenerateError", m.py().get_type::<DegenerateError>())?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(split, m)?)?;
    m.add_function(wrap_pyfunction!(pfaffian, m)?)?;
    m.add_function(wrap_pyfunction!(hitchin_k, m)?)?;
    m.add_function(wrap_pyfunction!(q_form, m)?)?;
    m.add_function(wrap_pyfunction!(is_effective, m)?)?;
    m.add_function(wrap_pyfunction!(project_effective, m)?)?;
    m.add_function(wrap_pyfunction!(s6_invariant, m)?)?;
    m.add_function(wrap_pyfunction!(demo_cs, m)?)?;
    Ok(())
}
