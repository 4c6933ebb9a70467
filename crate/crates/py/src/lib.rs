//! Python bindings: expression differentiation, raw cone decisions, and the
//! full certification pipeline. Reports come back as plain dicts (the same
//! shape as the CLI's JSON output); exact rationals are `"p/q"` strings.

use fjkkt::engine::{
    full_certify, verify_certificate, FjCertificate, GradientTable, Normalization,
    QualificationReport, Regime, Tolerances,
};
use fjkkt::expr;
use fjkkt::linalg::{farkas_decide, strict_feasibility, LinFunc};
use fjkkt::problem::{detect_active_set, load_problem, Problem as CoreProblem};
use fjkkt::rational::{format_rat, parse_rat, rat_from_f64, rat_int, rat_to_f64, Rat};
use fjkkt::report;
use fjkkt::Point;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn engine_err(e: fjkkt::engine::EngineError) -> PyErr {
    use fjkkt::engine::EngineError::*;
    match &e {
        CrossCheck(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn json_to_py(py: Python<'_>, value: &serde_json::Value) -> PyResult<Py<PyAny>> {
    use pyo3::IntoPyObjectExt;
    match value {
        serde_json::Value::Null => Ok(py.None()),
        serde_json::Value::Bool(b) => b.into_py_any(py),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_py_any(py)
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_py_any(py)
            }
        }
        serde_json::Value::String(s) => s.into_py_any(py),
        serde_json::Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_py_any(py)
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new(py);
            for (key, item) in map {
                dict.set_item(key, json_to_py(py, item)?)?;
            }
            dict.into_py_any(py)
        }
    }
}

fn report_to_py<T: serde::Serialize>(py: Python<'_>, report: &T) -> PyResult<Py<PyAny>> {
    let value = serde_json::to_value(report).map_err(value_err)?;
    json_to_py(py, &value)
}

/// Point from a dict, in the dict's insertion order.
fn point_from_dict(dict: &Bound<'_, PyDict>) -> PyResult<Point> {
    let mut pairs = Vec::new();
    for (key, value) in dict.iter() {
        pairs.push((key.extract::<String>()?, value.extract::<f64>()?));
    }
    Point::new(pairs).map_err(value_err)
}

/// Point from a dict, reordered to the problem's declared variables.
fn point_for_problem(problem: &CoreProblem, dict: &Bound<'_, PyDict>) -> PyResult<Point> {
    let loose = point_from_dict(dict)?;
    let mut ordered = Vec::with_capacity(problem.variables.len());
    for var in &problem.variables {
        match loose.get(var) {
            Some(v) => ordered.push((var.clone(), v)),
            None => return Err(value_err(format!("point is missing variable `{var}`"))),
        }
    }
    Point::new(ordered).map_err(value_err)
}

fn rat_from_any(obj: &Bound<'_, PyAny>) -> PyResult<Rat> {
    if let Ok(s) = obj.extract::<String>() {
        return parse_rat(&s).map_err(value_err);
    }
    if let Ok(i) = obj.extract::<i64>() {
        return Ok(rat_int(i));
    }
    if let Ok(f) = obj.extract::<f64>() {
        return rat_from_f64(f).ok_or_else(|| value_err(format!("non-finite value {f}")));
    }
    Err(value_err("expected a string `p/q`, an int, or a float"))
}

fn linfunc_from_any(row: &[Bound<'_, PyAny>]) -> PyResult<LinFunc> {
    let coeffs: PyResult<Vec<Rat>> = row.iter().map(rat_from_any).collect();
    Ok(LinFunc::new(coeffs?))
}

/// Evaluate an expression at a point given as `{variable: value}`.
#[pyfunction]
fn evaluate(text: &str, point: &Bound<'_, PyDict>) -> PyResult<f64> {
    let p = point_from_dict(point)?;
    let names: Vec<String> = p.names().to_vec();
    let e = expr::parse_expression(text, &names).map_err(value_err)?;
    expr::evaluate(&e, &p).map_err(value_err)
}

/// Row of partial derivatives, in the point dict's insertion order.
#[pyfunction]
fn gradient(text: &str, point: &Bound<'_, PyDict>) -> PyResult<Vec<f64>> {
    let p = point_from_dict(point)?;
    let names: Vec<String> = p.names().to_vec();
    let e = expr::parse_expression(text, &names).map_err(value_err)?;
    expr::gradient(&e, &p).map_err(value_err)
}

/// Exact (dual-number) directional derivative along `direction`.
#[pyfunction]
fn directional_derivative(
    text: &str,
    point: &Bound<'_, PyDict>,
    direction: Vec<f64>,
) -> PyResult<f64> {
    let p = point_from_dict(point)?;
    let names: Vec<String> = p.names().to_vec();
    let e = expr::parse_expression(text, &names).map_err(value_err)?;
    expr::directional_derivative(&e, &p, &direction).map_err(value_err)
}

/// Central-difference directional derivative with step `h`.
#[pyfunction]
#[pyo3(signature = (text, point, direction, h = 1e-5))]
fn fd_directional(
    text: &str,
    point: &Bound<'_, PyDict>,
    direction: Vec<f64>,
    h: f64,
) -> PyResult<f64> {
    let p = point_from_dict(point)?;
    let names: Vec<String> = p.names().to_vec();
    let e = expr::parse_expression(text, &names).map_err(value_err)?;
    expr::fd_directional(&e, &p, &direction, h).map_err(value_err)
}

/// Decide whether `target` is a nonnegative combination of `rows`.
/// Entries may be ints, floats, or `"p/q"` strings. Returns
/// `{"variant": "combination", "lambda": [...]}` or
/// `{"variant": "separator", "separator": [...]}` with exact string entries.
#[pyfunction]
fn farkas(
    py: Python<'_>,
    rows: Vec<Vec<Bound<'_, PyAny>>>,
    target: Vec<Bound<'_, PyAny>>,
) -> PyResult<Py<PyAny>> {
    let phis: PyResult<Vec<LinFunc>> = rows.iter().map(|r| linfunc_from_any(r)).collect();
    let a = linfunc_from_any(&target)?;
    let certificate = farkas_decide(&phis?, &a).map_err(value_err)?;
    report_to_py(py, &report::farkas_report(&certificate))
}

/// Witness for the strict system `row . v > 0` for every row, or `None`.
#[pyfunction]
fn strict_witness(
    py: Python<'_>,
    rows: Vec<Vec<Bound<'_, PyAny>>>,
) -> PyResult<Option<Py<PyAny>>> {
    let phis: PyResult<Vec<LinFunc>> = rows.iter().map(|r| linfunc_from_any(r)).collect();
    match strict_feasibility(&phis?).map_err(value_err)? {
        None => Ok(None),
        Some(w) => {
            let dict = PyDict::new(py);
            dict.set_item(
                "direction",
                w.direction.iter().map(format_rat).collect::<Vec<_>>(),
            )?;
            dict.set_item(
                "direction_float",
                w.direction.iter().map(rat_to_f64).collect::<Vec<_>>(),
            )?;
            dict.set_item("margin", w.margin.as_ref().map(format_rat))?;
            dict.set_item("vacuous", w.is_vacuous())?;
            Ok(Some(dict.into()))
        }
    }
}

/// A loaded problem: variables, objective, constraints, and an optional
/// embedded candidate point.
#[pyclass]
struct Problem {
    inner: CoreProblem,
    embedded_point: Option<Point>,
}

impl Problem {
    fn resolve_point(&self, point: Option<&Bound<'_, PyDict>>) -> PyResult<Point> {
        match point {
            Some(dict) => point_for_problem(&self.inner, dict),
            None => self
                .embedded_point
                .clone()
                .ok_or_else(|| value_err("no candidate point: pass point= or add a point: line")),
        }
    }

    fn qualification(
        &self,
        x: &Point,
        tol: &Tolerances,
    ) -> PyResult<(QualificationReport, fjkkt::problem::ActiveSet)> {
        let active_set = detect_active_set(&self.inner, x, tol.active, tol.feasibility)
            .map_err(value_err)?;
        let table =
            GradientTable::from_problem(&self.inner, x, &active_set).map_err(engine_err)?;
        let report = fjkkt::engine::qualification(&table).map_err(engine_err)?;
        Ok((report, active_set))
    }
}

#[pymethods]
impl Problem {
    /// Parse the line-oriented problem format.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        let (inner, embedded_point) = load_problem(text).map_err(value_err)?;
        Ok(Self {
            inner,
            embedded_point,
        })
    }

    #[getter]
    fn variables(&self) -> Vec<String> {
        self.inner.variables.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "Problem(variables={:?}, inequalities={}, equalities={})",
            self.inner.variables,
            self.inner.inequalities.len(),
            self.inner.equalities.len()
        )
    }

    /// Compute the certificate report (status "certified" or "refuted").
    /// Raises ValueError on infeasible points or malformed input.
    #[pyo3(signature = (point = None, tol_active = 1e-8, tol_feas = 1e-9, tol_stat = 1e-6))]
    fn certify(
        &self,
        py: Python<'_>,
        point: Option<&Bound<'_, PyDict>>,
        tol_active: f64,
        tol_feas: f64,
        tol_stat: f64,
    ) -> PyResult<Py<PyAny>> {
        let x = self.resolve_point(point)?;
        let tolerances = Tolerances {
            active: tol_active,
            feasibility: tol_feas,
            stationarity: tol_stat,
        };
        let outcome = full_certify(&self.inner, &x, &tolerances).map_err(engine_err)?;
        let report =
            report::certify_report(&self.inner, &x, &outcome, &tolerances).map_err(engine_err)?;
        report_to_py(py, &report)
    }

    /// LICQ/MFCQ report only.
    #[pyo3(signature = (point = None, tol_active = 1e-8, tol_feas = 1e-9))]
    fn qualify(
        &self,
        py: Python<'_>,
        point: Option<&Bound<'_, PyDict>>,
        tol_active: f64,
        tol_feas: f64,
    ) -> PyResult<Py<PyAny>> {
        let x = self.resolve_point(point)?;
        let tolerances = Tolerances {
            active: tol_active,
            feasibility: tol_feas,
            ..Default::default()
        };
        let (qualification, active_set) = self.qualification(&x, &tolerances)?;
        let report = report::qualify_report(&self.inner, &x, &active_set, &qualification);
        report_to_py(py, &report)
    }

    /// AD/FD comparison table plus shrinking-radius probes.
    #[pyo3(signature = (point = None, seed = 0, tolerance = 1e-6))]
    fn gradcheck(
        &self,
        py: Python<'_>,
        point: Option<&Bound<'_, PyDict>>,
        seed: u64,
        tolerance: f64,
    ) -> PyResult<Py<PyAny>> {
        let x = self.resolve_point(point)?;
        let report =
            report::gradcheck_report(&self.inner, &x, seed, tolerance).map_err(engine_err)?;
        report_to_py(py, &report)
    }

    /// Check a multiplier vector independently (finite differences).
    /// `lam` has `p + 1` entries (objective first), `mu` has `q`.
    #[pyo3(signature = (lam, mu, point = None, tol_active = 1e-8, tol_stat = 1e-6))]
    fn verify(
        &self,
        py: Python<'_>,
        lam: Vec<Bound<'_, PyAny>>,
        mu: Vec<Bound<'_, PyAny>>,
        point: Option<&Bound<'_, PyDict>>,
        tol_active: f64,
        tol_stat: f64,
    ) -> PyResult<Py<PyAny>> {
        let x = self.resolve_point(point)?;
        let lambda: PyResult<Vec<Rat>> = lam.iter().map(rat_from_any).collect();
        let mu: PyResult<Vec<Rat>> = mu.iter().map(rat_from_any).collect();
        let certificate = FjCertificate {
            lambda: lambda?,
            mu: mu?,
            normalization: Normalization::Unnormalized,
            regime: Regime::Direct,
            flags: Default::default(),
        };
        let tolerances = Tolerances {
            active: tol_active,
            stationarity: tol_stat,
            ..Default::default()
        };
        let report = verify_certificate(&self.inner, &x, &certificate, &tolerances)
            .map_err(engine_err)?;
        let dict = PyDict::new(py);
        dict.set_item("nonnegative", report.nonnegative)?;
        dict.set_item("a", report.a)?;
        dict.set_item("b", report.b)?;
        dict.set_item("c", report.c)?;
        dict.set_item("stationarity_residual", report.stationarity_residual)?;
        dict.set_item("slackness_violations", report.slackness_violations)?;
        dict.set_item("pass", report.pass)?;
        Ok(dict.into())
    }
}

#[pymodule]
fn fjkkt_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Problem>()?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(gradient, m)?)?;
    m.add_function(wrap_pyfunction!(directional_derivative, m)?)?;
    m.add_function(wrap_pyfunction!(fd_directional, m)?)?;
    m.add_function(wrap_pyfunction!(farkas, m)?)?;
    m.add_function(wrap_pyfunction!(strict_witness, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
