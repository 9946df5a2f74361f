//! Python bindings: expressions, geometries, symmetry analysis and gap tables.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use projsym_core::app::{gap_rows as rows, render_table, run_analysis, AlgebraKind, AnalysisRequest, GeometryFile, Source};
use projsym_core::catalogue::{self, BuiltGeometry};
use projsym_core::expr::{evaluate_at, FloatCtx};
use projsym_core::geometry::{curvature_flags, levi_civita, projective_weyl, riemann, ConnectionField};
use projsym_core::jet::{JetOptions, SystemKind};
use projsym_core::serde_rational::parse_rational;
use projsym_core::symmetry::{classify_connection_field, classify_field, geodesic_ode_connection, VectorFieldExpr};
use projsym_core::{parse_expr, Chart, RatExpr, Rational};

fn err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py(py: Python<'_>, v: &impl serde::Serialize) -> PyResult<PyObject> {
    let text = serde_json::to_string(v).map_err(err)?;
    Ok(py.import_bound("json")?.call_method1("loads", (text,))?.unbind())
}

fn rational(v: &Bound<'_, PyAny>) -> PyResult<Rational> {
    let s = v.str()?.to_string();
    parse_rational(&s).ok_or_else(|| err(format!("not a rational number: `{s}`")))
}

fn params_map(params: Option<&Bound<'_, PyDict>>) -> PyResult<BTreeMap<String, Rational>> {
    let mut out = BTreeMap::new();
    if let Some(d) = params {
        for (k, v) in d.iter() {
            out.insert(k.extract::<String>()?, rational(&v)?);
        }
    }
    Ok(out)
}

fn chart(coords: &[String], params: &BTreeMap<String, Rational>) -> PyResult<Chart> {
    let mut c = Chart::new(coords).map_err(err)?;
    for (k, v) in params {
        c = c.with_param(k, v.clone());
    }
    Ok(c)
}

fn kinds(list: Option<Vec<String>>) -> PyResult<Vec<SystemKind>> {
    list.unwrap_or_default()
        .iter()
        .map(|s| SystemKind::parse(s).ok_or_else(|| err(format!("unknown system kind `{s}`"))))
        .collect()
}

/// Exact expression over a chart of named coordinates.
#[pyclass(name = "Expr", module = "projsym")]
#[derive(Clone)]
struct PyExpr {
    expr: RatExpr,
    chart: Chart,
}

impl PyExpr {
    fn with(&self, expr: RatExpr) -> Self {
        PyExpr {
            expr,
            chart: self.chart.clone(),
        }
    }

    fn same_chart(&self, other: &PyExpr) -> PyResult<()> {
        if self.chart.same_coords(&other.chart) {
            Ok(())
        } else {
            Err(err("expressions live on different charts"))
        }
    }
}

#[pymethods]
impl PyExpr {
    #[new]
    #[pyo3(signature = (text, coords, params=None))]
    fn new(text: &str, coords: Vec<String>, params: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let chart = chart(&coords, &params_map(params)?)?;
        let expr = parse_expr(text, &chart).map_err(err)?;
        Ok(PyExpr { expr, chart })
    }

    fn __str__(&self) -> String {
        self.chart.show(&self.expr)
    }

    fn __repr__(&self) -> String {
        format!("Expr('{}')", self.__str__())
    }

    fn __eq__(&self, other: &PyExpr) -> bool {
        self.chart.same_coords(&other.chart) && self.expr.equals(&other.expr)
    }

    fn __add__(&self, other: &PyExpr) -> PyResult<Self> {
        self.same_chart(other)?;
        Ok(self.with(&self.expr + &other.expr))
    }

    fn __sub__(&self, other: &PyExpr) -> PyResult<Self> {
        self.same_chart(other)?;
        Ok(self.with(&self.expr - &other.expr))
    }

    fn __mul__(&self, other: &PyExpr) -> PyResult<Self> {
        self.same_chart(other)?;
        Ok(self.with(&self.expr * &other.expr))
    }

    fn __truediv__(&self, other: &PyExpr) -> PyResult<Self> {
        self.same_chart(other)?;
        let q = self.expr.checked_div(&other.expr).ok_or_else(|| err("division by zero or non-invertible expression"))?;
        Ok(self.with(q))
    }

    fn __neg__(&self) -> Self {
        self.with(-&self.expr)
    }

    fn is_zero(&self) -> bool {
        self.expr.is_zero()
    }

    /// Partial derivative with respect to a coordinate name.
    fn diff(&self, coord: &str) -> PyResult<Self> {
        let i = self.chart.index_of(coord).ok_or_else(|| err(format!("unknown coordinate `{coord}`")))?;
        Ok(self.with(self.expr.differentiate(i)))
    }

    /// Decimal value at a rational point.
    #[pyo3(signature = (point, bits=128))]
    fn evaluate(&self, point: Vec<Bound<'_, PyAny>>, bits: usize) -> PyResult<String> {
        let p = point.iter().map(rational).collect::<PyResult<Vec<_>>>()?;
        if p.len() != self.chart.dim() {
            return Err(err(format!("point must have {} coordinates", self.chart.dim())));
        }
        let v = evaluate_at(&self.expr, &p, bits).map_err(err)?;
        Ok(FloatCtx::new(bits).to_decimal(&v))
    }
}

/// A metric or a torsion-free connection, optionally backed by a catalogue model.
#[pyclass(name = "Geometry", module = "projsym")]
#[derive(Clone)]
struct PyGeometry {
    built: BuiltGeometry,
    source: Source,
}

impl PyGeometry {
    fn from_file(file: GeometryFile) -> PyResult<Self> {
        let loaded = file.load().map_err(err)?;
        Ok(PyGeometry {
            built: loaded.geometry,
            source: Source::File(file),
        })
    }

    fn connection(&self) -> ConnectionField {
        self.built.connection().clone()
    }
}

#[pymethods]
impl PyGeometry {
    /// Metric from a square matrix of expression strings.
    #[staticmethod]
    #[pyo3(signature = (coords, rows, params=None))]
    fn metric(coords: Vec<String>, rows: Vec<Vec<String>>, params: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let params = params_map(params)?.iter().map(|(k, v)| (k.clone(), projsym_core::expr::fmt_rational(v))).collect();
        Self::from_file(GeometryFile {
            coords,
            params,
            metric: Some(rows),
            ..Default::default()
        })
    }

    /// Connection from `{"a,b,c": expr}` entries, each setting Γ^a_bc = Γ^a_cb.
    #[staticmethod]
    #[pyo3(signature = (coords, entries, params=None))]
    fn connection_from(coords: Vec<String>, entries: BTreeMap<String, String>, params: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let params = params_map(params)?.iter().map(|(k, v)| (k.clone(), projsym_core::expr::fmt_rational(v))).collect();
        Self::from_file(GeometryFile {
            coords,
            params,
            connection: Some(entries),
            ..Default::default()
        })
    }

    #[staticmethod]
    #[pyo3(signature = (name, n=None, params=None))]
    fn model(name: &str, n: Option<usize>, params: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let params = params_map(params)?;
        let (built, desc) = catalogue::get_model(name, &params, n).map_err(err)?;
        Ok(PyGeometry {
            built,
            source: Source::Model {
                name: name.into(),
                n,
                params: desc.params,
            },
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Self::from_file(GeometryFile::from_json(text).map_err(err)?)
    }

    fn to_json(&self) -> String {
        match &self.built {
            BuiltGeometry::Metric(g) => GeometryFile::from_metric(g).to_json(),
            BuiltGeometry::Connection(c) => GeometryFile::from_connection(c).to_json(),
        }
    }

    #[getter]
    fn dim(&self) -> usize {
        self.built.connection().dim()
    }

    #[getter]
    fn coords(&self) -> Vec<String> {
        self.built.connection().chart().coords().to_vec()
    }

    #[getter]
    fn is_metric(&self) -> bool {
        self.built.metric().is_some()
    }

    fn signature(&self) -> Option<(usize, usize)> {
        self.built.metric().map(|g| g.signature())
    }

    /// `gamma[i][j][k]` = Γ^i_jk as strings.
    fn christoffel(&self) -> Vec<Vec<Vec<String>>> {
        let c = self.connection();
        let n = c.dim();
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| c.chart().show(c.get(i, j, k))).collect()).collect())
            .collect()
    }

    fn curvature_flags(&self, py: Python<'_>) -> PyResult<PyObject> {
        match &self.built {
            BuiltGeometry::Metric(g) => to_py(py, &curvature_flags(g)),
            BuiltGeometry::Connection(c) => {
                let flags = serde_json::json!({
                    "flat": riemann(c).is_zero(),
                    "projectively_flat": projective_weyl(c).tensor.is_zero(),
                });
                to_py(py, &flags)
            }
        }
    }

    /// Nonzero Riemann components as `{(i, j, k, l): str}`, antisymmetric in (k, l).
    fn riemann(&self) -> BTreeMap<(usize, usize, usize, usize), String> {
        let c = match &self.built {
            BuiltGeometry::Metric(g) => levi_civita(g),
            BuiltGeometry::Connection(c) => c.clone(),
        };
        let r = riemann(&c);
        r.nonzero().into_iter().map(|(idx, e)| ((idx[0], idx[1], idx[2], idx[3]), c.chart().show(e))).collect()
    }

    /// Coefficients (A0, A1, A2, A3) of y'' = A0 + A1 y' + A2 y'^2 + A3 y'^3 (2D only).
    fn geodesic_ode(&self) -> PyResult<Vec<String>> {
        let c = self.connection();
        let coeffs = geodesic_ode_connection(&c).map_err(err)?;
        Ok(coeffs.iter().map(|e| c.chart().show(e)).collect())
    }

    /// Strongest symmetry class of a vector field given by component strings.
    fn classify(&self, py: Python<'_>, components: Vec<String>) -> PyResult<PyObject> {
        let c = self.connection();
        let v = VectorFieldExpr::parse(c.chart(), &components).map_err(err)?;
        let cls = match &self.built {
            BuiltGeometry::Metric(g) => classify_field(&v, g),
            BuiltGeometry::Connection(conn) => classify_connection_field(&v, conn),
        }
        .map_err(err)?;
        let out = serde_json::json!({
            "kind": cls.kind,
            "lambda": cls.lambda.as_ref().map(projsym_core::expr::fmt_rational),
        });
        to_py(py, &out)
    }

    /// Dimensions of the requested symmetry algebras (all applicable kinds by default).
    #[pyo3(signature = (kinds=None, seed=0, points=2, max_order=6))]
    fn analyze(&self, py: Python<'_>, kinds: Option<Vec<String>>, seed: u64, points: usize, max_order: usize) -> PyResult<PyObject> {
        let req = AnalysisRequest {
            source: self.source.clone(),
            kinds: self::kinds(kinds)?,
            options: JetOptions {
                seed,
                points: points.max(1),
                max_order,
                ..JetOptions::default()
            },
        };
        let report = py.allow_threads(|| run_analysis(&req)).map_err(err)?;
        to_py(py, &report)
    }

    fn __repr__(&self) -> String {
        let what = match &self.source {
            Source::Model { name, .. } => format!("model {name}"),
            Source::File(_) => if self.is_metric() { "metric" } else { "connection" }.to_string(),
        };
        format!("Geometry({what}, n={})", self.dim())
    }
}

#[pyfunction]
fn list_models(py: Python<'_>) -> PyResult<PyObject> {
    to_py(py, &catalogue::list_models())
}

/// Checks a catalogue model's generators, dimensions and flags.
#[pyfunction]
#[pyo3(signature = (name, n=None, params=None, seed=0))]
fn verify_model(py: Python<'_>, name: &str, n: Option<usize>, params: Option<&Bound<'_, PyDict>>, seed: u64) -> PyResult<PyObject> {
    let params = params_map(params)?;
    let opts = JetOptions {
        seed,
        ..JetOptions::default()
    };
    let report = py.allow_threads(|| catalogue::verify_model(name, &params, n, &opts)).map_err(err)?;
    to_py(py, &report)
}

fn algebra(name: &str) -> PyResult<AlgebraKind> {
    match name {
        "projective" => Ok(AlgebraKind::Projective),
        "affine" => Ok(AlgebraKind::Affine),
        _ => Err(err(format!("algebra must be `projective` or `affine`, got `{name}`"))),
    }
}

#[pyfunction]
#[pyo3(signature = (n_max=9, algebra="projective"))]
fn gap_rows(py: Python<'_>, n_max: usize, algebra: &str) -> PyResult<PyObject> {
    if n_max < 2 {
        return Err(err("n_max must be at least 2"));
    }
    to_py(py, &rows(n_max, self::algebra(algebra)?))
}

/// LaTeX tabular of the two gaps.
#[pyfunction]
#[pyo3(signature = (n_max=9, algebra="projective"))]
fn gap_table(n_max: usize, algebra: &str) -> PyResult<String> {
    if n_max < 2 {
        return Err(err("n_max must be at least 2"));
    }
    let a = self::algebra(algebra)?;
    Ok(render_table(&rows(n_max, a), a))
}

#[pymodule]
fn projsym(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyExpr>()?;
    m.add_class::<PyGeometry>()?;
    m.add_function(wrap_pyfunction!(list_models, m)?)?;
    m.add_function(wrap_pyfunction!(verify_model, m)?)?;
    m.add_function(wrap_pyfunction!(gap_rows, m)?)?;
    m.add_function(wrap_pyfunction!(gap_table, m)?)?;
    Ok(())
}
