//! JSON geometry files.
//!
//! ```json
//! {
//!   "coords": ["x", "y"],
//!   "params": {"k": "1/2"},
//!   "metric": [["1", "0"], ["0", "exp(2*x)"]],
//!   "connection": {"x,y,y": "x"},
//!   "fields": [{"name": "shift", "components": ["0", "1"]}],
//!   "point": ["1/3", "2"]
//! }
//! ```
//!
//! Exactly one of `metric` and `connection` is required. A connection key
//! `"a,b,c"` sets `Γ^a_bc = Γ^a_cb`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chart::Chart;
use crate::expr::{parse_expr, Rational};
use crate::geometry::{ConnectionField, MetricField};
use crate::catalogue::BuiltGeometry;
use crate::serde_rational::parse_rational;
use crate::symmetry::VectorFieldExpr;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldEntry {
    pub name: String,
    pub components: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryFile {
    pub coords: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connection: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fields: Vec<FieldEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InputError {
    #[error("{0}")]
    Json(String),
    #[error("{location}: {msg}")]
    Entry { location: String, msg: String },
    #[error("{0}")]
    Shape(String),
}

/// A loaded file: geometry, named fields and an optional base point.
#[derive(Clone, Debug)]
pub struct LoadedGeometry {
    pub geometry: BuiltGeometry,
    pub fields: Vec<(String, VectorFieldExpr)>,
    pub point: Option<Vec<Rational>>,
}

fn entry_err(location: impl Into<String>, e: impl ToString) -> InputError {
    InputError::Entry {
        location: location.into(),
        msg: e.to_string(),
    }
}

impl GeometryFile {
    pub fn from_json(text: &str) -> Result<Self, InputError> {
        serde_json::from_str(text)
            .map_err(|e| InputError::Json(format!("invalid geometry file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// Writes a metric in file form; entries are canonical expression strings.
    pub fn from_metric(g: &MetricField) -> Self {
        let chart = g.chart();
        let n = g.dim();
        GeometryFile {
            coords: chart.coords().to_vec(),
            params: chart.params().iter().map(|(k, v)| (k.clone(), crate::expr::fmt_rational(v))).collect(),
            metric: Some((0..n).map(|i| (0..n).map(|j| chart.show(g.g(i, j))).collect()).collect()),
            ..Default::default()
        }
    }

    pub fn from_connection(c: &ConnectionField) -> Self {
        let chart = c.chart();
        let n = c.dim();
        let mut map = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                for k in j..n {
                    let e = c.get(i, j, k);
                    if !e.is_zero() {
                        map.insert(format!("{},{},{}", chart.name(i), chart.name(j), chart.name(k)), chart.show(e));
                    }
                }
            }
        }
        GeometryFile {
            coords: chart.coords().to_vec(),
            params: chart.params().iter().map(|(k, v)| (k.clone(), crate::expr::fmt_rational(v))).collect(),
            connection: Some(map),
            ..Default::default()
        }
    }

    pub fn chart(&self) -> Result<Chart, InputError> {
        let mut chart = Chart::new(&self.coords).map_err(|e| entry_err("coords", e))?;
        for (k, v) in &self.params {
            let q = parse_rational(v).ok_or_else(|| entry_err(format!("params.{k}"), format!("bad rational `{v}`")))?;
            chart = chart.with_param(k, q);
        }
        Ok(chart)
    }

    pub fn load(&self) -> Result<LoadedGeometry, InputError> {
        let chart = self.chart()?;
        let n = chart.dim();
        let geometry = match (&self.metric, &self.connection) {
            (Some(rows), None) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(InputError::Shape(format!("metric must be {n}x{n}")));
                }
                let mut g = Vec::with_capacity(n);
                for (i, row) in rows.iter().enumerate() {
                    let mut out = Vec::with_capacity(n);
                    for (j, s) in row.iter().enumerate() {
                        out.push(parse_expr(s, &chart).map_err(|e| entry_err(format!("metric[{i}][{j}]"), e))?);
                    }
                    g.push(out);
                }
                BuiltGeometry::Metric(MetricField::new(chart.clone(), g).map_err(|e| entry_err("metric", e))?)
            }
            (None, Some(map)) => {
                let mut entries = Vec::new();
                for (key, s) in map {
                    let idx: Vec<usize> = key
                        .split(',')
                        .map(|c| chart.index_of(c.trim()))
                        .collect::<Option<_>>()
                        .filter(|v: &Vec<usize>| v.len() == 3)
                        .ok_or_else(|| entry_err(format!("connection.{key}"), "key must name three coordinates `a,b,c`"))?;
                    let e = parse_expr(s, &chart).map_err(|e| entry_err(format!("connection.{key}"), e))?;
                    entries.push((idx[0], idx[1], idx[2], e));
                }
                BuiltGeometry::Connection(
                    ConnectionField::from_nonzero(chart.clone(), &entries).map_err(|e| entry_err("connection", e))?,
                )
            }
            _ => return Err(InputError::Shape("exactly one of `metric` and `connection` is required".into())),
        };
        let mut fields = Vec::new();
        for (k, f) in self.fields.iter().enumerate() {
            let v = VectorFieldExpr::parse(&chart, &f.components).map_err(|e| entry_err(format!("fields[{k}] ({})", f.name), e))?;
            fields.push((f.name.clone(), v));
        }
        let point = match &self.point {
            None => None,
            Some(p) if p.len() != n => return Err(InputError::Shape(format!("point must have {n} coordinates"))),
            Some(p) => Some(
                p.iter()
                    .enumerate()
                    .map(|(i, s)| parse_rational(s).ok_or_else(|| entry_err(format!("point[{i}]"), format!("bad rational `{s}`"))))
                    .collect::<Result<_, _>>()?,
            ),
        };
        Ok(LoadedGeometry { geometry, fields, point })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_file_round_trip() {
        let text = r#"{"coords": ["x", "y"], "metric": [["4/(1 + x^2 + y^2)^2", "0"], ["0", "4/(1+x^2+y^2)^2"]]}"#;
        let file = GeometryFile::from_json(text).unwrap();
        let loaded = file.load().unwrap();
        let g = loaded.geometry.metric().unwrap().clone();
        let again = GeometryFile::from_metric(&g).load().unwrap();
        let h = again.geometry.metric().unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(g.g(i, j), h.g(i, j));
            }
        }
    }

    #[test]
    fn errors_carry_locations() {
        let e = GeometryFile::from_json("{\"coords\": [\"x\"],\n \"metric\": [[1]]}").unwrap_err();
        assert!(matches!(e, InputError::Json(ref m) if m.contains("line 2")), "{e}");
        let f = GeometryFile::from_json(r#"{"coords": ["x", "y"], "metric": [["x +", "0"], ["0", "1"]]}"#).unwrap();
        let e = f.load().unwrap_err();
        assert!(e.to_string().starts_with("metric[0][0]"), "{e}");
    }

    #[test]
    fn connection_keys() {
        let f = GeometryFile::from_json(r#"{"coords": ["a", "b", "c"], "connection": {"a,b,c": "b"}}"#).unwrap();
        let loaded = f.load().unwrap();
        let BuiltGeometry::Connection(c) = &loaded.geometry else { panic!() };
        assert_eq!(c.get(0, 2, 1), c.get(0, 1, 2));
        assert!(!c.get(0, 1, 2).is_zero());
    }
}
