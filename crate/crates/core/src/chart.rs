use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;
use crate::expr::{RatExpr, Rational};

/// Coordinate system and bound parameters shared by every field on it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chart {
    coords: Vec<String>,
    #[serde(with = "crate::serde_rational::map")]
    params: BTreeMap<String, Rational>,
    #[serde(skip)]
    excluded: Vec<RatExpr>,
}

impl Chart {
    pub fn new<S: AsRef<str>>(coords: &[S]) -> Result<Self, GeometryError> {
        let coords: Vec<String> = coords.iter().map(|s| s.as_ref().to_string()).collect();
        if coords.len() < 2 {
            return Err(GeometryError::InvalidChart(format!(
                "need at least 2 coordinates, got {}",
                coords.len()
            )));
        }
        for (i, c) in coords.iter().enumerate() {
            if coords[..i].contains(c) {
                return Err(GeometryError::InvalidChart(format!("duplicate coordinate `{c}`")));
            }
            if !is_identifier(c) {
                return Err(GeometryError::InvalidChart(format!("`{c}` is not an identifier")));
            }
        }
        Ok(Chart {
            coords,
            params: BTreeMap::new(),
            excluded: Vec::new(),
        })
    }

    pub fn with_param(mut self, name: &str, value: Rational) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn with_excluded(mut self, e: RatExpr) -> Self {
        if !e.is_zero() && e.as_constant().is_none() {
            self.excluded.push(e);
        }
        self
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn params(&self) -> &BTreeMap<String, Rational> {
        &self.params
    }

    pub fn param(&self, name: &str) -> Option<&Rational> {
        self.params.get(name)
    }

    /// Expressions that must not vanish at evaluation points.
    pub fn excluded_locus(&self) -> &[RatExpr] {
        &self.excluded
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c == name)
    }

    pub fn name(&self, i: usize) -> &str {
        &self.coords[i]
    }

    pub fn same_coords(&self, other: &Chart) -> bool {
        self.coords == other.coords
    }

    pub fn show(&self, e: &RatExpr) -> String {
        e.fmt_with(&|i| self.coords[i].clone())
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_small_dimension() {
        assert!(Chart::new(&["x"]).is_err());
        assert!(Chart::new(&["x", "x"]).is_err());
        assert!(Chart::new(&["x", "2y"]).is_err());
        assert_eq!(Chart::new(&["x", "y"]).unwrap().dim(), 2);
    }
}
