use serde::{Deserialize, Serialize};

use crate::chart::Chart;
use crate::error::GeometryError;
use crate::expr::RatExpr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variance {
    Up,
    Down,
}

/// Declared algebraic symmetry between two index slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotSymmetry {
    Symmetric(usize, usize),
    Antisymmetric(usize, usize),
}

/// Dense coordinate tensor with row-major component storage.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorField {
    chart: Chart,
    variance: Vec<Variance>,
    comps: Vec<RatExpr>,
}

impl TensorField {
    pub fn zeros(chart: &Chart, variance: Vec<Variance>) -> Self {
        let len = chart.dim().pow(variance.len() as u32);
        TensorField {
            chart: chart.clone(),
            variance,
            comps: vec![RatExpr::zero(); len],
        }
    }

    pub fn from_fn<F>(chart: &Chart, variance: Vec<Variance>, mut f: F) -> Self
    where
        F: FnMut(&[usize]) -> RatExpr,
    {
        let mut t = TensorField::zeros(chart, variance);
        let rank = t.rank();
        let n = chart.dim();
        let mut idx = vec![0usize; rank];
        for c in t.comps.iter_mut() {
            *c = f(&idx);
            for s in (0..rank).rev() {
                idx[s] += 1;
                if idx[s] < n {
                    break;
                }
                idx[s] = 0;
            }
        }
        t
    }

    pub fn from_components(
        chart: &Chart,
        variance: Vec<Variance>,
        comps: Vec<RatExpr>,
    ) -> Result<Self, GeometryError> {
        let expected = chart.dim().pow(variance.len() as u32);
        if comps.len() != expected {
            return Err(GeometryError::Shape(format!(
                "{} components for rank {}, expected {expected}",
                comps.len(),
                variance.len()
            )));
        }
        Ok(TensorField {
            chart: chart.clone(),
            variance,
            comps,
        })
    }

    /// Checks declared slot symmetries exactly.
    pub fn with_symmetries(self, syms: &[SlotSymmetry]) -> Result<Self, GeometryError> {
        for idx in self.indices() {
            for s in syms {
                let (a, b, anti) = match *s {
                    SlotSymmetry::Symmetric(a, b) => (a, b, false),
                    SlotSymmetry::Antisymmetric(a, b) => (a, b, true),
                };
                let mut swapped = idx.clone();
                swapped.swap(a, b);
                let u = self.get(&idx);
                let v = self.get(&swapped);
                let ok = if anti { (u + v).is_zero() } else { u.equals(v) };
                if !ok {
                    return Err(GeometryError::Shape(format!(
                        "declared symmetry {s:?} fails at {idx:?}"
                    )));
                }
            }
        }
        Ok(self)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn variance(&self) -> &[Variance] {
        &self.variance
    }

    pub fn components(&self) -> &[RatExpr] {
        &self.comps
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        let n = self.dim();
        idx.iter().fold(0, |acc, &i| acc * n + i)
    }

    pub fn get(&self, idx: &[usize]) -> &RatExpr {
        &self.comps[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: RatExpr) {
        let o = self.offset(idx);
        self.comps[o] = v;
    }

    /// All index tuples in storage order.
    pub fn indices(&self) -> Vec<Vec<usize>> {
        let n = self.dim();
        let rank = self.rank();
        (0..self.comps.len())
            .map(|mut o| {
                let mut idx = vec![0; rank];
                for s in (0..rank).rev() {
                    idx[s] = o % n;
                    o /= n;
                }
                idx
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    pub fn nonzero(&self) -> Vec<(Vec<usize>, &RatExpr)> {
        self.indices()
            .into_iter()
            .zip(self.comps.iter())
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }

    pub fn map<F: Fn(&RatExpr) -> RatExpr>(&self, f: F) -> TensorField {
        TensorField {
            chart: self.chart.clone(),
            variance: self.variance.clone(),
            comps: self.comps.iter().map(f).collect(),
        }
    }

    pub fn sub(&self, other: &TensorField) -> Result<TensorField, GeometryError> {
        if self.variance != other.variance || !self.chart.same_coords(&other.chart) {
            return Err(GeometryError::Shape("tensor shapes differ".into()));
        }
        Ok(TensorField {
            chart: self.chart.clone(),
            variance: self.variance.clone(),
            comps: self
                .comps
                .iter()
                .zip(other.comps.iter())
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Multi-line listing of the nonzero components.
    pub fn describe(&self, name: &str) -> String {
        let mut out = String::new();
        for (idx, c) in self.nonzero() {
            let mut up = String::new();
            let mut down = String::new();
            for (s, v) in idx.iter().zip(self.variance.iter()) {
                match v {
                    Variance::Up => up.push_str(&(s + 1).to_string()),
                    Variance::Down => down.push_str(&(s + 1).to_string()),
                }
            }
            out.push_str(&format!("{name}^{up}_{down} = {}\n", self.chart.show(c)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn storage_order_round_trips() {
        let ch = Chart::new(&["x", "y", "z"]).unwrap();
        let t = TensorField::from_fn(&ch, vec![Variance::Up, Variance::Down], |i| {
            RatExpr::int((10 * i[0] + i[1]) as i64)
        });
        assert_eq!(t.get(&[2, 1]), &RatExpr::int(21));
        assert_eq!(t.indices()[5], vec![1, 2]);
        assert!(t
            .clone()
            .with_symmetries(&[SlotSymmetry::Symmetric(0, 1)])
            .is_err());
    }
}
