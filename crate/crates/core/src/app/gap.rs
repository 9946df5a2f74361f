//! Maximal and submaximal symmetry dimensions and the gaps between them.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

use crate::catalogue::get_model;
use crate::jet::{symmetry_profile, JetOptions, SystemKind};
use crate::expr::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum AlgebraKind {
    Projective,
    Affine,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapRow {
    pub n: usize,
    pub max_dim: usize,
    pub submax_general: usize,
    /// Keys `riemannian`, `lorentzian`, `general`; the last only for n ≥ 4.
    pub submax_metric_by_signature: BTreeMap<String, usize>,
    /// `submax_metric - (n² - 3n)` for the largest metric value.
    pub sigma: i64,
    pub delta1: usize,
    pub delta2: usize,
}

fn kron(n: usize, k: usize) -> usize {
    usize::from(n == k)
}

pub fn gap_row(n: usize, algebra: AlgebraKind) -> GapRow {
    assert!(n >= 2, "gap rows start at n = 2");
    let base = n * n + 5 - 3 * n;
    let (max_dim, submax_general, riemannian) = match algebra {
        AlgebraKind::Projective => (
            n * n + 2 * n,
            if n == 2 { 3 } else { n * n + 5 - 2 * n },
            base,
        ),
        AlgebraKind::Affine => (n * n + n, n * n, base + kron(n, 3) + kron(n, 4)),
    };
    let lorentzian = n * n + 6 - 3 * n - kron(n, 2);
    let mut by_sig = BTreeMap::from([("riemannian".to_string(), riemannian), ("lorentzian".to_string(), lorentzian)]);
    if n >= 4 {
        by_sig.insert("general".into(), n * n + 8 - 3 * n);
    }
    let metric = *by_sig.values().max().expect("nonempty");
    GapRow {
        n,
        max_dim,
        submax_general,
        submax_metric_by_signature: by_sig,
        sigma: metric as i64 - (n * n) as i64 + 3 * n as i64,
        delta1: max_dim - submax_general,
        delta2: submax_general - metric,
    }
}

pub fn gap_rows(n_max: usize, algebra: AlgebraKind) -> Vec<GapRow> {
    (2..=n_max).map(|n| gap_row(n, algebra)).collect()
}

/// LaTeX `tabular` with the two gap rows.
pub fn render_table(rows: &[GapRow], algebra: AlgebraKind) -> String {
    let sym = match algebra {
        AlgebraKind::Projective => "p",
        AlgebraKind::Affine => "a",
    };
    let cols = "c|".repeat(rows.len());
    let mut s = String::new();
    let _ = writeln!(s, "\\begin{{tabular}}{{c||{cols}c}}");
    let join = |f: &dyn Fn(&GapRow) -> String| rows.iter().map(|r| format!(" & {}", f(r))).collect::<String>();
    let _ = writeln!(s, "$n${} & \\dots\\\\", join(&|r| r.n.to_string()));
    s.push_str("\\hline\n");
    let _ = writeln!(s, "$\\Delta^\\mathfrak{{{sym}}}_1${} & \\dots \\\\", join(&|r| r.delta1.to_string()));
    s.push_str("\\hline\n");
    let _ = writeln!(s, "$\\Delta^\\mathfrak{{{sym}}}_2${} & \\dots", join(&|r| r.delta2.to_string()));
    s.push_str("\\end{tabular}\n");
    s
}

/// One jet-counter comparison against a formula entry.
#[derive(Clone, Debug, Serialize)]
pub struct GapCheck {
    pub n: usize,
    pub algebra: AlgebraKind,
    pub signature: String,
    pub model: String,
    pub formula: usize,
    pub computed: Option<usize>,
    pub error: Option<String>,
    pub ok: bool,
}

/// Catalogue model realizing the metric submaximum, with parameters.
pub fn realizing_model(n: usize, algebra: AlgebraKind, signature: &str) -> Option<(&'static str, Vec<(&'static str, i64)>)> {
    use AlgebraKind::*;
    match (algebra, signature, n) {
        (Projective, "riemannian", 2) => Some(("metric_2d", vec![("eps", -1)])),
        (Projective, "lorentzian", 2) => Some(("metric_2d", vec![("eps", 1)])),
        (Affine, "riemannian", 2..=4) => Some(("constant_curvature", vec![])),
        (Affine, "lorentzian", 2) => Some(("constant_curvature", vec![("q", 1)])),
        (_, "riemannian", _) => Some(("sphere_times_flat", vec![])),
        (_, "lorentzian", _) => Some(("pp_wave_lorentz", vec![])),
        (_, "general", _) => Some(("pp_wave_split", vec![])),
        _ => None,
    }
}

/// Compares every metric-submaximum entry up to `n_max` with the jet counter.
pub fn cross_check(n_max: usize, algebra: AlgebraKind, opts: &JetOptions) -> Vec<GapCheck> {
    let kind = match algebra {
        AlgebraKind::Projective => SystemKind::Projective,
        AlgebraKind::Affine => SystemKind::Affine,
    };
    let mut out = Vec::new();
    for row in gap_rows(n_max, algebra) {
        for (sig, &formula) in &row.submax_metric_by_signature {
            let Some((model, params)) = realizing_model(row.n, algebra, sig) else {
                continue;
            };
            let params: BTreeMap<String, Rational> =
                params.into_iter().map(|(k, v)| (k.to_string(), Rational::from_integer(v.into()))).collect();
            let computed = get_model(model, &params, Some(row.n))
                .map_err(|e| e.to_string())
                .and_then(|(built, _)| {
                    symmetry_profile(built.geometry(), &[kind], opts)
                        .map(|r| r.dim(kind).unwrap_or(0))
                        .map_err(|e| e.to_string())
                });
            let (computed, error) = match computed {
                Ok(c) => (Some(c), None),
                Err(e) => (None, Some(e)),
            };
            out.push(GapCheck {
                n: row.n,
                algebra,
                signature: sig.clone(),
                model: model.into(),
                formula,
                ok: computed == Some(formula),
                computed,
                error,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_match_known_gaps() {
        let p = gap_rows(9, AlgebraKind::Projective);
        assert_eq!(p.iter().map(|r| r.delta1).collect::<Vec<_>>(), [5, 7, 11, 15, 19, 23, 27, 31]);
        assert_eq!(p.iter().map(|r| r.delta2).collect::<Vec<_>>(), [0, 2, 1, 2, 3, 4, 5, 6]);
        let a = gap_rows(9, AlgebraKind::Affine);
        assert_eq!(a.iter().map(|r| r.delta1).collect::<Vec<_>>(), [2, 3, 4, 5, 6, 7, 8, 9]);
        assert_eq!(a.iter().map(|r| r.delta2).collect::<Vec<_>>(), [1, 3, 4, 7, 10, 13, 16, 19]);
    }

    #[test]
    fn sigma_values() {
        let s: Vec<i64> = gap_rows(6, AlgebraKind::Projective).iter().map(|r| r.sigma).collect();
        assert_eq!(s, [5, 6, 8, 8, 8]);
    }

    #[test]
    fn small_cross_check() {
        let checks = cross_check(3, AlgebraKind::Projective, &JetOptions::default());
        assert!(checks.iter().all(|c| c.ok), "{checks:?}");
        assert_eq!(checks.len(), 4);
    }
}
