use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::chart::Chart;
use crate::expr::{fmt_rational, parse_expr, rat, RatExpr, Rational};
use crate::geometry::{ConnectionField, MetricField};
use crate::jet::SystemKind;
use crate::symmetry::{FieldKind, VectorFieldExpr};

use super::{
    BuiltGeometry, CatalogueError, ExpectedDim, ExpectedFlag, Generator, ModelDescriptor, ModelInfo, ModelKind,
    ParamSpec, Provenance,
};

use FieldKind::{AffineOnly, Homothety, Killing, ProjectiveOnly};
use Provenance::{Derived, Literature, Trivial};
use SystemKind::{Affine, Conformal, Homothety as H, Killing as I, Mobility, Projective};

fn spec(name: &'static str, default: Rational, constraint: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        default,
        constraint,
    }
}

fn one() -> Rational {
    Rational::one()
}

pub(super) fn registry() -> Vec<ModelInfo> {
    let info = |name, kind, min_dim, default_dim, any_dim, params, description| ModelInfo {
        name,
        kind,
        min_dim,
        default_dim,
        any_dim,
        params,
        description,
    };
    use ModelKind::{Connection, Metric};
    vec![
        info(
            "flat",
            Metric,
            2,
            3,
            true,
            vec![spec("q", Rational::zero(), "number of negative directions, 0 <= q <= n")],
            "flat space R^n; maximal projective and affine symmetry",
        ),
        info(
            "constant_curvature",
            Metric,
            2,
            3,
            true,
            vec![
                spec("c", one(), "sectional curvature, c != 0"),
                spec("q", Rational::zero(), "number of negative directions, 0 <= q <= n"),
            ],
            "stereographic model 4 sum(eps_i dx_i^2)/(1 + c sum(eps_i x_i^2))^2",
        ),
        info(
            "egorov_connection",
            Connection,
            3,
            3,
            true,
            vec![],
            "Egorov connection with the single nonzero pair G^1_23 = G^1_32 = x2",
        ),
        info(
            "pp_wave_lorentz",
            Metric,
            3,
            4,
            true,
            vec![],
            "Lorentzian pp-wave 2 dx dy + z^2 dy^2 + dz^2 + sum du_i^2",
        ),
        info(
            "pp_wave_split",
            Metric,
            4,
            4,
            true,
            vec![],
            "split-signature pp-wave dx dw + dy dz + y^2 dw^2 + sum eps_i du_i^2 (parameters eps5, eps6, ... default 1)",
        ),
        info(
            "kruckovic1",
            Metric,
            3,
            3,
            true,
            vec![
                spec("k", one(), "any rational"),
                spec("c", one(), "c != 2; c = 0 uses the modified generators"),
            ],
            "k dx^2 + 2(2-c) e^(cx) dx dy + e^(2x) dz^2, optionally extended by flat directions",
        ),
        info(
            "kruckovic2",
            Metric,
            3,
            3,
            false,
            vec![spec("k", one(), "any rational")],
            "k dx^2 + e^(2x)(2 dx dy - dz^2)",
        ),
        info(
            "kruckovic3",
            Metric,
            3,
            3,
            false,
            vec![
                spec("k", one(), "any rational"),
                spec("omega", rat(6, 5), "0 < omega < 2 with sqrt(4 - omega^2) rational"),
            ],
            "k dx^2 + e^(x sqrt(4-omega^2))(2 dx dy - (4/omega^2) cos^2(omega x/2) dz^2)",
        ),
        info(
            "metric_2d",
            Metric,
            2,
            2,
            false,
            vec![spec("eps", one(), "eps = 1 or -1")],
            "x dx^2 - 2 eps x dy^2; submaximal projective symmetry sl(2) in dimension 2",
        ),
        info(
            "metric_2d_alt",
            Metric,
            2,
            2,
            false,
            vec![spec("eps", one(), "eps = 1 or -1")],
            "(dx/y^2 - x dy/y^3)^2 - eps dy^2/y^8",
        ),
        info(
            "sphere_times_flat",
            Metric,
            3,
            4,
            true,
            vec![spec("c", one(), "c != 0")],
            "S^2_c x R^(n-2), stereographic sphere factor",
        ),
        info(
            "sphere_times_sphere",
            Metric,
            4,
            4,
            true,
            vec![
                spec("c", one(), "c != 0"),
                spec("cbar", one(), "curvature of the second factor"),
            ],
            "S^2_c x S^(n-2)_cbar, stereographic factors",
        ),
    ]
}

pub(super) fn is_eps_param(k: &str, n: usize) -> bool {
    k.strip_prefix("eps")
        .and_then(|s| s.parse::<usize>().ok())
        .is_some_and(|i| (5..=n).contains(&i))
}

fn err(model: &str, msg: impl Into<String>) -> CatalogueError {
    CatalogueError::Constraint {
        model: model.into(),
        msg: msg.into(),
    }
}

fn r(q: &Rational) -> String {
    format!("({})", fmt_rational(q))
}

struct Ctx {
    chart: Chart,
}

impl Ctx {
    fn new(coords: &[String], params: &BTreeMap<String, Rational>) -> Result<Self, CatalogueError> {
        let mut chart = Chart::new(coords)?;
        for (k, v) in params {
            chart = chart.with_param(k, v.clone());
        }
        Ok(Ctx { chart })
    }

    fn e(&self, s: &str) -> Result<RatExpr, CatalogueError> {
        Ok(parse_expr(s, &self.chart)?)
    }

    fn metric(&self, entries: &[(usize, usize, String)]) -> Result<MetricField, CatalogueError> {
        let n = self.chart.dim();
        let mut g = vec![vec![RatExpr::zero(); n]; n];
        for (i, j, s) in entries {
            let v = self.e(s)?;
            g[*i][*j] = &g[*i][*j] + &v;
            if i != j {
                g[*j][*i] = &g[*j][*i] + &v;
            }
        }
        Ok(MetricField::new(self.chart.clone(), g)?)
    }

    fn field(&self, label: impl Into<String>, terms: &[(&str, String)], expected: FieldKind) -> Result<Generator, CatalogueError> {
        Ok(Generator {
            label: label.into(),
            field: VectorFieldExpr::from_terms(&self.chart, terms)?,
            expected,
        })
    }
}

fn dims(list: &[(SystemKind, usize, Provenance)]) -> Vec<ExpectedDim> {
    list.iter()
        .map(|&(kind, value, provenance)| ExpectedDim {
            kind,
            value,
            provenance,
        })
        .collect()
}

fn flags(list: &[(&str, bool, Provenance)]) -> Vec<ExpectedFlag> {
    list.iter()
        .map(|&(flag, value, provenance)| ExpectedFlag {
            flag: flag.into(),
            value,
            provenance,
        })
        .collect()
}

fn coords(prefix: &[&str], tail: &str, from: usize, n: usize) -> Vec<String> {
    let mut c: Vec<String> = prefix.iter().map(|s| s.to_string()).collect();
    for i in from..=n {
        c.push(format!("{tail}{i}"));
    }
    c
}

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Killing fields of the stereographic sphere `4 Σ ε dx²/(1 + c Σ ε x²)²` on
/// the named coordinates.
fn sphere_fields(
    cx: &Ctx,
    names: &[String],
    eps: &[i64],
    c: &Rational,
    tag: &str,
) -> Result<Vec<Generator>, CatalogueError> {
    let mut out = Vec::new();
    for a in 0..names.len() {
        for b in a + 1..names.len() {
            out.push(cx.field(
                format!("{tag}rotation {}{}", names[a], names[b]),
                &[
                    (&names[a], format!("({})*{}", eps[b], names[b])),
                    (&names[b], format!("-({})*{}", eps[a], names[a])),
                ],
                Killing,
            )?);
        }
    }
    let quad: Vec<String> = names.iter().zip(eps).map(|(x, e)| format!("({e})*{x}^2")).collect();
    let quad = quad.join(" + ");
    for a in 0..names.len() {
        let mut terms = Vec::new();
        for (b, nb) in names.iter().enumerate() {
            let mut s = format!("2*{}*({})*{}*{}", r(c), eps[a], names[a], nb);
            if a == b {
                s = format!("1 - {}*({quad}) + {s}", r(c));
            }
            terms.push((nb.as_str(), s));
        }
        out.push(cx.field(format!("{tag}transvection {}", names[a]), &terms, Killing)?);
    }
    Ok(out)
}

fn sphere_metric_entries(names: &[String], offset: usize, eps: &[i64], c: &Rational) -> Vec<(usize, usize, String)> {
    let quad: Vec<String> = names.iter().zip(eps).map(|(x, e)| format!("({e})*{x}^2")).collect();
    let den = format!("(1 + {}*({}))^2", r(c), quad.join(" + "));
    (0..names.len())
        .map(|i| (offset + i, offset + i, format!("4*({})/{den}", eps[i])))
        .collect()
}

/// Affine fields of flat `R^k` on the named coordinates: translations,
/// rotations, the dilation and the trace-free symmetric parts.
fn flat_affine_fields(cx: &Ctx, names: &[String], dilation: FieldKind) -> Result<Vec<Generator>, CatalogueError> {
    let mut out = Vec::new();
    for a in names {
        out.push(cx.field(format!("d_{a}"), &[(a, "1".into())], Killing)?);
    }
    for i in 0..names.len() {
        for j in i + 1..names.len() {
            let (a, b) = (&names[i], &names[j]);
            out.push(cx.field(format!("{b} d_{a} - {a} d_{b}"), &[(a, b.clone()), (b, format!("-{a}"))], Killing)?);
            out.push(cx.field(format!("{b} d_{a} + {a} d_{b}"), &[(a, b.clone()), (b, a.clone())], AffineOnly)?);
        }
    }
    let euler: Vec<(&str, String)> = names.iter().map(|a| (a.as_str(), a.clone())).collect();
    out.push(cx.field("dilation", &euler, dilation)?);
    for a in &names[1..] {
        let first = &names[0];
        out.push(cx.field(
            format!("{first} d_{first} - {a} d_{a}"),
            &[(first, first.clone()), (a, format!("-{a}"))],
            AffineOnly,
        )?);
    }
    Ok(out)
}

fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}

fn sign_param(model: &str, name: &str, v: &Rational) -> Result<i64, CatalogueError> {
    if *v == one() {
        Ok(1)
    } else if *v == -one() {
        Ok(-1)
    } else {
        Err(err(model, format!("{name} must be 1 or -1")))
    }
}

pub(super) fn build(
    name: &str,
    params: &BTreeMap<String, Rational>,
    n: usize,
) -> Result<(BuiltGeometry, ModelDescriptor), CatalogueError> {
    let mut d = ModelDescriptor {
        name: name.into(),
        params: params.clone(),
        n,
        kind: ModelKind::Metric,
        expected: Vec::new(),
        flags: Vec::new(),
        signature: None,
        generators: Vec::new(),
    };
    let geometry = match name {
        "flat" => {
            let q = params["q"].to_integer().try_into().unwrap_or(usize::MAX);
            if q > n {
                return Err(err(name, "q must lie in 0..=n"));
            }
            let names = coords(&[], "x", 1, n);
            let cx = Ctx::new(&names, &BTreeMap::new())?;
            let entries: Vec<(usize, usize, String)> =
                (0..n).map(|i| (i, i, if i + q >= n { "-1".into() } else { "1".into() })).collect();
            let g = cx.metric(&entries)?;
            d.signature = Some((n - q, q));
            d.expected = dims(&[
                (I, n * (n + 1) / 2, Trivial),
                (H, n * (n + 1) / 2 + 1, Trivial),
                (Affine, n * n + n, Literature),
                (Projective, n * n + 2 * n, Literature),
                (Mobility, binom(n + 2, 2), Literature),
            ]);
            if n >= 3 {
                d.expected.push(ExpectedDim {
                    kind: Conformal,
                    value: (n + 1) * (n + 2) / 2,
                    provenance: Trivial,
                });
            }
            d.flags = flags(&[("flat", true, Trivial), ("projectively_flat", true, Trivial)]);
            if q == 0 {
                d.generators = flat_affine_fields(&cx, &names, Homothety)?;
                for a in &names {
                    let terms: Vec<(&str, String)> = names.iter().map(|b| (b.as_str(), format!("{a}*{b}"))).collect();
                    d.generators.push(cx.field(format!("{a} * dilation"), &terms, ProjectiveOnly)?);
                }
            }
            BuiltGeometry::Metric(g)
        }
        "constant_curvature" => {
            let c = params["c"].clone();
            if c.is_zero() {
                return Err(err(name, "c must be nonzero (use `flat` for c = 0)"));
            }
            let q = params["q"].to_integer().try_into().unwrap_or(usize::MAX);
            if q > n {
                return Err(err(name, "q must lie in 0..=n"));
            }
            let names = coords(&[], "x", 1, n);
            let eps: Vec<i64> = (0..n).map(|i| if i + q >= n { -1 } else { 1 }).collect();
            let cx = Ctx::new(&names, &BTreeMap::new())?;
            let g = cx.metric(&sphere_metric_entries(&names, 0, &eps, &c))?;
            d.signature = Some((n - q, q));
            let iso = n * (n + 1) / 2;
            d.expected = dims(&[
                (I, iso, Trivial),
                (H, iso, Derived),
                (Affine, iso, Literature),
                (Projective, n * n + 2 * n, Literature),
                (Mobility, binom(n + 2, 2), Literature),
            ]);
            if n >= 3 {
                d.expected.push(ExpectedDim {
                    kind: Conformal,
                    value: (n + 1) * (n + 2) / 2,
                    provenance: Derived,
                });
            }
            d.flags = flags(&[
                ("flat", false, Trivial),
                ("projectively_flat", true, Literature),
                ("conformally_flat", true, Trivial),
            ]);
            d.generators = sphere_fields(&cx, &names, &eps, &c, "")?;
            BuiltGeometry::Metric(g)
        }
        "egorov_connection" => {
            let names = coords(&[], "x", 1, n);
            let cx = Ctx::new(&names, &BTreeMap::new())?;
            let conn = ConnectionField::from_nonzero(cx.chart.clone(), &[(0, 1, 2, cx.e("x2")?)])?;
            d.kind = ModelKind::Connection;
            d.expected = dims(&[(Projective, n * n - 2 * n + 5, Literature)]);
            d.flags = flags(&[("projectively_flat", false, Literature)]);
            BuiltGeometry::Connection(conn)
        }
        "pp_wave_lorentz" => {
            let names = coords(&["x", "y", "z"], "u", 4, n);
            let cx = Ctx::new(&names, &BTreeMap::new())?;
            let mut entries = vec![(0, 1, "1".to_string()), (1, 1, "z^2".into()), (2, 2, "1".into())];
            for i in 3..n {
                entries.push((i, i, "1".into()));
            }
            let g = cx.metric(&entries)?;
            d.signature = Some((n - 1, 1));
            let iso = (n * n + 8 - 3 * n) / 2;
            d.expected = dims(&[
                (I, iso, Literature),
                (H, iso + 1, Literature),
                (Affine, n * n + 6 - 3 * n, Literature),
                (Projective, n * n + 6 - 3 * n, Literature),
                (Mobility, (n * n + 4 - 3 * n) / 2, Derived),
            ]);
            let us: Vec<String> = names[3..].to_vec();
            let mut gens = vec![
                cx.field("d_x", &[("x", "1".into())], Killing)?,
                cx.field("d_y", &[("y", "1".into())], Killing)?,
                cx.field("e^y (d_z - z d_x)", &[("z", "exp(y)".into()), ("x", "-z*exp(y)".into())], Killing)?,
                cx.field("e^-y (d_z + z d_x)", &[("z", "exp(-y)".into()), ("x", "z*exp(-y)".into())], Killing)?,
            ];
            for u in &us {
                gens.push(cx.field(format!("d_{u}"), &[(u, "1".into())], Killing)?);
                gens.push(cx.field(format!("{u} d_x - y d_{u}"), &[("x", u.clone()), (u, "-y".into())], Killing)?);
            }
            for a in 0..us.len() {
                for b in a + 1..us.len() {
                    let (ua, ub) = (&us[a], &us[b]);
                    gens.push(cx.field(format!("{ua} d_{ub} - {ub} d_{ua}"), &[(ub, ua.clone()), (ua, format!("-{ub}"))], Killing)?);
                }
            }
            let mut hom = vec![("x", "2*x".to_string()), ("z", "z".into())];
            hom.extend(us.iter().map(|u| (u.as_str(), u.clone())));
            gens.push(cx.field("2x d_x + z d_z + sum u_i d_u_i", &hom, Homothety)?);
            gens.push(cx.field("y d_x", &[("x", "y".into())], AffineOnly)?);
            for u in &us {
                gens.push(cx.field(format!("{u} d_x"), &[("x", u.clone())], AffineOnly)?);
            }
            for a in 0..us.len() {
                for b in a..us.len() {
                    let (ua, ub) = (&us[a], &us[b]);
                    gens.push(cx.field(format!("{ua} d_{ub} + {ub} d_{ua}"), &[(ub, ua.clone()), (ua, ub.clone())], AffineOnly)?);
                }
            }
            d.generators = gens;
            BuiltGeometry::Metric(g)
        }
        "pp_wave_split" => {
            let names = coords(&["x", "y", "z", "w"], "u", 5, n);
            let mut eps = Vec::new();
            for i in 5..=n {
                let v = params.get(&format!("eps{i}")).cloned().unwrap_or_else(one);
                eps.push(sign_param(name, &format!("eps{i}"), &v)?);
            }
            d.params = (5..=n).map(|i| (format!("eps{i}"), Rational::from_integer(eps[i - 5].into()))).collect();
            let cx = Ctx::new(&names, &BTreeMap::new())?;
            let mut entries = vec![(0, 3, "1/2".to_string()), (1, 2, "1/2".into()), (3, 3, "y^2".into())];
            for (k, e) in eps.iter().enumerate() {
                entries.push((4 + k, 4 + k, e.to_string()));
            }
            let g = cx.metric(&entries)?;
            let negs = eps.iter().filter(|&&e| e < 0).count();
            d.signature = Some((2 + eps.len() - negs, 2 + negs));
            let total = n * n + 8 - 3 * n;
            d.expected = dims(&[(Affine, total, Literature), (Projective, total, Literature)]);
            d.flags = flags(&[
                ("ricci_flat", true, Literature),
                ("conformally_flat", false, Literature),
            ]);
            let dil = if n == 4 { Homothety } else { AffineOnly };
            let mut gens = vec![
                cx.field("d_x", &[("x", "1".into())], Killing)?,
                cx.field("d_z", &[("z", "1".into())], Killing)?,
                cx.field("d_w", &[("w", "1".into())], Killing)?,
                cx.field("d_y - 2yw d_x + w^2 d_z", &[("y", "1".into()), ("x", "-2*y*w".into()), ("z", "w^2".into())], Killing)?,
                cx.field("y d_x - w d_z", &[("x", "y".into()), ("z", "-w".into())], Killing)?,
                cx.field(
                    "(z + yw^2) d_x - w d_y - w^3/3 d_z",
                    &[("x", "z + y*w^2".into()), ("y", "-w".into()), ("z", "-(w^3)/3".into())],
                    Killing,
                )?,
                cx.field(
                    "x d_z - y d_w + 2y^3/3 d_x",
                    &[("z", "x".into()), ("w", "-y".into()), ("x", "2*(y^3)/3".into())],
                    Killing,
                )?,
                cx.field(
                    "x d_x + y d_y - z d_z - w d_w",
                    &[("x", "x".into()), ("y", "y".into()), ("z", "-z".into()), ("w", "-w".into())],
                    Killing,
                )?,
                cx.field("2x d_x + y d_y + z d_z", &[("x", "2*x".into()), ("y", "y".into()), ("z", "z".into())], dil)?,
            ];
            let us: Vec<String> = names[4..].to_vec();
            for (a, u) in us.iter().enumerate() {
                let e = eps[a];
                gens.push(cx.field(format!("d_{u}"), &[(u, "1".into())], Killing)?);
                gens.push(cx.field(format!("2 eps {u} d_z - y d_{u}"), &[("z", format!("2*({e})*{u}")), (u, "-y".into())], Killing)?);
                gens.push(cx.field(format!("2 eps {u} d_x - w d_{u}"), &[("x", format!("2*({e})*{u}")), (u, "-w".into())], Killing)?);
            }
            for a in 0..us.len() {
                for b in a + 1..us.len() {
                    let (ua, ub, ea, eb) = (&us[a], &us[b], eps[a], eps[b]);
                    gens.push(cx.field(
                        format!("eps {ua} d_{ub} - eps {ub} d_{ua}"),
                        &[(ub, format!("({ea})*{ua}")), (ua, format!("-({eb})*{ub}"))],
                        Killing,
                    )?);
                }
            }
            gens.push(cx.field("y d_z", &[("z", "y".into())], AffineOnly)?);
            gens.push(cx.field("w d_x", &[("x", "w".into())], AffineOnly)?);
            gens.push(cx.field("y d_x + w d_z", &[("x", "y".into()), ("z", "w".into())], AffineOnly)?);
            for (a, u) in us.iter().enumerate() {
                let e = eps[a];
                gens.push(cx.field(format!("2 eps {u} d_z + y d_{u}"), &[("z", format!("2*({e})*{u}")), (u, "y".into())], AffineOnly)?);
                gens.push(cx.field(format!("2 eps {u} d_x + w d_{u}"), &[("x", format!("2*({e})*{u}")), (u, "w".into())], AffineOnly)?);
            }
            for a in 0..us.len() {
                for b in a..us.len() {
                    let (ua, ub, ea, eb) = (&us[a], &us[b], eps[a], eps[b]);
                    gens.push(cx.field(
                        format!("eps {ua} d_{ub} + eps {ub} d_{ua}"),
                        &[(ub, format!("({ea})*{ua}")), (ua, format!("({eb})*{ub}"))],
                        AffineOnly,
                    )?);
                }
            }
            d.generators = gens;
            BuiltGeometry::Metric(g)
        }
        "kruckovic1" => {
            let c = params["c"].clone();
            if c == rat(2, 1) {
                return Err(err(name, "c must differ from 2"));
            }
            let names = coords(&["x", "y", "z"], "u", 4, n);
            let cx = Ctx::new(&names, params)?;
            let mut entries = vec![
                (0, 0, "k".to_string()),
                (0, 1, "(2 - c)*exp(c*x)".into()),
                (2, 2, "exp(2*x)".into()),
            ];
            for i in 3..n {
                entries.push((i, i, "1".into()));
            }
            let g = cx.metric(&entries)?;
            d.signature = Some((n - 1, 1));
            let extended = n > 3;
            let hom = if extended { AffineOnly } else { Homothety };
            let mut gens = vec![
                cx.field("d_y", &[("y", "1".into())], Killing)?,
                cx.field("d_z", &[("z", "1".into())], Killing)?,
                cx.field("z d_y + e^(x(c-2)) d_z", &[("y", "z".into()), ("z", "exp(x*(c-2))".into())], Killing)?,
                cx.field("d_x - c y d_y - z d_z", &[("x", "1".into()), ("y", "-c*y".into()), ("z", "-z".into())], Killing)?,
            ];
            if c.is_zero() {
                gens.push(cx.field("(2y + k x/2) d_y + z d_z", &[("y", "2*y + k*x/2".into()), ("z", "z".into())], hom)?);
                gens.push(cx.field("2y d_y + z d_z", &[("y", "2*y".into()), ("z", "z".into())], AffineOnly)?);
            } else {
                gens.push(cx.field(
                    "(2y + k e^(-cx)/((c-2)c)) d_y + z d_z",
                    &[("y", "2*y + k*exp(-c*x)/((c-2)*c)".into()), ("z", "z".into())],
                    hom,
                )?);
                gens.push(cx.field("e^(cx) d_y", &[("y", "exp(c*x)".into())], AffineOnly)?);
            }
            if !extended {
                d.expected = dims(&[
                    (I, 4, Literature),
                    (H, 5, Literature),
                    (Mobility, 2, Literature),
                    (Projective, 6, Literature),
                    (Affine, 6, if c.is_zero() { Derived } else { Literature }),
                ]);
            }
            if extended {
                let m = n - 3;
                let a = if c == one() { n * n + n } else { 6 + m * m + 3 * m };
                d.expected = dims(&[(Affine, a, Derived)]);
            }
            d.generators = gens;
            BuiltGeometry::Metric(g)
        }
        "kruckovic2" => {
            let names = coords(&["x", "y", "z"], "u", 4, 3);
            let cx = Ctx::new(&names, params)?;
            let g = cx.metric(&[(0, 0, "k".into()), (0, 1, "exp(2*x)".into()), (2, 2, "-exp(2*x)".into())])?;
            d.expected = dims(&[(I, 4, Literature), (H, 5, Literature), (Mobility, 2, Literature), (Projective, 6, Literature)]);
            BuiltGeometry::Metric(g)
        }
        "kruckovic3" => {
            let omega = params["omega"].clone();
            if !omega.is_positive() || omega >= rat(2, 1) {
                return Err(err(name, "omega must lie in (0, 2)"));
            }
            let s = rational_sqrt(&(rat(4, 1) - &omega * &omega))
                .ok_or_else(|| err(name, "sqrt(4 - omega^2) must be rational"))?;
            let names = coords(&["x", "y", "z"], "u", 4, 3);
            let cx = Ctx::new(&names, params)?;
            let four_over = rat(4, 1) / (&omega * &omega);
            let g = cx.metric(&[
                (0, 0, "k".into()),
                (0, 1, format!("exp({}*x)", r(&s))),
                (2, 2, format!("-{}*exp({}*x)*cos(omega*x/2)^2", r(&four_over), r(&s))),
            ])?;
            d.expected = dims(&[(I, 4, Literature), (H, 5, Literature), (Mobility, 2, Literature), (Projective, 6, Literature)]);
            BuiltGeometry::Metric(g)
        }
        "metric_2d" => {
            sign_param(name, "eps", &params["eps"])?;
            let cx = Ctx::new(&["x".into(), "y".into()], params)?;
            let g = cx.metric(&[(0, 0, "x".into()), (1, 1, "-2*eps*x".into())])?;
            d.expected = dims(&[(I, 1, Derived), (H, 2, Literature), (Projective, 3, Literature)]);
            d.generators = vec![
                cx.field("d_y", &[("y", "1".into())], Killing)?,
                cx.field("x d_x + y d_y", &[("x", "x".into()), ("y", "y".into())], Homothety)?,
                cx.field("2xy d_x + y^2 d_y", &[("x", "2*x*y".into()), ("y", "y^2".into())], ProjectiveOnly)?,
            ];
            BuiltGeometry::Metric(g)
        }
        "metric_2d_alt" => {
            sign_param(name, "eps", &params["eps"])?;
            let cx = Ctx::new(&["x".into(), "y".into()], params)?;
            let g = cx.metric(&[
                (0, 0, "1/y^4".into()),
                (0, 1, "-x/y^5".into()),
                (1, 1, "x^2/y^6 - eps/y^8".into()),
            ])?;
            d.expected = dims(&[(Projective, 3, Literature)]);
            d.generators = vec![
                cx.field("x d_x - y d_y", &[("x", "x".into()), ("y", "-y".into())], Homothety)?,
                cx.field("x d_y", &[("y", "x".into())], ProjectiveOnly)?,
                cx.field("y d_x", &[("x", "y".into())], Killing)?,
            ];
            BuiltGeometry::Metric(g)
        }
        "sphere_times_flat" => {
            let c = params["c"].clone();
            if c.is_zero() {
                return Err(err(name, "c must be nonzero"));
            }
            let names = coords(&["x1", "x2"], "u", 3, n);
            let cx = Ctx::new(&names, &BTreeMap::new())?;
            let sph = names[..2].to_vec();
            let mut entries = sphere_metric_entries(&sph, 0, &[1, 1], &c);
            for i in 2..n {
                entries.push((i, i, "1".into()));
            }
            let g = cx.metric(&entries)?;
            d.signature = Some((n, 0));
            d.expected = dims(&[
                (Projective, n * n + 5 - 3 * n, Literature),
                (I, 3 + (n - 2) * (n - 1) / 2, Derived),
            ]);
            d.flags = flags(&[("conformally_flat", n == 3, Derived), ("projectively_flat", false, Literature)]);
            let mut gens = sphere_fields(&cx, &sph, &[1, 1], &c, "sphere ")?;
            gens.extend(flat_affine_fields(&cx, &names[2..], AffineOnly)?);
            d.generators = gens;
            BuiltGeometry::Metric(g)
        }
        "sphere_times_sphere" => {
            let (c, cbar) = (params["c"].clone(), params["cbar"].clone());
            if c.is_zero() {
                return Err(err(name, "c must be nonzero"));
            }
            let names = coords(&["x1", "x2"], "y", 3, n);
            let cx = Ctx::new(&names, &BTreeMap::new())?;
            let (sph, rest) = (names[..2].to_vec(), names[2..].to_vec());
            let mut entries = sphere_metric_entries(&sph, 0, &[1, 1], &c);
            let ones = vec![1; n - 2];
            if cbar.is_zero() {
                entries.extend((2..n).map(|i| (i, i, "1".to_string())));
            } else {
                entries.extend(sphere_metric_entries(&rest, 2, &ones, &cbar));
            }
            let g = cx.metric(&entries)?;
            d.signature = Some((n, 0));
            let mut gens = sphere_fields(&cx, &sph, &[1, 1], &c, "first ")?;
            if cbar.is_zero() {
                gens.extend(flat_affine_fields(&cx, &rest, AffineOnly)?);
                d.expected = dims(&[(Projective, n * n + 5 - 3 * n, Literature)]);
            } else {
                gens.extend(sphere_fields(&cx, &rest, &ones, &cbar, "second ")?);
                let iso = 3 + (n - 2) * (n - 1) / 2;
                d.expected = dims(&[(I, iso, Derived), (Projective, iso, Derived), (Affine, iso, Derived)]);
            }
            d.generators = gens;
            BuiltGeometry::Metric(g)
        }
        other => return Err(CatalogueError::UnknownModel(other.into())),
    };
    Ok((geometry, d))
}
