//! Acceptance criteria 1–11, one PASS/FAIL line each.
//!
//! Criteria whose literature claim disagrees with an exact computation are
//! listed in `KNOWN_DEVIATIONS`; they still print FAIL with the computed
//! values but do not fail the run.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use projsym::app::{gap_rows, render_table, AlgebraKind};
use projsym::catalogue::{get_model, list_models, verify_model, BuiltGeometry, ModelKind};
use projsym::expr::{rat, Rational};
use projsym::geometry::{conformal_weyl, levi_civita, projective_weyl, ricci, riemann};
use projsym::jet::{symmetry_profile, JetOptions, SymmetryReport, SystemKind};
use projsym::symmetry::{algebra_check, geodesic_ode_2d, mobility_residual, phi_map, AlgebraMode, FieldKind};
use projsym::{parse_expr, RatExpr};

use SystemKind::{Affine, Homothety, Killing, Mobility, Projective};

const KNOWN_DEVIATIONS: &[u32] = &[5, 6];

struct Outcome {
    pass: bool,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            pass: true,
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, note: impl Into<String>) {
        let note = note.into();
        if !ok {
            self.pass = false;
            self.notes.push(format!("[x] {note}"));
        } else {
            self.notes.push(note);
        }
    }
}

fn params(list: &[(&str, Rational)]) -> BTreeMap<String, Rational> {
    list.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn profile(name: &str, p: &[(&str, Rational)], n: Option<usize>, kinds: &[SystemKind]) -> SymmetryReport {
    let (built, _) = get_model(name, &params(p), n).expect("model builds");
    symmetry_profile(built.geometry(), kinds, &JetOptions::default()).expect("systems stabilize")
}

fn dims(r: &SymmetryReport, kinds: &[SystemKind]) -> Vec<usize> {
    kinds.iter().map(|&k| r.dim(k).expect("computed")).collect()
}

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn c1() -> Outcome {
    let mut o = Outcome::new();
    for n in 2..=4 {
        let t = Instant::now();
        let r = profile("flat", &[], Some(n), &[Projective, Affine, Mobility]);
        let got = dims(&r, &[Projective, Affine, Mobility]);
        let want = vec![n * n + 2 * n, n * n + n, binom(n + 2, 2)];
        o.check(got == want && r.confident(), format!("n={n}: (P,A,D)={got:?} want {want:?}"));
        o.check(t.elapsed() < Duration::from_secs(60), format!("n={n} in {:.1?}", t.elapsed()));
    }
    o
}

fn c2() -> Outcome {
    let mut o = Outcome::new();
    let (built, _) = get_model("egorov_connection", &BTreeMap::new(), Some(3)).unwrap();
    let conn = built.connection();
    let w = projective_weyl(&conn).tensor;
    // W^a_{bcd} in the stated convention is W^a_{dbc} here.
    let stated = |a: usize, b: usize, c: usize, d: usize| w.get(&[a - 1, d - 1, b - 1, c - 1]).clone();
    let nonzero = w.nonzero().len();
    o.check(
        stated(1, 2, 3, 2) == RatExpr::int(1) && stated(1, 3, 2, 2) == RatExpr::int(-1) && nonzero == 2,
        format!("W^1_232 = {}, W^1_322 = {}, {nonzero} nonzero components", stated(1, 2, 3, 2), stated(1, 3, 2, 2)),
    );
    let r = profile("egorov_connection", &[], Some(3), &[Projective]);
    o.check(r.dim(Projective) == Some(8), format!("P = {:?}", r.dim(Projective)));
    o
}

fn pp_wave_common(o: &mut Outcome, name: &str, n: usize, kinds: &[SystemKind], want: Vec<usize>) {
    let r = verify_model(name, &BTreeMap::new(), Some(n), &JetOptions::default()).unwrap();
    let got: Vec<usize> = kinds
        .iter()
        .map(|&k| r.profile.dim(k).expect("expected kinds are computed"))
        .collect();
    o.check(got == want, format!("n={n}: {kinds:?} = {got:?} want {want:?}"));
    let bad: Vec<_> = r.generators.iter().filter(|g| !g.ok).map(|g| g.label.clone()).collect();
    o.check(bad.is_empty(), format!("n={n}: {} generators classify as stated {bad:?}", r.generators.len()));
    let alg = r.algebra.as_ref().expect("all generators projective");
    o.check(
        alg.independent_dim == r.generators.len() && alg.closure_ok,
        format!("n={n}: independent {} of {}, closure {}", alg.independent_dim, r.generators.len(), alg.closure_ok),
    );
}

fn c3() -> Outcome {
    let mut o = Outcome::new();
    for n in [4, 5] {
        let t = Instant::now();
        let i = (n * n + 8 - 3 * n) / 2;
        let p = n * n + 6 - 3 * n;
        pp_wave_common(&mut o, "pp_wave_lorentz", n, &[Killing, Homothety, Affine, Projective], vec![i, i + 1, p, p]);
        o.check(t.elapsed() < Duration::from_secs(300), format!("n={n} in {:.1?}", t.elapsed()));
    }
    o
}

fn c4() -> Outcome {
    let mut o = Outcome::new();
    for n in [4, 5] {
        let t = Instant::now();
        let p = n * n + 8 - 3 * n;
        pp_wave_common(&mut o, "pp_wave_split", n, &[Affine, Projective], vec![p, p]);
        let (built, desc) = get_model("pp_wave_split", &BTreeMap::new(), Some(n)).unwrap();
        o.check(desc.generators.len() == p, format!("n={n}: {} listed generators", desc.generators.len()));
        let g = built.metric().unwrap();
        o.check(ricci(&riemann(&levi_civita(g))).is_zero(), format!("n={n}: Ricci = 0"));
        let cw = conformal_weyl(g).unwrap();
        let (y, w) = (1, 3);
        let pattern = cw
            .nonzero()
            .iter()
            .all(|(idx, _)| [idx[0], idx[1]].iter().all(|i| *i == y || *i == w) && idx[0] != idx[1] && [idx[2], idx[3]].iter().all(|i| *i == y || *i == w) && idx[2] != idx[3]);
        let count = cw.nonzero().len();
        o.check(pattern && count == 4, format!("n={n}: Weyl has {count} nonzero components, all on dy^dw (x) dy^dw"));
        o.check(t.elapsed() < Duration::from_secs(300), format!("n={n} in {:.1?}", t.elapsed()));
    }
    o
}

fn g1_case(o: &mut Outcome, c: Rational) {
    let label = format!("c={c}");
    let r = verify_model("kruckovic1", &params(&[("k", rat(1, 1)), ("c", c)]), Some(3), &JetOptions::default()).unwrap();
    let got: Vec<usize> = [Killing, Homothety, Mobility, Projective].iter().map(|&k| r.profile.dim(k).unwrap()).collect();
    o.check(got == [4, 5, 2, 6], format!("{label}: (I,H,D,P) = {got:?} want [4, 5, 2, 6]"));
    let count = |k: FieldKind| r.generators.iter().filter(|g| g.actual == k).count();
    let split = (count(FieldKind::Killing), count(FieldKind::Homothety), count(FieldKind::AffineOnly));
    o.check(split == (4, 1, 1), format!("{label}: fields classify as {split:?} (Killing, homothety, affine)"));
}

fn c5() -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    g1_case(&mut o, rat(1, 1));
    g1_case(&mut o, rat(0, 1));
    let (built, _) = get_model("kruckovic1", &params(&[("c", rat(1, 1))]), Some(3)).unwrap();
    let flat = riemann(&built.connection()).is_zero();
    o.notes.push(format!("metric with c=1 is flat: {flat}"));
    o.check(t.elapsed() < Duration::from_secs(120), format!("in {:.1?}", t.elapsed()));
    o
}

fn c6() -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    for eps in [1, -1] {
        let (built, _) = get_model("metric_2d", &params(&[("eps", rat(eps, 1))]), None).unwrap();
        let g = built.metric().unwrap();
        let ch = g.chart();
        let coeffs = geodesic_ode_2d(g).unwrap();
        let want = ["0", "-1/(2*x)", "0", "eps/x"].map(|s| parse_expr(s, ch).unwrap());
        let ok = coeffs.iter().zip(&want).all(|(a, b)| a.equals(b));
        o.check(ok, format!("metric_2d eps={eps}: y'' = (eps/x) y'^3 - y'/(2x)"));
    }
    for eps in [1, -1] {
        let (built, _) = get_model("metric_2d_alt", &params(&[("eps", rat(eps, 1))]), None).unwrap();
        let g = built.metric().unwrap();
        let ch = g.chart();
        let coeffs = geodesic_ode_2d(g).unwrap();
        let cubic = |sign: &str| ["y^3", "-3*x*y^2", "3*x^2*y", "-x^3"].map(|s| parse_expr(&format!("{sign}*eps*({s})"), ch).unwrap());
        let stated = coeffs.iter().zip(&cubic("-1")).all(|(a, b)| a.equals(b));
        let opposite = coeffs.iter().zip(&cubic("1")).all(|(a, b)| a.equals(b));
        o.check(stated, format!("metric_2d_alt eps={eps}: y'' = eps (x y' - y)^3 (computed: {})", if opposite { "-eps (x y' - y)^3" } else { "other" }));
    }
    let r = verify_model("metric_2d", &BTreeMap::new(), None, &JetOptions::default()).unwrap();
    let alg = r.algebra.unwrap();
    o.check(alg.independent_dim == 3 && alg.closure_ok && alg.is_sl2, format!("sl(2): independent {}, closure {}, sl2 {}", alg.independent_dim, alg.closure_ok, alg.is_sl2));
    o.check(r.profile.dim(Homothety) == Some(2), format!("H = {:?}", r.profile.dim(Homothety)));
    let (built, _) = get_model("metric_2d_alt", &BTreeMap::new(), None).unwrap();
    let (_, desc) = get_model("metric_2d_alt", &BTreeMap::new(), None).unwrap();
    let fields: Vec<_> = desc.generators.iter().map(|g| g.field.clone()).collect();
    let alt = algebra_check(&fields, built.geometry(), AlgebraMode::Projective).unwrap();
    o.check(alt.independent_dim == 3 && alt.closure_ok && alt.is_sl2, "alternate sl(2) closes");
    o.check(t.elapsed() < Duration::from_secs(60), format!("in {:.1?}", t.elapsed()));
    o
}

fn c7() -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    let r = verify_model("sphere_times_flat", &params(&[("c", rat(1, 1))]), Some(4), &JetOptions::default()).unwrap();
    o.check(r.profile.dim(Projective) == Some(9), format!("P = {:?}", r.profile.dim(Projective)));
    o.check(r.ok, "generators and expectations verify");
    o.check(t.elapsed() < Duration::from_secs(300), format!("in {:.1?}", t.elapsed()));
    o
}

fn c8() -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    for (n, want) in [(3, 6), (4, 10)] {
        let r = profile("constant_curvature", &[("c", rat(1, 1))], Some(n), &[Affine]);
        let a = r.dim(Affine).unwrap();
        o.check(a == want && a == binom(n + 1, 2), format!("n={n}: A = {a}, (n+1 choose 2) = {}", binom(n + 1, 2)));
        let base = n * n + 5 - 3 * n;
        o.check(a > base, format!("n={n}: exceeds n^2-3n+5 = {base}"));
        o.check(a == base + 1, format!("n={n}: matches n^2-3n+5+1 = {}", base + 1));
    }
    o.check(t.elapsed() < Duration::from_secs(300), format!("in {:.1?}", t.elapsed()));
    o
}

fn metric_models() -> Vec<(&'static str, Option<usize>)> {
    list_models()
        .into_iter()
        .filter(|m| m.kind == ModelKind::Metric)
        .map(|m| (m.name, None))
        .chain([("kruckovic1", Some(4)), ("pp_wave_lorentz", Some(5)), ("pp_wave_split", Some(5))])
        .collect()
}

fn c9() -> Outcome {
    let mut o = Outcome::new();
    let kinds = [Killing, Homothety, Mobility, Projective];
    let mut failures = Vec::new();
    let mut count = 0;
    for (name, n) in metric_models() {
        let r = profile(name, &[], n, &kinds);
        count += 1;
        for c in r.checks.iter().filter(|c| c.name.starts_with("est")) {
            if !c.holds {
                failures.push(format!("{name}: {}", c.statement));
            }
        }
        if name.starts_with("metric_2d") {
            let [i, _, d, p] = [0, 1, 2, 3].map(|k| r.dim(kinds[k]).unwrap());
            o.check(p < i + d, format!("{name}: P={p} <= I+D-1={}", i + d - 1));
        }
    }
    o.check(failures.is_empty(), format!("est1/est2 on {count} metric models {failures:?}"));
    o
}

fn c10() -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    let mut checked = 0;
    let mut failures = Vec::new();
    for (name, n) in metric_models() {
        let (built, desc) = get_model(name, &BTreeMap::new(), n).unwrap();
        let BuiltGeometry::Metric(g) = &built else { continue };
        for gen in &desc.generators {
            let a = phi_map(&gen.field, g).unwrap();
            checked += 1;
            if !mobility_residual(&a, g).unwrap().is_zero() {
                failures.push(format!("{name}/{}: residual", gen.label));
            }
            match gen.expected {
                FieldKind::Killing if !a.is_zero() => failures.push(format!("{name}/{}: Killing but phi != 0", gen.label)),
                FieldKind::Homothety if a.identity_multiple().is_none() => {
                    failures.push(format!("{name}/{}: homothety but phi not in span(Id)", gen.label))
                }
                _ => {}
            }
        }
    }
    o.check(failures.is_empty(), format!("{checked} generators {failures:?}"));
    o.check(t.elapsed() < Duration::from_secs(120), format!("in {:.1?}", t.elapsed()));
    o
}

const PROJECTIVE_TABLE: &str = r"\begin{tabular}{c||c|c|c|c|c|c|c|c|c}
$n$ & 2 & 3 & 4 & 5 & 6 & 7 & 8 & 9 & \dots\\
\hline
$\Delta^\mathfrak{p}_1$ & 5 & 7 & 11 & 15 & 19 & 23 & 27 & 31 & \dots \\
\hline
$\Delta^\mathfrak{p}_2$ & 0 & 2 & 1 & 2 & 3 & 4 & 5 & 6 & \dots
\end{tabular}
";

const AFFINE_TABLE: &str = r"\begin{tabular}{c||c|c|c|c|c|c|c|c|c}
$n$ & 2 & 3 & 4 & 5 & 6 & 7 & 8 & 9 & \dots\\
\hline
$\Delta^\mathfrak{a}_1$ & 2 & 3 & 4 & 5 & 6 & 7 & 8 & 9 & \dots \\
\hline
$\Delta^\mathfrak{a}_2$ & 1 & 3 & 4 & 7 & 10 & 13 & 16 & 19 & \dots
\end{tabular}
";

fn c11() -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    let p = render_table(&gap_rows(9, AlgebraKind::Projective), AlgebraKind::Projective);
    let a = render_table(&gap_rows(9, AlgebraKind::Affine), AlgebraKind::Affine);
    o.check(p == PROJECTIVE_TABLE, "projective table byte-identical");
    o.check(a == AFFINE_TABLE, "affine table byte-identical");
    let mut out = Vec::new();
    let code = projsym::app::run(["projsym", "gap-table", "--table"], &mut out, &mut Vec::new());
    o.check(code == 0 && String::from_utf8(out).unwrap() == format!("{PROJECTIVE_TABLE}\n{AFFINE_TABLE}"), "CLI --table output");
    o.check(t.elapsed() < Duration::from_secs(1), format!("in {:.1?}", t.elapsed()));
    o
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 11] = [
        (1, "flat baselines", c1),
        (2, "Egorov connection", c2),
        (3, "Lorentzian pp-wave", c3),
        (4, "split pp-wave", c4),
        (5, "Kruckovic g1", c5),
        (6, "2D submaximal", c6),
        (7, "S^2 x R^2", c7),
        (8, "affine exceptions", c8),
        (9, "estimate suite", c9),
        (10, "phi-map suite", c10),
        (11, "gap tables", c11),
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut unexpected = Vec::new();
    for (id, title, f) in criteria {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let t = Instant::now();
        let o = f();
        let status = if o.pass { "PASS" } else { "FAIL" };
        let known = !o.pass && KNOWN_DEVIATIONS.contains(&id);
        println!(
            "criterion {id:>2} {status} ({title}, {:.1?}){}: {}",
            t.elapsed(),
            if known { " [known deviation]" } else { "" },
            o.notes.join("; ")
        );
        if !o.pass && !known {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
