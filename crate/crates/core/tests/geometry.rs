use projsym::expr::rat;
use projsym::geometry::{curvature_flags, levi_civita, ricci, riemann, scalar_curvature, MetricField};
use projsym::symmetry::{classify_field, FieldKind, VectorFieldExpr};
use projsym::{parse_expr, Chart, RatExpr};

fn metric(coords: &[&str], rows: &[&[&str]]) -> MetricField {
    let chart = Chart::new(coords).unwrap();
    let g = rows
        .iter()
        .map(|r| r.iter().map(|s| parse_expr(s, &chart).unwrap()).collect())
        .collect();
    MetricField::new(chart, g).unwrap()
}

#[test]
fn christoffel_from_geodesic_energy() {
    // E-L equations of g = 2 dx dy + z^2 dy^2 + dz^2:
    // x'' + 2 z y' z' = 0, y'' = 0, z'' - z y'^2 = 0.
    let g = metric(&["x", "y", "z"], &[&["0", "1", "0"], &["1", "z^2", "0"], &["0", "0", "1"]]);
    let c = levi_civita(&g);
    let z = parse_expr("z", g.chart()).unwrap();
    assert!(c.get(0, 1, 2).equals(&z));
    assert!(c.get(0, 2, 1).equals(&z));
    assert!(c.get(2, 1, 1).equals(&-z.clone()));
    let nonzero = (0..3)
        .flat_map(|i| (0..3).flat_map(move |j| (0..3).map(move |k| (i, j, k))))
        .filter(|&(i, j, k)| !c.get(i, j, k).is_zero())
        .count();
    assert_eq!(nonzero, 3);
}

#[test]
fn round_sphere() {
    let g = metric(&["t", "p"], &[&["1", "0"], &["0", "sin(t)^2"]]);
    let r = riemann(&levi_civita(&g));
    let s = scalar_curvature(&ricci(&r), &g);
    assert!(s.equals(&RatExpr::int(2)));
    assert!(!curvature_flags(&g).flat);
}

#[test]
fn stereographic_sphere_has_constant_curvature() {
    let g = metric(&["x", "y"], &[&["4/(1 + x^2 + y^2)^2", "0"], &["0", "4/(1 + x^2 + y^2)^2"]]);
    let s = scalar_curvature(&ricci(&riemann(&levi_civita(&g))), &g);
    assert!(s.equals(&RatExpr::int(2)), "{s}");
}

#[test]
fn riemann_symmetries() {
    let g = metric(&["x", "y", "z"], &[&["1", "0", "0"], &["0", "exp(2*x)", "0"], &["0", "0", "x^2 + 1"]]);
    let r = riemann(&levi_civita(&g));
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    assert!(r.get(&[i, j, k, l]).equals(&-r.get(&[i, j, l, k]).clone()));
                    let bianchi = &(r.get(&[i, j, k, l]) + r.get(&[i, k, l, j])) + r.get(&[i, l, j, k]);
                    assert!(bianchi.is_zero());
                }
            }
        }
    }
}

#[test]
fn hyperbolic_plane_fields() {
    let g = metric(&["x", "y"], &[&["1/y^2", "0"], &["0", "1/y^2"]]);
    let ch = g.chart().clone();
    let field = |c: [&str; 2]| VectorFieldExpr::parse(&ch, &c).unwrap();
    assert_eq!(classify_field(&field(["1", "0"]), &g).unwrap().kind, FieldKind::Killing);
    assert_eq!(classify_field(&field(["x", "y"]), &g).unwrap().kind, FieldKind::Killing);
    assert_eq!(classify_field(&field(["x^2 - y^2", "2*x*y"]), &g).unwrap().kind, FieldKind::Killing);
    assert_eq!(classify_field(&field(["y", "0"]), &g).unwrap().kind, FieldKind::NotProjective);
    let flat = metric(&["x", "y"], &[&["1", "0"], &["0", "1"]]);
    let c = classify_field(&field(["x", "y"]), &flat).unwrap();
    assert_eq!(c.kind, FieldKind::Homothety);
    assert_eq!(c.lambda, Some(rat(2, 1)));
}

#[test]
fn round_sphere_flags() {
    let g = metric(&["t", "p"], &[&["1", "0"], &["0", "sin(t)^2"]]);
    let f = curvature_flags(&g);
    assert_eq!(f.constant_curvature, Some(rat(1, 1)));
    assert!(f.projectively_flat);
}
