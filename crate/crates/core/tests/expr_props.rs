use proptest::prelude::*;

use projsym::expr::{evaluate_at, rat};
use projsym::{parse_expr, Chart, RatExpr};

fn chart() -> Chart {
    Chart::new(&["x", "y"]).unwrap()
}

fn atom() -> impl Strategy<Value = String> {
    prop_oneof![
        (-5i64..=5).prop_map(|k| format!("({k})")),
        Just("x".to_string()),
        Just("y".to_string()),
        Just("exp(x)".to_string()),
        Just("exp(2*y - x)".to_string()),
        Just("sin(y)".to_string()),
        Just("cos(x)".to_string()),
        Just("1/(1 + x^2)".to_string()),
        Just("1/y".to_string()),
    ]
}

fn expr_string() -> impl Strategy<Value = String> {
    atom().prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) + ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) - ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})*({b})")),
            (inner, 1u32..=2).prop_map(|(a, k)| format!("({a})^{k}")),
        ]
    })
}

fn parse(s: &str) -> RatExpr {
    parse_expr(s, &chart()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn display_round_trips(s in expr_string()) {
        let e = parse(&s);
        let again = parse(&chart().show(&e));
        prop_assert!(e.equals(&again), "{} vs {}", e, again);
    }

    #[test]
    fn ring_identities(a in expr_string(), b in expr_string(), c in expr_string()) {
        let (a, b, c) = (parse(&a), parse(&b), parse(&c));
        prop_assert!((&(&a + &b) - &b).equals(&a));
        prop_assert!((&a * &(&b + &c)).equals(&(&(&a * &b) + &(&a * &c))));
        prop_assert!((&a * &b).equals(&(&b * &a)));
    }

    #[test]
    fn exact_division(a in expr_string(), b in expr_string()) {
        let (a, b) = (parse(&a), parse(&b));
        prop_assume!(!b.is_zero());
        let q = (&a * &b).checked_div(&b).unwrap();
        prop_assert!(q.equals(&a));
    }

    #[test]
    fn leibniz_and_commuting_partials(a in expr_string(), b in expr_string()) {
        let (a, b) = (parse(&a), parse(&b));
        let lhs = (&a * &b).differentiate(0);
        let rhs = &(&a.differentiate(0) * &b) + &(&a * &b.differentiate(0));
        prop_assert!(lhs.equals(&rhs));
        prop_assert!(a.differentiate(0).differentiate(1).equals(&a.differentiate(1).differentiate(0)));
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in expr_string(), b in expr_string()) {
        let (a, b) = (parse(&a), parse(&b));
        let p = [rat(1, 3), rat(2, 5)];
        let bits = 128;
        let (Ok(va), Ok(vb), Ok(vs)) = (evaluate_at(&a, &p, bits), evaluate_at(&b, &p, bits), evaluate_at(&(&a + &b), &p, bits)) else {
            return Ok(());
        };
        let diff = vs.sub(&va.add(&vb, bits, astro_float::RoundingMode::ToEven), bits, astro_float::RoundingMode::ToEven);
        let scale = va.abs().add(&vb.abs(), bits, astro_float::RoundingMode::ToEven);
        let tol = scale.mul(&astro_float::BigFloat::from_f64(1e-25, bits), bits, astro_float::RoundingMode::ToEven);
        prop_assert!(diff.abs() <= tol.add(&astro_float::BigFloat::from_f64(1e-30, bits), bits, astro_float::RoundingMode::ToEven));
    }
}

#[test]
fn canonical_forms() {
    assert!(parse("(x + 1)^2 - x^2 - 2*x").equals(&RatExpr::one()));
    assert!(parse("exp(x)*exp(-x)").equals(&RatExpr::one()));
    assert!(parse("sin(x)^2 + cos(x)^2").equals(&RatExpr::one()));
    assert!(parse("(x^2 - y^2)/(x - y)").equals(&parse("x + y")));
    assert!(parse("x/(2*x)").equals(&RatExpr::constant(rat(1, 2))));
}

#[test]
fn rejects_malformed_input() {
    for s in ["x +", "foo(x)", "x^y", "(x", "z", "x^(1/2)", "1/0"] {
        assert!(parse_expr(s, &chart()).is_err(), "{s}");
    }
}
