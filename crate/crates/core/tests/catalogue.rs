use std::collections::BTreeMap;

use projsym::catalogue::{get_model, list_models, verify_model, CatalogueError};
use projsym::expr::rat;
use projsym::jet::JetOptions;

#[test]
fn every_model_builds_at_defaults() {
    for m in list_models() {
        let (built, desc) = get_model(m.name, &BTreeMap::new(), None).unwrap();
        assert_eq!(built.connection().dim(), desc.n, "{}", m.name);
        for g in &desc.generators {
            assert_eq!(g.field.dim(), desc.n, "{}/{}", m.name, g.label);
        }
    }
}

#[test]
fn every_model_verifies_except_flat_g1_default() {
    for m in list_models() {
        let r = verify_model(m.name, &BTreeMap::new(), None, &JetOptions::default()).unwrap();
        if m.name == "kruckovic1" {
            assert!(!r.ok);
            continue;
        }
        assert!(r.ok, "{}: {r:?}", m.name);
    }
}

#[test]
fn g1_verifies_off_the_flat_value() {
    for c in [rat(0, 1), rat(1, 2), rat(3, 1), rat(-1, 1)] {
        let params = BTreeMap::from([("c".to_string(), c.clone())]);
        let r = verify_model("kruckovic1", &params, None, &JetOptions::default()).unwrap();
        assert!(r.ok, "c={c}");
    }
}

#[test]
fn parameter_and_dimension_errors() {
    let bad = BTreeMap::from([("nope".to_string(), rat(1, 1))]);
    assert!(get_model("flat", &bad, None).is_err());
    assert!(matches!(get_model("unknown", &BTreeMap::new(), None), Err(CatalogueError::UnknownModel(_))));
    assert!(get_model("pp_wave_split", &BTreeMap::new(), Some(3)).is_err());
    assert!(get_model("egorov_connection", &BTreeMap::new(), Some(2)).is_err());
}
