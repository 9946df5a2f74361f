use std::io::Write;
use std::path::Path;

use projsym::app::{run, EXIT_INPUT, EXIT_OK, EXIT_VIOLATION};
use serde_json::Value;

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("projsym").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::File::create(&path).unwrap().write_all(text.as_bytes()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn export_then_analyze_matches_model() {
    let dir = tempfile::tempdir().unwrap();
    let (code, exported, _) = cli(&["export", "--model", "pp_wave_lorentz", "--n", "4"]);
    assert_eq!(code, EXIT_OK);
    let path = write(dir.path(), "pp.json", &exported);
    let kinds = "killing,homothety,projective";
    let (c1, from_file, _) = cli(&["analyze", "--file", &path, "--kinds", kinds, "--json"]);
    let (c2, from_model, _) = cli(&["analyze", "--model", "pp_wave_lorentz", "--n", "4", "--kinds", kinds, "--json"]);
    assert_eq!((c1, c2), (EXIT_OK, EXIT_OK));
    let a: Value = serde_json::from_str(&from_file).unwrap();
    let b: Value = serde_json::from_str(&from_model).unwrap();
    for key in ["dim_isometry", "dim_homothety", "dim_projective", "signature", "flags"] {
        assert_eq!(a[key], b[key], "{key}");
    }
    assert_eq!(a["dim_projective"], 10);
}

#[test]
fn analysis_is_deterministic() {
    let args = ["analyze", "--model", "metric_2d", "--seed", "7", "--json"];
    let (_, first, _) = cli(&args);
    let (_, second, _) = cli(&args);
    assert_eq!(first, second);
    let v: Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["dim_projective"], 3);
}

#[test]
fn user_file_with_fields_and_point() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "plane.json",
        r#"{"coords": ["x", "y"], "metric": [["1", "0"], ["0", "1"]],
            "fields": [{"name": "rot", "components": ["-y", "x"]}, {"name": "proj", "components": ["x^2", "x*y"]}],
            "point": ["1/2", "3"]}"#,
    );
    let (code, out, _) = cli(&["analyze", "--file", &path, "--json"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["dim_projective"], 8);
    assert_eq!(v["fields"][0]["kind"], "Killing");
    assert_eq!(v["fields"][1]["kind"], "ProjectiveOnly");
}

#[test]
fn input_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad_json = write(dir.path(), "bad.json", "{\"coords\": [\"x\"],");
    let bad_entry = write(dir.path(), "entry.json", r#"{"coords": ["x", "y"], "metric": [["1", "0"], ["0", "q"]]}"#);
    let missing = dir.path().join("absent.json");
    for args in [
        vec!["analyze", "--file", &bad_json],
        vec!["analyze", "--file", &bad_entry],
        vec!["analyze", "--file", missing.to_str().unwrap()],
        vec!["analyze", "--model", "no_such_model"],
        vec!["analyze", "--model", "flat", "--param", "c"],
        vec!["verify", "--model", "flat", "--precision", "8"],
        vec!["frobnicate"],
    ] {
        let (code, _, err) = cli(&args);
        assert_eq!(code, EXIT_INPUT, "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
    let (_, _, err) = cli(&["analyze", "--file", &bad_entry]);
    assert!(err.contains("metric[1][1]"), "{err}");
}

#[test]
fn verify_exit_codes() {
    assert_eq!(cli(&["verify", "--model", "egorov_connection"]).0, EXIT_OK);
    assert_eq!(cli(&["verify", "--model", "kruckovic1", "--param", "c=0"]).0, EXIT_OK);
    assert_eq!(cli(&["verify", "--model", "kruckovic1"]).0, EXIT_VIOLATION);
}

#[test]
fn models_listing_and_help() {
    let (code, out, _) = cli(&["models", "--json"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 12);
    let (code, out, _) = cli(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("gap-table"));
}

#[test]
fn gap_table_json() {
    let (code, out, _) = cli(&["gap-table", "--n-max", "5", "--algebra", "affine", "--json"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    let d2: Vec<_> = v["rows"]["affine"].as_array().unwrap().iter().map(|r| r["delta2"].as_u64().unwrap()).collect();
    assert_eq!(d2, [1, 3, 4, 7]);
}
