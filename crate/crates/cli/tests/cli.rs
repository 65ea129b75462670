use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn memread(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_memread"))
        .args(args)
        .env_remove(memread_cli::OUT_DIR_ENV)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(&memread(args))).unwrap()
}

fn validate(schema: &str, doc: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(schema);
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{schema}: {errors:?}");
}

fn first_row(text: &str) -> Vec<String> {
    text.lines().nth(1).unwrap().split(',').map(String::from).collect()
}

#[test]
fn curve_rows_at_zero_loss() {
    for (scheme, fidelity) in [("single", "0.75"), ("double", "0.75"), ("single-squeezed", "1")] {
        let text = stdout(&memread(&["fidelity-curve", "--scheme", scheme, "--steps", "5"]));
        assert_eq!(text.lines().next().unwrap(), "A,kappa_sq,gain,squeeze_V,nbar,fidelity,classical_bound");
        assert_eq!(text.lines().count(), 6);
        let row = first_row(&text);
        assert_eq!(row[0], "0");
        assert_eq!(row[5], fidelity, "{scheme}");
        assert_eq!(row[6], "0.5");
        assert_eq!(row[3].is_empty(), scheme != "single-squeezed");
    }
}

#[test]
fn curve_rejects_bad_ranges() {
    for args in [
        &["--a-min", "0.5", "--a-max", "0.5"][..],
        &["--a-max", "1"],
        &["--a-min", "-0.1"],
        &["--steps", "1"],
    ] {
        let mut all = vec!["fidelity-curve", "--scheme", "single"];
        all.extend_from_slice(args);
        assert_eq!(memread(&all).status.code(), Some(2), "{args:?}");
    }
    assert_eq!(memread(&["fidelity-curve", "--scheme", "uniform"]).status.code(), Some(2));
    assert_eq!(memread(&["fidelity-curve", "--scheme", "triple"]).status.code(), Some(2));
}

#[test]
fn curve_json_matches_schema() {
    for scheme in ["single", "double", "single-squeezed"] {
        let doc = json(&["fidelity-curve", "--scheme", scheme, "--steps", "50", "--format", "json"]);
        validate("fidelity-curve.schema.json", &doc);
    }
}

#[test]
fn run_output_sign_structure() {
    let doc = json(&["run", "--scheme", "single", "--kappa", "1.41421356", "--loss", "0", "--mean", "1,0"]);
    let mean = &doc["output"]["mean"];
    assert!(mean[0].as_f64().unwrap().abs() < 1e-12);
    assert!((mean[1].as_f64().unwrap() + 1.0).abs() < 1e-8);
    validate("run.schema.json", &doc);

    let doc = json(&["run", "--mean", "0,0"]);
    assert_eq!(doc["output"]["mean"], serde_json::json!([0.0, 0.0]));
    assert_eq!(doc["fidelity"].as_f64(), Some(0.75));
}

#[test]
fn run_documents_validate() {
    for args in [
        &["run", "--scheme", "single", "--loss", "0.8", "--mean", "-1,2"][..],
        &["run", "--scheme", "uniform-squeezed"],
        &["run", "--scheme", "single-squeezed", "--loss", "0.3"],
        &["run", "--scheme", "single-squeezed", "--loss", "0.3", "--tilde-r", "3"],
        &["run", "--scheme", "double", "--mean", "0.5,0.5"],
    ] {
        validate("run.schema.json", &json(args));
    }
}

#[test]
fn run_rejects_invalid_parameters() {
    for args in [
        &["run", "--loss", "1"][..],
        &["run", "--mean", "1"],
        &["run", "--gain", "0.5"],
        &["run", "--kappa", "-1"],
        &["run", "--scheme", "single", "--uniform-r", "0.3"],
        &["run", "--scheme", "double", "--loss", "0.2"],
        &["run", "--scheme", "single-squeezed"],
    ] {
        assert_eq!(memread(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn run_csv_is_flat() {
    let text = stdout(&memread(&["run", "--format", "csv", "--mean", "1,0"]));
    assert_eq!(text.lines().next(), Some("field,value"));
    assert!(text.lines().any(|l| l == "output.mean.1,-1"));
    assert!(text.lines().any(|l| l == "nbar,0.333333333333"));
}

#[test]
fn oracle_check_reports_and_breaches() {
    let text = stdout(&memread(&["oracle-check", "--scheme", "single", "--slices", "100,1000"]));
    assert_eq!(text.lines().count(), 3);

    let doc = json(&["oracle-check", "--kappa", "0", "--slices", "10,100", "--format", "json"]);
    validate("oracle-check.schema.json", &doc);
    assert!(doc["rows"].as_array().unwrap().iter().all(|r| r["deviation"].as_f64().unwrap() < 1e-14));

    let o = memread(&["oracle-check", "--slices", "10"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("slices,"));

    assert_eq!(memread(&["oracle-check", "--slices", "100,10"]).status.code(), Some(2));
    assert_eq!(memread(&["oracle-check", "--scheme", "uniform"]).status.code(), Some(2));
}

#[test]
fn oracle_check_two_cell_json() {
    let doc = json(&["oracle-check", "--scheme", "double", "--omega-t", "60", "--format", "json"]);
    validate("oracle-check.schema.json", &doc);
    assert_eq!(doc["rows"][0]["slices"], 6000);
    assert_eq!(doc["omega_t"].as_f64(), Some(60.0));
}

#[test]
fn optimize_examples() {
    let doc = json(&["optimize", "--scheme", "single", "--loss", "0.5", "--format", "json"]);
    validate("optimize.schema.json", &doc);
    for side in ["numeric", "closed"] {
        assert!((doc[side]["kappa_sq"].as_f64().unwrap() - 4.0).abs() < 1e-6);
    }

    let doc = json(&["optimize", "--scheme", "uniform", "--format", "json"]);
    let r = doc["numeric"]["squeeze_r"].as_f64().unwrap();
    assert!(((2.0 * r).exp() - 3f64.sqrt()).abs() < 1e-6);

    let doc = json(&["optimize", "--scheme", "single-squeezed", "--loss", "0.8", "--format", "json"]);
    validate("optimize.schema.json", &doc);
    assert_eq!(doc["numeric"]["branch"], "amp");
    assert_eq!(doc["closed"]["branch"], "amp");

    assert_eq!(memread(&["optimize", "--scheme", "uniform", "--loss", "0.2"]).status.code(), Some(2));
    assert_eq!(memread(&["optimize", "--scheme", "single", "--frees", "gain"]).status.code(), Some(2));
}

#[test]
fn default_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_memread"))
        .args(["fidelity-curve", "--scheme", "double", "--steps", "3"])
        .env(memread_cli::OUT_DIR_ENV, dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("fidelity-double.csv")).unwrap();
    assert_eq!(text.lines().count(), 4);

    let explicit = dir.path().join("sub").join("c.json");
    let o = memread(&["fidelity-curve", "--scheme", "single", "--format", "json", "--out", explicit.to_str().unwrap()]);
    assert!(o.status.success());
    validate("fidelity-curve.schema.json", &serde_json::from_str(&std::fs::read_to_string(explicit).unwrap()).unwrap());
}

#[test]
fn unwritable_path_fails() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("f");
    std::fs::write(&file, "x").unwrap();
    let target = file.join("out.csv");
    let o = memread(&["fidelity-curve", "--scheme", "single", "--out", target.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}
