use std::path::PathBuf;
use std::process::Command;
use std::sync::OnceLock;

use serde_json::Value;

fn fixture(name: &str) -> String {
    format!("{}/../core/fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

fn validator() -> &'static jsonschema::Validator {
    static V: OnceLock<jsonschema::Validator> = OnceLock::new();
    V.get_or_init(|| {
        let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schema/output.schema.json");
        let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        jsonschema::validator_for(&schema).unwrap()
    })
}

/// Runs the binary with `--json`; returns the exit code and the schema-checked document.
fn run_json(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_tuhyper"))
        .args(args)
        .arg("--json")
        .env("TUHYPER_NO_COLOR", "1")
        .output()
        .unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let doc: Value =
        serde_json::from_str(&stdout).unwrap_or_else(|e| panic!("{args:?}: stdout is not JSON ({e}): {stdout}"));
    let errors: Vec<String> = validator().iter_errors(&doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{args:?} violates the schema: {errors:?}\n{doc:#}");
    (out.status.code().unwrap(), doc)
}

#[test]
fn check_fig1_reports_a_tree_house() {
    let (code, doc) = run_json(&["check", &fixture("fig1")]);
    assert_eq!(code, 1);
    assert_eq!(doc["tu"], false);
    assert_eq!(doc["witness"]["kind"], "odd_tree_house");
    assert_eq!(doc["witness"]["root"], "r");
}

#[test]
fn check_tu_instances_exit_zero() {
    for name in ["c4", "dir4"] {
        let (code, doc) = run_json(&["check", &fixture(name)]);
        assert_eq!((code, &doc["tu"]), (0, &Value::Bool(true)), "{name}");
    }
}

#[test]
fn fig2_falls_back_to_minors_and_is_rejected_when_disjointness_is_required() {
    let (code, doc) = run_json(&["check", &fixture("fig2")]);
    assert_eq!(code, 1);
    assert_eq!(doc["method"], "minors");
    assert_eq!(doc["minor"]["det_abs"], 2);

    let (code, doc) = run_json(&["check", "--disjoint", &fixture("fig2")]);
    assert_eq!(code, 2);
    let msg = doc["error"]["message"].as_str().unwrap();
    assert!(msg.contains("edges e and f"), "{msg}");
}

#[test]
fn delta_of_fig2_is_two() {
    let (code, doc) = run_json(&["delta", &fixture("fig2")]);
    assert_eq!(code, 0);
    assert_eq!(doc["delta"], 2);
}

#[test]
fn build_r_on_fig5_yields_an_unbalanced_hole() {
    for extra in [None, Some("--transpose")] {
        let fig5 = fixture("fig5");
        let mut args = vec!["build-r", fig5.as_str()];
        args.extend(extra);
        let (code, doc) = run_json(&args);
        assert_eq!(code, 0, "{extra:?}");
        assert_eq!(doc["AR_is_unbalanced_hole"], true);
        assert_eq!(doc["R_is_tu"], true);
        assert_eq!(doc["det_product"].as_i64().unwrap().abs(), 2);
    }
}

#[test]
fn build_r_rejects_instances_that_are_not_almost_tu() {
    let (code, _) = run_json(&["build-r", &fixture("c4")]);
    assert_eq!(code, 2);
}

#[test]
fn emitted_certificates_verify_in_a_fresh_process() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, name) in [
        ("check", "fig1"),
        ("check", "c3"),
        ("check", "fig5"),
        ("extract", "fig1"),
        ("check", "fig4_left"),
    ] {
        let (code, doc) = run_json(&[cmd, &fixture(name)]);
        assert_eq!(code, 1, "{cmd} {name}");
        let cert = dir.path().join(format!("{cmd}-{name}.json"));
        std::fs::write(&cert, doc.to_string()).unwrap();
        let (code, v) = run_json(&["check", &fixture(name), "--verify-cert", cert.to_str().unwrap()]);
        assert_eq!((code, &v["verified"]), (0, &Value::Bool(true)), "{cmd} {name}");
    }
}

#[test]
fn a_certificate_for_another_instance_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let (_, doc) = run_json(&["check", &fixture("c3")]);
    let cert = dir.path().join("c3.json");
    std::fs::write(&cert, doc["witness"].to_string()).unwrap();
    // Same vertex names, but C4 has no triangle.
    let renamed = dir.path().join("c4.json");
    std::fs::write(
        &renamed,
        r#"{"vertices": ["a","b","c","d"], "edges": [["a","b"],["b","c"],["c","d"],["a","d"]]}"#,
    )
    .unwrap();
    let (code, v) = run_json(&[
        "check",
        renamed.to_str().unwrap(),
        "--verify-cert",
        cert.to_str().unwrap(),
    ]);
    assert_eq!((code, &v["verified"]), (1, &Value::Bool(false)));
}

#[test]
fn detect_extract_camion_reduce_on_fixtures() {
    let (code, doc) = run_json(&["detect", &fixture("fig2")]);
    assert_eq!(code, 0);
    assert!(doc["odd_cycle"].is_null() && doc["odd_tree_house"].is_null());

    let (code, doc) = run_json(&["detect", &fixture("fig5")]);
    assert_eq!(
        (code, doc["almost_tu_class"].as_str()),
        (1, Some("mixed_odd_tree_house"))
    );

    let (code, doc) = run_json(&["extract", "--trace", &fixture("fig1")]);
    assert_eq!(code, 1);
    assert_eq!(doc["verified"], true);
    assert!(!doc["trace"]["rounds"].as_array().unwrap().is_empty());

    let (code, doc) = run_json(&["extract", &fixture("c4")]);
    assert_eq!((code, &doc["tu"]), (0, &Value::Bool(true)));

    let (code, doc) = run_json(&["camion", &fixture("fig1")]);
    assert_eq!(code, 1);
    assert_eq!(doc["witness"]["support"], 10);

    let (code, doc) = run_json(&["reduce", &fixture("fig4_left")]);
    assert_eq!(code, 0);
    assert_eq!(doc["transcript"].as_array().unwrap().len(), 3);
    assert_eq!(doc["matrix"].as_array().unwrap().len(), 7);
}

#[test]
fn gen_is_seeded_and_deterministic() {
    let args = [
        "gen",
        "--seed",
        "42",
        "--vertices",
        "8",
        "--proper",
        "4",
        "--plant",
        "mixed-odd-cycle:3",
    ];
    let (code, a) = run_json(&args);
    let (_, b) = run_json(&args);
    assert_eq!(code, 0);
    assert_eq!(a, b);
    assert_eq!(a["planted"]["kind"], "mixed_odd_cycle");

    let (code, doc) = run_json(&["gen", "--vertices", "4"]);
    assert_eq!(code, 2);
    assert_eq!(doc["command"], "error");
}

#[test]
fn generated_instances_round_trip_through_check() {
    let dir = tempfile::tempdir().unwrap();
    let (_, doc) = run_json(&[
        "gen",
        "--seed",
        "7",
        "--vertices",
        "9",
        "--plant",
        "odd-tree-house:1,3,1",
    ]);
    let file = dir.path().join("g.json");
    std::fs::write(&file, doc["instance"].to_string()).unwrap();
    let (code, check) = run_json(&["check", file.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(check["tu"], false);
}

#[test]
fn guards_and_budgets_exit_three() {
    let (code, doc) = run_json(&["delta", "--max-order", "6", &fixture("fig2")]);
    assert_eq!((code, doc["error"]["kind"].as_str()), (3, Some("limit")));
    let (code, _) = run_json(&["check", "--max-nodes", "1", &fixture("fig1")]);
    assert_eq!(code, 3);
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"vertices": ["a"], "edges": [["a", "zz"]]}"#).unwrap();
    let (code, doc) = run_json(&["check", bad.to_str().unwrap()]);
    assert_eq!((code, doc["error"]["kind"].as_str()), (2, Some("input")));
}

#[test]
fn selftest_passes_with_workers() {
    let (code, doc) = run_json(&["selftest", "--workers", "2", "--random", "50", "--seed", "9"]);
    assert_eq!(code, 0, "{doc:#}");
    assert_eq!(doc["failed"], 0);
}

#[test]
fn human_output_has_no_color_when_disabled() {
    let out = Command::new(env!("CARGO_BIN_EXE_tuhyper"))
        .args(["check", &fixture("fig1")])
        .env("TUHYPER_NO_COLOR", "1")
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("not TU"));
    assert!(!text.contains('\x1b'));
}
