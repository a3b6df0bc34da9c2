use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn sample(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../samples").join(name)
}

fn ttforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ttforge"))
        .args(args)
        .env_remove("TTFORGE_LOG")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn malformed_json_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    let out = ttforge(&["analyze", path(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("malformed JSON"));
}

#[test]
fn missing_file_and_bad_flags_are_input_errors() {
    assert_eq!(ttforge(&["analyze", "/nonexistent/x.json"]).status.code(), Some(1));
    assert_eq!(ttforge(&["analyze", "--format", "yaml", "x"]).status.code(), Some(1));
    assert_eq!(ttforge(&["--help"]).status.code(), Some(0));
}

#[test]
fn unknown_fields_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc: Value =
        serde_json::from_str(&std::fs::read_to_string(sample("sigma.json")).unwrap()).unwrap();
    doc["extra"] = Value::Bool(true);
    let file = dir.path().join("x.json");
    std::fs::write(&file, doc.to_string()).unwrap();
    assert_eq!(ttforge(&["analyze", path(&file)]).status.code(), Some(1));
}

#[test]
fn reducible_map_fails_induce_precondition() {
    let out = ttforge(&["induce", path(&sample("triangular.json"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("reducible"));
}

#[test]
fn analyze_sigma() {
    let out = ttforge(&["analyze", path(&sample("sigma.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["schema"], "ttforge-report/1");
    assert_eq!(r["command"], "analyze");
    assert_eq!(r["passed"], true);
    assert_eq!(r["input_sha256"].as_str().unwrap().len(), 64);
    let res = &r["result"];
    assert_eq!(res["transition_matrix"], serde_json::json!([[1, 1], [1, 1]]));
    assert!((res["lambda"]["value"].as_f64().unwrap() - 2.0).abs() < 1e-9);
}

#[test]
fn analyze_reports_invariant_subgraph() {
    let out = ttforge(&["analyze", path(&sample("triangular.json")), "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("irreducible: no"), "{text}");
}

#[test]
fn quotient_of_sigma_has_rank_one() {
    let out = ttforge(&["quotient", path(&sample("sigma.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["K"], 1);
    assert_eq!(r["result"]["rank"], 1);
}

#[test]
fn quotient_of_nilpotent_map_is_trivial() {
    let out = ttforge(&["quotient", path(&sample("nilp.json"))]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["rank"], 0);
}

#[test]
fn induce_sigma_writes_package() {
    let dir = tempfile::tempdir().unwrap();
    let out = ttforge(&["induce", path(&sample("sigma.json")), "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["passed"], true);
    assert_eq!(r["result"]["constants"]["K"], 2);
    assert_eq!(r["result"]["theta_bar"]["rank"], 1);
    for f in ["theta_bar.json", "fbar.json", "pbar.json", "P.json", "constants.json", "report.json"] {
        assert!(dir.path().join(f).is_file(), "missing {f}");
    }
    let saved: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(saved, r);
}

#[test]
fn reports_are_byte_identical_on_rerun() {
    for args in [
        vec!["analyze", "sigma.json"],
        vec!["induce", "fib.json"],
        vec!["suspend", "fib.json", "--check", "pair", "--count", "200"],
    ] {
        let mut args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        args[1] = path(&sample(&args[1])).to_string();
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let a = ttforge(&args);
        let b = ttforge(&args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn suspend_checks_pass_on_fixtures() {
    for (file, check) in [
        ("fib.json", "flow"),
        ("fib.json", "pair"),
        ("sigma.json", "pair"),
        ("sigma.json", "descriptor"),
        ("sigma_cover.json", "descriptor"),
    ] {
        let out = ttforge(&["suspend", path(&sample(file)), "--check", check, "--count", "200"]);
        assert_eq!(out.status.code(), Some(0), "{file} {check}");
        assert_eq!(report(&out)["passed"], true);
    }
}

#[test]
fn suspend_flow_at_a_point() {
    let out = ttforge(&[
        "suspend",
        path(&sample("sigma.json")),
        "--check",
        "flow",
        "--point",
        r#"["edge", "a", 1, 3, 0, 1]"#,
        "--time",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"a\""), "{text}");
}

#[test]
fn broken_descriptor_is_a_verification_failure() {
    let out = ttforge(&["suspend", path(&sample("sigma_cover_broken.json")), "--check", "descriptor"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["passed"], false);
}

#[test]
fn proptest_with_no_cases_passes() {
    let out = ttforge(&["proptest", "--count", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["passed"], 0);
}

#[test]
fn proptest_corpus_passes_and_ignores_thread_count() {
    let one = ttforge(&["proptest", "--seed", "1", "--count", "100"]);
    assert_eq!(one.status.code(), Some(0));
    let r = report(&one);
    assert_eq!(r["seed"], 1);
    assert_eq!(r["result"]["failed"], 0);
    assert_eq!(r["result"]["passed"], 100);
    let four = ttforge(&["proptest", "--seed", "1", "--count", "100", "--jobs", "4"]);
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn adversarial_cases_are_rejected_not_failed() {
    let out = ttforge(&["proptest", "--seed", "3", "--count", "20", "--adversarial"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(r["result"]["rejected"].as_u64().unwrap() > 0);
    assert_eq!(r["result"]["failed"], 0);
}

#[test]
fn proptest_rejects_zero_bounds() {
    assert_eq!(ttforge(&["proptest", "--max-edges", "0"]).status.code(), Some(1));
}

#[test]
fn dot_of_rose_is_deterministic() {
    let a = ttforge(&["export-dot", path(&sample("identity.json"))]);
    let b = ttforge(&["export-dot", path(&sample("identity.json"))]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.trim() == "\"v\";").count(), 1);
    assert_eq!(text.matches("\"v\" -> \"v\"").count(), 2);
}

#[test]
fn dot_of_package_labels_edges_by_projection() {
    let dir = tempfile::tempdir().unwrap();
    let out = ttforge(&["induce", path(&sample("sigma.json")), "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    let dot = dir.path().join("theta.dot");
    let out = ttforge(&["export-dot", path(dir.path()), "--out", path(&dot)]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&dot).unwrap();
    assert_eq!(text.matches(" -> ").count(), 2);
    assert!(text.contains("label=\"a\"") && text.contains("label=\"b\""));
    assert_eq!(text.lines().filter(|l| l.trim_end().ends_with("\";") && !l.contains("->")).count(), 2);
}
