use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pyradesign"))
        .args(args)
        .env("PYRADESIGN_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn construct_decompose_and_reassemble() {
    let dir = tempfile::tempdir().unwrap();
    let pg4 = dir.path().join("pg4.json");
    let w = dir.path().join("w.json");
    let back = dir.path().join("back.json");
    assert!(run(&["construct", "pg", "--rank", "4", "--out", p(&pg4)])
        .status
        .success());
    let out = run(&["decompose", p(&pg4), "--block", "2", "--out", p(&w)]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(run(&["construct", "sum", "--witness", p(&w), "--out", p(&back)])
        .status
        .success());
    assert_eq!(std::fs::read(&pg4).unwrap(), std::fs::read(&back).unwrap());
}

#[test]
fn analyze_emits_json() {
    let dir = tempfile::tempdir().unwrap();
    let pg3 = dir.path().join("pg3.json");
    let a = dir.path().join("a.json");
    run(&["construct", "pg", "--rank", "3", "--out", p(&pg3)]);
    let out = run(&[
        "analyze",
        p(&pg3),
        "--center-blocks",
        "--pg-criterion",
        "--lines",
        "--out",
        p(&a),
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&a).unwrap()).unwrap();
    assert_eq!(v["parameters"], serde_json::json!([7, 4, 2]));
    assert_eq!(v["pgCriterion"], serde_json::json!(true));
    assert_eq!(v["lines"].as_array().unwrap().len(), 7);
    assert_eq!(v["centerBlocks"].as_array().unwrap().len(), 7);
}

#[test]
fn invalid_design_fails_verify_with_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    let report = dir.path().join("report.json");
    std::fs::write(
        &bad,
        r#"{"v":7,"blocks":[[3,4,5,6],[0,1,3,4],[0,1,2,5],[0,2,3,5],[0,2,4,6],[1,2,4,5],[1,2,3,6]]}"#,
    )
    .unwrap();
    let out = run(&["verify", p(&bad), "--report", p(&report)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("[FAIL] symmetric-design"));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["checks"][0]["passed"], serde_json::json!(false));
    assert_eq!(r["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn malformed_input_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"v":3,"blocks":[[0,1],[0,3]]}"#).unwrap();
    let out = run(&["verify", p(&bad)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("blocks[1][1]"));
}

#[test]
fn group_build_verify_and_theorem() {
    let dir = tempfile::tempdir().unwrap();
    let pg4 = dir.path().join("pg4.json");
    let cert = dir.path().join("cert.json");
    run(&["construct", "pg", "--rank", "4", "--out", p(&pg4)]);
    assert!(run(&["group", "build", p(&pg4), "--block", "5", "--out", p(&cert)])
        .status
        .success());
    assert!(run(&["group", "verify", p(&pg4), p(&cert)]).status.success());
    let out = run(&["theorem", "verify", p(&pg4), p(&cert)]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("[PASS] epsilon-equals-alpha"));
}

#[test]
fn stabilizer_and_clique_search() {
    let dir = tempfile::tempdir().unwrap();
    let pg3 = dir.path().join("pg3.json");
    let cliques = dir.path().join("cliques.json");
    run(&["construct", "pg", "--rank", "3", "--out", p(&pg3)]);
    let out = run(&["stabilizer", p(&pg3), "--fixed", "0"]);
    assert!(stdout(&out).contains("order 24"), "{}", stdout(&out));
    let out = run(&[
        "search",
        "cliques",
        "--n",
        "7",
        "--m",
        "2",
        "--size",
        "7",
        "--out",
        p(&cliques),
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&cliques).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 30);
}

#[test]
fn delta_search_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let pg3 = dir.path().join("pg3.json");
    run(&["construct", "pg", "--rank", "3", "--out", p(&pg3)]);
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let o = run(&[
            "delta-search",
            "--design-o",
            p(&pg3),
            "--design-z",
            p(&pg3),
            "--filter",
            "non-pg",
            "--out",
            p(out),
        ]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&a).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 5040 - 168);
}

#[test]
fn accept_tiers() {
    let out = run(&["accept", "r3"]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).matches("criterion-").count() >= 8);
    assert_eq!(run(&["accept", "r6"]).status.code(), Some(2));
}

#[test]
fn catalog_add_and_list() {
    let dir = tempfile::tempdir().unwrap();
    let pg4 = dir.path().join("pg4.json");
    let cat = dir.path().join("catalog");
    run(&["construct", "pg", "--rank", "4", "--out", p(&pg4)]);
    assert!(run(&["catalog", "add", "--dir", p(&cat), p(&pg4), "--tag", "sum"])
        .status
        .success());
    let out = run(&["catalog", "list", "--dir", p(&cat)]);
    let listing = stdout(&out);
    assert!(listing.contains("(15, 8, 4) [pg,sum]"), "{listing}");
    assert!(cat.join("index.json").exists());
}
