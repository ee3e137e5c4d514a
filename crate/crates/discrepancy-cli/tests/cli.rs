//! End-to-end tests that spawn the real binary and inspect its JSON output
//! and exit codes.

use serde_json::Value;
use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn write_file(name: &str, contents: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    fs::write(&p, contents).unwrap();
    p
}

fn dkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dkit"))
        .args(args)
        .output()
        .expect("binary should run")
}

fn parse_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout should be one JSON document")
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect()
}

const DIAG_JSON: &str = r#"{"rows": 3, "cols": 3, "data": [[3, 0, 0], [0, 1, 0], [0, 0, -1]]}"#;

#[test]
fn delta_reports_the_sorted_value_gaps_of_a_diagonal_matrix() {
    let f = write_file("delta_diag.json", DIAG_JSON);
    let out = dkit(&["delta", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc = parse_stdout(&out);
    assert_eq!(doc["schema"], "discrepancy-kit/1");
    assert_eq!(doc["status"], "ok");
    assert_eq!(doc["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    let values = floats(&doc["payload"]["values"]);
    let expect = [2.0, 2.0, 0.0];
    for (got, want) in values.iter().zip(expect) {
        assert!((got - want).abs() < 1e-12, "values {values:?}");
    }
    let partials = floats(&doc["payload"]["partial_norms"]);
    assert!((partials[1] - 4.0).abs() < 1e-12);
    assert_eq!(doc["payload"]["diagnostics"][0]["path"], "hermitian");
}

#[test]
fn delta_reads_csv_and_json_into_the_same_matrix() {
    let fj = write_file("same_a.json", DIAG_JSON);
    let fc = write_file("same_a.csv", "3,0,0\n0,1,0\n0,0,-1\n");
    let a = parse_stdout(&dkit(&["delta", fj.to_str().unwrap()]));
    let b = parse_stdout(&dkit(&["delta", fc.to_str().unwrap()]));
    assert_eq!(a["payload"]["values"], b["payload"]["values"]);
    assert_eq!(a["payload"]["alphas"], b["payload"]["alphas"]);
    // different bytes, different digests
    assert_ne!(a["inputs"][0]["sha256"], b["inputs"][0]["sha256"]);
}

#[test]
fn delta_force_general_agrees_with_the_closed_form() {
    let f = write_file("force_general.json", DIAG_JSON);
    let out = dkit(&["delta", f.to_str().unwrap(), "--force-general"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = parse_stdout(&out);
    assert_eq!(doc["payload"]["diagnostics"][0]["path"], "general2d");
    let values = floats(&doc["payload"]["values"]);
    for (got, want) in values.iter().zip([2.0, 2.0, 0.0]) {
        assert!((got - want).abs() < 1e-7, "values {values:?}");
    }
    // --k picks one norm out of the partial sums
    let out = dkit(&["delta", f.to_str().unwrap(), "--k", "2"]);
    let doc = parse_stdout(&out);
    assert!((doc["payload"]["norm"].as_f64().unwrap() - 4.0).abs() < 1e-9);
}

#[test]
fn malformed_inputs_exit_two_with_located_diagnostics() {
    let bad_json = write_file(
        "bad_shape.json",
        r#"{"rows": 2, "cols": 2, "data": [[1, 2], [3]]}"#,
    );
    let out = dkit(&["delta", bad_json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("data[1]"), "stderr: {err}");
    assert!(out.stdout.is_empty());

    let bad_csv = write_file("bad_token.csv", "1,2\n3,oops\n");
    let out = dkit(&["delta", bad_csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("line 2, column 2"),
        "diagnostic should locate the bad cell: {err}"
    );

    let out = dkit(&["delta", "no_such_file.json"]);
    assert_eq!(out.status.code(), Some(2));

    let bad_cell = write_file(
        "bad_cell.json",
        r#"{"rows": 1, "cols": 1, "data": [[[1, 2, 3]]]}"#,
    );
    let out = dkit(&["delta", bad_cell.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("data[0][0]"), "stderr: {err}");
}

#[test]
fn kyfan_sums_the_top_singular_values() {
    let f = write_file("kyfan.csv", "3,0,0\n0,1,0\n0,0,-1\n");
    let doc = parse_stdout(&dkit(&["kyfan", f.to_str().unwrap(), "--k", "2"]));
    assert!((doc["payload"]["value"].as_f64().unwrap() - 4.0).abs() < 1e-12);
    // out-of-range k is an input error
    let out = dkit(&["kyfan", f.to_str().unwrap(), "--k", "9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn emit_sdp_lists_constraint_blocks_without_solving() {
    let f = write_file("sdp.json", DIAG_JSON);
    let out = dkit(&["delta", f.to_str().unwrap(), "--emit-sdp", "--k", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = parse_stdout(&out);
    let lines: Vec<String> = doc["payload"]["sdp"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l.as_str().unwrap().to_string())
        .collect();
    let all = lines.join("\n");
    assert!(all.contains("minimize 2*s + trace(Z)"), "{all}");
    assert!(all.contains("Z >= 0"), "{all}");
    assert!(all.contains("A - (x + i*y)*I"), "{all}");
    // no solver ran: the listing replaces the numeric results
    assert!(doc["payload"].get("values").is_none());
}

#[test]
fn check_a_registry_entry_on_random_instances() {
    let out = dkit(&["check", "R2", "--n", "4", "--trials", "50", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = parse_stdout(&out);
    assert_eq!(doc["status"], "ok");
    assert_eq!(doc["generator"]["name"], "chacha8");
    let entry = &doc["payload"]["entries"][0];
    assert_eq!(entry["id"], "R2");
    assert_eq!(entry["violations"], 0);
    assert_eq!(entry["failures"], 0);
    assert!(entry["worst_margin_slack_units"].as_f64().unwrap() >= -1.0);
}

#[test]
fn check_binds_files_to_named_inputs() {
    let a = write_file("check_flip.csv", "0,1\n1,0\n");
    let b = write_file("check_signs.csv", "1,0\n0,-1\n");
    let out = dkit(&[
        "check",
        "R16",
        "--a",
        a.to_str().unwrap(),
        "--b",
        b.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = parse_stdout(&out);
    let entry = &doc["payload"]["entries"][0];
    assert_eq!(entry["holds"], true);
    // this pair attains the bound exactly, so the margin sits at zero
    assert!(entry["min_margin"].as_f64().unwrap().abs() < 1e-8);
    assert_eq!(doc["inputs"].as_array().unwrap().len(), 2);
    // an entry that needs a matrix the files do not provide is an input error
    let out = dkit(&["check", "R16", "--a", a.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_surfaces_violations_through_exit_code_one() {
    // Shrinking the slack below zero turns the exactly-tight instance into a
    // reported violation; this exercises the real failure path end to end.
    let a = write_file("viol_flip.csv", "0,1\n1,0\n");
    let b = write_file("viol_signs.csv", "1,0\n0,-1\n");
    let out = dkit(&[
        "--atol",
        "-0.5",
        "--rtol",
        "0",
        "check",
        "R16",
        "--a",
        a.to_str().unwrap(),
        "--b",
        b.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let doc = parse_stdout(&out);
    assert_eq!(doc["status"], "violation");
    assert_eq!(doc["payload"]["entries"][0]["holds"], false);
}

#[test]
fn check_rejects_unknown_ids_and_mixed_modes() {
    let out = dkit(&["check", "R27", "--n", "3", "--trials", "2", "--seed", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = dkit(&["check", "bogus", "--n", "3", "--trials", "2", "--seed", "0"]);
    assert_eq!(out.status.code(), Some(2));
    // files and random-instance flags are mutually exclusive
    let a = write_file("mixed_a.csv", "0,1\n1,0\n");
    let out = dkit(&["check", "R16", "--a", a.to_str().unwrap(), "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fuzz_conjecture_small_campaign_is_clean_and_deterministic() {
    let args = [
        "fuzz",
        "conjecture",
        "--n-min",
        "2",
        "--n-max",
        "2",
        "--trials",
        "100",
        "--seed",
        "1",
    ];
    let out1 = dkit(&args);
    assert_eq!(out1.status.code(), Some(0));
    let doc = parse_stdout(&out1);
    assert_eq!(doc["status"], "ok");
    assert_eq!(doc["payload"]["violations"], 0);
    assert_eq!(doc["payload"]["failures"], 0);
    assert!(doc["payload"]["worst_margin_slack_units"].as_f64().unwrap() >= -1.0);
    // a 2x2 witness is small enough to be echoed in full
    assert_eq!(doc["payload"]["witness"]["a"]["rows"], 2);

    let out2 = dkit(&args);
    assert_eq!(out1.stdout, out2.stdout, "reruns must be byte-identical");
}

#[test]
fn fuzz_jobs_flag_never_changes_the_payload() {
    let base = [
        "fuzz",
        "conjecture",
        "--n-min",
        "2",
        "--n-max",
        "3",
        "--trials",
        "30",
        "--seed",
        "9",
    ];
    let mut one = base.to_vec();
    one.extend(["--jobs", "1"]);
    let mut four = base.to_vec();
    four.extend(["--jobs", "4"]);
    let d1 = parse_stdout(&dkit(&one));
    let d4 = parse_stdout(&dkit(&four));
    assert_eq!(d1["payload"], d4["payload"]);
}

#[test]
fn fuzz_rejects_bad_arguments() {
    let out = dkit(&[
        "fuzz",
        "conjecture",
        "--n-min",
        "5",
        "--n-max",
        "2",
        "--trials",
        "10",
        "--seed",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = dkit(&[
        "fuzz",
        "conjecture",
        "--n-min",
        "2",
        "--n-max",
        "2",
        "--trials",
        "5",
        "--seed",
        "0",
        "--class",
        "sideways",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn orbit_diameter_equals_the_extreme_eigenvalue_spread() {
    let f = write_file("orbit.json", DIAG_JSON);
    let doc = parse_stdout(&dkit(&["orbit-diameter", "--a", f.to_str().unwrap(), "--k", "1"]));
    assert!((doc["payload"]["diameter"].as_f64().unwrap() - 4.0).abs() < 1e-9);
    assert_eq!(doc["payload"]["witness"]["rows"], 3);
}

#[test]
fn xdecomp_returns_certified_factors() {
    let f = write_file("xdecomp.csv", "2,1,0\n1,0,1\n0,1,-2\n");
    let out = dkit(&["xdecomp", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc = parse_stdout(&out);
    let checks = &doc["payload"]["checks"];
    for key in [
        "u_unitarity",
        "v_unitarity",
        "uv_exchange",
        "x_off_pattern",
        "reconstruction",
    ] {
        let v = checks[key].as_f64().unwrap();
        assert!(v < 1e-10, "{key} = {v}");
    }
    // non-Hermitian input is rejected up front
    let g = write_file("xdecomp_bad.csv", "0,1\n0,0\n");
    let out = dkit(&["xdecomp", g.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn maximize_commutator_attains_its_bound() {
    let a = write_file("max_a.csv", "3,0,0\n0,1,0\n0,0,-1\n");
    let b = write_file("max_b.csv", "2,1,0\n1,0,1\n0,1,-2\n");
    let doc = parse_stdout(&dkit(&[
        "maximize",
        "commutator",
        "--a",
        a.to_str().unwrap(),
        "--b",
        b.to_str().unwrap(),
    ]));
    assert!(doc["payload"]["max_gap"].as_f64().unwrap() < 1e-8);
    let achieved = floats(&doc["payload"]["achieved"]);
    let bound = floats(&doc["payload"]["bound"]);
    assert_eq!(achieved.len(), bound.len());
}

#[test]
fn oracle_delta_upper_bounds_the_solver() {
    let f = write_file("oracle.json", DIAG_JSON);
    let doc = parse_stdout(&dkit(&[
        "oracle",
        "delta",
        f.to_str().unwrap(),
        "--k",
        "2",
        "--resolution",
        "128",
    ]));
    let value = doc["payload"]["value"].as_f64().unwrap();
    let bound = doc["payload"]["error_bound"].as_f64().unwrap();
    // true optimum is 4; the grid search may only overshoot, and only within
    // its own Lipschitz budget
    assert!(value >= 4.0 - 1e-9, "oracle undershot: {value}");
    assert!(value <= 4.0 + bound + 1e-8, "oracle overshot: {value}");
}

#[test]
fn reports_render_floats_at_full_precision() {
    let f = write_file("precision.json", DIAG_JSON);
    let out = dkit(&["delta", f.to_str().unwrap()]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(
        text.contains("2.0000000000000000e0"),
        "floats should carry 17 significant digits: {text}"
    );
    assert!(!text.contains("NaN"));
}
