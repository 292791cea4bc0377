//! End-to-end tests of the command-line surface: output shapes, exit codes,
//! cache behavior, and byte-reproducibility.

use std::process::{Command, Output};

fn srconst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srconst"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

#[test]
fn constant_value_line_first() {
    let out = srconst(&["constant", "--kind", "S", "--n", "1", "--digits", "20"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let first = text.lines().next().unwrap();
    assert!(first.starts_with("0.24875447"), "{first}");
    assert!(first.starts_with("0.248754"));
    assert!(text.contains("euler_maclaurin"), "both methods by default");
    assert!(text.contains("method agreement"));
}

#[test]
fn constant_json_record_shape() {
    let out = srconst(&[
        "constant", "--kind", "S", "--n", "-1", "--digits", "10", "--format", "json",
        "--method", "integral",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    let arr = v.as_array().expect("array of records");
    assert_eq!(arr.len(), 1);
    let rec = arr[0].as_object().expect("record object");
    let keys: Vec<&str> = rec.keys().map(|s| s.as_str()).collect();
    assert_eq!(
        keys,
        ["digits", "error_bound", "kind", "method", "n", "nodes", "truncation_T", "value"]
    );
    assert_eq!(rec["kind"], "S");
    assert_eq!(rec["n"], -1);
    assert_eq!(rec["digits"], 10);
    assert_eq!(rec["method"], "integral");
    assert!(rec["value"].as_str().unwrap().starts_with("0.5772156649"));
    assert!(rec["nodes"].as_u64().unwrap() > 0);
}

#[test]
fn em_record_has_null_quadrature_fields() {
    let out = srconst(&[
        "constant", "--kind", "S", "--n", "0", "--digits", "10", "--format", "json",
        "--method", "euler_maclaurin",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rec = &v.as_array().unwrap()[0];
    assert!(rec["nodes"].is_null());
    assert!(rec["truncation_T"].is_null());
}

#[test]
fn gamma_alias() {
    let out = srconst(&["constant", "--kind", "gamma", "--digits", "15", "--method", "integral"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("0.577215664901533"));
}

#[test]
fn output_reproducible_byte_for_byte() {
    let args = ["constant", "--kind", "Upsilon", "--n", "2", "--digits", "18"];
    let a = srconst(&args);
    let b = srconst(&args);
    assert_eq!(a.stdout, b.stdout);
    let args = ["table", "--max-n", "0", "--digits", "12"];
    let a = srconst(&args);
    let b = srconst(&args);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn table_shape_and_values() {
    let out = srconst(&["table", "--max-n", "1", "--digits", "15"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4); // header + n = -1, 0, 1
    assert!(lines[1].trim_start().starts_with("-1"));
    assert!(lines[1].contains("0.577215664901533"));
    assert!(lines[2].contains("0.918938533204673"));
    assert!(lines[3].contains("0.248754477033784"));
}

#[test]
fn table_json_validates() {
    let out = srconst(&["table", "--max-n", "0", "--digits", "10", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for row in rows {
        assert!(row["integral"]["value"].is_string());
        assert!(row["euler_maclaurin"]["value"].is_string());
        assert!(row["agreement"].is_string());
    }
}

#[test]
fn coeffs_examples() {
    let out = srconst(&["coeffs", "--what", "r", "--max-n", "3"]);
    assert_eq!(stdout(&out), "1, -1/4, 1/72, 1/288\n");
    let out = srconst(&["coeffs", "--what", "A", "--n", "2"]);
    assert_eq!(stdout(&out), "1/3 s^3 + 1/2 s^2 + 1/6 s\n");
    let out = srconst(&["coeffs", "--what", "B", "--n", "3"]);
    assert_eq!(stdout(&out), "-1/16 s^4 + 1/12 s^2\n");
    let out = srconst(&["coeffs", "--what", "b", "--max-n", "3"]);
    assert_eq!(stdout(&out), "1, 1/2, 1/12, 0, -1/720\n");
    let out = srconst(&["coeffs", "--what", "r_hat", "--max-n", "3"]);
    assert_eq!(stdout(&out), "1, 1/4, 1/36, -1/48\n");
}

#[test]
fn usage_errors_exit_2() {
    let out = srconst(&["constant", "--kind", "nope", "--n", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = srconst(&["constant", "--kind", "S", "--n", "-3", "--digits", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let out = srconst(&["constant", "--kind", "S", "--n", "0", "--digits", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = srconst(&["coeffs", "--what", "nothing", "--n", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = srconst(&["coeffs", "--what", "A"]);
    assert_eq!(out.status.code(), Some(2));
    // clap-level parse failure
    let out = srconst(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    // crossover outside (0, 2pi)
    let out = srconst(&[
        "constant", "--kind", "S", "--n", "0", "--digits", "10", "--crossover", "7.0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn crossover_and_series_overrides_keep_values() {
    let base = srconst(&["constant", "--kind", "S", "--n", "0", "--digits", "20",
        "--method", "integral"]);
    let moved = srconst(&[
        "constant", "--kind", "S", "--n", "0", "--digits", "20", "--method", "integral",
        "--crossover", "0.75", "--series-terms", "80",
    ]);
    assert!(moved.status.success());
    let a = stdout(&base);
    let b = stdout(&moved);
    assert_eq!(
        a.lines().next().unwrap(),
        b.lines().next().unwrap(),
        "value must not depend on evaluation knobs"
    );
}

#[test]
fn cache_round_trip() {
    let dir = std::env::temp_dir().join(format!("srconst-cache-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cache = dir.join("cache.json");
    let args = [
        "constant", "--kind", "S", "--n", "1", "--digits", "12", "--method", "integral",
        "--cache", cache.to_str().unwrap(),
    ];
    let first = srconst(&args);
    assert!(first.status.success());
    assert!(!String::from_utf8_lossy(&first.stderr).contains("cache hit"));
    let second = srconst(&args);
    assert!(second.status.success());
    assert!(String::from_utf8_lossy(&second.stderr).contains("cache hit"));
    // identical value line
    assert_eq!(
        stdout(&first).lines().next().unwrap(),
        stdout(&second).lines().next().unwrap()
    );
    // reread entries byte-identical after a show
    let body_before = std::fs::read(&cache).unwrap();
    let show = srconst(&["cache", "show", "--cache", cache.to_str().unwrap()]);
    assert!(show.status.success());
    assert!(stdout(&show).contains("S:1:12:integral"));
    let body_after = std::fs::read(&cache).unwrap();
    assert_eq!(body_before, body_after);
    // unknown schema version is rejected
    std::fs::write(&cache, r#"{"schema_version": 99, "entries": {}}"#).unwrap();
    let bad = srconst(&args);
    assert_eq!(bad.status.code(), Some(2));
    let clear = srconst(&["cache", "clear", "--cache", cache.to_str().unwrap()]);
    assert!(clear.status.success());
    assert!(!cache.exists());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_small_run_exits_zero() {
    // the full default suite runs in the acceptance tests; here a cheap run
    let out = srconst(&["verify", "--digits", "12"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("42 checks, 0 failed"), "{text}");
}

#[test]
fn verify_json_shape() {
    let out = srconst(&["verify", "--digits", "10", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 42);
    for rec in arr {
        assert!(rec["name"].is_string());
        assert!(rec["pass"].as_bool().unwrap());
        assert!(rec["abs_diff"].is_string());
    }
}
