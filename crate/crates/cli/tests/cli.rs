use std::process::{Command, Output};

fn asep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asep"))
        .args(args)
        .output()
        .expect("spawn asep")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const N1: [&str; 10] = ["--a", "2", "--b", "-1/2", "--c", "4", "--d", "-1/2", "--q", "1/2"];

#[test]
fn stationary_json_shape() {
    let mut args = vec!["stationary"];
    args.extend(N1);
    args.extend(["--L", "3", "--json"]);
    let o = asep(&args);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["L"], 3);
    assert_eq!(v["N"], 1);
    assert_eq!(v["regime"], "phi1");
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 8);
    let total: f64 = rows.iter().map(|r| r["p_float"].as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn stationary_csv_has_header() {
    let mut args = vec!["stationary"];
    args.extend(N1);
    args.extend(["--L", "2", "--csv"]);
    let o = asep(&args);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("config,p,p_float"));
    assert_eq!(out.lines().count(), 5);
}

#[test]
fn oracle_check_rates() {
    let o = asep(&[
        "oracle-check", "--alpha", "1", "--beta", "1/2", "--gamma", "1/5", "--delta", "1/3", "--q", "1/3",
        "--L", "4",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("max discrepancy: 0 (exact)"));
}

#[test]
fn usage_errors_exit_two() {
    let mut args = vec!["stationary"];
    args.extend(N1);
    args.extend(["--L", "0"]);
    assert_eq!(asep(&args).status.code(), Some(2));

    let o = asep(&["stationary", "--a", "1", "--q", "1/2", "--L", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--b"));

    let mut args = vec!["oracle-check"];
    args.extend(N1);
    args.extend(["--L", "13"]);
    assert_eq!(asep(&args).status.code(), Some(2));

    let o = asep(&["stationary", "--a", "1", "--b", "x", "--c", "1", "--d", "1", "--q", "1/2", "--L", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn current_profile_marks_reversal() {
    let mut args = vec!["current-profile"];
    args.extend(N1);
    args.extend(["--L-max", "5"]);
    let o = asep(&args);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("N+1 = 2"));
    let marked: Vec<_> = out.lines().filter(|l| l.contains("sign reversal")).collect();
    assert_eq!(marked.len(), 1);
    assert!(marked[0].contains("L =   3"));
}

#[test]
fn aw_verify_singular_json() {
    let o = asep(&[
        "aw-verify", "--a", "2", "--b", "-1/2", "--c", "16", "--d", "-1/2", "--q", "1/2", "--json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["context"]["N"], 3);
    for c in v["checks"].as_array().unwrap() {
        assert!(c["instances"].as_u64().unwrap() > 0);
    }
}

#[test]
fn identity_suite_small() {
    let o = asep(&["identity-suite", "--seed", "3", "--draws", "2", "--n-max", "3", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["context"]["draws"], 2);
}

#[test]
fn tasep_series_both_kinds() {
    for quad in [["1/2", "-1/3", "1/3", "-1/4"], ["2", "-1/2", "3", "-1/3"]] {
        let o = asep(&[
            "tasep-series", "--a", quad[0], "--b", quad[1], "--c", quad[2], "--d", quad[3], "--q", "0",
            "--order", "8", "--json",
        ]);
        assert!(o.status.success());
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["pass"], true);
        assert_eq!(v["rows"].as_array().unwrap().len(), 9);
    }
    let o = asep(&["tasep-series", "--a", "1/2", "--b", "-1/3", "--c", "1/3", "--d", "-1/4", "--q", "1/2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn matrix_demo_terminating() {
    let o = asep(&[
        "matrix-demo", "--a", "2", "--b", "-1/3", "--c", "4", "--d", "-1/5", "--q", "1/2", "--json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["finite"]["m"], 3);
    assert_eq!(v["finite"]["relation_exact"], true);
    assert_eq!(v["finite"]["words_checked"], v["finite"]["words_matching"]);
    assert!(v["gap"]["measured"].as_f64().unwrap().abs() <= 1e-12);
}

#[test]
fn matrix_demo_generic_gap() {
    let o = asep(&[
        "matrix-demo", "--a", "1/2", "--b", "-1/3", "--c", "1/3", "--d", "-1/4", "--q", "1/2", "--json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["gap"]["rel_err"].as_f64().unwrap() < 1e-6);
    assert!(v["finite"].is_null());
}
