use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str], cache: Option<&Path>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_poincare"));
    c.args(args).env_remove("POINCARE_CACHE_DIR");
    if let Some(dir) = cache {
        c.env("POINCARE_CACHE_DIR", dir);
    }
    c.output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn field_info_examples() {
    let o = run(&["field-info", "--d", "5"], None);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["schema"], "v1");
    assert_eq!(v["field"], "Qsqrt:5");
    assert_eq!(v["D"], 5);
    assert_eq!(v["delta"]["a"], "2");
    assert_eq!(v["delta"]["b"], "1");
    assert_eq!(v["narrow_h1"], true);

    let v = json(&run(&["field-info", "--d", "Qsqrt:2"], None));
    assert_eq!(v["D"], 8);
    assert_eq!((v["delta"]["a"].as_str(), v["delta"]["b"].as_str()), (Some("4"), Some("2")));

    let v = json(&run(&["field-info", "--d", "3"], None));
    assert_eq!(v["delta"], Value::Null);
    assert_eq!(v["narrow_h1"], false);

    let o = run(&["field-info", "--d", "12"], None);
    assert_eq!(code(&o), 2);
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("not squarefree"));
}

#[test]
fn kloosterman_prime_modulus_value() {
    let o = run(
        &["kloosterman", "--d", "5", "--nu", "1/delta", "--mu", "0", "--c", "2", "--exact"],
        None,
    );
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["exact"]["value_as_rational_if_real"], "-1");
    let re = v["float"]["re"].as_array().unwrap();
    assert!(re[0].as_f64().unwrap() <= -1.0 && -1.0 <= re[1].as_f64().unwrap());
    assert!(v["weil_bound"]["ratio_upper"].as_f64().unwrap() < 1.0);
}

#[test]
fn usage_and_precondition_errors_exit_two() {
    for args in [
        &["kloosterman", "--nu", "1/", "--mu", "0", "--c", "2"][..],
        &["kloosterman", "--nu", "1/(2*delta)", "--mu", "0", "--c", "2"],
        &["field-info", "--no-such-flag"],
        &["certify", "--k", "7"],
        &["recurrence", "--k", "8", "--p", "4", "--x", "10"],
        &["thresholds", "--k", "8", "--alpha", "1-w"],
        &["certify", "--k", "8", "--ladder", "25"],
    ] {
        let o = run(args, None);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn output_formats() {
    let o = run(&["field-info", "--format", "csv"], None);
    let s = String::from_utf8(o.stdout).unwrap();
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("command,key,value"));
    assert_eq!(lines.next(), Some("field-info,schema,v1"));
    assert!(s.contains("field-info,delta.a,2\n"));

    let o = run(&["field-info", "--format", "table"], None);
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.lines().any(|l| l.starts_with("narrow_h1") && l.ends_with("true")));
}

#[test]
fn config_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("poincare.toml");
    std::fs::write(&p, "field = \"Qsqrt:2\"\nformat = \"csv\"\n").unwrap();
    let o = run(&["field-info", "--config", p.to_str().unwrap()], None);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("field-info,D,8"));
    let o = run(&["field-info", "--config", p.to_str().unwrap(), "--d", "5", "--format", "json"], None);
    assert_eq!(json(&o)["D"], 5);

    std::fs::write(&p, "field = \"Qsqrt:2\"\ncolour = \"red\"\n").unwrap();
    let o = run(&["field-info", "--config", p.to_str().unwrap()], None);
    assert_eq!(code(&o), 2);
}

#[test]
fn cache_is_transparent() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["selberg-check", "--d", "5", "--max-norm-q", "30", "--grid", "full"];
    let plain = run(&args, None);
    let cold = run(&args, Some(dir.path()));
    let file = dir.path().join("kloosterman-v1.jsonl");
    let lines = std::fs::read_to_string(&file).unwrap().lines().count();
    assert!(lines > 0);
    let warm = run(&args, Some(dir.path()));
    assert_eq!(code(&cold), 0);
    assert_eq!(cold.stdout, plain.stdout);
    assert_eq!(warm.stdout, cold.stdout);
    assert_eq!(std::fs::read_to_string(&file).unwrap().lines().count(), lines);

    std::fs::write(&file, format!("{}garbage\n", std::fs::read_to_string(&file).unwrap())).unwrap();
    let damaged = run(&args, Some(dir.path()));
    assert_eq!(damaged.stdout, cold.stdout);
    assert!(String::from_utf8_lossy(&damaged.stderr).contains("skipped 1 unreadable cache lines"));

    let flag = tempfile::tempdir().unwrap();
    let o = run(
        &["--cache-dir", flag.path().to_str().unwrap(), "kloosterman", "--nu", "1/delta", "--mu", "0", "--c", "3"],
        Some(dir.path()),
    );
    assert_eq!(code(&o), 0);
    assert!(flag.path().join("kloosterman-v1.jsonl").exists());
}

#[test]
fn audits_pass() {
    for args in [
        &["selberg-check", "--d", "2", "--max-norm-q", "40"][..],
        &["weil-audit", "--d", "3", "--samples", "50", "--seed", "7"],
        &["hecke-check", "--d", "5", "--k", "8", "--samples", "30"],
    ] {
        let o = run(args, None);
        assert_eq!(code(&o), 0, "{args:?}");
        let v = json(&o);
        assert!(v.get("status").is_none_or(|s| s != "violations found"));
    }
}

#[test]
fn certify_verdicts_and_exit_codes() {
    let o = run(&["certify", "--d", "5", "--k", "8", "--level", "1", "--mu", "1"], None);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["verdict"], "NONZERO");
    assert!(v["margin"].as_f64().unwrap() > 0.0);
    assert!(v["cutoffs"]["X"].as_u64().is_some());

    let o = run(&["certify", "--k", "8", "--ladder", "0:0"], None);
    assert_eq!(code(&o), 3);
    assert_eq!(json(&o)["verdict"], "INCONCLUSIVE");
}

#[test]
fn thresholds_report() {
    let v = json(&run(&["thresholds", "--d", "5", "--k", "8", "--level", "1", "--eta", "0.5"], None));
    for key in ["threshold_thm32", "threshold_cor33", "threshold_thm35"] {
        let t = v[key]["value"].as_array().unwrap();
        assert!(t[0].as_f64().unwrap() > 0.0, "{key}");
    }
    assert!(v["ledger"]["C"].is_array());
}
