use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bfzeta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bfzeta"))
        .args(args)
        .env_remove("BFZETA_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.push("--json");
    let out = bfzeta(&all);
    assert!(out.status.success(), "{:?}: {}", args, String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bfzeta-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn branch_regular_prime_has_trivial_polynomial() {
    let v = json(&["branch", "--p", "5", "--k", "3"]);
    assert_eq!(v["lambda"], 0);
    assert_eq!(v["distinguished"][0]["value"], "1");
    assert_eq!(v["distinguished"].as_array().unwrap().len(), 1);
}

#[test]
fn branch_irregular_pair_has_lambda_one() {
    let v = json(&["branch", "--p", "37", "--k", "5"]);
    assert_eq!(v["lambda"], 1);
    // Q(t) = P(t − 1): same leading term, constant shifted by −1
    let p0: i128 = v["distinguished"][0]["value"].as_str().unwrap().parse().unwrap();
    let q0: i128 = v["shifted"][0]["value"].as_str().unwrap().parse().unwrap();
    assert_eq!(q0, p0 - 1);
}

#[test]
fn excluded_component_is_a_usage_error() {
    let out = bfzeta(&["branch", "--p", "5", "--k", "1"]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("excluded"));
}

#[test]
fn bad_flags_exit_with_usage_code() {
    assert_eq!(code(&bfzeta(&["branch", "--p", "five"])), 4);
    assert_eq!(code(&bfzeta(&["nonsense"])), 4);
    assert_eq!(code(&bfzeta(&["--help"])), 0);
}

#[test]
fn precision_exhaustion_exit_code() {
    let out = bfzeta(&["theorem", "--p", "37", "--k", "5", "--prec", "1"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn theorem_regular_prime_agrees() {
    let v = json(&["theorem", "--p", "5", "--k", "3", "--n", "1"]);
    assert_eq!(v["lhs_exponent"], 0);
    assert_eq!(v["rhs_order"], "1");
    assert_eq!(v["agree"], true);
}

#[test]
fn theorem_irregular_levels() {
    for (n, e) in [(0, 1), (1, 2)] {
        let n = n.to_string();
        let v = json(&["theorem", "--p", "37", "--k", "5", "--n", &n]);
        assert_eq!(v["lhs_exponent"], e);
        assert_eq!(v["agree"], true);
    }
}

#[test]
fn modes_are_labelled() {
    let v = json(&["theorem", "--p", "37", "--k", "5", "--n", "0"]);
    assert_eq!(v["rhs"]["mode"], "verification");
    let v = json(&["theorem", "--p", "37", "--k", "5", "--n", "1"]);
    assert_eq!(v["rhs"]["mode"], "consistency");
}

#[test]
fn all_shipped_fixtures_agree() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/data/fixtures.json")).unwrap();
    let fixtures: Vec<Value> = serde_json::from_str(&text).unwrap();
    assert!(!fixtures.is_empty());
    for f in fixtures {
        let (p, n, k) = (f["p"].to_string(), f["n"].to_string(), f["k"].to_string());
        let v = json(&["theorem", "--p", &p, "--n", &n, "--k", &k]);
        assert_eq!(v["rhs"]["mode"], "verification", "{}", f);
        assert_eq!(v["agree"], true, "{}", f);
    }
}

#[test]
fn user_fixture_overrides_and_can_disagree() {
    let path = scratch("fixtures.json");
    std::fs::write(&path, r#"[{"p": 37, "n": 0, "k": 5, "class_type": [2]}]"#).unwrap();
    let out = bfzeta(&["theorem", "--p", "37", "--k", "5", "--fixtures", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("DISAGREE"));

    std::fs::write(&path, r#"[{"p": 37, "n": 0, "k": 5}]"#).unwrap();
    let out = bfzeta(&["theorem", "--p", "37", "--k", "5", "--fixtures", path.to_str().unwrap()]);
    assert_eq!(code(&out), 4);
}

#[test]
fn growth_tables() {
    let csv = |args: &[&str]| {
        let out = bfzeta(args);
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    assert_eq!(csv(&["growth", "--p", "5", "--k", "3"]), "n,e_n,delta,lambda_growth\n0,0,,0\n1,0,0,1\n2,0,0,1\n");
    let irregular = csv(&["growth", "--p", "37", "--k", "5", "--n", "2"]);
    assert_eq!(irregular, "n,e_n,delta,lambda_growth\n0,1,,0\n1,2,1,1\n2,3,1,1\n");
    let synthetic = json(&["growth", "--p", "7", "--synthetic", "3", "--n", "3"]);
    let deltas: Vec<i64> = synthetic["rows"].as_array().unwrap()[1..]
        .iter()
        .map(|r| r["delta"].as_i64().unwrap())
        .collect();
    assert_eq!(deltas, [1, 1, 1]);
    assert_eq!(synthetic["lambda_from"], 1);
}

#[test]
fn gauss_example_and_schema_errors() {
    let v = json(&["gauss", "--example"]);
    assert_eq!(v["closed_form"], "9");
    assert_eq!(v["brute_force"], "9");

    let path = scratch("bad.json");
    std::fs::write(&path, r#"{"p": 3, "m": 2, "groups": {"A": [2], "B": [2], "C": [2]}, "d": [[1, 0]], "pairing": [[1]]}"#)
        .unwrap();
    assert_eq!(code(&bfzeta(&["gauss", path.to_str().unwrap()])), 4);
    assert_eq!(code(&bfzeta(&["gauss"])), 4);
}

#[test]
fn graded_instance_reports_levels() {
    let path = scratch("graded.json");
    std::fs::write(
        &path,
        r#"{"p": 3, "m": 1, "groups": {"A": [1, 1], "B": [1, 1], "C": [1, 1]},
            "d": [[1, 0], [0, 0]], "pairing": [[1, 0], [0, 1]],
            "grading": {"A": [0, 1], "B": [0, 1], "C": [0, 1]}}"#,
    )
    .unwrap();
    let v = json(&["gauss", path.to_str().unwrap()]);
    assert_eq!(v["graded"]["splits"], true);
    assert_eq!(v["graded"]["per_level"].as_array().unwrap().len(), 2);
    assert_eq!(v["agree"], true);
}

#[test]
fn random_gauss_is_deterministic() {
    let args = ["gauss", "--random", "--pairs", "25", "--seed", "4", "--json"];
    let a = bfzeta(&args);
    let b = bfzeta(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["agreements"], 25);
}

#[test]
fn theorem_json_is_byte_identical() {
    let args = ["theorem", "--p", "7", "--k", "3", "--n", "1", "--json"];
    assert_eq!(bfzeta(&args).stdout, bfzeta(&args).stdout);
}

#[test]
fn interp_check_pass_and_negative_control() {
    let v = json(&["interp-check", "--p", "5", "--k", "3"]);
    assert_eq!(v["pass"], true);
    let out = bfzeta(&["interp-check", "--p", "5", "--k", "3", "--mistwist"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn config_file_precedence() {
    let path = scratch("run.toml");
    std::fs::write(&path, "p = 37\nk = 5\n").unwrap();
    let cfg = path.to_str().unwrap();
    let v = json(&["branch", "--config", cfg]);
    assert_eq!(v["p"], 37);
    let v = json(&["branch", "--config", cfg, "--p", "5", "--k", "3"]);
    assert_eq!(v["p"], 5);

    std::fs::write(&path, "prime = 5\n").unwrap();
    assert_eq!(code(&bfzeta(&["branch", "--config", cfg])), 4);
}

#[test]
fn cache_directory_round_trip() {
    let dir = scratch("cache");
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_bfzeta"))
            .args(["branch", "--p", "7", "--k", "3", "--json"])
            .env("BFZETA_CACHE_DIR", &dir)
            .output()
            .unwrap()
    };
    let first = run();
    assert!(first.status.success());
    assert!(dir.join("bernoulli-even.json").exists());
    let second = run();
    assert_eq!(first.stdout, second.stdout);
    assert!(second.stderr.is_empty(), "{}", String::from_utf8_lossy(&second.stderr));
}
