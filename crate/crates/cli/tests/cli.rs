use std::path::PathBuf;
use std::process::{Command, Output};

fn tw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tw"))
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .args(args)
        .output()
        .unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn prelude_path() -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "prelude.t"].iter().collect();
    p.to_string_lossy().into_owned()
}

#[test]
fn eval_prints_five() {
    let out = tw(&["eval", "examples/add23.t"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "5");
    let v = json(&tw(&["eval", "examples/add23.t", "--json"]));
    assert_eq!(v["value"], 5);
    assert_eq!(v["type"], "nat");
    assert!(v["steps"].is_u64());
}

#[test]
fn eval_budget_failure_exits_one() {
    let out = tw(&["eval", "examples/add23.t", "--budget", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn check_prelude() {
    let out = tw(&["check", &prelude_path()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&tw(&["check", &prelude_path(), "--json"]));
    let defs = v["definitions"].as_array().unwrap();
    let ty = |name: &str| {
        defs.iter()
            .find(|d| d["name"] == name)
            .map(|d| d["type"].as_str().unwrap().to_string())
    };
    assert_eq!(ty("eps").as_deref(), Some("((nat -> bool) -> bool) -> nat -> bool"));
    assert_eq!(ty("test").as_deref(), Some("((nat -> bool) -> bool) -> bool"));
    assert!(v["main"].is_null());
}

#[test]
fn parse_and_type_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad_syntax = dir.path().join("a.t");
    std::fs::write(&bad_syntax, "fun x nat . x").unwrap();
    let out = tw(&["check", bad_syntax.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1:7"));

    let ill_typed = dir.path().join("b.t");
    std::fs::write(&ill_typed, "0 0").unwrap();
    let out = tw(&["eval", ill_typed.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("non-function applied"));

    assert_eq!(tw(&["eval", "no/such/file.t"]).status.code(), Some(2));
    assert_eq!(tw(&["check"]).status.code(), Some(2));
    assert_eq!(tw(&["demo", "kreisel", "--frobnicate"]).status.code(), Some(2));
}

#[test]
fn eps_prints_prefix_and_point() {
    let out = tw(&["eps", "examples/exactly2.t", "--prefix", "6"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("001111"));
    assert!(text.contains("2-bar"));
    let v = json(&tw(&["eps", "examples/alpha3.t", "--prefix", "4", "--json"]));
    assert_eq!(v["prefix"], "1111");
    assert_eq!(v["monotone"], true);
    assert_eq!(v["first_one"], 0);
}

#[test]
fn modulus_of_alpha3() {
    let v = json(&tw(&["modulus", "examples/alpha3.t", "--max", "50", "--json"]));
    assert_eq!(v["agreement_index"], 4);
    assert_eq!(v["max"], 50);
}

#[test]
fn kreisel_json_schema() {
    let v = json(&tw(&["demo", "kreisel", "--bound", "100", "--json"]));
    let obj = v.as_object().unwrap();
    let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    keys.sort();
    assert_eq!(
        keys,
        [
            "antecedent_holds",
            "consequent_holds",
            "eps_prefix_zero_up_to",
            "f_kreisel_at_infinity",
            "f_kreisel_at_zerobar",
            "test_value"
        ]
    );
    assert_eq!(v["test_value"], 0);
    assert_eq!(v["eps_prefix_zero_up_to"], 100);
}

#[test]
fn fuzz_reports_are_reproducible() {
    let run = |mode: &str| {
        let mut v = json(&tw(&[
            "fuzz", "--mode", mode, "--count", "30", "--seed", "11", "--max-size", "30", "--json",
        ]));
        for key in ["samples", "failures", "seed", "elapsed_ms"] {
            assert!(v.get(key).is_some(), "{} missing", key);
        }
        v["elapsed_ms"] = 0.into();
        v
    };
    for mode in ["constancy", "eps"] {
        let a = run(mode);
        assert_eq!(a["failures"].as_array().unwrap().len(), 0);
        assert_eq!(a["seed"], 11);
        assert_eq!(a, run(mode));
    }
}

#[test]
fn fuzz_rejects_non_predicate_types() {
    let out = tw(&["fuzz", "--mode", "constancy", "--type", "nat", "--count", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn color_is_opt_in() {
    let out = Command::new(env!("CARGO_BIN_EXE_tw"))
        .env("TW_COLOR", "1")
        .args(["demo", "kreisel", "--bound", "10"])
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&out.stdout).contains("\x1b["));
    let out = tw(&["demo", "kreisel", "--bound", "10"]);
    assert!(!String::from_utf8_lossy(&out.stdout).contains("\x1b["));
}
