use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;
use translucent_core::builtin;
use translucent_core::domination::{ir_prime, ir_set, nsd_fixpoint};
use translucent_core::json::{parse_game, profiles_to_value, restriction_to_value};
use translucent_core::Rational;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn translucent(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_translucent"))
        .args(args)
        .env_remove("TG_MAX_STATES")
        .output()
        .expect("binary runs");
    let stdout = String::from_utf8(out.stdout).unwrap();
    let value = if stdout.trim().is_empty() {
        Value::Null
    } else {
        serde_json::from_str(&stdout).expect("stdout is JSON")
    };
    (out.status.code().unwrap(), value, String::from_utf8(out.stderr).unwrap())
}

fn path(name: &str) -> String {
    fixture(name).display().to_string()
}

#[test]
fn analyze_reverse_traveler() {
    let (code, v, _) = translucent(&["analyze", &path("reverse_traveler_10.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["survivors"], serde_json::json!([[9], [9]]));
    assert_eq!(v["rounds"], 9);
    assert_eq!(v["trace"]["rounds"].as_array().unwrap().len(), 9);
}

#[test]
fn model_check_ir_witness_fixture() {
    let (code, v, _) = translucent(&[
        "model-check",
        &path("pd_ir_witness.json"),
        "--state",
        "0",
        "--formula",
        "KW & CB RAT",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["holds"], true);
}

#[test]
fn false_formula_exits_one_and_explains() {
    let (code, v, _) = translucent(&[
        "model-check",
        &path("pd_ir_witness.json"),
        "--state",
        "1",
        "--formula",
        "CB RAT",
        "--explain",
    ]);
    assert_eq!(code, 1);
    assert_eq!(v["holds"], false);
    let parts = v["subformulas"].as_array().unwrap();
    assert_eq!(parts.last().unwrap()["formula"], "CB RAT");
}

#[test]
fn broken_structure_lists_p1() {
    let (code, v, _) = translucent(&["check-structure", &path("broken.json")]);
    assert_eq!(code, 2);
    let violations = v["report"]["violations"].as_array().unwrap();
    assert!(violations.iter().any(|x| x["condition"] == "P1" && x["state"] == 0));
}

#[test]
fn bad_formula_is_input_error_with_column() {
    let (code, _, err) = translucent(&[
        "model-check",
        &path("pd_ir_witness.json"),
        "--state",
        "0",
        "--formula",
        "KW & RAT_7",
    ]);
    assert_eq!(code, 3);
    let e: Value = serde_json::from_str(&err).unwrap();
    assert_eq!(e["error"]["kind"], "formula");
    assert_eq!(e["error"]["column"], 10);
}

#[test]
fn missing_file_is_input_error() {
    let (code, _, err) = translucent(&["analyze", "/nonexistent/game.json"]);
    assert_eq!(code, 3);
    assert!(err.contains("\"io\""));
}

#[test]
fn witness_output_round_trips_through_model_check() {
    let dir = tempfile::tempdir().unwrap();
    for kind in ["ccbr", "kw", "ir"] {
        let (code, v, err) = translucent(&["witness", &path("pd.json"), "--profile", "C,C", "--kind", kind]);
        assert_eq!(code, 0, "{kind}: {err}");
        let designated = v["witness"]["designated"].as_u64().unwrap().to_string();
        let file = dir.path().join(format!("{kind}.json"));
        std::fs::write(&file, v.to_string()).unwrap();
        let file = file.display().to_string();
        let (code, checked, _) = translucent(&["check-structure", &file, "--strong"]);
        assert_eq!(code, 0, "{kind}: {checked}");
        let goal = match kind {
            "ccbr" => "SRAT^6 & play(C,C)",
            "kw" => "KW & play(C,C) & SRAT^6",
            _ => "KW & play(C,C) & CB RAT",
        };
        let (code, _, _) = translucent(&["model-check", &file, "--state", &designated, "--formula", goal]);
        assert_eq!(code, 0, "{kind}");
    }
}

#[test]
fn witness_precondition_failures() {
    let (code, _, err) = translucent(&["witness", &path("ex2.json"), "--profile", "b,d", "--kind", "ir"]);
    assert_eq!(code, 2);
    assert!(err.contains("precondition"));
    let (code, _, _) = translucent(&["witness", &path("ex2.json"), "--profile", "b,d", "--kind", "kw"]);
    assert_eq!(code, 2);
    let (code, _, _) = translucent(&["witness", &path("ex2.json"), "--profile", "b,d", "--kind", "ccbr"]);
    assert_eq!(code, 0);
}

#[test]
fn state_limit_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_translucent"))
        .args(["witness", &path("reverse_traveler_10.json"), "--profile", "10,10", "--kind", "ir"])
        .env("TG_MAX_STATES", "99")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("limit"));
}

#[test]
fn ir_with_restriction_accepts_names() {
    let dir = tempfile::tempdir().unwrap();
    let z = dir.path().join("z.json");
    let names: Vec<String> = (2..=10).map(|k| format!("\"{k}\"")).collect();
    std::fs::write(&z, format!("[[{0}],[{0}]]", names.join(","))).unwrap();
    let (code, v, _) = translucent(&[
        "ir",
        &path("reverse_traveler_10.json"),
        "--restrict",
        &z.display().to_string(),
    ]);
    assert_eq!(code, 0);
    // inside the subgame the guarantee rises to 5/2, so announcing 2 drops out
    assert_eq!(v["profiles"].as_array().unwrap().len(), 64);
    let (_, whole, _) = translucent(&["ir", &path("reverse_traveler_10.json")]);
    let whole = whole["profiles"].as_array().unwrap();
    assert!(whole.len() >= 81);
    assert!(whole.contains(&serde_json::json!([1, 1])));
    let (_, primed, _) = translucent(&[
        "ir",
        &path("reverse_traveler_10.json"),
        "--restrict",
        &z.display().to_string(),
        "--prime",
    ]);
    assert_eq!(primed["profiles"].as_array().unwrap().len(), 64);
}

#[test]
fn oracle_matches_library_on_fixtures() {
    for name in ["pd.json", "reverse_traveler_10.json", "ex2.json"] {
        let game = parse_game(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap();
        let (code, v, _) = translucent(&["oracle", &path(name)]);
        assert_eq!(code, 0);
        let z = nsd_fixpoint(&game).final_restriction().clone();
        assert_eq!(v["survivors"], restriction_to_value(&z), "{name}");
        assert_eq!(v["ir"], profiles_to_value(&ir_set(&game)), "{name}");
        assert_eq!(v["ir_prime"], profiles_to_value(&ir_prime(&game, &z).unwrap()), "{name}");
    }
}

#[test]
fn output_is_deterministic_and_pretty_is_equivalent() {
    let args = ["analyze", &path("reverse_traveler_10.json")];
    let (_, a, _) = translucent(&args);
    let (_, b, _) = translucent(&args);
    assert_eq!(a, b);
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = translucent_core::cli::run(
        ["translucent", "--pretty", "analyze", &path("reverse_traveler_10.json")],
        &mut out,
        &mut err,
    );
    assert_eq!(code, 0);
    let text = String::from_utf8(out).unwrap();
    assert!(text.contains("\n  "));
    assert_eq!(serde_json::from_str::<Value>(&text).unwrap(), a);
}

#[test]
fn fixtures_match_builtins() {
    let pd = parse_game(&std::fs::read_to_string(fixture("pd.json")).unwrap()).unwrap();
    assert_eq!(pd, builtin::pd(Rational::from(1), Rational::from(2)).unwrap());
    let rt = parse_game(&std::fs::read_to_string(fixture("reverse_traveler_10.json")).unwrap()).unwrap();
    assert_eq!(rt, builtin::reverse_traveler(10, Rational::new(1, 2)).unwrap());
}
