//! Runs the `lexepi` binary against the fixtures and checks reports, exit
//! codes and golden files.

use std::{
    fs,
    path::{Path, PathBuf},
    process::Command,
};

use lexepi::format::{load_complete_model, load_incomplete_model};
use lexepi_core::{transform::isomorphic_complete, Player, TypeId};
use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("{e}: {}", self.stdout))
    }
}

fn lexepi_with(env: &[(&str, &str)], args: &[&str]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lexepi"));
    cmd.current_dir(env!("CARGO_MANIFEST_DIR"))
        .env_remove("LEXEPI_VERBOSITY")
        .args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).expect("utf-8"),
    }
}

fn lexepi(args: &[&str]) -> Run {
    lexepi_with(&[], args)
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lexepi-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap().to_string())
        .collect()
}

fn find_type<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["result"]["types"]
        .as_array()
        .unwrap()
        .iter()
        .find(|t| t["name"] == name)
        .unwrap_or_else(|| panic!("no type {name}"))
}

#[test]
fn ia_on_the_example_game() {
    let r = lexepi(&["ia", "fixtures/ex32.game.json"]);
    assert_eq!(r.code, 0);
    let v = r.json();
    let rounds: Vec<[Vec<String>; 2]> = v["result"]["rounds"]
        .as_array()
        .unwrap()
        .iter()
        .map(|round| [strings(&round[0]), strings(&round[1])])
        .collect();
    assert_eq!(
        rounds,
        vec![
            [vec!["A".to_string(), "B".into()], vec!["C".into(), "D".into()]],
            [vec!["A".to_string()], vec!["D".to_string()]],
        ]
    );
}

#[test]
fn ia_on_a_single_cell_game() {
    let v = lexepi(&["ia", "fixtures/one.game.json"]).json();
    assert_eq!(v["result"]["rounds"].as_array().unwrap().len(), 1);
    assert_eq!(v["result"]["stable_round"], 0);
}

#[test]
fn malformed_input_exits_with_two_and_a_location() {
    let r = lexepi(&["ia", "fixtures/malformed.game.json"]);
    assert_eq!(r.code, 2);
    let v = r.json();
    assert_eq!(v["status"], "error");
    assert_eq!(v["error"]["location"], "$.utilities[0]");
    assert!(v["error"]["message"].as_str().unwrap().contains("missing cell (B,D)"));

    assert_eq!(lexepi(&["ia", "fixtures/does-not-exist.json"]).code, 2);
    assert_eq!(lexepi(&["check-complete", "fixtures/ex32.game.json"]).code, 2);
}

#[test]
fn example_model_expresses_common_assumption() {
    let r = lexepi(&["check-complete", "fixtures/ex32.complete.json", "--common"]);
    assert_eq!(r.code, 0);
    let v = r.json();
    for (name, optimal) in [("t1", "A"), ("t2", "D")] {
        let t = find_type(&v, name);
        assert_eq!(t["pass"], true);
        assert_eq!(t["cautious"], true);
        assert_eq!(t["common_assumption"], true);
        assert_eq!(strings(&t["optimal"]), vec![optimal.to_string()]);
    }
    assert_eq!(find_type(&v, "t1")["belief"], "((D,t2),(C,t2))");
}

#[test]
fn swapped_levels_fail_with_an_order_violation() {
    let r = lexepi(&["check-complete", "fixtures/ex32.swapped.complete.json", "--common"]);
    assert_eq!(r.code, 1);
    let v = r.json();
    let t1 = find_type(&v, "t1");
    assert_eq!(t1["pass"], false);
    let fold1 = &t1["folds"][1];
    assert_eq!(fold1["fold"], 1);
    let violation = &fold1["violations"][0];
    assert_eq!(violation["kind"], "order");
    assert_eq!(violation["condition"], "A2");
    assert_eq!(violation["good"], "(D,t2)");
    assert_eq!(violation["bad"], "(C,t2)");

    let text = lexepi(&[
        "--format",
        "text",
        "check-complete",
        "fixtures/ex32.swapped.complete.json",
    ]);
    assert_eq!(text.code, 1);
    assert!(text
        .stdout
        .contains("A2 violated: (D,t2) is not infinitely more likely than (C,t2)"));
}

#[test]
fn zero_folds_check_caution_only() {
    let v = lexepi(&["check-complete", "fixtures/ex32.complete.json", "--folds", "0"]).json();
    for name in ["t1", "t2"] {
        let folds = find_type(&v, name)["folds"].as_array().unwrap().clone();
        assert_eq!(folds.len(), 1);
        assert_eq!(folds[0]["fold"], 0);
    }
    assert_eq!(v["result"]["mode"], "folds");
}

#[test]
fn example_incomplete_model_satisfies_condition_b() {
    let r = lexepi(&["check-incomplete", "fixtures/ex33.incomplete.json", "--common"]);
    assert_eq!(r.code, 0);
    let v = r.json();
    let th11 = find_type(&v, "th11");
    assert_eq!(th11["condition_b"], true);
    assert_eq!(th11["carries_reference"], true);
    assert_eq!(strings(&th11["optimal"]), vec!["A".to_string()]);
}

/// A type passing condition (b) whose merged complete type does not express
/// common assumption of rationality: the believed `(y2, th22)` pair carries a
/// non-reference utility, yet `y2` is optimal for the merged type.
#[test]
fn condition_b_need_not_survive_merging() {
    let r = lexepi(&["check-incomplete", "fixtures/if_gap.incomplete.json", "--common"]);
    assert_eq!(r.code, 0);
    let th11 = find_type(&r.json(), "th11").clone();
    assert_eq!(th11["condition_b"], true);
    assert_eq!(strings(&th11["optimal"]), vec!["b".to_string()]);

    let merged = scratch("if_gap.complete.json");
    let r = lexepi(&[
        "transform",
        "fixtures/if_gap.incomplete.json",
        "--direction",
        "in2co",
        "--out",
        merged.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0);
    let r = lexepi(&["check-complete", merged.to_str().unwrap(), "--common"]);
    assert_eq!(r.code, 1);
    assert_eq!(find_type(&r.json(), "th11")["common_assumption"], false);

    let m = load_incomplete_model(Path::new("fixtures/if_gap.incomplete.json"))
        .unwrap()
        .value;
    let survivors = m.reference_rounds().unwrap().survivors()[0].clone();
    assert_eq!(survivors.into_iter().collect::<Vec<_>>(), vec![0]);
}

#[test]
fn zeroed_reference_changes_supported_and_prior() {
    let base = lexepi(&["check-incomplete", "fixtures/ex33.incomplete.json", "--common"]).json();
    let zero = lexepi(&[
        "check-incomplete",
        "fixtures/ex33.zero-reference.incomplete.json",
        "--common",
    ]);
    assert_eq!(zero.code, 1);
    let zero = zero.json();
    for name in ["th11", "th12", "th21", "th22"] {
        assert_eq!(find_type(&base, name)["common_supported_and_prior"], true);
        assert_eq!(find_type(&zero, name)["carries_reference"], false);
        assert_eq!(find_type(&zero, name)["supported_and_prior"], false);
    }
}

#[test]
fn missing_reference_is_an_input_error() {
    let r = lexepi(&["check-incomplete", "fixtures/missing-reference.incomplete.json"]);
    assert_eq!(r.code, 2);
    assert!(r.json()["error"]["message"].as_str().unwrap().contains("reference_u"));
}

#[test]
fn co2in_then_in2co_round_trips() {
    let inc = scratch("ex32.incomplete.json");
    let r = lexepi(&[
        "transform",
        "fixtures/ex32.complete.json",
        "--direction",
        "co2in",
        "--out",
        inc.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0);
    let v = r.json();
    assert_eq!(v["result"]["output_types"], serde_json::json!([2, 2]));
    assert!(v["result"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["pass"] == true));

    let written = load_incomplete_model(&inc).unwrap().value;
    for (p, first) in [(Player::One, "t1#1"), (Player::Two, "t2#1")] {
        let t = written.type_id(p, first).unwrap();
        assert!(written.carries_reference(t));
        assert!(!written.carries_reference(TypeId::new(p, 1 - t.index)));
    }

    let co = scratch("ex32.back.complete.json");
    let r = lexepi(&[
        "transform",
        inc.to_str().unwrap(),
        "--direction",
        "in2co",
        "--out",
        co.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0);
    let back = load_complete_model(&co).unwrap().value;
    let original = load_complete_model(Path::new(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/fixtures/ex32.complete.json"
    )))
    .unwrap()
    .value;
    assert!(isomorphic_complete(&back, &original));
}

#[test]
fn in2co_on_the_incomplete_example() {
    let r = lexepi(&["transform", "fixtures/ex33.incomplete.json", "--direction", "in2co"]);
    assert_eq!(r.code, 0);
    let v = r.json();
    let groups = v["result"]["groups"].as_array().unwrap();
    assert_eq!(strings(&groups[0]["members"]), vec!["th11".to_string(), "th12".into()]);
    assert_eq!(strings(&groups[1]["members"]), vec!["th21".to_string(), "th22".into()]);
    let out = &v["result"]["output"];
    let types = out["types"].as_array().unwrap();
    assert_eq!(types.len(), 2);
    let level = |t: &Value, l: usize| (t["belief"][l][0]["choice"].clone(), t["belief"][l][0]["type"].clone());
    assert_eq!(level(&types[0], 0), ("D".into(), "th21".into()));
    assert_eq!(level(&types[0], 1), ("C".into(), "th21".into()));
    assert_eq!(level(&types[1], 0), ("A".into(), "th11".into()));
    assert_eq!(level(&types[1], 1), ("B".into(), "th11".into()));
    assert!(out["comment"].as_str().unwrap().contains("in2co"));
}

#[test]
fn verify_theorem_on_the_fixtures() {
    let cases: [(&str, [&[&str]; 2]); 3] = [
        ("fixtures/ex32.game.json", [&["A"], &["D"]]),
        ("fixtures/pennies.game.json", [&["H", "T"], &["h", "t"]]),
        ("fixtures/one.game.json", [&["a"], &["b"]]),
    ];
    for (path, expected) in cases {
        let r = lexepi(&["verify-theorem", path]);
        assert_eq!(r.code, 0, "{path}");
        let v = r.json();
        assert_eq!(v["result"]["agrees"], true);
        for key in ["survivors", "car_optimal", "incomplete_optimal", "converse_optimal"] {
            for i in 0..2 {
                assert_eq!(strings(&v["result"][key][i]), expected[i], "{path} {key}");
            }
        }
    }
}

#[test]
fn text_and_json_agree_on_verdicts() {
    let cases: [&[&str]; 4] = [
        &["check-complete", "fixtures/ex32.complete.json"],
        &["check-complete", "fixtures/ex32.swapped.complete.json"],
        &["check-incomplete", "fixtures/ex33.incomplete.json", "--common"],
        &[
            "check-incomplete",
            "fixtures/ex33.zero-reference.incomplete.json",
            "--common",
        ],
    ];
    for args in cases {
        let json = lexepi(args);
        let mut text_args = vec!["--format", "text"];
        text_args.extend_from_slice(args);
        let text = lexepi(&text_args);
        assert_eq!(json.code, text.code);
        for t in json.json()["result"]["types"].as_array().unwrap() {
            let verdict = if t["pass"] == true { "PASS" } else { "FAIL" };
            let line = text
                .stdout
                .lines()
                .find(|l| l.starts_with(&format!("type {} ", t["name"].as_str().unwrap())))
                .unwrap();
            assert!(line.ends_with(verdict), "{line}");
        }
    }
}

#[test]
fn verbosity_comes_from_the_environment() {
    let quiet = lexepi_with(
        &[("LEXEPI_VERBOSITY", "quiet")],
        &["check-complete", "fixtures/ex32.complete.json"],
    )
    .json();
    let t1 = find_type(&quiet, "t1");
    assert!(t1.get("folds").is_none() && t1.get("belief").is_none());

    let full = lexepi_with(
        &[("LEXEPI_VERBOSITY", "full")],
        &["check-complete", "fixtures/ex32.complete.json"],
    )
    .json();
    let t1 = find_type(&full, "t1");
    assert_eq!(t1["lex_values"][0]["values"], serde_json::json!(["0", "1"]));
    assert_eq!(t1["preference"], serde_json::json!([["A"], ["B"]]));

    let flag = lexepi_with(
        &[("LEXEPI_VERBOSITY", "full")],
        &["--verbosity", "quiet", "check-complete", "fixtures/ex32.complete.json"],
    )
    .json();
    assert!(find_type(&flag, "t1").get("lex_values").is_none());
}

#[test]
fn reports_match_golden_files() {
    let cases: [(&str, &[&str]); 4] = [
        (
            "ex32.check-complete.json",
            &["check-complete", "fixtures/ex32.complete.json", "--common"],
        ),
        (
            "ex33.check-incomplete.json",
            &["check-incomplete", "fixtures/ex33.incomplete.json", "--common"],
        ),
        ("ex32.ia.json", &["ia", "fixtures/ex32.game.json"]),
        (
            "ex32.verify-theorem.json",
            &["verify-theorem", "fixtures/ex32.game.json"],
        ),
    ];
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/golden");
    for (file, args) in cases {
        let first = lexepi(args).stdout;
        assert_eq!(first, lexepi(args).stdout, "{file} is not deterministic");
        let path = dir.join(file);
        if std::env::var_os("LEXEPI_BLESS").is_some() {
            fs::write(&path, &first).unwrap();
        }
        let golden = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(first, golden, "{file} drifted; rerun with LEXEPI_BLESS=1 if intended");
    }
}
