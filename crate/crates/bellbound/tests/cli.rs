use std::path::Path;
use std::process::{Command, Output};

use bellbound::commands::exit;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellbound"))
        .args(args)
        .env("BELLBOUND_WORKERS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn solve_one_way() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("oneway.json");
    let o = run(&["solve", "--problem", "oneway", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), exit::OK);
    assert!(stdout(&o).contains("2·PD + 2"), "{}", stdout(&o));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(report["segments"].as_array().unwrap().len(), 1);
    assert_eq!(report["stats"]["subsets_attempted"], 14_893);
}

#[test]
fn thresholds_and_targets() {
    let o = run(&["thresholds", "oneway"]);
    assert_eq!(code(&o), exit::OK);
    assert!(stdout(&o).contains("0.414213562373"), "{}", stdout(&o));

    let o = run(&["thresholds", "oneway", "4"]);
    assert_eq!(code(&o), exit::OK);

    let o = run(&["thresholds", "oneway", "5"]);
    assert_eq!(code(&o), exit::PIPELINE);
}

#[test]
fn curve_csv() {
    let o = run(&["curve", "--problem", "oneway", "--samples", "5", "--quantum-line"]);
    assert_eq!(code(&o), exit::OK);
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "pd,bound,tsirelson");
    assert_eq!(rows[1], "0,2,2.82842712474619");
    assert_eq!(rows[5], "1,4,2.82842712474619");
    assert!(rows[6].starts_with("# threshold sqrt(8): pd = 0.414213562373"));
}

#[test]
fn verify_model_outcomes() {
    let o = run(&["verify-model", "--model", "table2", "--pd", "1/4"]);
    assert_eq!(code(&o), exit::OK, "{}", String::from_utf8_lossy(&o.stderr));

    let o = run(&[
        "verify-model",
        "--model",
        "pawlowski:1/2",
        "--pd",
        "1/2",
        "--symmetrized",
    ]);
    assert_eq!(code(&o), exit::OK);
    assert!(stdout(&o).contains("no-signalling: true"));

    // every outcome equally likely: no correlation, far from the bound
    let uniform = Path::new(env!("CARGO_TARGET_TMPDIR")).join("uniform_model.json");
    let row = r#"[["1/4"], ["1/4"], ["1/4"], ["1/4"]]"#;
    let rows = [row; 4].join(", ");
    std::fs::write(
        &uniform,
        format!(
            r#"{{"name": "uniform", "validity": ["0", "1"], "components": [{{"weight": "1", "rows": [{rows}]}}]}}"#
        ),
    )
    .unwrap();
    let o = run(&["verify-model", "--model", uniform.to_str().unwrap(), "--pd", "0"]);
    assert_eq!(code(&o), exit::VERIFY);
}

#[test]
fn oracle_agrees() {
    let o = run(&["oracle", "--problem", "oneway", "--pd", "0,1/3,1"]);
    assert_eq!(code(&o), exit::OK);
    assert_eq!(stdout(&o).matches("equal").count(), 3);
}

#[test]
fn parse_failures() {
    assert_eq!(code(&run(&["solve", "--problem", "/nonexistent.json"])), exit::PARSE);
    assert_eq!(
        code(&run(&["verify-model", "--model", "table1", "--pd", "half"])),
        exit::PARSE
    );
    let o = run(&[
        "solve",
        "--problem",
        concat!(env!("CARGO_MANIFEST_DIR"), "/problems/toy.json"),
    ]);
    assert_eq!(code(&o), exit::OK);
    assert!(stdout(&o).contains("B(PD) = 1 on [0, 1]"));
}
