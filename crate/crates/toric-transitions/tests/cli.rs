//! End-to-end checks of the command-line surface and exit codes.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_toric-transitions"))
}

fn write_temp(name: &str, contents: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join("toric-transitions-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn preset_then_transition_round_trip() {
    let out = bin().args(["preset", "quintic-conifold"]).output().unwrap();
    assert!(out.status.success());
    let input = write_temp("quintic.json", &String::from_utf8(out.stdout).unwrap());
    let report_path = std::env::temp_dir()
        .join("toric-transitions-cli-tests")
        .join("quintic-report.json");

    let run = bin()
        .args([
            "transition",
            input.to_str().unwrap(),
            "--out",
            report_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let text = String::from_utf8(run.stdout).unwrap();
    assert!(text.contains("verdict.condition1 = true"));
    assert!(text.contains("verdict.condition2 = false"));

    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(json["verdict"]["crepant"], serde_json::json!(true));
    assert_eq!(
        json["stages"]["blowup"]["polytope"]["point_count"],
        serde_json::json!(126)
    );

    // Determinism: a second run produces byte-identical JSON.
    let second_path = report_path.with_extension("second.json");
    bin()
        .args([
            "transition",
            input.to_str().unwrap(),
            "--out",
            second_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(
        std::fs::read_to_string(&report_path).unwrap(),
        std::fs::read_to_string(&second_path).unwrap()
    );
}

#[test]
fn validate_rejects_wall_sitting_stability() {
    let input = write_temp(
        "wall.json",
        r#"{
            "torus_rank": 2,
            "characters": [[1,0],[0,1]],
            "stability": [1, 0],
            "request": "validate"
        }"#,
    );
    let run = bin().args(["validate", input.to_str().unwrap()]).output().unwrap();
    assert_eq!(run.status.code(), Some(1));
}

#[test]
fn malformed_rational_is_schema_error() {
    let input = write_temp(
        "bad.json",
        r#"{
            "torus_rank": 1,
            "characters": [[1]],
            "stability": ["1/0"],
            "request": "validate"
        }"#,
    );
    let run = bin().args(["validate", input.to_str().unwrap()]).output().unwrap();
    assert_eq!(run.status.code(), Some(1));
}

#[test]
fn unknown_preset_lists_choices() {
    let run = bin().args(["preset", "nope"]).output().unwrap();
    assert_eq!(run.status.code(), Some(1));
    let err = String::from_utf8(run.stderr).unwrap();
    assert!(err.contains("quintic-conifold"), "{err}");
}

#[test]
fn cohomology_request_reports_narrow_data() {
    let out = bin()
        .args(["preset", "proj-hypersurface", "--param", "m=5", "--param", "k=2", "--param", "d=5"])
        .output()
        .unwrap();
    let input = write_temp("proj.json", &String::from_utf8(out.stdout).unwrap());
    let run = bin()
        .args(["cohomology", input.to_str().unwrap(), "--narrow", "--sectors"])
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(0));
    let text = String::from_utf8(run.stdout).unwrap();
    assert!(text.contains("narrow_dims"), "{text}");
    assert!(text.contains("sectors"), "{text}");
}
