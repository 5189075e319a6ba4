use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fractal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fractal")).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    fractal(args).status.code().unwrap()
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn scheme_commands() {
    let out = fractal(&["scheme", "list"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "carpet\npascal3\nkoch\ncantor\n");
    let out = fractal(&["scheme", "show", "carpet"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!((doc["m"].as_u64(), doc["M"].as_u64()), (Some(8), Some(9)));
    assert_eq!(code(&["scheme", "show", "nosuch"]), 2);
}

#[test]
fn shown_scheme_round_trips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("koch.json");
    std::fs::write(&file, fractal(&["scheme", "show", "koch"]).stdout).unwrap();
    assert_eq!(code(&["verify", "--scheme", path_arg(&file), "--depth", "4"]), 0);
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("carpet.json");
    assert_eq!(
        code(&["verify", "--scheme", "carpet", "--depth", "4", "--expect-ratio", "8", "--out", path_arg(&report)]),
        0
    );
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let ratio = &doc["conditions"][0]["extremal"];
    assert!((ratio["r"].as_f64().unwrap() - 8.0).abs() < 1e-9);
    assert!((ratio["R"].as_f64().unwrap() - 8.0).abs() < 1e-9);
    assert_eq!(doc["overall"], "pass");

    assert_eq!(code(&["verify", "--scheme", "koch", "--depth", "6"]), 0);
    assert_eq!(code(&["verify", "--scheme", &fixture("broken.json"), "--depth", "3"]), 1);
    assert_eq!(code(&["verify", "--scheme", "carpet", "--depth", "3", "--expect-ratio", "7"]), 1);
    assert_eq!(code(&["verify", "--scheme", "carpet", "--depth", "3", "--mode", "pairwise"]), 1);
}

#[test]
fn malformed_schemes_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    assert_eq!(code(&["verify", "--scheme", path_arg(&garbage)]), 3);

    let mut doc: serde_json::Value = serde_json::from_slice(&fractal(&["scheme", "show", "carpet"]).stdout).unwrap();
    doc["m"] = 9.into();
    let equal = dir.path().join("equal.json");
    std::fs::write(&equal, doc.to_string()).unwrap();
    let out = fractal(&["verify", "--scheme", path_arg(&equal)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("m < M violated"));

    // Layout violations are fatal outside verify.
    assert_eq!(code(&["render", "--scheme", &fixture("broken.json"), "--depth", "1"]), 3);
}

#[test]
fn separation_examples() {
    let out = fractal(&["separation", "--scheme", "cantor", "--depth", "1", "--mode", "forall-exists"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("0.333333333333"));
    assert_eq!(code(&["separation", "--scheme", "carpet", "--depth", "1", "--mode", "pairwise"]), 1);
    assert_eq!(code(&["separation", "--scheme", "carpet", "--depth", "1", "--mode", "forall-exists"]), 0);
}

#[test]
fn dynamics_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("koch.json");
    assert_eq!(code(&["dynamics", "--scheme", "cantor", "--depth", "6", "--horizon", "64"]), 0);
    assert_eq!(
        code(&["dynamics", "--scheme", "koch", "--depth", "8", "--horizon", "64", "--out", path_arg(&out)]),
        0
    );
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["periodic"].as_array().unwrap().len(), 256);
    assert_eq!(code(&["dynamics", "--scheme", "carpet", "--depth", "2", "--mode", "pairwise"]), 4);
    assert_eq!(code(&["dynamics", "--scheme", "cantor", "--depth", "2", "--horizon", "2"]), 2);
}

#[test]
fn render_outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.svg");
    let b = dir.path().join("b.svg");
    for p in [&a, &b] {
        assert_eq!(code(&["render", "--scheme", "carpet", "--depth", "3", "--out", path_arg(p)]), 0);
    }
    let svg = std::fs::read_to_string(&a).unwrap();
    assert_eq!(svg.matches("<polygon").count(), 585);
    assert_eq!(svg, std::fs::read_to_string(&b).unwrap());

    let k = dir.path().join("k.svg");
    assert_eq!(
        code(&["render", "--scheme", "koch", "--depth", "4", "--subfractal", "12", "--out", path_arg(&k)]),
        0
    );
    assert_eq!(std::fs::read_to_string(&k).unwrap().matches("class=\"highlight\"").count(), 4);
    assert_eq!(code(&["render", "--scheme", "carpet", "--depth", "2", "--subfractal", "9"]), 2);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&[]), 2);
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["verify"]), 2);
    assert_eq!(code(&["verify", "--scheme", "carpet", "--depth", "1"]), 2);
    assert_eq!(code(&["verify", "--scheme", "carpet", "--lambda-max", "nan"]), 2);
    assert_eq!(code(&["separation", "--scheme", "carpet", "--mode", "sideways"]), 2);
    assert_eq!(code(&["render", "--scheme", "carpet", "--depth", "7"]), 2);
    assert_eq!(code(&["render", "--scheme", "carpet", "--depth", "2", "--out", "/nonexistent/dir/x.svg"]), 2);
}
