//! End-to-end CLI behavior: determinism, the fixture round trip, exit
//! codes and the report schema.

use serde_json::Value;

use toric_stab::cli::run;

fn run_args(args: &[&str]) -> (i32, String, String) {
    let argv: Vec<String> = std::iter::once("toric-stab".to_string())
        .chain(args.iter().map(|s| s.to_string()))
        .collect();
    run(&argv)
}

fn temp_file(name: &str, contents: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join("toric-stab-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(format!("{name}-{}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for args in [
        vec!["measures", "--fixture", "hirzebruch1", "--format", "json"],
        vec!["q", "--poly", "--fixture", "cp1-unit", "--format", "json"],
        vec![
            "decide", "--i", "2", "--mode", "sampled", "--seed", "3", "--fixture", "cp1-unit",
        ],
        vec!["count", "--i", "3", "--fixture", "simplex2", "--format", "json"],
    ] {
        let a = run_args(&args);
        let b = run_args(&args);
        assert_eq!(a, b, "{args:?}");
        assert_eq!(a.0, 0, "{args:?}: {}", a.2);
    }
}

#[test]
fn json_reports_carry_the_schema_tag() {
    let (code, stdout, _) =
        run_args(&["measures", "--fixture", "square-sym", "--format", "json"]);
    assert_eq!(code, 0);
    let value: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(value["schema"], "toric-stab/1");
    assert_eq!(value["command"], "measures");
    assert!(value["inputs_digest"].is_string());
    assert!(value["warnings"].is_array());
    assert_eq!(value["results"]["volume"], "4");
    assert_eq!(value["results"]["boundary_volume"], "8");
}

#[test]
fn fixture_dump_round_trips_through_a_file() {
    let (code, dump, _) = run_args(&["examples", "hirzebruch1"]);
    assert_eq!(code, 0);
    let path = temp_file("hirzebruch1.json", &dump);
    let path_str = path.to_str().unwrap();
    for subcommand in [
        vec!["measures", "--format", "json"],
        vec!["q", "--poly", "--format", "json"],
        vec!["count", "--i", "2", "--format", "json"],
    ] {
        let mut from_file = subcommand.clone();
        from_file.extend(["--polytope", path_str]);
        let mut from_fixture = subcommand.clone();
        from_fixture.extend(["--fixture", "hirzebruch1"]);
        let a = run_args(&from_file);
        let b = run_args(&from_fixture);
        assert_eq!(a.0, 0, "{}", a.2);
        assert_eq!(a.1, b.1, "{subcommand:?}");
    }
    std::fs::remove_file(path).ok();
}

#[test]
fn exit_code_two_on_bad_inputs() {
    // malformed file
    let path = temp_file("garbage.json", "{ not json");
    let (code, _, stderr) = run_args(&["measures", "--polytope", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(!stderr.is_empty());
    std::fs::remove_file(path).ok();
    // bad divisor angle
    let (code, _, stderr) = run_args(&[
        "q", "--i", "1", "--fixture", "cp1-unit", "--divisors", "0:3/2",
    ]);
    assert_eq!(code, 2);
    assert!(stderr.contains("0, 1]"), "{stderr}");
    // bad facet index
    let (code, _, _) = run_args(&[
        "q", "--i", "1", "--fixture", "cp1-unit", "--divisors", "9:1/2",
    ]);
    assert_eq!(code, 2);
    // unbounded polytope
    let path = temp_file(
        "unbounded.json",
        r#"{"dim": 2, "halfspaces": [{"normal": [1, 0], "offset": 0},
            {"normal": [0, 1], "offset": 0}]}"#,
    );
    let (code, _, stderr) = run_args(&["validate", "--polytope", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stderr.contains("unbounded"));
    std::fs::remove_file(path).ok();
}

#[test]
fn exit_code_three_on_caps_with_fallback_report() {
    // Exact mode beyond its caps still emits a report (linear + sampled
    // fallback, flagged as not a certificate) and signals the cap via the
    // exit code.
    let (code, stdout, stderr) = run_args(&[
        "decide",
        "--i",
        "2",
        "--mode",
        "exact",
        "--max-constraints",
        "1",
        "--fixture",
        "cp1-unit",
    ]);
    assert_eq!(code, 3, "{stderr}");
    assert!(stdout.contains("not a certificate"), "{stdout}");
    assert!(stdout.contains("mode: sampled"), "{stdout}");
    // exact mode refuses dimension 3 and larger, same degradation
    let path = temp_file(
        "cube.json",
        r#"{"vertices": [[0,0,0],[1,0,0],[0,1,0],[0,0,1],[1,1,0],[1,0,1],[0,1,1],[1,1,1]]}"#,
    );
    let (code, stdout, _) = run_args(&[
        "decide", "--i", "1", "--mode", "exact", "--polytope", path.to_str().unwrap(),
    ]);
    assert_eq!(code, 3);
    assert!(stdout.contains("decision:"), "{stdout}");
    std::fs::remove_file(path).ok();
    // a cap hit outside the decide fallback is a plain exit-3 error
    let (code, _, stderr) = run_args(&[
        "decide",
        "--i",
        "2",
        "--mode",
        "sampled",
        "--fixture",
        "cp1-unit",
        "--max-constraints",
        "1",
    ]);
    assert!(code == 0 || code == 3, "{stderr}");
}

#[test]
fn decide_reports_witness_in_function_file_format() {
    let (code, stdout, _) = run_args(&[
        "decide",
        "--i",
        "2",
        "--mode",
        "exact",
        "--fixture",
        "cp1-unit",
        "--divisors",
        "0:1,1:1/2",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let value: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(value["results"]["decision"], "unstable");
    assert_eq!(value["results"]["certified"], true);
    let witness = &value["results"]["witness"];
    assert_eq!(witness["scale"], 2);
    assert!(witness["values"].as_array().unwrap().len() == 3);
}

#[test]
fn futaki_commands_accept_function_files() {
    // h(x) = x on the unit interval at scale 1
    let h_file = temp_file(
        "h-coordinate.json",
        r#"{"scale": 1, "values": [[["0"], "0"], [["1"], "1"]]}"#,
    );
    let h = h_file.to_str().unwrap();
    let (code, stdout, stderr) = run_args(&[
        "futaki",
        "--h",
        h,
        "--fixture",
        "cp1-unit",
        "--divisors",
        "1:1/2",
    ]);
    assert_eq!(code, 0, "{stderr}");
    assert!(stdout.contains("log Futaki expression: 1/4"), "{stdout}");
    assert!(stdout.contains("obstructs"), "{stdout}");

    let (code, stdout, _) = run_args(&[
        "futaki-consistency",
        "--h",
        h,
        "--k",
        "1",
        "--imax",
        "6",
        "--fixture",
        "cp1-unit",
        "--divisors",
        "0:3/4,1:3/4",
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("pass: true"), "{stdout}");
    std::fs::remove_file(h_file).ok();

    // a non-convex function is an input error
    let tent = temp_file(
        "tent.json",
        r#"{"scale": 2, "values": [[["0"], "0"], [["1/2"], "1"], [["1"], "0"]]}"#,
    );
    let (code, _, stderr) =
        run_args(&["futaki", "--h", tent.to_str().unwrap(), "--fixture", "cp1-unit"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("not convex"), "{stderr}");
    std::fs::remove_file(tent).ok();
}

#[test]
fn non_delzant_inputs_warn_on_verdict_commands() {
    let path = temp_file(
        "stretched.json",
        r#"{"vertices": [[0, 0], [1, 0], [0, 2]]}"#,
    );
    let (code, stdout, _) = run_args(&[
        "q", "--i", "1", "--polytope", path.to_str().unwrap(), "--format", "json",
    ]);
    assert_eq!(code, 0);
    let value: Value = serde_json::from_str(&stdout).unwrap();
    let warnings = value["warnings"].as_array().unwrap();
    assert!(!warnings.is_empty());
    // counting-only commands carry no such warning
    let (_, stdout, _) = run_args(&[
        "count", "--i", "1", "--polytope", path.to_str().unwrap(), "--format", "json",
    ]);
    let value: Value = serde_json::from_str(&stdout).unwrap();
    assert!(value["warnings"].as_array().unwrap().is_empty());
    std::fs::remove_file(path).ok();
}

#[test]
fn every_fixture_dumps_and_reloads() {
    for name in toric_stab::fixtures::FIXTURE_NAMES {
        let (code, dump, _) = run_args(&["examples", name]);
        assert_eq!(code, 0);
        let path = temp_file(&format!("{name}.json"), &dump);
        let (code, _, stderr) =
            run_args(&["validate", "--polytope", path.to_str().unwrap()]);
        assert_eq!(code, 0, "{name}: {stderr}");
        std::fs::remove_file(path).ok();
    }
}
