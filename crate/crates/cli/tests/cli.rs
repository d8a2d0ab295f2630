//! End-to-end tests of the binary: golden counterexample output, exit
//! code contract, and file round-trips through the subcommands.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn circlepack(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_circlepack"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

fn write(dir: &Path, name: &str, contents: &str) {
    fs::write(dir.join(name), contents).unwrap();
}

const TETRA_ORTHOGONAL: &str = r#"{"background": "euclidean",
 "faces": [[0,1,2],[0,1,3],[0,2,3],[1,2,3]],
 "inversive": [[0,1,0.0],[0,2,0.0],[0,3,0.0],[1,2,0.0],[1,3,0.0],[2,3,0.0]]}"#;

const GOLDEN_COUNTEREXAMPLE: &str = "\
Counterexample: weighted triangulated disk, Euclidean background, I >= 1
faces {1,2,4} {1,3,4} {2,3,4}; I(2,4) = 4, I(3,4) = 3, I = 1 elsewhere
A = {4}, B = {1,2,3}
r = (100, 100, 100, 155)
R = (110, 240, 220, 150)

edge              l_r          l_R
{1,2}       200.00000    350.00000
{1,3}       200.00000    330.00000
{1,4}       255.00000    260.00000
{2,3}       200.00000    460.00000
{2,4}       397.52358    606.71245
{3,4}       356.40567    518.55569

vertex            K_r          K_R
1             2.37781      1.21223
2             4.59519      5.21346
3             4.00207      4.51403
4             4.73289      4.76824

hypothesis R|_B >= r|_B: holds
hypothesis K_R|_A >= K_r|_A: holds
conclusion R >= r: VIOLATED
  at vertex 4: r = 155.00000 > R = 150.00000
wrote surface.json, r.json, R.json
";

#[test]
fn counterexample_output_is_pinned() {
    let dir = TempDir::new().unwrap();
    let out = circlepack(dir.path(), &["counterexample"]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout_of(&out), GOLDEN_COUNTEREXAMPLE);
    for name in ["surface.json", "r.json", "R.json"] {
        assert!(dir.path().join(name).exists(), "{} missing", name);
    }
}

#[test]
fn doubled_counterexample_violates_at_both_copies() {
    let dir = TempDir::new().unwrap();
    let out = circlepack(dir.path(), &["counterexample", "--doubled"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout_of(&out);
    assert!(text.contains("conclusion R >= r: VIOLATED"));
    assert!(text.contains("at vertex 4: r = 155.00000 > R = 150.00000"));
    assert!(text.contains("at vertex 5: r = 155.00000 > R = 150.00000"));
}

#[test]
fn compare_exit_codes_follow_the_verdict() {
    let dir = TempDir::new().unwrap();
    assert_eq!(exit_code(&circlepack(dir.path(), &["counterexample"])), 0);

    // R = r: reflexive, conclusion holds.
    let out = circlepack(
        dir.path(),
        &["compare", "-s", "surface.json", "--r", "r.json", "--R", "r.json", "--A", "4"],
    );
    assert_eq!(exit_code(&out), 0);
    let verdict: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(verdict["conclusion"], serde_json::json!(true));
    assert_eq!(verdict["violations"], serde_json::json!([]));

    // The real pair: hypotheses hold, conclusion violated at vertex 4
    // (0-based 3 in the JSON).
    let out = circlepack(
        dir.path(),
        &["compare", "-s", "surface.json", "--r", "r.json", "--R", "R.json", "--A", "4"],
    );
    assert_eq!(exit_code(&out), 1);
    let verdict: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(verdict["hyp_radii"], serde_json::json!(true));
    assert_eq!(verdict["hyp_curv"], serde_json::json!(true));
    assert_eq!(verdict["conclusion"], serde_json::json!(false));
    assert_eq!(verdict["violations"][0]["vertex"], serde_json::json!(3));
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "broken.json", "{not json");
    write(dir.path(), "radii.json", r#"{"radii": [1.0, 1.0, 1.0, 1.0]}"#);
    let out = circlepack(
        dir.path(),
        &["validate", "-s", "broken.json", "-r", "radii.json"],
    );
    assert_eq!(exit_code(&out), 2);

    // An edge with no inversive value is malformed input, not data.
    write(
        dir.path(),
        "missing.json",
        r#"{"background": "euclidean", "faces": [[0,1,2]],
            "inversive": [[0,1,1.0],[0,2,1.0]]}"#,
    );
    write(dir.path(), "r3.json", r#"{"radii": [1.0, 1.0, 1.0]}"#);
    let out = circlepack(dir.path(), &["validate", "-s", "missing.json", "-r", "r3.json"]);
    assert_eq!(exit_code(&out), 2);

    // 1-based vertex arguments: 0 is out of range.
    write(dir.path(), "tetra.json", TETRA_ORTHOGONAL);
    write(dir.path(), "r4.json", r#"{"radii": [1.0, 1.0, 1.0, 1.0]}"#);
    let out = circlepack(
        dir.path(),
        &["compare", "-s", "tetra.json", "--r", "r4.json", "--R", "r4.json", "--A", "0"],
    );
    assert_eq!(exit_code(&out), 2);

    // Unknown flag: clap's own usage error.
    let out = circlepack(dir.path(), &["curvature", "--no-such-flag"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn fuzzed_garbage_inputs_exit_2() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "r.json", r#"{"radii": [1.0, 1.0, 1.0, 1.0]}"#);
    let garbage = [
        "",
        "null",
        "[]",
        "{}",
        r#"{"background": "spherical", "faces": [[0,1,2]], "inversive": [[0,1,1.0],[0,2,1.0],[1,2,1.0]]}"#,
        r#"{"background": "euclidean", "faces": [], "inversive": []}"#,
        r#"{"background": "euclidean", "faces": [[0,0,1]], "inversive": []}"#,
        r#"{"background": "euclidean", "faces": [[0,1,2]], "inversive": [[0,1,-3.0],[0,2,1.0],[1,2,1.0]]}"#,
        r#"{"background": "euclidean", "faces": [[0,1,2]], "inversive": [[0,5,1.0],[0,2,1.0],[1,2,1.0]]}"#,
        r#"{"faces": [[0,1,2]], "inversive": [[0,1,1.0],[0,2,1.0],[1,2,1.0]]}"#,
        r#"{"background": "euclidean", "faces": [[0,1,2],[0,1,2]], "inversive": [[0,1,1.0],[0,2,1.0],[1,2,1.0]]}"#,
        "\u{0}\u{1}\u{2}",
        "{\"background\": \"euclidean\", \"faces\": [[0,1,2]], \"inversive\": [[0,1,\"x\"]]}",
    ];
    for (i, text) in garbage.iter().enumerate() {
        let name = format!("garbage_{}.json", i);
        write(dir.path(), &name, text);
        for args in [
            vec!["validate", "-s", &name, "-r", "r.json"],
            vec!["curvature", "-s", &name, "-r", "r.json"],
            vec!["double", "-s", &name, "-o", "out.json"],
        ] {
            let out = circlepack(dir.path(), &args);
            assert_eq!(
                exit_code(&out),
                2,
                "case {} via {:?} should be malformed input",
                i,
                args[0]
            );
        }
    }
    // Radius files that do not match the surface are malformed too.
    write(dir.path(), "tetra.json", TETRA_ORTHOGONAL);
    for bad in [r#"{"radii": [1.0]}"#, r#"{"radii": [1.0, -1.0, 1.0, 1.0]}"#, "[]"] {
        write(dir.path(), "bad_r.json", bad);
        let out = circlepack(dir.path(), &["curvature", "-s", "tetra.json", "-r", "bad_r.json"]);
        assert_eq!(exit_code(&out), 2);
    }
}

#[test]
fn validate_flags_degenerate_metrics() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "disjoint.json",
        r#"{"background": "euclidean",
            "faces": [[0,1,2],[0,1,3],[0,2,3],[1,2,3]],
            "inversive": [[0,1,4.0],[0,2,4.0],[0,3,4.0],[1,2,4.0],[1,3,4.0],[2,3,4.0]]}"#,
    );
    write(dir.path(), "thin.json", r#"{"radii": [1.0, 1.0, 0.001, 1.0]}"#);
    let out = circlepack(
        dir.path(),
        &["validate", "-s", "disjoint.json", "-r", "thin.json"],
    );
    assert_eq!(exit_code(&out), 1);
    let text = stdout_of(&out);
    assert!(text.contains("DEGENERATE"));
    assert!(text.contains("packing metric: no"));

    // curvature on the same input refuses with exit 1.
    let out = circlepack(
        dir.path(),
        &["curvature", "-s", "disjoint.json", "-r", "thin.json"],
    );
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn degenerate_scan_prints_the_limit() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "tetra.json", TETRA_ORTHOGONAL);
    write(dir.path(), "r.json", r#"{"radii": [1.0, 1.0, 1.0, 1.0]}"#);
    let out = circlepack(
        dir.path(),
        &[
            "degenerate",
            "-s",
            "tetra.json",
            "-r",
            "r.json",
            "--J",
            "1",
            "--eps",
            "1,0.1,0.01,0.001",
        ],
    );
    assert_eq!(exit_code(&out), 0);
    let text = stdout_of(&out);
    // The limit 2 pi - 3 (pi - pi/2) = pi/2 to five decimals.
    assert!(text.contains("1.57080"), "table was:\n{}", text);
    assert!(text.lines().count() == 5);
}

#[test]
fn solve_writes_radii_and_convergence_log() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "tetra.json", TETRA_ORTHOGONAL);
    write(dir.path(), "fix.json", r#"{"fixed": [[0, 1.0]]}"#);
    write(
        dir.path(),
        "target.json",
        r#"{"target": [[1, 3.3], [2, 3.3], [3, 3.3]]}"#,
    );
    let out = circlepack(
        dir.path(),
        &[
            "solve",
            "-s",
            "tetra.json",
            "--fix",
            "fix.json",
            "--target",
            "target.json",
            "-o",
            "solved.json",
            "--log",
            "log.csv",
        ],
    );
    assert_eq!(exit_code(&out), 0, "stderr: {:?}", String::from_utf8_lossy(&out.stderr));

    let solved: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("solved.json")).unwrap()).unwrap();
    let radii = solved["radii"].as_array().unwrap();
    assert_eq!(radii.len(), 4);
    assert_eq!(radii[0], serde_json::json!(1.0));
    // The symmetric target has a symmetric solution.
    assert!((radii[1].as_f64().unwrap() - radii[2].as_f64().unwrap()).abs() < 1e-9);

    let log = fs::read_to_string(dir.path().join("log.csv")).unwrap();
    assert!(log.starts_with("iteration,residual,step_size\n"));
    assert!(log.lines().count() >= 2);

    // An infeasible target is a domain failure.
    write(dir.path(), "low.json", r#"{"target": [[1, 1.0], [2, 3.3], [3, 3.3]]}"#);
    let out = circlepack(
        dir.path(),
        &["solve", "-s", "tetra.json", "--fix", "fix.json", "--target", "low.json"],
    );
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn double_round_trips_through_files() {
    let dir = TempDir::new().unwrap();
    assert_eq!(exit_code(&circlepack(dir.path(), &["counterexample"])), 0);
    let out = circlepack(
        dir.path(),
        &["double", "-s", "surface.json", "-o", "closed.json"],
    );
    assert_eq!(exit_code(&out), 0);
    assert!(stdout_of(&out).contains("5 vertices, 9 edges, 6 faces, chi = 2"));

    // Doubling a closed surface is a domain failure.
    let out = circlepack(dir.path(), &["double", "-s", "closed.json", "-o", "x.json"]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn counterexample_json_carries_full_precision() {
    let dir = TempDir::new().unwrap();
    let out = circlepack(dir.path(), &["counterexample", "--json"]);
    assert_eq!(exit_code(&out), 0);
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let k4 = value["K_r"][3].as_f64().unwrap();
    assert!((k4 - 4.73289).abs() < 5e-6);
    assert!(format!("{}", k4).len() > 8, "full doubles, not 5 decimals");
    assert_eq!(value["verdict"]["conclusion"], serde_json::json!(false));
}
