use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn macwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_macwalk"))
        .args(args)
        .env("MACWALK_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

#[test]
fn kernel_row_sums_to_one_exactly() {
    let out = macwalk(&[
        "kernel", "--m", "2", "--x0", "2,0", "--q", "1/3", "--t", "1/2", "--mode", "exact",
    ]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["sum"], "1");
    assert!(v["row"].as_array().unwrap().iter().all(|e| e["p"].is_string()));
}

#[test]
fn kernel_rejects_bad_input() {
    assert_eq!(
        code(&macwalk(&["kernel", "--x0", "0,1", "--q", "1/3", "--t", "1/2"])),
        2
    );
    assert_eq!(
        code(&macwalk(&[
            "kernel", "--x0", "2,0", "--q", "0.3", "--t", "1/2", "--mode", "exact"
        ])),
        2
    );
    assert_eq!(
        code(&macwalk(&[
            "kernel", "--m", "3", "--x0", "2,0", "--q", "1/3", "--t", "1/2"
        ])),
        2
    );
    assert_eq!(
        code(&macwalk(&["kernel", "--x0", "2,0", "--q", "3/2", "--t", "1/2"])),
        2
    );
    assert_eq!(code(&macwalk(&["bogus"])), 2);
}

#[test]
fn schur_variant_matches_general_row() {
    let schur = stdout_json(&macwalk(&[
        "kernel",
        "--x0",
        "4,2,1",
        "--variant",
        "schur",
        "--q",
        "2/5",
    ]));
    let general = stdout_json(&macwalk(&["kernel", "--x0", "4,2,1", "--q", "2/5", "--t", "2/5"]));
    assert_eq!(schur["row"], general["row"]);
    assert_eq!(schur["sum"], "1");
}

#[test]
fn hl_and_jack_rows_are_normalized() {
    let hl = stdout_json(&macwalk(&[
        "kernel",
        "--x0",
        "5,2,0",
        "--variant",
        "hl",
        "--t",
        "1/2",
    ]));
    assert_eq!(hl["sum"], "1");
    let jack = stdout_json(&macwalk(&[
        "kernel",
        "--x0",
        "2,0,-3",
        "--variant",
        "jack",
        "--alpha",
        "1/2",
        "--b",
        "1/3",
    ]));
    assert_eq!(jack["sum"], "1");
    assert_eq!(jack["row"].as_array().unwrap().len(), 8);
    let float = stdout_json(&macwalk(&[
        "kernel", "--x0", "2,0", "--q", "1/3", "--t", "1/2", "--mode", "float",
    ]));
    assert!((float["sum"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn simulate_reaches_the_wall_deterministically() {
    let args = [
        "simulate", "--x0", "7,6,3,1", "--q", "0.3", "--t", "0.5", "--seed", "7",
    ];
    let a = macwalk(&args);
    let b = macwalk(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let v = stdout_json(&a);
    assert_eq!(v["terminal"], true);
    assert_eq!(v["m"], 4);
}

#[test]
fn simulate_at_delta_is_empty() {
    let out = macwalk(&["simulate", "--x0", "2,1,0"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["moves"].as_array().unwrap().len(), 0);
    assert_eq!(v["terminal"], true);
}

#[test]
fn simulate_reports_step_limit() {
    let path = scratch("partial.json");
    let out = macwalk(&[
        "simulate",
        "--x0",
        "30,20,10",
        "--q",
        "0.3",
        "--t",
        "0.5",
        "--max-steps",
        "2",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["moves"].as_array().unwrap().len(), 2);
    assert_eq!(v["terminal"], false);
}

#[test]
fn simulate_replicates_write_an_array() {
    let out = macwalk(&["simulate", "--x0", "4,1", "--seed", "3", "--replicates", "5"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v.as_array().unwrap().len(), 5);
}

#[test]
fn continuous_run_ends_at_delta() {
    let out = macwalk(&[
        "simulate",
        "--continuous",
        "--x0",
        "5,2,0",
        "--t-max",
        "100",
        "--seed",
        "7",
    ]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["final"], serde_json::json!([2, 1, 0]));
    assert_eq!(v["absorbed"], true);
    let events = v["events"].as_array().unwrap();
    let times: Vec<f64> = events.iter().map(|e| e["time"].as_f64().unwrap()).collect();
    assert!(times.windows(2).all(|w| w[0] < w[1]));
    // each block event i, j lowers |x| by i − j + 1; excess of (5,2,0) is 4
    let lowered: u64 = events
        .iter()
        .map(|e| e["i"].as_u64().unwrap() - e["j"].as_u64().unwrap() + 1)
        .sum();
    assert_eq!(lowered, 4);
}

#[test]
fn check_examples() {
    let out = macwalk(&[
        "check",
        "normalization",
        "--m",
        "3",
        "--max-x",
        "10",
        "--q",
        "1/3",
        "--t",
        "1/2",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["passed"], true);
    let out = macwalk(&["check", "boltzmann", "--m", "3", "--seed", "1", "--count", "200"]);
    assert_eq!(code(&out), 0);
    for suite in [
        "branching",
        "duality",
        "specializations",
        "hl-generator",
        "jack-limit",
    ] {
        assert_eq!(code(&macwalk(&["check", suite])), 0, "{}", suite);
    }
}

#[test]
fn corrupted_kernel_is_caught() {
    let out = macwalk(&[
        "check",
        "normalization",
        "--m",
        "2",
        "--max-x",
        "4",
        "--corrupt-kernel",
    ]);
    assert_eq!(code(&out), 1);
    let v = stdout_json(&out);
    assert_eq!(v["passed"], false);
    let cx = v["reports"][0]["counterexample"].as_str().unwrap();
    assert!(cx.starts_with("x = (1)"), "{}", cx);
    assert!(String::from_utf8_lossy(&out.stderr).contains("counterexample"));
}

#[test]
fn check_usage_errors() {
    assert_eq!(code(&macwalk(&["check", "nonsense"])), 2);
    assert_eq!(
        code(&macwalk(&["check", "duality", "--q", "0.3", "--t", "0.5"])),
        2
    );
    assert_eq!(code(&macwalk(&["check", "duality", "--q", "1/3"])), 2);
    let bad = scratch("bad_checks.toml");
    std::fs::write(&bad, "version = 2\n").unwrap();
    assert_eq!(
        code(&macwalk(&["check", "duality", "--config", bad.to_str().unwrap()])),
        2
    );
}

#[test]
fn thread_variable_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_macwalk"))
        .args(["simulate", "--x0", "2,1,0"])
        .env("MACWALK_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

fn cascade_trajectory(name: &str) -> PathBuf {
    let path = scratch(name);
    let out = macwalk(&[
        "simulate",
        "--x0",
        "7,6,3,1",
        "--q",
        "0.3",
        "--t",
        "0.5",
        "--seed",
        "7",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    path
}

#[test]
fn tiling_shape_and_round_trip() {
    let traj = cascade_trajectory("round_trip.json");
    let out = macwalk(&["tiling", traj.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let pp = stdout_json(&out);
    assert_eq!(pp["shape"], serde_json::json!([4, 4, 2, 1]));

    let pp_path = scratch("round_trip_pp.json");
    std::fs::write(&pp_path, &out.stdout).unwrap();
    let back = macwalk(&[
        "tiling",
        "--from-tiling",
        pp_path.to_str().unwrap(),
        "--q",
        "0.3",
        "--t",
        "0.5",
    ]);
    assert_eq!(code(&back), 0);
    assert_eq!(
        String::from_utf8(back.stdout).unwrap(),
        std::fs::read_to_string(&traj).unwrap()
    );
}

#[test]
fn tiling_formats() {
    let traj = cascade_trajectory("formats.json");
    let t = traj.to_str().unwrap();
    let ascii = String::from_utf8(macwalk(&["tiling", t, "--format", "ascii"]).stdout).unwrap();
    assert_eq!(ascii.lines().count(), 4);
    let svg = String::from_utf8(macwalk(&["tiling", t, "--format", "svg"]).stdout).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    let strip = svg.matches(r#"class="particle""#).count() + svg.matches(r#"class="hole""#).count();
    assert_eq!(strip, 8);
    let vol = stdout_json(&macwalk(&["tiling", t, "--volume"]));
    assert!(vol["volume"].as_u64().unwrap() > 0);
}

#[test]
fn tiling_of_empty_trajectory() {
    let path = scratch("delta.json");
    std::fs::write(
        &path,
        r#"{"m":3,"q":0.3,"t":0.5,"x0":[2,1,0],"moves":[],"terminal":true}"#,
    )
    .unwrap();
    let out = macwalk(&["tiling", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["shape"], serde_json::json!([]));
    let ascii = macwalk(&["tiling", path.to_str().unwrap(), "--format", "ascii"]);
    assert_eq!(String::from_utf8(ascii.stdout).unwrap().trim(), "(empty)");
}

#[test]
fn tiling_rejects_invalid_files() {
    let path = scratch("broken.json");
    std::fs::write(
        &path,
        r#"{"m":2,"q":0.3,"t":0.5,"x0":[3,1],"moves":[[1,1]],"terminal":true}"#,
    )
    .unwrap();
    assert_eq!(code(&macwalk(&["tiling", path.to_str().unwrap()])), 2);
    std::fs::write(&path, "not json").unwrap();
    assert_eq!(code(&macwalk(&["tiling", path.to_str().unwrap()])), 2);
    assert_eq!(code(&macwalk(&["tiling", "/nonexistent/traj.json"])), 2);
}
