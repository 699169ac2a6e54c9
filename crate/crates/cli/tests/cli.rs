use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn evolute(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evolute"))
        .args(args)
        .env_remove("EVOLUTE_DEFAULT_TOL")
        .output()
        .expect("run evolute binary")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn json_of(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--json", "-"]);
    let o = evolute(&full);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("stdout is a JSON document")
}

#[test]
fn pentagon_map_spot_values() {
    let o = evolute(&["pentagon", "map", "--x", "3", "--y", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("T^1: (-20/21, 1/6)"), "{text}");
    assert!(text.contains("I = 40/3"), "{text}");
    assert!(text.contains("I(x,y) * I(T(x,y)) = -1"), "{text}");
    assert!(text.contains("+ 4/(xy) = 0"), "{text}");
}

#[test]
fn pentagon_map_json_records_config_and_iterates() {
    let v = json_of(&["pentagon", "map", "--x", "3", "--y", "4", "--iters", "1"]);
    assert_eq!(v["config"]["x"], "3");
    assert_eq!(v["result"]["mode"], "exact");
    assert_eq!(v["result"]["iterates"][1]["x"], "-20/21");
    assert_eq!(v["result"]["iterates"][1]["invariant"], "-3/40");
}

#[test]
fn pentagon_map_reports_undefined_step() {
    let o = evolute(&["pentagon", "map", "--x", "-1", "--y", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("degenerate: x+1=0"), "{text}");
    assert!(text.contains("stopped"), "{text}");
}

#[test]
fn singular_levels_are_printed() {
    let v = json_of(&["pentagon", "singular"]);
    let values = v["result"]["values"].as_array().unwrap();
    let expected = [
        0.0,
        (11.0 - 125f64.sqrt()) / 2.0,
        (11.0 + 125f64.sqrt()) / 2.0,
    ];
    for (got, want) in values.iter().zip(expected) {
        assert!((got.as_f64().unwrap() - want).abs() < 1e-12);
    }
}

#[test]
fn frieze_route_matches_closed_form() {
    let o = evolute(&["frieze", "--x", "3", "--y", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("I = 40/3 (agree)"), "{text}");
    assert!(
        text.contains("closed form: (-20/21, 1/6) (agree)"),
        "{text}"
    );
}

#[test]
fn verify_small_batch_passes() {
    let o = evolute(&["verify", "--count", "40", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).matches("PASS").count(), 7);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(evolute(&["pentagon", "nonsense"]).status.code(), Some(2));
    assert_eq!(
        evolute(&["pentagon", "map", "--x", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        evolute(&["pentagon", "map", "--x", "one", "--y", "2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn exact_level_curves_are_rejected() {
    let o = evolute(&["pentagon", "levelset", "--r", "1", "--exact"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("exact mode"));
}

#[test]
fn level_curve_csv_is_deterministic() {
    let a = scratch("levels_a.csv");
    let b = scratch("levels_b.csv");
    for p in [&a, &b] {
        let o = evolute(&[
            "pentagon",
            "levelset",
            "--r",
            "12",
            "--r",
            "-1",
            "--samples",
            "40",
            "--csv",
            p.to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("schema,r,component_id,kind,x,y,theta"));
    assert!(lines.all(|l| l.starts_with("1,")));
    assert!(text.contains(",bounded,"));
}

#[test]
fn conjugacy_json_has_the_report_fields() {
    let v = json_of(&["pentagon", "conjugacy", "--r", "1", "--points", "20"]);
    let r = &v["result"];
    assert_eq!(r["passed"], true);
    assert!((r["lambda"].as_f64().unwrap() - 6.3460465212).abs() < 1e-8);
    assert_eq!(r["samples"].as_array().unwrap().len(), 20);
    assert!(r["max_residual"].as_f64().unwrap() < 1e-6);
    assert!(r["bounded_to_unbounded"].is_null());
    assert_eq!(v["config"]["ode_tol"], 1e-10);
}

#[test]
fn hexagon_f_agrees_with_the_evolute_step() {
    let o = evolute(&["hexagon", "f", "--a", "3", "--b", "-2/7", "--iters", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(
        text.contains("1  a = 5/8  b = 77/45  evolute step: agrees"),
        "{text}"
    );
}

#[test]
fn hexagon_orbit_csv_is_reproducible() {
    let a = scratch("orbit_a.csv");
    let b = scratch("orbit_b.csv");
    for p in [&a, &b] {
        let o = evolute(&[
            "hexagon",
            "orbit",
            "--seed",
            "11",
            "--count",
            "4",
            "--iters",
            "20",
            "--csv",
            p.to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert!(text.starts_with("schema,run,iter,"));
}

#[test]
fn evolute_of_polygon_json() {
    let input = scratch("pentagon.json");
    std::fs::write(
        &input,
        r#"{"vertices":[["0","0","1"],["4","0","1"],["5","3","1"],["2","5","1"],["-1","2","1"]]}"#,
    )
    .unwrap();
    let v = json_of(&[
        "evolute",
        "--input",
        input.to_str().unwrap(),
        "--iters",
        "1",
    ]);
    let iterates = v["result"]["iterates"].as_array().unwrap();
    assert_eq!(iterates.len(), 2);
    assert_eq!(iterates[1]["vertices"].as_array().unwrap().len(), 5);
    assert_eq!(iterates[1]["vertices"][0][0], "7739");
}
