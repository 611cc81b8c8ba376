//! End-to-end tests of the binary: exit codes, report shapes, plot-file
//! formats, and reproducibility of outputs.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_equipoint"))
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

fn square_json() -> &'static str {
    r#"{"dim": 2, "vertices": [[0,0],[1,0],[1,1],[0,1],[0.5,0.5]]}"#
}

fn triangle_json() -> &'static str {
    r#"{"dim": 2, "vertices": [[0,0],[4,0],[0,3]]}"#
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

#[test]
fn compute_centroid_of_square_prints_center_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let body = dir.path().join("square.json");
    write(&body, square_json());
    let out = bin().args(["compute", "--functional", "centroid", "--body"]).arg(&body)
        .output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["value"][0], 0.5);
    assert_eq!(v["value"][1], 0.5);
    assert_eq!(v["inside"], true);
}

#[test]
fn interior_file_vertices_are_dropped_by_the_hull() {
    // the square file above carries a redundant interior point; suspending
    // it must produce 4 + 2 vertices, so compute sees a 4-vertex body
    let dir = tempfile::tempdir().unwrap();
    let body = dir.path().join("square.json");
    let outp = dir.path().join("susp.json");
    write(&body, square_json());
    let out = bin()
        .args(["suspend", "--base"]).arg(&body).arg("--out").arg(&outp)
        .output().unwrap();
    assert!(out.status.success());
    let susp: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&outp).unwrap()).unwrap();
    assert_eq!(susp["dim"], 3);
    assert_eq!(susp["vertices"].as_array().unwrap().len(), 6);
}

#[test]
fn malformed_json_exits_two_with_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let body = dir.path().join("bad.json");
    write(&body, r#"{"dim": 2 "vertices": []}"#);
    let out = bin().args(["compute", "--functional", "mvee", "--body"]).arg(&body)
        .output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let v = stdout_json(&out);
    assert_eq!(v["error"]["code"], "parse_error");
}

#[test]
fn missing_file_exits_two() {
    let out = bin()
        .args(["compute", "--functional", "centroid", "--body", "/nonexistent/x.json"])
        .output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn degenerate_body_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let body = dir.path().join("flat.json");
    write(&body, r#"{"dim": 2, "vertices": [[0,0],[1,1],[2,2],[3,3]]}"#);
    let out = bin().args(["compute", "--functional", "centroid", "--body"]).arg(&body)
        .output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let v = stdout_json(&out);
    assert_eq!(v["error"]["code"], "degenerate_input");
}

#[test]
fn blend_on_its_own_anchor_returns_the_target() {
    let dir = tempfile::tempdir().unwrap();
    let body = dir.path().join("tri.json");
    write(&body, triangle_json());
    let out = bin()
        .args(["blend", "--body"]).arg(&body).arg("--anchor").arg(&body)
        .args(["--target", "1.0,0.8", "--seed", "7"])
        .output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    let (x, y) = (v["value"][0].as_f64().unwrap(), v["value"][1].as_f64().unwrap());
    assert!((x - 1.0).abs() < 1e-6 && (y - 0.8).abs() < 1e-6, "value ({x}, {y})");
    // the report echoes the full spec (with the suggested radii) so the
    // run can be reproduced exactly
    assert!(v["spec"]["eps_out"].as_f64().unwrap() > 0.0);
}

#[test]
fn suspension_plot_holds_three_closed_loops() {
    let dir = tempfile::tempdir().unwrap();
    let body = dir.path().join("tri.json");
    let plot = dir.path().join("slices.csv");
    write(&body, triangle_json());
    let out = bin()
        .args(["suspend", "--base"]).arg(&body).arg("--plot").arg(&plot)
        .output().unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&plot).unwrap();
    let loops: Vec<&str> = text.trim_end().split("\n\n").collect();
    assert_eq!(loops.len(), 3, "slices at 0 and ±0.5");
    for l in loops {
        let rows: Vec<&str> = l.lines().collect();
        assert!(rows.len() >= 4);
        assert_eq!(rows.first(), rows.last(), "loop must close on its first point");
        for r in rows {
            assert_eq!(r.split(',').count(), 2, "x,y per row: {r}");
        }
    }
}

#[test]
fn equivariance_battery_passes_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("resid.csv");
    let out = bin()
        .args([
            "test-equivariance", "--functional", "mvee", "--random-bodies", "4",
            "--maps", "6", "--seed", "3", "--tol", "1e-5", "--out",
        ])
        .arg(&csv_path)
        .output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["pass"], true);
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("body_id,map_id,residual,membership"));
    assert_eq!(lines.count(), 4 * 6);
}

#[test]
fn impossible_tolerance_fails_the_battery_with_exit_one() {
    let out = bin()
        .args([
            "test-equivariance", "--functional", "centroid", "--random-bodies", "2",
            "--maps", "3", "--seed", "1", "--tol", "1e-30",
        ])
        .output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("\"pass\": false"), "summary must record the failure");
    assert!(text.contains("verification_failure"));
}

#[test]
fn verify_suspension_rejects_symmetric_bases_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let body = dir.path().join("square.json");
    write(&body, square_json());
    let out = bin()
        .args(["verify-suspension", "--base"]).arg(&body).args(["--grid", "2"])
        .output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["error"]["code"], "verification_failure");
    assert!(
        v["error"]["message"].as_str().unwrap().contains("clause i:"),
        "clause i must be named: {}",
        v["error"]["message"]
    );
}

#[test]
fn verify_suspension_passes_on_generated_profile() {
    let dir = tempfile::tempdir().unwrap();
    let report_path = dir.path().join("report.json");
    let out = bin()
        .args(["verify-suspension", "--profile", "16", "--grid", "2", "--seed", "3", "--out"])
        .arg(&report_path)
        .output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(v["group_order"], 2);
    assert_eq!(v["fixed_dim"], 2);
    assert!(v["confinement_max"].as_f64().unwrap() <= 1e-6);
    let rows = v["achievability"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    for row in rows {
        assert!(row["residual"].as_f64().unwrap() <= 1e-5);
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for run in 0..2 {
        let report_path = dir.path().join(format!("report{run}.json"));
        let out = bin()
            .args(["verify-suspension", "--profile", "14", "--grid", "2", "--seed", "5", "--out"])
            .arg(&report_path)
            .output().unwrap();
        assert!(out.status.success());
        outputs.push((out.stdout, std::fs::read(&report_path).unwrap()));
    }
    assert_eq!(outputs[0].0, outputs[1].0, "stdout must be byte-identical");
    assert_eq!(outputs[0].1, outputs[1].1, "report file must be byte-identical");
}
