use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bubblering(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bubblering")).args(args).output().unwrap()
}

fn json_file(path: &Path) -> Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

fn write_shape(dir: &Path, name: &str, json: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn analyze_ellipse_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let shape = write_shape(dir.path(), "e1.json", r#"{"kind":"ellipse","params":{"r0":3,"m":2,"n":1}}"#);
    let out = dir.path().join("a.json");
    let status = bubblering(&["analyze", "--shape", &shape, "--out", out.to_str().unwrap()]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let v = json_file(&out);
    let delta = v["result"]["delta"].as_f64().unwrap();
    let exact = 2.0 * PI * 0.5 * (3.0 / 5f64.sqrt() - 1.0) - 2.0 * PI;
    assert!((delta - exact).abs() < 1e-10, "{delta} vs {exact}");
    assert_eq!(v["tool"], "bubblering");
    assert!(v["units"].as_str().unwrap().contains("normalized"));
    assert!(v["resolution"].as_u64().is_some());
}

#[test]
fn bound_rules_out_thick_disk_below_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let shape = r#"{"kind":"disk","params":{"r0":1.5,"radius":1.4142135623730951}}"#;
    let first = dir.path().join("b.json");
    assert!(bubblering(&["bound", "--shape", shape, "--out", first.to_str().unwrap()]).status.success());
    let we_min = json_file(&first)["result"]["universal_we_min"].as_f64().unwrap();
    let second = dir.path().join("c.json");
    let we = format!("{}", we_min / 2.0);
    let run = bubblering(&["bound", "--shape", shape, "--we", &we, "--out", second.to_str().unwrap()]);
    assert!(run.status.success());
    let v = json_file(&second);
    assert_eq!(v["result"]["verdict"], "ruled-out");
    assert_eq!(v["result"]["certificate"]["is_thick"], true);
}

#[test]
fn verify_lemmas_is_reproducible() {
    let runs: Vec<String> = (0..2)
        .map(|_| {
            let run = bubblering(&["verify-lemmas", "--seed", "42"]);
            assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
            String::from_utf8(run.stdout).unwrap()
        })
        .collect();
    assert!(runs[0] == runs[1], "outputs differ");
    let v: Value = serde_json::from_str(&runs[0]).unwrap();
    assert_eq!(v["result"]["passed"], true);
}

#[test]
fn invalid_input_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let malformed = write_shape(dir.path(), "bad.json", r#"{"kind":"ellipse","params":{"r0":3"#);
    let run = bubblering(&["analyze", "--shape", &malformed]);
    assert_eq!(run.status.code(), Some(2));

    let dart = r#"{"kind":"polygon","params":{"vertices":[[1,-1],[3,0],[1,1],[2,0]]}}"#;
    let run = bubblering(&["analyze", "--shape", dart]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("not convex"));

    let crossing = r#"{"kind":"disk","params":{"r0":1,"radius":2}}"#;
    let run = bubblering(&["analyze", "--shape", crossing]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("axis"));

    let shape = r#"{"kind":"disk","params":{"r0":3,"radius":1}}"#;
    let run = bubblering(&["solve", "--shape", shape]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("--we"));

    assert_eq!(bubblering(&["search", "--we", "0.1", "--family", "torus"]).status.code(), Some(2));
    assert_eq!(bubblering(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn solve_reports_unit_circulation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let shape = r#"{"kind":"ellipse","params":{"r0":2.5,"m":1,"n":1.2}}"#;
    let run = bubblering(&["solve", "--shape", shape, "--we", "0.2", "--w", "0.3", "--out", out.to_str().unwrap()]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let v = json_file(&out);
    let circulation = v["result"]["solution"]["circulation"].as_f64().unwrap();
    assert!((circulation - 1.0).abs() <= 1e-8);
    assert_eq!(v["result"]["solution"]["W"].as_f64().unwrap(), 0.3);
}

#[test]
fn search_outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let run = || {
        let args = ["search", "--we", "0.05", "--budget", "30", "--resolution", "64", "--seed", "5"];
        let mut args: Vec<&str> = args.to_vec();
        let out_str = out.to_str().unwrap().to_string();
        args.extend(["--out", &out_str]);
        assert!(bubblering(&args).status.success());
        (fs::read(&out).unwrap(), fs::read(out.with_extension("log.csv")).unwrap())
    };
    let a = run();
    let b = run();
    assert!(a == b, "outputs differ");
    let log = String::from_utf8(a.1).unwrap();
    assert!(log.starts_with("# bubblering"));
    assert_eq!(log.lines().filter(|l| !l.starts_with('#')).count(), 31);
}

#[test]
fn norbury_table_csv_has_preamble() {
    let run = bubblering(&["norbury-table", "--format", "csv", "--eps", "0.1,0.01"]);
    assert!(run.status.success());
    let text = String::from_utf8(run.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].starts_with("eps_ratio"));
}
