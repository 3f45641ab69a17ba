use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_contractions"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn doc(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not a document ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn jordan(m: usize) -> Value {
    let mut data = vec![json!([0, 0]); m * m];
    for k in 0..m.saturating_sub(1) {
        data[(k + 1) * m + k] = json!([1, 0]);
    }
    json!({ "rows": m, "cols": m, "data": data })
}

fn write(dir: &Path, name: &str, value: &Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(value).unwrap()).unwrap();
    path.display().to_string()
}

#[test]
fn gen_jordan_sum_pair() {
    let out = run(&["gen", "jordan_sum", "-n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let d = doc(&out);
    let a = &d["matrices"]["A"];
    let b = &d["matrices"]["B"];
    assert_eq!((a["rows"].as_u64(), a["cols"].as_u64()), (Some(3), Some(3)));
    assert_eq!((b["rows"].as_u64(), b["cols"].as_u64()), (Some(5), Some(5)));
    for m in [a, b, &d["matrices"]["omega"]] {
        for entry in m["data"].as_array().unwrap() {
            let [re, im] = [entry[0].as_f64().unwrap(), entry[1].as_f64().unwrap()];
            assert!(im == 0.0 && re.fract() == 0.0, "{entry}");
        }
    }
    assert!(!d["result"]["caveats"].as_array().unwrap().is_empty());
}

#[test]
fn larger_cell_is_not_below_smaller() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "s3.json", &json!({ "matrices": { "A": jordan(3) } }));
    let b = write(dir.path(), "s2.json", &json!({ "matrices": { "B": jordan(2) } }));
    let out = run(&["order", &a, &b]);
    assert_eq!(out.status.code(), Some(0));
    let d = doc(&out);
    let v = &d["result"]["verdicts"][0];
    assert_eq!(v["status"], "refuted");
    assert_eq!(v["forward"]["certificate"]["kind"], "dimension");
    assert_eq!(v["forward"]["certificate"]["dim_a"], 3);
    assert_eq!(v["config"], d["config"]);
}

#[test]
fn smaller_cell_is_below_larger_with_witness() {
    // No discrete certificate separates S_2 from the reducing relation, so
    // that one stays undecided and the run exits with the unknown code.
    let dir = tempfile::tempdir().unwrap();
    let pair = write(dir.path(), "pair.json", &json!({ "matrices": { "A": jordan(2), "B": jordan(3) } }));
    let out = run(&["order", &pair, &pair, "--relation", "all"]);
    let d = doc(&out);
    let statuses: Vec<&str> = d["result"]["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["status"].as_str().unwrap())
        .collect();
    assert_eq!(statuses, ["holds", "unknown", "refuted", "refuted"]);
    assert_eq!(d["result"]["verdicts"][0]["forward"]["witness"]["kind"], "isometry");
    assert_eq!(d["outcome"]["status"], "unknown");
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn horn_suite_passes() {
    let out = run(&["verify", "horn", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let d = doc(&out);
    assert_eq!(d["result"]["assertion_count"], 1000);
    assert_eq!(d["result"]["failed_count"], 0);
    assert_eq!(d["config"]["budget"]["seed"], 1);
}

#[test]
fn parse_errors_report_offset_and_path() {
    let text = "{\"matrices\": {\"A\": {\"rows\": 1, \"cols\": 1, \"data\": [[0.5, true]]}}}";
    let out = run_stdin(&["analyze", "-"], text);
    assert_eq!(out.status.code(), Some(4));
    let d = doc(&out);
    assert_eq!(d["error"]["kind"], "parse");
    assert_eq!(d["error"]["path"], "$.matrices.A.data[0][1]");
    let offset = d["error"]["offset"].as_u64().unwrap() as usize;
    let token = text.find("true").unwrap();
    assert!((token..=token + 4).contains(&offset), "{offset}");
    assert!(!out.stderr.is_empty());
}

#[test]
fn syntax_errors_report_offset() {
    let out = run_stdin(&["analyze", "-"], "{\"matrices\": {\"A\": ");
    assert_eq!(out.status.code(), Some(4));
    let d = doc(&out);
    assert_eq!(d["error"]["kind"], "parse");
    assert!(d["error"]["offset"].as_u64().is_some());
}

#[test]
fn missing_files_and_matrices_are_input_errors() {
    let out = run(&["analyze", "/nonexistent/input.json"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(doc(&out)["error"]["kind"], "io");
    let two = json!({ "matrices": { "X": jordan(1), "Y": jordan(2) } }).to_string();
    let out = run_stdin(&["analyze", "-"], &two);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(doc(&out)["error"]["kind"], "missing-matrix");
}

#[test]
fn non_contractions_are_computation_errors() {
    let big = json!({ "matrices": { "A": { "rows": 1, "cols": 1, "data": [[2.0, 0.0]] } } }).to_string();
    let out = run_stdin(&["analyze", "-"], &big);
    assert_eq!(out.status.code(), Some(5));
    assert_eq!(doc(&out)["error"]["kind"], "computation");
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["verify", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn config_echo_reproduces_output() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json");
    let out = run(&[
        "gen",
        "approx_pair",
        "-n",
        "3",
        "--defect",
        "2",
        "--seed",
        "5",
        "--starts",
        "8",
        "--grid-radii",
        "0.2,0.6",
        "--tol-residual",
        "1e-9",
        "-o",
        first.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let first = first.display().to_string();
    let equiv = run(&["equiv", &first, &first, "--charfn", "--config", &first]);
    let d = doc(&equiv);
    assert_eq!(d["config"]["grid"]["radii"], json!([0.2, 0.6]));
    assert_eq!(d["config"]["budget"]["starts"], 8);
    let echoed = write(dir.path(), "echo.json", &d);
    let again = run(&["equiv", &first, &first, "--charfn", "--config", &echoed]);
    assert_eq!(equiv.stdout, again.stdout);
    assert_eq!(equiv.status.code(), again.status.code());
    assert_eq!(d["result"]["status"], "holds");
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "config.json", &json!({ "depth": 3, "budget": { "seed": 9, "starts": 4, "max_iters": 100 } }));
    let input = write(dir.path(), "a.json", &json!({ "matrices": { "A": jordan(2) } }));
    let d = doc(&run(&["dilate", &input, "--config", &config, "--depth", "2"]));
    assert_eq!(d["config"]["depth"], 2);
    assert_eq!(d["config"]["budget"]["seed"], 9);
    assert_eq!(d["result"]["depth"], 2);
    assert_eq!(d["outcome"]["status"], "pass");
}

#[test]
fn bad_config_fields_are_reported_with_paths() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "config.json", &json!({ "config": { "grid": { "radii": "wide" } } }));
    let out = run(&["verify", "charfn", "--config", &config]);
    assert_eq!(out.status.code(), Some(4));
    let d = doc(&out);
    assert!(d["error"]["path"].as_str().unwrap().starts_with("$.config.grid"), "{}", d["error"]);
}

#[test]
fn outputs_are_valid_inputs() {
    let generated = run(&["gen", "random_contraction", "-n", "3", "--sigma-max", "0.7", "--seed", "2"]);
    let text = String::from_utf8(generated.stdout).unwrap();
    let out = run_stdin(&["analyze", "-"], &text);
    assert_eq!(out.status.code(), Some(0));
    let d = doc(&out);
    assert_eq!(d["result"]["dim"], 3);
    assert_eq!(d["result"]["completely_nonunitary"], true);
    let out = run_stdin(&["charfn", "-"], &text);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(doc(&out)["result"]["domain_dim"], 3);
}

#[test]
fn identical_runs_are_byte_identical() {
    let a = run(&["verify", "sim-theorem", "--seed", "3"]);
    let b = run(&["verify", "sim-theorem", "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["verify", "sim-theorem", "--seed", "4"]);
    assert_ne!(a.stdout, c.stdout);
}
