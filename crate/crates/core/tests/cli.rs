use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bounded_approx::circle::{AnalyticPolynomial, CircleGrid, SampledFunction};
use bounded_approx::io::to_json;
use bounded_approx::C64;
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_bounded-approx"));
    c.env_remove("APPROX_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn schema(name: &str) -> jsonschema::JSONSchema {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas").join(name);
    let raw: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::JSONSchema::compile(&raw).unwrap()
}

fn assert_valid(schema_name: &str, doc: &Value) {
    let compiled = schema(schema_name);
    let msgs: Vec<String> = match compiled.validate(doc) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    panic!("{schema_name}: {}", msgs.join("; "));
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn pipeline_positive_scenario_writes_valid_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = run(&["pipeline", "--scenario", "blaschke-arc", "--M", "1", "--steps", "8", "--grid", "4096", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let doc = read_json(&out);
    assert_valid("pipeline-report.schema.json", &doc);
    assert_eq!(doc["outcome"], "match");
    assert_eq!(doc["report"]["steps"].as_array().unwrap().len(), 8);
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    let lines: Vec<&str> = csv.split('\n').collect();
    assert_eq!(lines[0], "m,achieved,sup,max_err_E,median_err_E");
    assert_eq!(lines.len(), 10);
    assert!(!csv.contains('\r'));
}

#[test]
fn pipeline_negative_scenario_matches_stalled() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("neg.json");
    let o = run(&["pipeline", "--scenario", "negative-conjugate", "--M", "1", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let doc = read_json(&out);
    assert_valid("pipeline-report.schema.json", &doc);
    assert_eq!(doc["report"]["verdict"], "stalled");
}

#[test]
fn pipeline_config_errors_exit_one() {
    let o = run(&["pipeline", "--scenario", "blaschke-arc", "--grid", "8"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("grid too coarse"), "{}", stderr(&o));

    let o = run(&["pipeline", "--scenario", "no-such"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("`scenario`"), "{}", stderr(&o));

    let o = run(&["pipeline", "--scenario", "blaschke-arc", "--M=-1"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("`M`"), "{}", stderr(&o));

    let o = run(&["pipeline"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn scenario_file_expectation_controls_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let body = |expected: &str| {
        format!(
            r#"{{"name":"file-arc","witness":{{"kind":"blaschke","zeros":[[0.25,0.25]]}},
               "target":{{"kind":"finite","angles":[0.1,1.0,2.5]}},"expected":"{expected}"}}"#
        )
    };
    let good = write(dir.path(), "good.json", &body("positive"));
    let contradicted = body("positive").replace(r#""expected""#, r#""obstruction":"conjugate","expected""#);
    let bad = write(dir.path(), "bad.json", &contradicted);
    let args = |p: &Path| vec!["pipeline".to_string(), "--scenario-file".into(), s(p).into(), "--steps".into(), "8".into(), "--grid".into(), "1024".into()];
    let o = bin().args(args(&good)).output().unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = bin().args(args(&bad)).output().unwrap();
    assert_eq!(code(&o), 1, "precondition must reject: {}", stderr(&o));
    let o = bin().args(args(&bad)).arg("--override").output().unwrap();
    assert_eq!(code(&o), 2, "{}", stderr(&o));

    let broken = write(dir.path(), "broken.json", "{\"name\": \"x\",\n \"target\": 3}");
    let o = bin().args(args(&broken)).output().unwrap();
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
}

#[test]
fn nehari_conjugate_and_analytic_symbols() {
    let dir = tempfile::tempdir().unwrap();
    let grid = CircleGrid::new(1024).unwrap();
    let conj = SampledFunction::from_fn(grid, |t| C64::from_polar(1.0, -t)).unwrap();
    let sym = write(dir.path(), "conj.json", &to_json(&conj).unwrap());
    let out = dir.path().join("cert.json");
    let o = run(&["nehari", "--symbol", s(&sym), "--d", "16", "--s", "8", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("lower 1.000000e0"), "{}", stdout(&o));
    let cert = read_json(&out);
    assert_valid("distance-certificate.schema.json", &cert);
    assert!(cert["upper"].as_f64().unwrap() <= 1.05);

    let z2 = write(dir.path(), "z2.json", r#"{"k":2,"coeffs":[[0,0],[0,0],[0,0],[0,0],[1,0]]}"#);
    let out = dir.path().join("z2cert.json");
    let o = run(&["nehari", "--symbol", s(&z2), "--grid", "256", "--d", "4", "--s", "1", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let cert = read_json(&out);
    assert!(cert["lower"].as_f64().unwrap() <= 1e-12);
    assert!(cert["upper"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn nehari_malformed_symbol_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"n\": 4,\n \"values\": [[1, 0], [0, 1]}");
    let o = run(&["nehari", "--symbol", s(&bad)]);
    assert_eq!(code(&o), 1);
    let err = stderr(&o);
    assert!(err.contains("bad.json") && err.contains("line 2"), "{err}");

    let short = write(dir.path(), "short.json", r#"{"n": 8, "values": [[1, 0]]}"#);
    let o = run(&["nehari", "--symbol", s(&short)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("expected 8"), "{}", stderr(&o));
}

#[test]
fn weakstar_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let shifting = write(dir.path(), "shift.json", r#"{"kind":"shifting-monomial","len":64}"#);
    let out = dir.path().join("ws.json");
    let o = run(&["weakstar", "--provider", s(&shifting), "--K", "8", "--L", "64", "--grid", "128", "--out", s(&out), "--expect", "converged"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("verdict converged"));
    assert_valid("weakstar-report.schema.json", &read_json(&out));
    let csv = std::fs::read_to_string(dir.path().join("ws.csv")).unwrap();
    assert_eq!(csv.lines().count(), 65);

    let alternating = write(dir.path(), "alt.json", r#"{"kind":"alternating"}"#);
    let o = run(&["weakstar", "--provider", s(&alternating), "--grid", "64", "--K", "4"]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("verdict not-converged"), "{}", stderr(&o));
    let o = run(&["weakstar", "--provider", s(&alternating), "--grid", "64", "--K", "4", "--expect", "converged"]);
    assert_eq!(code(&o), 2);

    let witness = r#"{"kind":"blaschke","zeros":[[0.5,0]]}"#;
    let dilates = write(dir.path(), "dil.json", &format!(r#"{{"kind":"radial-dilates","witness":{witness}}}"#));
    let g = write(dir.path(), "g.json", witness);
    let o = run(&["weakstar", "--provider", s(&dilates), "--g", s(&g), "--K", "32", "--L", "16", "--tol", "1e-2", "--grid", "1024", "--expect", "converged"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn scenario_list_names_builtins() {
    let o = run(&["scenario-list"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    for name in ["blaschke-arc", "blaschke-cantor", "negative-conjugate"] {
        assert!(out.contains(name));
    }
}

#[test]
fn thread_cap_is_validated_and_output_independent() {
    let o = bin().env("APPROX_THREADS", "zero").args(["scenario-list"]).output().unwrap();
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("APPROX_THREADS"));

    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("r{threads}.json"));
        let o = bin()
            .env("APPROX_THREADS", threads)
            .args(["pipeline", "--scenario", "blaschke-cantor", "--steps", "4", "--out", s(&out)])
            .output()
            .unwrap();
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        reports.push(std::fs::read(out).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn library_values_match_schemas() {
    let grid = CircleGrid::new(16).unwrap();
    let p = AnalyticPolynomial::new(vec![C64::new(0.5, 0.0), C64::new(0.0, -0.25)]).unwrap();
    let sampled = p.sample_on(grid).with_bound(1.0).unwrap();
    let doc: Value = serde_json::from_str(&to_json(&sampled).unwrap()).unwrap();
    assert_valid("sampled-function.schema.json", &doc);
    let doc: Value = serde_json::from_str(&to_json(&p).unwrap()).unwrap();
    assert_valid("analytic-polynomial.schema.json", &doc);
    let mut broken = doc.clone();
    broken["extra"] = Value::Bool(true);
    assert!(!schema("analytic-polynomial.schema.json").is_valid(&broken));
}
