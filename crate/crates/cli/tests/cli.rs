use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

use spectral_moments_cli::report::{report_csv, AnalysisReport};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spectral-moments"))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn analyze_json(args: &[&str]) -> AnalysisReport {
    let mut all = vec!["analyze"];
    all.extend_from_slice(args);
    serde_json::from_str(&stdout(&run(&all))).unwrap()
}

#[test]
fn enron_moments_file_report() {
    let r = analyze_json(&["--moments-file", data("enron.json").to_str().unwrap()]);
    let b2 = r.bound(2).unwrap();
    assert!((b2.beta - 78.53).abs() <= 0.05, "{}", b2.beta);
    assert!(b2.alpha <= 0.0);
    assert_eq!(r.graph_meta.n, 3215);
    assert!(r.estimators.is_none() && r.census.is_none());
}

#[test]
fn generated_ring() {
    let r = analyze_json(&["--generate", "ring:6"]);
    let m = r.moments.census.as_ref().unwrap();
    assert_eq!(m.m[4], 6.0);
    assert!((r.bound(1).unwrap().beta - 2f64.sqrt()).abs() < 1e-12);
    assert_eq!(r.moments.walks.as_ref().unwrap().m, m.m);
    assert!((r.spectrum.as_ref().unwrap().rho - 2.0).abs() < 1e-12);
}

#[test]
fn report_round_trips_and_tolerates_new_fields() {
    let text = stdout(&run(&["analyze", "--generate", "erdos_renyi:25:0.3", "--seed", "4", "--interval=-1,1"]));
    let r: AnalysisReport = serde_json::from_str(&text).unwrap();
    let again = serde_json::to_string_pretty(&r).unwrap();
    assert_eq!(serde_json::from_str::<AnalysisReport>(&again).unwrap(), r);
    assert!(r.provenance.omega_note.is_some());
    assert_eq!(r.eigencount.len(), 1);

    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["added_in_a_later_version"] = serde_json::json!({"x": 1});
    assert_eq!(serde_json::from_value::<AnalysisReport>(v).unwrap(), r);
}

#[test]
fn exit_codes() {
    let missing = run(&["analyze", "/definitely/not/here.txt"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(!missing.stderr.is_empty());

    assert_eq!(run(&["analyze"]).status.code(), Some(2));
    assert_eq!(run(&["bounds", "--generate", "ring:4", "--level", "7"]).status.code(), Some(2));
    assert_eq!(run(&["spectrum", "--generate", "ring:10", "--spectrum-cap", "5"]).status.code(), Some(1));
    // edgeless graph: zero variance, no bounds
    assert_eq!(run(&["bounds", "--generate", "erdos_renyi:5:0", "--level", "1"]).status.code(), Some(1));
}

#[test]
fn edge_list_input_with_one_based_labels() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "# triangle plus pendant\n1 2\n2 3\n3 1\n3 4").unwrap();
    let path = f.path().to_str().unwrap();
    let csv = stdout(&run(&["census", path, "--index-base", "1", "--format", "csv"]));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[3].starts_with("3,3,1,"), "{csv}");

    let dup = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(dup.path(), "0 1\n1 0\n").unwrap();
    let dup_path = dup.path().to_str().unwrap();
    assert_eq!(run(&["census", dup_path]).status.code(), Some(2));
    assert!(run(&["census", dup_path, "--dedup"]).status.success());
}

#[test]
fn csv_report_shapes() {
    assert_eq!(report_csv(&[]).unwrap().lines().count(), 1);

    let dir = tempfile::tempdir().unwrap();
    let mut paths = Vec::new();
    for (i, spec) in ["ring:5", "complete:4", "star:6"].iter().enumerate() {
        let p = dir.path().join(format!("r{i}.json"));
        std::fs::write(&p, stdout(&run(&["analyze", "--generate", spec]))).unwrap();
        paths.push(p.to_str().unwrap().to_string());
    }
    let mut args = vec!["report"];
    args.extend(paths.iter().map(String::as_str));
    let table = stdout(&run(&args));
    assert_eq!(table.lines().count(), 4);

    let mut r = analyze_json(&["--generate", "ring:5"]);
    r.graph_meta.source = "données, \"réseau\".txt".into();
    let out = report_csv(&[r]).unwrap();
    assert!(out.contains("\"données, \"\"réseau\"\".txt\""), "{out}");
}

#[test]
fn sample_ego_is_byte_identical() {
    let args = ["sample-ego", "--generate", "erdos_renyi:400:0.01", "--seed", "11", "--count", "6", "--radius", "2"];
    let a = stdout(&run(&args));
    let b = stdout(&run(&args));
    assert_eq!(a, b);
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "1"]);
    assert_eq!(stdout(&run(&threaded)), a);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 6);
}

#[test]
fn eigencount_sweep_with_exact_cdf() {
    let csv = stdout(&run(&["eigencount", "--generate", "complete:5", "--sweep=-4:1:4", "--format", "csv"]));
    let mut rows = 0;
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let (z, exact): (f64, f64) = (f[3].parse().unwrap(), f[4].parse().unwrap());
        assert!(z >= exact - 1e-8, "{line}");
        rows += 1;
    }
    assert_eq!(rows, 9);
    assert_eq!(run(&["eigencount", "--generate", "ring:5"]).status.code(), Some(2));
}

#[test]
fn moments_and_bounds_commands() {
    let csv = stdout(&run(&["moments", "--generate", "complete:4", "--format", "csv"]));
    assert_eq!(csv.lines().count(), 7);
    let json = stdout(&run(&["bounds", "--moments-file", data("as-skitter.json").to_str().unwrap(), "--level", "2"]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let beta = v["bounds"][0]["beta"].as_f64().unwrap();
    assert!((beta - 74.72).abs() <= 0.05);
    let bis = stdout(&run(&["bounds", "--generate", "ring:7", "--bisect", "--format", "csv"]));
    assert!(bis.contains("bisection"));
}
