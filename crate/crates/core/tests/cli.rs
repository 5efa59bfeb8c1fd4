use std::io::Write;
use std::process::{Command, Output, Stdio};

use hardy_means::step_functions::StepFunction;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hardy-means"));
    c.env_remove("HARDY_MEANS_CONFIG");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn value(args: &[&str]) -> f64 {
    let o = run(args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    stdout(&o).trim().parse().unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn mean_examples() {
    assert_eq!(
        stdout(&run(&[
            "mean",
            "gini",
            "2",
            "1",
            "--entries",
            "1,3",
            "--weights",
            "1,1"
        ])),
        "2.5\n"
    );
    assert_eq!(
        stdout(&run(&[
            "mean",
            "power",
            "1",
            "--entries",
            "1,3",
            "--weights",
            "1,1"
        ])),
        "2\n"
    );
    assert_eq!(
        stdout(&run(&[
            "mean",
            "power",
            "0",
            "--entries",
            "1,4",
            "--weights",
            "1,1"
        ])),
        "2\n"
    );
    let dev = value(&["mean", "dev-gini", "-1", "0.5", "--entries", "1,4,9"]);
    let closed = value(&["mean", "gini", "-1", "0.5", "--entries", "1,4,9"]);
    assert!((dev - closed).abs() < 1e-10);
}

#[test]
fn mean_json_output() {
    let o = run(&["--format", "json", "mean", "power", "1", "--entries", "1,3"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["value"], 2.0);
}

#[test]
fn argument_errors_exit_with_two() {
    for args in [
        vec!["mean", "gini", "1", "--entries", "1"],
        vec!["mean", "power", "1", "--entries", "1,2", "--weights", "1"],
        vec!["bogus"],
        vec!["mean", "wobble", "1", "--entries", "1"],
        vec!["rearrange", "/nonexistent/file.json"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
}

#[test]
fn numeric_errors_exit_with_three() {
    let o = run(&["mean", "gini", "1", "0", "--entries", "-1,2"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let o = run(&[
        "imean",
        "gini",
        "1",
        "0",
        "--family",
        "power-decay",
        "--param",
        "-1.5",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

fn rearrange_stdin(input: &str) -> Output {
    let mut child = bin()
        .args(["rearrange", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

#[test]
fn rearrange_examples_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.json");
    std::fs::write(&path, r#"{"breakpoints":[0,1,2,3],"values":[1,3,2]}"#).unwrap();
    let o = run(&["rearrange", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let first: StepFunction = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(first.values(), &[3.0, 2.0, 1.0]);
    assert_eq!(first.breakpoints(), &[0.0, 1.0, 2.0, 3.0]);

    let again = rearrange_stdin(&stdout(&o));
    assert_eq!(stdout(&again), stdout(&o));

    let single = rearrange_stdin(r#"{"breakpoints":[0,0.5],"values":[7]}"#);
    let sf: StepFunction = serde_json::from_str(&stdout(&single)).unwrap();
    assert_eq!(sf.values(), &[7.0]);

    let bad = rearrange_stdin(r#"{"breakpoints":[0,1],"values":[1,2]}"#);
    assert_eq!(bad.status.code(), Some(2));
    let unknown = rearrange_stdin(r#"{"breakpoints":[0,1],"values":[1],"colour":1}"#);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn hardy_power_decay_example() {
    let o = run(&[
        "hardy",
        "gini",
        "0.5",
        "0",
        "--family",
        "power-decay",
        "--params",
        "-0.5,-0.9,-0.99",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(
        text.lines().next().unwrap(),
        "mean_p,mean_q,family,param,s,grid,numerator,denominator,ratio,reference,margin,certified"
    );
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 3);
    for (row, want) in rows.iter().zip([1.7778, 3.3058, 3.9212]) {
        let ratio: f64 = row[8].parse().unwrap();
        assert!((ratio - want).abs() < 1e-4);
        assert_eq!(row[9], "4");
        assert_eq!(row[11], "Y");
    }
    let summary = stderr(&o);
    assert!(summary.contains("max_ratio=3.9211841976"), "{summary}");
    assert!(summary.contains("reference=4"));
}

#[test]
fn hardy_const_example_and_csv_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    let o = run(&[
        "hardy",
        "gini",
        "0",
        "0",
        "--family",
        "const",
        "--params",
        "1",
        "--csv",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("max_ratio=1 reference=2.71828182845905"));
    let rows = csv_rows(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(rows[0][8], "1");
    assert_eq!(rows[0][9], "2.71828182845905");
}

#[test]
fn hardy_failed_rows_are_nan_and_exit_three() {
    let o = run(&[
        "hardy",
        "power",
        "0.5",
        "--family",
        "power-decay",
        "--params",
        "-0.5,-1.5",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][8], "nan");
    assert_eq!(rows[1][11], "N");
}

#[test]
fn hardy_constant_examples() {
    let c = value(&["hardy-constant", "concave-log"]);
    assert!((c - std::f64::consts::E).abs() < 1e-8);
    assert_eq!(stdout(&run(&["hardy-constant", "power", "0.5"])), "4\n");
    assert_eq!(stdout(&run(&["hardy-constant", "power", "1"])), "inf\n");
    assert_eq!(
        stdout(&run(&["hardy-constant", "gini", "-1", "-0.5"])),
        "unknown<=2.71828182845905\n"
    );
    let c = value(&["hardy-constant", "concave-power", "0.5"]);
    assert!((c - 4.0).abs() < 1e-8);
}

#[test]
fn imean_methods_agree() {
    let q = value(&[
        "imean",
        "gini",
        "2",
        "1",
        "--family",
        "power-decay",
        "--param",
        "1",
    ]);
    assert!((q - 2.0 / 3.0).abs() < 1e-12);
    let d = value(&[
        "imean",
        "dev-gini",
        "2",
        "1",
        "--family",
        "power-decay",
        "--param",
        "1",
    ]);
    assert!((d - 2.0 / 3.0).abs() < 1e-9);
    let o = run(&[
        "imean",
        "power",
        "2",
        "--family",
        "power-decay",
        "--param",
        "1",
        "--method",
        "envelope",
    ]);
    let last = stdout(&o).lines().last().unwrap().to_string();
    let cols: Vec<f64> = last.split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(cols[0], 1024.0);
    assert!(cols[1] <= 1.0 / 3f64.sqrt() && 1.0 / 3f64.sqrt() <= cols[2]);
    assert!(cols[3] < 2e-3);
}

#[test]
fn sweep_orders_rows_deterministically() {
    let o = run(&[
        "sweep",
        "--p",
        "0.5,0",
        "--q",
        "0,-1",
        "--family",
        "power-decay",
        "--params",
        "-0.9,-0.5",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    let keys: Vec<(String, String, String)> = rows
        .iter()
        .map(|r| (r[0].clone(), r[1].clone(), r[3].clone()))
        .collect();
    let want = [
        ("0.5", "0", "-0.9"),
        ("0.5", "0", "-0.5"),
        ("0.5", "-1", "-0.9"),
        ("0.5", "-1", "-0.5"),
        ("0", "0", "-0.9"),
        ("0", "0", "-0.5"),
        ("0", "-1", "-0.9"),
        ("0", "-1", "-0.5"),
    ];
    assert_eq!(keys.len(), want.len());
    for (k, w) in keys.iter().zip(want) {
        assert_eq!((k.0.as_str(), k.1.as_str(), k.2.as_str()), w);
    }
    assert!(stderr(&o).contains("within_bound=yes"));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# pinned\nformat = json\nhardy_grid = 8\n").unwrap();
    let o = bin()
        .env("HARDY_MEANS_CONFIG", &cfg)
        .args(["mean", "power", "1", "--entries", "1,3"])
        .output()
        .unwrap();
    assert_eq!(stdout(&o).trim(), r#"{"value":2.0}"#);
    let o = bin()
        .env("HARDY_MEANS_CONFIG", &cfg)
        .args(["--format", "csv", "mean", "power", "1", "--entries", "1,3"])
        .output()
        .unwrap();
    assert_eq!(stdout(&o), "2\n");

    std::fs::write(&cfg, "quad_tol = -1\n").unwrap();
    let o = bin()
        .env("HARDY_MEANS_CONFIG", &cfg)
        .args(["mean", "power", "1", "--entries", "1,3"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    std::fs::write(&cfg, "speed = 11\n").unwrap();
    let o = bin()
        .env("HARDY_MEANS_CONFIG", &cfg)
        .args(["mean", "power", "1", "--entries", "1,3"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
