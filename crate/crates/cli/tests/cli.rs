use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twoboson")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let o = run(args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn ees_below(v: &serde_json::Value) -> u64 {
    v["per_sector"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["sector"] == "ees" && s["side"] == "below")
        .unwrap()["index"]
        .as_u64()
        .unwrap()
}

#[test]
fn classify_test_points() {
    let v = json(&["classify", "-g", "1", "-l", "0", "-u", "0", "--format", "json"]);
    assert_eq!(ees_below(&v), 0);
    assert_eq!(v["totals"]["m"], 0);
    let v = json(&["classify", "-g", "-5", "-l", "-11", "-u", "0", "--format", "json"]);
    assert_eq!(ees_below(&v), 2);
    let v = json(&["classify", "-g", "0", "-l", "0", "-u", "0", "--format", "json"]);
    assert_eq!((v["totals"]["m"].as_u64(), v["totals"]["n"].as_u64()), (Some(0), Some(0)));
}

#[test]
fn malformed_input_exits_with_two() {
    assert_eq!(run(&["classify", "-g", "x", "-l", "0", "-u", "0"]).status.code(), Some(2));
    assert_eq!(run(&["classify", "-g", "1"]).status.code(), Some(2));
    assert_eq!(run(&["spectrum", "-g", "0", "-l", "0", "-u", "0", "--grid", "9"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--resolution", "2001", "--predicted-only"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--only", "13"]).status.code(), Some(2));
}

#[test]
fn spectrum_examples() {
    let o = run(&["spectrum", "-g", "0", "-l", "0", "-u", "0"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 1, "header only");

    let v = json(&["spectrum", "-g", "0", "-l", "-1", "-u", "0", "--format", "json"]);
    let ees = v["per_sector"].as_array().unwrap().iter().find(|s| s["sector"] == "ees" && s["side"] == "below").unwrap();
    assert_eq!(ees["determinant"].as_array().unwrap().len(), 1);
    assert_eq!(ees["oracle"].as_array().unwrap().len(), 1);
    assert_eq!((v["totals"]["m"].as_u64(), v["totals"]["n"].as_u64()), (Some(1), Some(0)));

    let pi = std::f64::consts::PI.to_string();
    let k = format!("{pi},{pi}");
    let v = json(&["spectrum", "-g", "2", "-l", "0", "-u", "0", "--K", &k, "--format", "json"]);
    let band = v["band"].as_array().unwrap();
    assert!((band[0].as_f64().unwrap() - 4.0).abs() < 1e-12 && (band[1].as_f64().unwrap() - 4.0).abs() < 1e-12);
}

#[test]
fn sweep_is_deterministic_across_thread_counts() {
    let args = ["sweep", "-g", "0", "--resolution", "5", "--oracle-every", "2"];
    let one = run(&[&args[..], &["--threads", "1"]].concat());
    let many = run(&[&args[..], &["--threads", "3"]].concat());
    assert!(one.status.success() && many.status.success());
    assert_eq!(one.stdout, many.stdout);
    let text = stdout(&one);
    // λ = μ = 0 sits in the middle of the grid
    let zero = text.lines().find(|l| l.starts_with("0.0,0.0,0.0,")).unwrap();
    assert!(zero.starts_with("0.0,0.0,0.0,0,0,"), "{zero}");
    for row in text.lines().skip(1) {
        let f: Vec<&str> = row.split(',').collect();
        assert!(f[5] == "true" || f[8] == "true", "interior point disagrees: {row}");
    }
}

#[test]
fn phase_diagram_branches() {
    let o = run(&["phase-diagram", "tau", "--sign", "minus", "--points", "5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.ends_with("NaN,NaN")).count(), 2);
    assert_eq!(text.lines().count(), 1 + 3 * 5 + 2);

    let v = json(&["phase-diagram", "s-threshold", "--format", "json"]);
    let xs: Vec<f64> = v["branches"].as_array().unwrap().iter().map(|b| b["x"][0].as_f64().unwrap()).collect();
    let s = 3.0 * std::f64::consts::PI / (3.0 * std::f64::consts::PI - 8.0);
    assert!((xs[0] + s).abs() < 1e-12 && (xs[1] - s).abs() < 1e-12);

    assert_eq!(run(&["phase-diagram", "gamma-slice"]).status.code(), Some(2));
}

#[test]
fn config_file_is_read_and_flags_win() {
    let dir = std::env::temp_dir().join(format!("twoboson-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.conf");
    std::fs::write(&path, "gamma = -5\nlambda = -11\nmu = 0\nformat = json\n").unwrap();
    let p = path.to_str().unwrap();
    let v = json(&["classify", "--config", p]);
    assert_eq!(ees_below(&v), 2);
    let v = json(&["classify", "--config", p, "-g", "1", "-l", "0"]);
    assert_eq!(ees_below(&v), 0);
    std::fs::write(&path, "gamma = 1\nbogus = 3\n").unwrap();
    assert_eq!(run(&["classify", "--config", p]).status.code(), Some(2));
}

#[test]
fn verify_subset_passes() {
    let o = run(&["verify", "--only", "3,4,11"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 4);
}
