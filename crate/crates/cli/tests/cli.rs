use std::process::{Command, Output};

use hashbound::combiner::{BoundPath, BoundReport};
use serde_json::Value;

fn hashbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hashbound"))
        .args(args)
        .env_remove("HASHBOUND_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let o = hashbound(args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

#[test]
fn bound_json_round_trips() {
    let v = json(&["bound", "--b", "6", "--k", "6", "--j", "4", "--partition", "min", "--eps", "0.05", "--format", "json"]);
    assert_eq!(v["schema"], 1);
    let report: BoundReport = serde_json::from_value(v["report"].clone()).unwrap();
    assert_eq!(serde_json::to_value(&report).unwrap(), v["report"]);
    assert_eq!(report.path, BoundPath::Partition);
    assert!((report.rate - 5.0 / 59.0).abs() < 1e-12);
}

#[test]
fn published_parameters_reproduce_printed_rates() {
    let r: BoundReport =
        serde_json::from_value(json(&["bound", "--b", "5", "--k", "5", "--preset", "paper", "--format", "json"])["report"].clone())
            .unwrap();
    assert_eq!(hashbound::rounding::round_up_str(r.rate, 5), "0.16894");
    assert_eq!(r.epsilon_label.as_deref(), Some("(4+sqrt5)/44"));

    let r: BoundReport =
        serde_json::from_value(json(&["bound", "--b", "7", "--k", "6", "--eps", "paper", "--format", "json"])["report"].clone())
            .unwrap();
    assert_eq!(r.path, BoundPath::UniformShortcut);
    assert_eq!(hashbound::rounding::round_up_str(r.rate, 5), "0.19897");
}

#[test]
fn bound_csv_has_raw_columns() {
    let o = hashbound(&["bound", "--b", "6", "--k", "6", "--j", "4", "--partition", "min", "--eps", "1/20", "--format", "csv"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let at = |name: &str| header.iter().position(|h| *h == name).unwrap();
    assert_eq!(row[at("bound")], "0.08475");
    let raw: f64 = row[at("bound_raw")].parse().unwrap();
    assert!(raw <= 0.08475 && 0.08475 - raw < 1e-5);
}

#[test]
fn table_csv_header_and_rows() {
    let o = hashbound(&["table", "--preset", "table1", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "b,k,path,bound,bound_raw,printed,match,korner_marton,korner_marton_raw,korner_marton_lit,arikan_lit,guruswami_riazanov_lit"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 39);
    for r in rows {
        let f: Vec<&str> = r.split(',').collect();
        let shown: f64 = f[3].parse().unwrap();
        let raw: f64 = f[4].parse().unwrap();
        assert!(shown >= raw && shown - raw < 1e-5, "{r}");
    }
}

#[test]
fn table_json_has_schema() {
    let v = json(&["table", "--preset", "table3", "--format", "json"]);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["rows"].as_array().unwrap().len(), 8);
    assert_eq!(v["rows"][0]["korner_marton"], "8.4300e-3");
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(hashbound(&["bound", "--b", "6"]).status.code(), Some(1));
    assert_eq!(hashbound(&["bound", "--b", "6", "--k", "6", "--eps", "0.5"]).status.code(), Some(1));
    assert_eq!(hashbound(&["table", "--preset", "nope"]).status.code(), Some(1));
    assert_eq!(hashbound(&["bound", "--b", "9", "--k", "5", "--preset", "paper"]).status.code(), Some(1));
    assert_eq!(
        hashbound(&["sweep-eps", "--b", "7", "--k", "7", "--eps-min", "0.1", "--eps-max", "0.05"]).status.code(),
        Some(1)
    );
    assert_eq!(hashbound(&["--help"]).status.code(), Some(0));
}

#[test]
fn injected_fault_fails_verification() {
    let args = ["verify", "--b", "6", "--j", "4", "--count", "500", "--samples", "500"];
    assert_eq!(hashbound(&args).status.code(), Some(0));
    let mut bad = args.to_vec();
    bad.push("--inject-fault");
    let o = hashbound(&bad);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn verify_is_deterministic_for_a_seed() {
    let args = ["verify", "--seed", "42", "--count", "2000", "--samples", "2000", "--format", "json"];
    let a = hashbound(&args);
    let b = hashbound(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn thread_count_does_not_change_results() {
    let args = ["sample-mi", "--b", "7", "--k", "7", "--eps", "paper", "--samples", "5000", "--seed", "42", "--format", "csv"];
    let one = Command::new(env!("CARGO_BIN_EXE_hashbound"))
        .args(args)
        .env("HASHBOUND_THREADS", "1")
        .output()
        .unwrap();
    let two = Command::new(env!("CARGO_BIN_EXE_hashbound"))
        .args(args)
        .env("HASHBOUND_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, two.stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_hashbound"))
        .args(args)
        .env("HASHBOUND_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn budgets_exit_3() {
    let o = hashbound(&["table", "--preset", "mi-tables", "--budget-secs", "0"]);
    assert_eq!(o.status.code(), Some(3));
    let o = hashbound(&["search-code", "--b", "3", "--k", "3", "--n", "3", "--max-nodes", "50"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn code_files_are_checked() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.txt");
    std::fs::write(&good, "1 1\n1 2\n2 3\n3 3\n").unwrap();
    assert_eq!(
        hashbound(&["search-code", "--b", "3", "--k", "3", "--check", good.to_str().unwrap()]).status.code(),
        Some(0)
    );
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "1 1\n1 2\n2 1\n2 2\n3 3\n").unwrap();
    let o = hashbound(&["search-code", "--b", "3", "--k", "3", "--check", bad.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["check"]["holds"], false);
    assert_eq!(v["check"]["witness"].as_array().unwrap().len(), 3);
}

#[test]
fn out_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("classical.csv");
    let o = hashbound(&["classical", "--b", "5", "--k", "4", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("quantity,value,value_raw,note\n"));
    assert!(text.contains("dvj,0.57303,"));
}

#[test]
fn sweeps_respect_known_limits() {
    let v = json(&["sweep-eps", "--b", "7", "--k", "7", "--partition", "max", "--eps-min", "0.05", "--eps-max", "1/6", "--steps", "20", "--format", "json"]);
    assert!(v["sweep"]["best_rate"].as_f64().unwrap() <= 0.04090 + 1e-5);
    assert_eq!(v["sweep"]["points"].as_array().unwrap().len(), 21);
    let v = json(&["sweep-eps", "--b", "6", "--k", "6", "--partition", "min", "--eps-min", "0.005", "--eps-max", "0.165", "--steps", "16", "--format", "json"]);
    // The uniform pair always lies in the balanced part, so nothing beats 5/59.
    assert!(v["sweep"]["best_rate"].as_f64().unwrap() >= 5.0 / 59.0 - 1e-12);
    assert_eq!(v["sweep"]["beats_preset"], false);
}
