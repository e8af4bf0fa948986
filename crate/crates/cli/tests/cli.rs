//! End-to-end runs of the `semdiff` binary on the fixture files.

use std::process::{Command, Output};

use semdiff_testkit::fixtures::path;
use serde_json::Value;

fn semdiff(args: &[&str]) -> Output {
    let resolved: Vec<String> = args
        .iter()
        .map(|a| {
            if a.contains('.') && !a.starts_with('-') {
                path(a).display().to_string()
            } else {
                a.to_string()
            }
        })
        .collect();
    Command::new(env!("CARGO_BIN_EXE_semdiff"))
        .args(&resolved)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid json")
}

#[test]
fn help_exits_zero() {
    let o = semdiff(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Usage: semdiff"));
}

#[test]
fn employee_example_first_witness() {
    let o = semdiff(&[
        "cd",
        "diff",
        "cd1.v1.cd",
        "cd1.v2.cd",
        "--max-witnesses",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let expected = "objectmodel w1 {\n  employee1: Employee;\n  task1: Task;\n  task2: Task;\n  task3: Task;\n  \
                    link worksOn employee1 -- task1;\n  link worksOn employee1 -- task2;\n  \
                    link worksOn employee1 -- task3;\n}\n";
    assert!(stdout(&o).starts_with(expected), "{}", stdout(&o));
    assert!(stdout(&o).ends_with("1 witness (stopped at 1, k=3)\n"));
}

#[test]
fn reverse_flag_swaps_arguments() {
    let reversed = semdiff(&["cd", "diff", "cd1.v1.cd", "cd1.v2.cd", "--reverse"]);
    let swapped = semdiff(&["cd", "diff", "cd1.v2.cd", "cd1.v1.cd"]);
    assert_eq!(reversed.status.code(), Some(1));
    assert_eq!(stdout(&reversed), stdout(&swapped));
}

#[test]
fn inheritance_refactoring_is_equivalent() {
    let o = semdiff(&["cd", "compare", "cd5.v1.cd", "cd5.v2.cd"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "EQUIVALENT (bounded k=3)\n");
    let o = semdiff(&["cd", "diff", "cd5.v2.cd", "cd5.v1.cd", "-k", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "no witnesses (exhausted, k=4)\n");
}

#[test]
fn cd_diff_json_schema() {
    let v = json(&semdiff(&[
        "cd",
        "diff",
        "cd1.v2.cd",
        "cd1.v1.cd",
        "--format",
        "json",
        "--max-witnesses",
        "2",
    ]));
    assert_eq!(v["direction"], "AtoB");
    assert_eq!(v["exhausted"], false);
    assert_eq!(v["bound"], 3);
    let ws = v["witnesses"].as_array().unwrap();
    assert_eq!(ws.len(), 2);
    for w in ws {
        assert!(w["objects"]
            .as_array()
            .unwrap()
            .iter()
            .all(|o| o["id"].is_string() && o["class"].is_string()));
        for l in w["links"].as_array().unwrap() {
            assert!(l["assoc"].is_string() && l["src"].is_string() && l["dst"].is_string());
        }
    }
}

#[test]
fn ad_diff_json_schema() {
    let o = semdiff(&["ad", "diff", "ad.v3.ad", "ad.v4.ad", "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["exhausted"], true);
    assert!(v["bound"].is_null());
    let ws = v["witnesses"].as_array().unwrap();
    assert_eq!(ws.len(), 1);
    assert_eq!(ws[0]["inputs"]["isInternal"], "false");
    let actions: Vec<&str> = ws[0]["actions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a.as_str().unwrap())
        .collect();
    assert_eq!(actions, ["register", "assignExternal", "authorizePayments"]);
}

#[test]
fn ad_history_table() {
    let o = semdiff(&[
        "history", "ad", "ad.v1.ad", "ad.v2.ad", "ad.v3.ad", "ad.v4.ad",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let lines: Vec<Vec<String>> = stdout(&o)
        .lines()
        .map(|l| l.split_whitespace().map(str::to_string).collect())
        .collect();
    assert_eq!(lines[0], ["FROM", "TO", "VERDICT", "FORWARD", "BACKWARD"]);
    assert_eq!(lines[1], ["ad.v1.ad", "ad.v2.ad", "INCOMPARABLE", "2", "6"]);
    assert_eq!(
        lines[2],
        ["ad.v2.ad", "ad.v3.ad", "RIGHT_REFINES_LEFT", "4", "0"]
    );
    assert_eq!(lines[3], ["ad.v3.ad", "ad.v4.ad", "INCOMPARABLE", "1", "1"]);
}

#[test]
fn palindromic_history_mirrors() {
    for (kind, files) in [
        ("ad", ["ad.v2.ad", "ad.v3.ad", "ad.v2.ad"]),
        ("cd", ["cd5.v1.cd", "cd1.v1.cd", "cd5.v1.cd"]),
    ] {
        let v = json(&semdiff(&[
            "history", kind, files[0], files[1], files[2], "--format", "json",
        ]));
        assert_eq!(v["kind"], kind);
        let rows = v["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0]["from"], rows[1]["to"]);
        assert_eq!(rows[0]["forward"], rows[1]["backward"]);
        assert_eq!(rows[0]["backward"], rows[1]["forward"]);
        let mirror = |s: &str| match s {
            "LEFT_REFINES_RIGHT" => "RIGHT_REFINES_LEFT".to_string(),
            "RIGHT_REFINES_LEFT" => "LEFT_REFINES_RIGHT".to_string(),
            s => s.to_string(),
        };
        assert_eq!(
            rows[1]["verdict"].as_str().unwrap(),
            mirror(rows[0]["verdict"].as_str().unwrap())
        );
    }
}

#[test]
fn render_outputs() {
    let o = semdiff(&["render", "om", "three_tasks.om", "--format", "dot"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("digraph \"threeTasks\" {\n"));
    let o = semdiff(&["render", "trace", "ad.v2.ad", "key_card_late.trace"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("trace {\n  inputs: isInternal = true;\n  1: register;\n"));
}

#[test]
fn errors_exit_two() {
    let o = semdiff(&["cd", "diff", "missing.cd", "cd1.v1.cd"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("semdiff: "));
    let o = semdiff(&["cd", "diff", "ad.v1.ad", "cd1.v1.cd"]);
    assert_eq!(o.status.code(), Some(2));
    let o = semdiff(&["cd", "frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}
