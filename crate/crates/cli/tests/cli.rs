use std::io::Write;
use std::process::{Command, Output, Stdio};

fn gwa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gwa"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn gwa_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_gwa"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_kind(o: &Output) -> String {
    let line = String::from_utf8(o.stderr.clone()).unwrap();
    let v: serde_json::Value = serde_json::from_str(line.trim()).expect("stderr is JSON");
    v["error"]["kind"].as_str().unwrap().to_string()
}

fn temp_dir(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("gwa-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

const BINARY: &str = r#"{"family":"binary"}"#;

#[test]
fn exact_table_lists_binary_leaf_probabilities() {
    let o = gwa(&[
        "exact", "--dist", BINARY, "--set", "0", "--max-n", "30", "--format", "json", "--seed", "1",
    ]);
    assert!(o.status.success());
    let table: Vec<String> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(table.len(), 31);
    assert_eq!(table[3], "1/16");
    let walk = gwa(&[
        "exact", "--dist", BINARY, "--set", "0", "--max-n", "30", "--method", "walk",
    ]);
    let fixed = gwa(&[
        "exact",
        "--dist",
        BINARY,
        "--set",
        "0",
        "--max-n",
        "30",
        "--method",
        "fixed-point",
    ]);
    assert_eq!(stdout(&walk), stdout(&o));
    assert_eq!(stdout(&fixed), stdout(&o));
}

#[test]
fn otter_dwass_suite_exits_zero() {
    let o = gwa(&[
        "verify",
        "otter-dwass",
        "--dist",
        BINARY,
        "--sets",
        "0",
        "0,2",
        "all",
        "--max-n",
        "8",
        "--seed",
        "1",
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(report["tests"]
        .as_array()
        .unwrap()
        .iter()
        .all(|t| t["pass"] == true));
}

#[test]
fn hat_transform_reads_queues_from_stdin() {
    let o = gwa_stdin(&["transform", "hat", "--set", "0"], "1,-1,-1\n");
    assert!(o.status.success());
    assert_eq!(stdout(&o), "0,-1\n");
}

#[test]
fn check_transform_reads_parenthesized_trees() {
    let o = gwa_stdin(
        &["transform", "check"],
        "(((())((()())()))(())())\n(()())\n",
    );
    assert!(o.status.success());
    assert_eq!(stdout(&o), "((()())()())\n(())\n");
}

#[test]
fn stochastic_commands_require_a_seed() {
    let o = gwa(&["sample", "--dist", BINARY, "--set", "0", "--n", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_kind(&o), "Config");
}

#[test]
fn invalid_inputs_are_config_errors() {
    for args in [
        vec![
            "exact",
            "--dist",
            r#"{"family":"poisson"}"#,
            "--set",
            "0",
            "--max-n",
            "3",
        ],
        vec!["exact", "--dist", BINARY, "--set", "1,2", "--max-n", "3"],
        vec![
            "exact",
            "--dist",
            r#"{"probs":["1/4","0","1/2","1/4"]}"#,
            "--set",
            "0",
            "--max-n",
            "3",
        ],
        vec!["verify", "no-such-suite"],
        vec!["exact", "--bogus"],
    ] {
        let o = gwa(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        error_kind(&o);
    }
}

#[test]
fn sampling_is_reproducible_and_embeds_seed() {
    let args = [
        "sample",
        "--dist",
        BINARY,
        "--set",
        "0",
        "--n",
        "20",
        "--samples",
        "5",
        "--seed",
        "42",
        "--format",
        "json",
    ];
    let a = gwa(&args);
    let b = gwa(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["seed"], 42);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["trees"].as_array().unwrap().len(), 5);
    for method in ["rejection", "markov-branching"] {
        let o = gwa(&[
            "sample",
            "--dist",
            BINARY,
            "--set",
            "0",
            "--n",
            "4",
            "--samples",
            "3",
            "--seed",
            "1",
            "--method",
            method,
        ]);
        assert!(o.status.success(), "{method}");
        assert_eq!(stdout(&o).lines().count(), 4);
    }
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let run = |threads: &str| {
        gwa(&[
            "verify",
            "hat-law",
            "--samples",
            "5000",
            "--seed",
            "3",
            "--threads",
            threads,
        ])
        .stdout
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = temp_dir("config");
    let path = dir.join("run.json");
    std::fs::write(
        &path,
        r#"{"dist":{"family":"binary"},"set":"0","max_n":4,"format":"text"}"#,
    )
    .unwrap();
    let from_file = gwa(&["exact", "--config", path.to_str().unwrap()]);
    assert!(from_file.status.success());
    assert_eq!(stdout(&from_file).lines().count(), 5);
    let flagged = gwa(&[
        "exact",
        "--config",
        path.to_str().unwrap(),
        "--max-n",
        "2",
        "--format",
        "csv",
    ]);
    assert_eq!(stdout(&flagged), "n,probability\n0,0\n1,1/2\n2,1/8\n");
}

#[test]
fn cache_dir_reuses_tables() {
    let dir = temp_dir("cache");
    let args = [
        "exact",
        "--dist",
        BINARY,
        "--set",
        "all",
        "--max-n",
        "9",
        "--cache-dir",
        dir.to_str().unwrap(),
    ];
    let first = gwa(&args);
    assert_eq!(std::fs::read_dir(&dir).unwrap().count(), 1);
    let second = gwa(&args);
    let shorter = gwa(&[
        "exact",
        "--dist",
        BINARY,
        "--set",
        "all",
        "--max-n",
        "3",
        "--cache-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(stdout(&shorter), "[\"0\",\"1/2\",\"0\",\"1/8\"]\n");
}

#[test]
fn root_partition_reports_exact_measure() {
    let o = gwa(&["root-partition", "--dist", BINARY, "--set", "0", "--n", "3"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["atoms"][0]["partition"], "(2,1)");
    assert_eq!(v["atoms"][0]["probability"], "1");
    let f = v["theorem_functional"]["one"].as_f64().unwrap();
    assert!((f - 3f64.sqrt() / 3.0).abs() < 1e-12);
}

#[test]
fn report_renders_saved_reports_and_flags_failures() {
    let dir = temp_dir("report");
    let o = gwa(&["verify", "follower", "--max-n", "5"]);
    assert!(o.status.success());
    let ok = dir.join("ok.json");
    std::fs::write(&ok, &o.stdout).unwrap();
    let text = gwa(&["report", ok.to_str().unwrap()]);
    assert!(text.status.success());
    assert!(stdout(&text).contains("PASS follower bound"));

    let mut v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    v["tests"][0]["pass"] = serde_json::Value::Bool(false);
    let bad = dir.join("bad.json");
    std::fs::write(&bad, v.to_string()).unwrap();
    let failed = gwa(&["report", bad.to_str().unwrap()]);
    assert_eq!(failed.status.code(), Some(1));
    assert_eq!(error_kind(&failed), "CheckFailed");
}
