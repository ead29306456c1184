use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hammersley"));
    cmd.env_remove("HAMMERSLEY_MEMO_DIR");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn schema_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(format!("{name}.schema.json"))
}

/// Runs a command with `--format json`, checks the exit code and validates
/// the output against the shipped schema.
fn json_of(schema: &str, args: &[&str], code: i32) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = run(&all);
    assert_eq!(
        out.status.code(),
        Some(code),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let value: Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    let errors = schema_errors(&schema_path(schema), &value);
    assert!(
        errors.is_empty(),
        "{args:?} violates {schema}: {errors}\n{value:#}"
    );
    value
}

/// Validates against a draft 2020-12 schema with Python's `jsonschema`.
fn schema_errors(schema: &Path, instance: &Value) -> String {
    const SCRIPT: &str = r#"
import json, sys, jsonschema
schema = json.load(open(sys.argv[1]))
jsonschema.Draft202012Validator.check_schema(schema)
errors = jsonschema.Draft202012Validator(schema).iter_errors(json.load(sys.stdin))
print("\n".join(e.message for e in errors), end="")
"#;
    let mut child = Command::new("python3")
        .args(["-c", SCRIPT])
        .arg(schema)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::inherit())
        .spawn()
        .expect("python3 is needed for schema validation");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(instance.to_string().as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(
        out.status.success(),
        "schema validator failed for {}",
        schema.display()
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn schemas_reject_malformed_output() {
    let bad = serde_json::json!({ "word": "2", "k": 12, "which": "dominant", "member": "yes", "detail": "" });
    assert!(!schema_errors(&schema_path("check"), &bad).is_empty());
    for name in [
        "check",
        "mult",
        "table",
        "enum-oracle",
        "inc",
        "lambda",
        "simulate",
        "witness",
    ] {
        assert!(
            !schema_errors(&schema_path(name), &serde_json::json!({})).is_empty(),
            "{name}"
        );
    }
}

#[test]
fn check_verdicts_and_exit_codes() {
    let v = json_of(
        "check",
        &["check", "--k", "2", "--which", "dominant", "200"],
        1,
    );
    assert_eq!(v["member"], false);
    assert_eq!(v["minimum_prefix"]["prefix"], "200");
    assert_eq!(v["minimum_prefix"]["difference"], -1);
    assert!(stdout(&run(&["check", "200"])).contains("prefix 200 difference -1"));

    let v = json_of("check", &["check", "--which", "interval", "2*1*"], 0);
    assert_eq!(v["member"], true);
    let v = json_of("check", &["check", "--which", "interval", "2**1"], 1);
    assert_eq!(v["condition"], "2a");
    let v = json_of("check", &["check", "--which", "interval", "2*0*"], 1);
    assert_eq!(v["condition"], "2b");
    let v = json_of("check", &["check", "--which", "interval", "2*1"], 1);
    assert_eq!(v["condition"], "1");

    let v = json_of("check", &["check", "--which", "pda", "212"], 0);
    assert_eq!(v["trace"], serde_json::json!([1, 1, 2]));
    let v = json_of("check", &["check", "--which", "pda", "2020"], 1);
    assert_eq!(v["rejected_at"], 2);

    let v = json_of("check", &["check", "--which", "sk", "222**1**"], 0);
    assert_eq!(
        v["decomposition"],
        serde_json::json!({"c": 1, "d": 1, "e": 1})
    );
    json_of("check", &["check", "--which", "sk", "22**1**"], 1);
    json_of("check", &["check", "--which", "effective", "2211"], 0);
    json_of("check", &["check", "-k", "1", "1010"], 0);
}

#[test]
fn invalid_input_exits_two() {
    for args in [
        &["check", "2x1"][..],
        &["check", "-k", "2", "231"],
        &["check", "-k", "10", "2"],
        &["mult", "2*"],
        &["witness", "200"],
        &["inc", "--exact", "-n", "14"],
        &["check", "--format", "csv", "22"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let out = run(&["check", "21x"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("position 2"));
    let out = run(&["inc", "--exact", "-n", "14"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("n <= 13"));
}

#[test]
fn mult_prints_counts_and_fractions() {
    assert_eq!(stdout(&run(&["mult", "-k", "2", "212"])), "2, 2/6\n");
    assert_eq!(stdout(&run(&["mult", "-k", "1", "1010"])), "5, 5/24\n");
    assert_eq!(
        stdout(&run(&["mult", "--interval", "22**"])),
        "7 of 9, 7/9\n"
    );
    let v = json_of("mult", &["mult", "222200"], 0);
    assert_eq!(v["multiplicity"], "8");
    assert_eq!(v["probability"], "1/90");
    json_of("mult", &["mult", "--interval", "2*2*"], 0);
    json_of("mult", &["mult", "--interval", "2*2"], 0);
}

#[test]
fn tables_and_oracle() {
    let v = json_of("table", &["table", "-k", "2", "-n", "4"], 0);
    let counts = v["counts"].as_object().unwrap();
    assert_eq!(counts.len(), 13);
    assert_eq!(counts["2202"], "3");
    assert_eq!(stdout(&run(&["table", "-n", "1"])).lines().count(), 1);
    let csv = stdout(&run(&["table", "-n", "3", "--format", "csv"]));
    assert!(csv.starts_with("word,multiplicity,probability\n"));
    assert!(csv.contains("212,2,0.333333"));
    let v = json_of("table", &["table", "-n", "3", "--interval"], 0);
    assert_eq!(v["process"], "interval");

    assert_eq!(
        stdout(&run(&["enum-oracle", "-k", "2", "-n", "6"])),
        "tables identical, mass 720\n"
    );
    let v = json_of("enum-oracle", &["enum-oracle", "-k", "3", "-n", "5"], 0);
    assert_eq!(v["identical"], true);
    assert_eq!(v["mass"], "120");
}

#[test]
fn increments_and_lambda() {
    let v = json_of("inc", &["inc", "--exact", "-k", "2", "-n", "5"], 0);
    assert_eq!(v["mean"], "5/4");
    assert_eq!(v["mean_decimal"], 1.25);
    let v = json_of(
        "inc",
        &["inc", "--samples", "1", "-n", "3", "--seed", "1"],
        0,
    );
    assert_eq!(v["pmf"].as_object().unwrap().len(), 1);
    let csv = stdout(&run(&[
        "inc", "--exact", "-n", "3", "--format", "csv", "--shift",
    ]));
    assert_eq!(csv, "i,probability\n0,5/6\n1,1/6\n");

    let v = json_of("lambda", &["lambda", "--exact", "-n", "13"], 0);
    assert!((v["lambda_hat"].as_f64().unwrap() - 1.398763).abs() < 1e-6);
    assert!(v["half_width"].is_null());
    let v = json_of(
        "lambda",
        &["lambda", "-n", "2000", "--samples", "200", "--seed", "7"],
        0,
    );
    assert!(v["half_width"].as_f64().unwrap() > 0.0);
    assert_eq!(v["residuals"].as_array().unwrap().len(), 6);
}

#[test]
fn simulate_and_witness() {
    let v = json_of("simulate", &["simulate", "-n", "12", "--seed", "3"], 0);
    assert_eq!(v["word"].as_str().unwrap().len(), 12);
    let v = json_of("simulate", &["simulate", "-n", "4", "--interval"], 0);
    assert_eq!(v["word"].as_str().unwrap().len(), 8);
    let v = json_of("witness", &["witness", "222200"], 0);
    assert_eq!(v["trajectory"].as_array().unwrap().len(), 6);
}

#[test]
fn identical_runs_are_byte_identical() {
    for args in [
        &[
            "lambda",
            "-n",
            "3000",
            "--samples",
            "300",
            "--seed",
            "9",
            "--format",
            "json",
        ][..],
        &["inc", "-n", "500", "--samples", "100", "--format", "json"],
        &["simulate", "-n", "50", "--seed", "5", "--format", "json"],
        &["table", "-n", "6", "-k", "3", "--format", "json"],
    ] {
        let a = run(args).stdout;
        let b = run(args).stdout;
        assert_eq!(a, b, "{args:?}");
        let mut threaded = args.to_vec();
        threaded.extend(["--threads", "1"]);
        assert_eq!(run(&threaded).stdout, a, "{args:?} sequential");
        let mut threaded = args.to_vec();
        threaded.extend(["--threads", "3"]);
        assert_eq!(run(&threaded).stdout, a, "{args:?} three threads");
    }
}

#[test]
fn output_file_and_memo_dir() {
    let dir = std::env::temp_dir().join(format!("hammersley-cli-test-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    let out_file = dir.join("table.json");
    let out = run(&[
        "table",
        "-n",
        "3",
        "--format",
        "json",
        "--output",
        out_file.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_file).unwrap()).unwrap();
    assert_eq!(v["n"], 3);

    let memo = dir.join("memo");
    let first = bin()
        .env("HAMMERSLEY_MEMO_DIR", &memo)
        .args(["mult", "22120"])
        .output()
        .unwrap();
    let text = std::fs::read_to_string(memo.join("had-k2.memo")).unwrap();
    assert!(text.lines().any(|l| l == "22120 4"), "{text}");
    let second = bin()
        .env("HAMMERSLEY_MEMO_DIR", &memo)
        .args(["mult", "22120"])
        .output()
        .unwrap();
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(stdout(&first), "4, 4/120\n");
    std::fs::remove_dir_all(&dir).unwrap();
}
