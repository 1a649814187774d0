use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qontext::cli::{bundled_data_dir, DATA_DIR_ENV};
use qontext::report::Report;

fn qontext(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qontext"))
        .args(args)
        .env_remove(DATA_DIR_ENV)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qontext-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn schema() -> serde_json::Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/report.schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn ks_verify_cabello() {
    let o = qontext(&["ks-verify", "cabello18.scn", "--vectors", "cabello18.vec"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("[INFO] satisfiable = false\n"));
    assert!(out.contains("[INFO] parity_contradiction = true\n"));
    assert!(out.contains("[PASS] realization_valid = true\n"));
    assert!(out.ends_with("result PASS\n"));
}

#[test]
fn inequality_all_tables() {
    let o = qontext(&["inequality", "--table", "all"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for needle in [
        "[PASS] classical_bounds = (-1, 3)\n",
        "[PASS] quasi_bounds = (-3, 3)\n",
        "table classical (8 rows)\n",
        "table quasi (8 rows)\n",
        "table forbidden (4 rows)\n",
    ] {
        assert!(out.contains(needle), "missing {needle:?}");
    }
}

#[test]
fn qfunctions_counts() {
    let o = qontext(&["qfunctions", "--qcard", "9", "--outcomes", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("quasi_function_count = 4\n"));
    assert!(out.contains("classical_function_count = 262144\n"));
}

#[test]
fn failed_check_exits_one() {
    let dir = scratch("tampered");
    let vec = std::fs::read_to_string(bundled_data_dir().join("cabello18.vec"))
        .unwrap()
        .replace("vec P2 0,0 0,0 1,0 0,0", "vec P2 0,0 0.1,0 1,0 0,0");
    let path = dir.join("bad.vec");
    std::fs::write(&path, vec).unwrap();
    let o = qontext(&[
        "ks-verify",
        "cabello18.scn",
        "--vectors",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("[FAIL] realization_valid = false\n"));
    assert!(out.ends_with("result FAIL\n"));
}

#[test]
fn usage_and_input_errors_exit_two() {
    for args in [
        &["frobnicate"][..],
        &["fock", "--dim", "2"],
        &["inequality", "--table", "diagonal"],
        &["ks-verify", "no-such-file.scn"],
        &[
            "nosignal", "--state", "bell.mat", "--measA", "z.mat", "--measB", "bell.mat",
            "--measB2", "x.mat",
        ],
        &["inequality", "--behavior", "2,0,0"],
    ] {
        let o = qontext(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn data_dir_override() {
    let dir = scratch("data");
    std::fs::write(
        dir.join("cabello18.scn"),
        "scenario ks_coloring\nobs a 2\nobs b 2\nctx a b\n",
    )
    .unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_qontext"))
        .args(["ks-verify", "cabello18.scn"])
        .env(DATA_DIR_ENV, &dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("[INFO] satisfiable = true\n"));
    assert!(out.contains("[PASS] witness_valid = true\n"));
}

#[test]
fn json_reports_match_schema_and_round_trip() {
    let validator = jsonschema::JSONSchema::compile(&schema()).unwrap();
    let dir = scratch("json");
    let commands: [&[&str]; 6] = [
        &["ks-verify", "cabello18.scn", "--vectors", "cabello18.vec"],
        &["inequality", "--behavior", "0.5,0.5,0.5"],
        &["qfunctions", "--qcard", "3", "--outcomes", "2"],
        &["fock", "--dim", "2", "--particles", "3"],
        &["overlap", "--sigma", "0.5", "--separations", "0,1,5"],
        &[
            "nosignal", "--state", "bell.mat", "--measA", "x.mat", "--measB", "z.mat", "--measB2",
            "x.mat",
        ],
    ];
    for (k, args) in commands.iter().enumerate() {
        let path = dir.join(format!("r{k}.json"));
        let mut full: Vec<&str> = args.to_vec();
        full.extend(["--json", path.to_str().unwrap()]);
        let o = qontext(&full);
        assert_eq!(o.status.code(), Some(0), "{args:?}");
        let text = std::fs::read_to_string(&path).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        if let Err(errors) = validator.validate(&value) {
            let msgs: Vec<String> = errors.map(|e| e.to_string()).collect();
            panic!("{args:?}: {msgs:?}");
        }
        let report: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(report.to_json(), text);
        assert_eq!(report.to_text(), stdout(&o));
    }
}

#[test]
fn timestamps_are_opt_in() {
    let plain = qontext(&["inequality", "--table", "quasi"]);
    assert!(!stdout(&plain).contains("generated_at_unix"));
    let stamped = qontext(&["inequality", "--table", "quasi", "--timestamps"]);
    assert_eq!(stamped.status.code(), Some(0));
    assert!(stdout(&stamped).contains("generated_at_unix "));
}

#[test]
fn overlap_writes_csv() {
    let dir = scratch("csv");
    let path = dir.join("curve.csv");
    let o = qontext(&[
        "overlap",
        "--sigma",
        "1",
        "--separations",
        "0,2,10",
        "--csv",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "separation,fraction");
    assert_eq!(lines.len(), 4);
    assert!(stdout(&o).contains("[PASS] distinguishable_beyond_10_sigma = true\n"));
}
