//! End-to-end checks of the binary: subcommand output, JSON schemas and exit
//! codes.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn schubkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schubkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn schubkit_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_schubkit"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .as_mut()
        .expect("stdin piped")
        .write_all(input.as_bytes())
        .expect("stdin writes");
    child.wait_with_output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).trim().to_string()
}

#[test]
fn perm_commands() {
    assert_eq!(stdout(&schubkit(&["perm", "code", "14862357"])), "0,2,5,3");
    assert_eq!(
        stdout(&schubkit(&["perm", "uncode", "0,2,5,3"])),
        "14862357"
    );
    assert_eq!(
        stdout(&schubkit(&["perm", "stretch", "2143", "2"])),
        "31524"
    );
    assert_eq!(
        stdout(&schubkit(&["perm", "code", "--code", "1,0,1"])),
        "1,0,1"
    );
    let stats = stdout(&schubkit(&["--json", "perm", "stats", "3142"]));
    let v: serde_json::Value = serde_json::from_str(&stats).unwrap();
    assert_eq!(v["inversions"], 3);
    assert_eq!(v["descents"], serde_json::json!([1, 3]));
}

#[test]
fn coeff_examples() {
    assert_eq!(
        stdout(&schubkit(&[
            "coeff", "3142", "1432", "4321", "--method", "ps"
        ])),
        "0"
    );
    assert_eq!(
        stdout(&schubkit(&["coeff", "3142", "1432", "4321", "--N", "3"])),
        "2"
    );
    // identical output regardless of worker count
    for workers in ["1", "2", "5"] {
        assert_eq!(
            stdout(&schubkit(&[
                "--parallel",
                workers,
                "coeff",
                "3142",
                "1432",
                "4321",
                "--N",
                "4"
            ])),
            "3"
        );
    }
}

#[test]
fn stretched_range() {
    assert_eq!(
        stdout(&schubkit(&[
            "stretched",
            "3142",
            "1432",
            "4321",
            "--from",
            "1",
            "--to",
            "4"
        ])),
        "0 1 2 3"
    );
    let json = stdout(&schubkit(&[
        "--json",
        "stretched",
        "2143",
        "2143",
        "4132",
        "--from",
        "1",
        "--to",
        "3",
    ]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["2"], 1);
    assert_eq!(v["3"], 0);
}

#[test]
fn pipe_dream_json_roundtrip() {
    let dream_json = stdout(&schubkit(&["--json", "pd", "bottom", "14862357"]));
    let v: serde_json::Value = serde_json::from_str(&dream_json).unwrap();
    assert_eq!(v["n"], 8);
    let rendered = stdout(&schubkit_stdin(&["pd", "render"], &dream_json));
    assert!(rendered.starts_with(". . . . . . . ."));

    let dreams = stdout(&schubkit(&["--json", "pd", "enumerate", "132"]));
    let v: serde_json::Value = serde_json::from_str(&dreams).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
}

#[test]
fn ladder_encode_decode_pipeline() {
    let dream =
        r#"{"n":8,"crosses":[[1,3],[1,5],[2,1],[2,3],[2,5],[2,6],[3,1],[3,2],[3,3],[4,1]]}"#;
    let encoded = stdout(&schubkit_stdin(
        &["--json", "ladder", "encode", "14862357"],
        dream,
    ));
    let v: serde_json::Value = serde_json::from_str(&encoded).unwrap();
    assert_eq!(v["mu"], 4);
    assert_eq!(v["entries"].as_array().unwrap().len(), 4);
    let decoded = stdout(&schubkit_stdin(
        &["--json", "ladder", "decode", "14862357"],
        &encoded,
    ));
    let roundtrip: serde_json::Value = serde_json::from_str(&decoded).unwrap();
    let original: serde_json::Value = serde_json::from_str(dream).unwrap();
    assert_eq!(roundtrip, original);
}

#[test]
fn ladder_indices_order() {
    let line = stdout(&schubkit(&["ladder", "indices", "4"]));
    assert!(line.starts_with("(3,1) < (2,1,1) < (2,1) < (2,2) < (1,1,1,1)"));
}

#[test]
fn system_emit_and_count() {
    let system = stdout(&schubkit(&[
        "system", "emit", "compat", "132", "--kappa", "1,1",
    ]));
    let count = stdout(&schubkit_stdin(
        &["system", "count", "--param-n", "3"],
        &system,
    ));
    assert_eq!(count, "3");

    // instantiated form: 0 <= x <= 3
    let inst = r#"{"A":[[1]],"rhs":[3],"lower":[0]}"#;
    assert_eq!(stdout(&schubkit_stdin(&["system", "count"], inst)), "4");
}

#[test]
fn fit_from_stdin() {
    let out = stdout(&schubkit_stdin(&["--json", "fit"], "[0,1,2,3,4,5,6,7]"));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["fit"]["period"], 1);
    assert_eq!(v["fit"]["offset"], 1);
    assert_eq!(v["fit"]["polys"], serde_json::json!([["-1", "1"]]));
    assert_eq!(
        v["generating_function"]["numer"],
        serde_json::json!(["0", "0", "1"])
    );

    let text = stdout(&schubkit_stdin(
        &["fit"],
        r#"{"1":"5","2":"5","3":"5","4":"5"}"#,
    ));
    assert!(text.contains("period 1"));
    assert!(text.contains("consistent with data through N = 4"));
}

#[test]
fn replicate_suites_pass() {
    for suite in ["kostka", "sec61"] {
        let out = schubkit(&["replicate", suite]);
        assert!(out.status.success(), "suite {suite}");
        assert!(String::from_utf8_lossy(&out.stdout).contains("all checks passed"));
    }
}

#[test]
fn exit_codes() {
    // argument errors exit 2
    let out = schubkit(&["perm", "code", "not-a-perm"]);
    assert_eq!(out.status.code(), Some(2));
    let out = schubkit(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));

    // computation errors exit 1 and name the module error
    let bad_sequence = r#"{"mu":2,"entries":[{"i":1,"ks":[1],"value":5}]}"#;
    let out = schubkit_stdin(&["ladder", "decode", "132"], bad_sequence);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("LadderSeqError"));

    // malformed system shapes are rejected, not fed to the counter
    let ragged = r#"{"A":[[1,1],[1]],"rhs":[3,1],"lower":[0,0]}"#;
    let out = schubkit_stdin(&["system", "count"], ragged);
    assert_eq!(out.status.code(), Some(2));
}
