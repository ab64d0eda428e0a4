use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use fatk_core::reduction::ReductionTrace;
use fatk_core::syntax::{parse_formula, parse_term};
use serde_json::Value;

fn fatk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fatk"))
        .args(args)
        .env_remove("FATK_FUEL")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn check_verdicts_and_exit_codes() {
    let ok = fatk(&["check", "x:X |- x : X"]);
    assert_eq!(code(&ok), 0);
    assert!(stdout(&ok).starts_with("derivable"));
    assert_eq!(code(&fatk(&["check", "|- c{X} : Y"])), 1);
    assert_eq!(code(&fatk(&["check", "x:X |- x :"])), 2);
}

#[test]
fn check_reads_files_with_comments() {
    let path = scratch(
        "sequents.txt",
        "-- identity\n|- \\x. x : X -> X\n\nx:X, f:X -> Y |- f x : Y -- application\n",
    );
    let o = fatk(&["check", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 2);

    // A malformed line dominates a failing one.
    let mixed = scratch("mixed.txt", "|- c{X} : Y\n|- \\x. : X\n");
    assert_eq!(code(&fatk(&["check", mixed.to_str().unwrap()])), 2);
}

#[test]
fn check_reads_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_fatk"))
        .args(["check", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"x:X |- x : X\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(code(&o), 0);
}

#[test]
fn infer_synthesizes() {
    let o = fatk(&["infer", "f:X -> Y, x:X |- f x"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "Y");
    assert_eq!(code(&fatk(&["infer", "|- \\x. x"])), 1);
}

#[test]
fn normalize_examples() {
    let o = fatk(&["normalize", "(\\x. x) c{X}"]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "c{X}"));

    let o = fatk(&["normalize", "(\\x. x x) (\\x. x x)", "--fuel", "50"]);
    assert_eq!((code(&o), stdout(&o).trim()), (3, "FUEL-EXHAUSTED"));
}

#[test]
fn fuel_defaults_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_fatk"))
        .args(["normalize", "(\\x. \\y. y) c{X} ((\\z. z) c{Y})"])
        .env("FATK_FUEL", "1")
        .output()
        .unwrap();
    assert_eq!((code(&o), stdout(&o).trim()), (3, "FUEL-EXHAUSTED"));
}

#[test]
fn trace_output_replays() {
    let o = fatk(&[
        "normalize",
        "(/\\Z. \\x:Z. x) @X ((\\y. y) c{X})",
        "--trace",
    ]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    let trace: ReductionTrace = serde_json::from_value(v["trace"].clone()).unwrap();
    assert_eq!(trace.steps.len(), 3);
    assert!(trace.validate().is_ok());
    assert_eq!(trace.last(), &parse_term("c{X}").unwrap());
}

#[test]
fn valid_examples() {
    let o = fatk(&["valid", "|- \\x. x : X -> X", "--flavor", "E"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("Certified"), "{}", stdout(&o));

    let o = fatk(&["valid", "|- c{X->Y} : X -> Y", "--base", "X,Y"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("Refuted"));

    let o = fatk(&["valid", "x:X |- x : X", "--flavor", "I"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("Certified"));
}

#[test]
fn valid_rejects_bad_witnesses_and_flavors() {
    let bad = scratch("bad_witnesses.txt", "c{X} : Y\n");
    let o = fatk(&[
        "valid",
        "|- \\x. x : X -> X",
        "--witnesses",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    assert_eq!(
        code(&fatk(&["valid", "|- \\x. x : X -> X", "--flavor", "Q"])),
        2
    );

    let good = scratch("good_witnesses.txt", "\\x:X. x : X -> X\n");
    let o = fatk(&[
        "valid",
        "|- \\f. f : (X -> X) -> X -> X",
        "--witnesses",
        good.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
}

#[test]
fn valid_json_round_trips() {
    let o = fatk(&["valid", "|- c{X -> X} : X -> X", "--base", "X", "--json"]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    let verdict = &v["verdict"];
    assert_eq!(verdict["status"], "Refuted");
    let term = parse_term(verdict["term"].as_str().unwrap()).unwrap();
    assert_eq!(term, parse_term("c{X -> X}").unwrap());
    parse_formula(verdict["formula"].as_str().unwrap()).unwrap();
}

#[test]
fn seeded_runs_are_identical() {
    let args = [
        "valid",
        "|- \\f. \\x. f x : (X -> X) -> X -> X",
        "--seed",
        "7",
        "--json",
    ];
    let a = fatk(&args);
    let b = fatk(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn extract_example() {
    let o = fatk(&["extract", "x:X |- (\\y. y) x : X"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().next(), Some("x"));
    assert_eq!(
        code(&fatk(&[
            "extract",
            "|- (\\x. x x) (\\x. x x) : X",
            "--fuel",
            "20"
        ])),
        3
    );
}

#[test]
fn enumerate_example() {
    let o = fatk(&["enumerate", "X -> X", "--size", "3"]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "\\x. x"));

    // Output is sorted and every line re-parses.
    let o = fatk(&["enumerate", "(X -> X) -> X -> X", "--size", "7"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    let mut sorted = lines.clone();
    sorted.sort();
    assert_eq!(lines, sorted);
    assert!(lines.len() >= 3);
    for l in lines {
        parse_term(l).unwrap();
    }
}

#[test]
fn encode_example() {
    let o = fatk(&["encode", "X & Y"]);
    assert_eq!(
        (code(&o), stdout(&o).trim()),
        (0, "forall Z. ((X -> (Y -> Z)) -> Z)")
    );
    assert_eq!(code(&fatk(&["encode", "X &"])), 2);
}

#[test]
fn unknown_flags_are_rejected() {
    assert_eq!(code(&fatk(&["check", "--bogus", "x:X |- x : X"])), 2);
}
