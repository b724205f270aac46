mod common;

use std::fs;

use common::{fixture, read_fixture};
use statebdd::cli::run;

struct Output {
    status: i32,
    stdout: String,
    stderr: String,
}

fn cli(args: &[&str]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let status = run(
        std::iter::once("statebdd").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    Output {
        status,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn path(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

#[test]
fn validate_seminar() {
    let o = cli(&["validate", &path("seminar.scdl")]);
    assert_eq!(o.status, 0);
    assert_eq!(o.stdout, "0 errors, 0 warnings\n");
    assert_eq!(cli(&["validate", &path("seminar.xmi")]).stdout, o.stdout);
}

#[test]
fn validate_invalid_exits_2() {
    for name in [
        "invalid/no_initial.xmi",
        "invalid/multi_initial.xmi",
        "invalid/final_outgoing.scdl",
        "invalid/empty_event.scdl",
        "invalid/duplicate_transition.scdl",
        "invalid/initial_incoming.scdl",
        "invalid/unsupported_nesting.xmi",
    ] {
        let o = cli(&["validate", &path(name)]);
        assert_eq!(o.status, 2, "{name}: {}{}", o.stdout, o.stderr);
    }
    let o = cli(&["validate", &path("invalid/final_outgoing.scdl")]);
    assert!(o.stdout.contains("E_FINAL_OUTGOING"));
    assert!(o.stdout.ends_with("1 error, 0 warnings\n"));
}

#[test]
fn gen_on_invalid_model_exits_2_with_line() {
    let o = cli(&["gen", "feature", &path("invalid/final_outgoing.scdl")]);
    assert_eq!(o.status, 2);
    assert!(o.stdout.is_empty());
    assert!(
        o.stderr.contains("E_FINAL_OUTGOING (line 7)"),
        "{}",
        o.stderr
    );
}

#[test]
fn gen_feature_matches_golden() {
    let golden = read_fixture("seminar.feature");
    for input in ["seminar.scdl", "seminar.xmi", "seminar.feature"] {
        let o = cli(&["gen", "feature", &path(input)]);
        assert_eq!(
            (o.status, o.stdout.as_str()),
            (0, golden.as_str()),
            "{input}"
        );
    }
}

#[test]
fn gen_xmi_and_scdl_match_fixtures() {
    assert_eq!(
        cli(&["gen", "xmi", &path("seminar.feature")]).stdout,
        read_fixture("seminar.xmi")
    );
    assert_eq!(
        cli(&["gen", "xmi", &path("seminar.scdl")]).stdout,
        read_fixture("seminar.xmi")
    );
    assert_eq!(
        cli(&["gen", "scdl", &path("seminar.feature")]).stdout,
        read_fixture("seminar.scdl")
    );
    assert_eq!(
        cli(&["gen", "scdl", &path("seminar.xmi")]).stdout,
        read_fixture("seminar.scdl")
    );
}

#[test]
fn feature_to_xmi_to_feature_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let xmi = dir.path().join("seminar.xmi");
    let o = cli(&[
        "gen",
        "xmi",
        &path("seminar.feature"),
        "-o",
        xmi.to_str().unwrap(),
    ]);
    assert_eq!(o.status, 0);
    let back = cli(&["gen", "feature", xmi.to_str().unwrap()]);
    assert_eq!(back.stdout, read_fixture("seminar.feature"));
}

#[test]
fn output_file_equals_stdout() {
    let dir = tempfile::tempdir().unwrap();
    for target in ["feature", "paths", "dot", "xmi", "scdl"] {
        let out = dir.path().join(format!("out.{target}"));
        let to_file = cli(&[
            "gen",
            target,
            &path("seminar.scdl"),
            "-o",
            out.to_str().unwrap(),
        ]);
        assert_eq!(to_file.status, 0);
        assert!(to_file.stdout.is_empty());
        let to_stdout = cli(&["gen", target, &path("seminar.scdl")]);
        assert_eq!(
            fs::read_to_string(&out).unwrap(),
            to_stdout.stdout,
            "{target}"
        );
    }
}

#[test]
fn gen_is_deterministic() {
    for target in ["feature", "paths", "dot", "xmi", "scdl"] {
        let a = cli(&["gen", target, &path("seminar.xmi")]).stdout;
        let b = cli(&["gen", target, &path("seminar.xmi")]).stdout;
        assert_eq!(a, b);
    }
}

#[test]
fn gen_paths_respects_max_len() {
    let o = cli(&["gen", "paths", &path("seminar.scdl")]);
    assert_eq!(o.stdout.matches("Scenario: Path:").count(), 3);
    let o = cli(&["gen", "paths", &path("seminar.scdl"), "--max-len", "1"]);
    assert_eq!(o.stdout.matches("Scenario: ").count(), 1);
    assert!(o.stdout.contains("Scenario: Path: initial -> Proposed\n"));
    let o = cli(&["gen", "paths", &path("seminar.scdl"), "--max-len", "0"]);
    assert_eq!(o.status, 1);
    assert!(o.stderr.contains("E_INVALID_ARGUMENT"));
}

#[test]
fn gen_dot_highlight_by_name_or_id() {
    let by_name = cli(&[
        "gen",
        "dot",
        &path("seminar.scdl"),
        "--highlight",
        "Scheduled",
    ]);
    let by_id = cli(&[
        "gen",
        "dot",
        &path("seminar.scdl"),
        "--highlight",
        "scheduled",
    ]);
    assert_eq!(by_name.status, 0);
    assert_eq!(by_name.stdout, by_id.stdout);
    let highlighted: Vec<&str> = by_name
        .stdout
        .lines()
        .filter(|l| l.contains("class=\"current\""))
        .collect();
    assert_eq!(highlighted.len(), 1);
    assert!(highlighted[0].starts_with("  \"scheduled\""));
    let o = cli(&[
        "gen",
        "dot",
        &path("seminar.scdl"),
        "--highlight",
        "Nowhere",
    ]);
    assert_eq!(o.status, 1);
    assert!(o.stderr.contains("E_UNKNOWN_STATE"));
}

#[test]
fn format_override() {
    let dir = tempfile::tempdir().unwrap();
    let odd = dir.path().join("seminar.txt");
    fs::copy(fixture("seminar.scdl"), &odd).unwrap();
    let o = cli(&["validate", odd.to_str().unwrap()]);
    assert_eq!(o.status, 1);
    assert!(o.stderr.contains("--format"));
    let o = cli(&["validate", odd.to_str().unwrap(), "--format", "scdl"]);
    assert_eq!(o.status, 0);
    let o = cli(&["validate", odd.to_str().unwrap(), "--format", "bpmn"]);
    assert_eq!(o.status, 1);
}

#[test]
fn io_and_parse_errors_exit_1() {
    let o = cli(&["validate", "/definitely/not/here.scdl"]);
    assert_eq!(o.status, 1);
    assert!(o.stderr.contains("E_IO"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.scdl");
    fs::write(
        &bad,
        "statechart \"X\" subject \"x\"\nstate A\ninitial -> A on \"go\"\n",
    )
    .unwrap();
    let o = cli(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.status, 1);
    assert!(o.stderr.contains("E_SCDL_SYNTAX (line 3)"), "{}", o.stderr);

    let bad = dir.path().join("bad.feature");
    fs::write(&bad, "Process: X\nSubject: x\n\nScenario: s\n  WHEN go\n").unwrap();
    let o = cli(&["gen", "xmi", bad.to_str().unwrap()]);
    assert_eq!(o.status, 1);
    assert!(o.stderr.contains("line 5"), "{}", o.stderr);
}

#[test]
fn usage_errors() {
    assert_eq!(cli(&["frobnicate"]).status, 1);
    assert_eq!(cli(&["gen"]).status, 1);
    let help = cli(&["--help"]);
    assert_eq!(help.status, 0);
    for sub in ["validate", "gen", "serve"] {
        assert!(help.stdout.contains(sub));
    }
    let gen_help = cli(&["gen", "--help"]);
    for sub in ["feature", "paths", "dot", "xmi", "scdl"] {
        assert!(gen_help.stdout.contains(sub));
    }
}

#[test]
fn serve_rejects_invalid_model_before_binding() {
    let o = cli(&[
        "serve",
        &path("invalid/empty_event.scdl"),
        "--addr",
        "127.0.0.1:0",
    ]);
    assert_eq!(o.status, 2);
    let o = cli(&["serve", &path("seminar.scdl"), "--addr", "not-an-address"]);
    assert_eq!(o.status, 1);
}
