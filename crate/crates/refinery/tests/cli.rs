//! The command line end to end: exit codes, output formats, diagnostics.

use std::io::Write;

use refinery::cli::run_with;
use refinery::report::parse_json;

const CANONICAL: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/canonical.rfn");

fn run(args: &[&str]) -> (u8, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("refinery").chain(args.iter().copied());
    let code = run_with(argv, false, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn canonical(args: &[&str]) -> (u8, String, String) {
    let mut v = vec!["--spec", CANONICAL];
    v.extend_from_slice(args);
    run(&v)
}

#[test]
fn exhaust_creation_passes() {
    let (code, out, _) =
        canonical(&["check-output", "--abstract", "AnsOp", "--concrete", "ExhaustOp", "--ot", "CopyOT"]);
    assert_eq!(code, 0);
    assert_eq!(out, "check-output: pass\n");
}

#[test]
fn increment_noise_fails_with_witness() {
    let (code, out, _) = canonical(&["noise-check", "--model", "Increment", "--format", "json"]);
    assert_eq!(code, 1);
    assert_eq!(
        out,
        "{\"check\":\"noise-check\",\"verdict\":\"fail\",\"failed_condition\":\"absorption\",\"degree\":null,\
         \"witnesses\":[{\"a\":\"0\",\"x\":\"1\",\"y\":\"1\"}]}\n"
    );
}

#[test]
fn degree_is_exact() {
    let (code, out, _) = canonical(&["degree", "--target", "Result", "--prob", "ML", "--format", "json"]);
    assert_eq!(code, 0);
    assert!(out.contains("\"degree\":\"0.93\""), "{out}");
    let (code, out, _) = canonical(&["degree", "--target", "Result", "--prob", "ML", "--min-degree", "0.94"]);
    assert_eq!(code, 1);
    assert!(out.starts_with("degree: FAIL (degree)\n  degree: 0.93\n"), "{out}");
    let (code, _, err) = canonical(&["degree", "--target", "Result", "--prob", "ML", "--min-degree", "3/2"]);
    assert_eq!(code, 2);
    assert!(err.contains("not a probability"));
}

#[test]
fn exit_code_tracks_the_verdict() {
    let cases: &[(&[&str], u8)] = &[
        (&["search-ot", "--abstract", "RawExhaustOp", "--concrete", "ParityOp"], 1),
        (&["check-abstraction", "--abstract", "RawExhaustOp", "--concrete", "ParityOp"], 0),
        (&["check-data", "--abstract", "Raw", "--concrete", "ML", "--retrieve", "Universal"], 0),
        (&["check-data", "--abstract", "Raw", "--concrete", "ML", "--retrieve", "Identity"], 1),
        (&["check-prob", "--abstract", "RawIgnorance", "--prob", "ML"], 0),
        (&["check-prob", "--abstract", "Result", "--prob", "ML"], 1),
        (&["check-noisy", "--abstract", "Clean", "--concrete", "Noisy", "--model", "Or"], 1),
        (&["check-noisy", "--abstract", "Clean", "--concrete", "Flipped", "--model", "Xor"], 1),
        (&["noise-check", "--model", "Xor"], 0),
        (&["validate"], 0),
    ];
    for (args, expected) in cases {
        let mut json = args.to_vec();
        json.extend(["--format", "json"]);
        let (code, out, err) = canonical(&json);
        assert_eq!(code, *expected, "{args:?}: {err}");
        let report = parse_json(out.trim_end()).unwrap();
        assert_eq!(report.passed(), code == 0);
        assert!(report.is_well_formed());
    }
}

#[test]
fn noisy_sub_verdicts_appear_in_text() {
    let (_, out, _) = canonical(&["check-noisy", "--abstract", "Clean", "--concrete", "Noisy", "--model", "Or"]);
    assert!(out.starts_with("check-noisy: FAIL (oot-functionality)\n"), "{out}");
    assert!(out.contains("note: noise-match holds\n"));
}

#[test]
fn unresolved_names_are_reported() {
    let (code, out, err) =
        canonical(&["check-output", "--abstract", "AnsOp", "--concrete", "Missing", "--ot", "CopyOT"]);
    assert_eq!((code, out.as_str()), (2, ""));
    assert_eq!(err, "error: unknown operation Missing\n");
    let (code, _, err) = canonical(&["noise-check", "--model", "AnsOp"]);
    assert_eq!(code, 2);
    assert!(err.contains("unknown noise model AnsOp"));
}

#[test]
fn usage_and_file_errors_exit_2() {
    assert_eq!(run(&["validate"]).0, 2);
    assert_eq!(run(&["--spec", "/nonexistent/spec.rfn", "validate"]).0, 2);
    assert_eq!(canonical(&["frobnicate"]).0, 2);
    assert_eq!(canonical(&["search-ot", "--abstract", "AnsOp", "--concrete", "ExhaustOp", "--budget", "0"]).0, 2);
    assert_eq!(canonical(&["check-output", "--abstract", "AnsOp"]).0, 2);
    // mismatched frames are an error, not a failed check
    let (code, _, err) =
        canonical(&["check-output", "--abstract", "AnsOp", "--concrete", "ParityOp", "--ot", "CopyOT"]);
    assert_eq!(code, 2);
    assert!(err.contains("same state"), "{err}");
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn budget_exhaustion_is_not_a_failure() {
    let mut spec = tempfile::NamedTempFile::new().unwrap();
    write!(
        spec,
        "type U {{ u }}\ntype S {{ a b }}\ntype F {{ a b c d e }}\n\
         op A {{ state s:U out x:S trans {{ s=u -> s'=u, x=a }} }}\n\
         op C {{ state s:U out y:F trans {{ s=u -> s'=u, y=e }} }}\n"
    )
    .unwrap();
    let path = spec.path().to_str().unwrap();
    let (code, _, err) = run(&["--spec", path, "search-ot", "--abstract", "A", "--concrete", "C", "--budget", "1"]);
    assert_eq!(code, 2);
    assert_eq!(err, "unknown: transformer search budget exhausted after 1 candidates\n");
    let (code, _, _) = run(&["--spec", path, "search-ot", "--abstract", "A", "--concrete", "C"]);
    assert_eq!(code, 0);
}

#[test]
fn parse_errors_carry_positions() {
    let mut spec = tempfile::NamedTempFile::new().unwrap();
    write!(spec, "type A {{ x }}\nop O {{ state s:Digit trans {{ }} }}\n").unwrap();
    let path = spec.path().to_str().unwrap();
    let (code, out, err) = run(&["--spec", path, "validate"]);
    assert_eq!((code, out.as_str()), (2, ""));
    assert_eq!(err, format!("{path}:2:16: error: unknown type Digit\n"));

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    bad.write_all(b"type A { \xc3 }").unwrap();
    let (code, _, err) = run(&["--spec", bad.path().to_str().unwrap(), "validate"]);
    assert_eq!(code, 2);
    assert!(err.contains("1:10: error: spec is not valid UTF-8"), "{err}");
}

#[test]
fn output_is_deterministic() {
    for format in ["text", "json"] {
        let args =
            ["check-data", "--abstract", "Raw", "--concrete", "ML", "--retrieve", "Identity", "--format", format];
        assert_eq!(canonical(&args), canonical(&args));
        let args = ["search-ot", "--abstract", "AnsOp", "--concrete", "ExhaustOp", "--format", format];
        assert_eq!(canonical(&args), canonical(&args));
    }
}

#[test]
fn color_only_in_text_mode() {
    let argv = ["refinery", "--spec", CANONICAL, "noise-check", "--model", "Increment"];
    let (mut out, mut err) = (Vec::new(), Vec::new());
    run_with(argv, true, &mut out, &mut err);
    assert!(String::from_utf8_lossy(&out).contains("\x1b[31m"));
    let mut json = Vec::new();
    run_with(argv.iter().chain(&["--format", "json"]), true, &mut json, &mut err);
    assert!(!String::from_utf8_lossy(&json).contains('\x1b'));
}
