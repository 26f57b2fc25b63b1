mod common;

use std::fs;

use c2alg::complexes::{sign_sphere, MackeyComplex};
use c2alg::mackey::MackeyFunctor;
use c2alg_cli::job::{emit, resolve_trunc, run, validate, Command, JobSpec, Options};
use c2alg_cli::schema::{complex_value, mackey_value};
use c2alg_cli::{parse_input, parse_job, JobError, Parsed};
use common::{golden_path, run_bin, run_case, CASES};

/// Set UPDATE_GOLDEN=1 to rewrite the files after an intended change.
#[test]
fn golden_outputs() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for c in CASES {
        let out = run_case(c);
        assert!(out.status.success(), "{} exited with {:?}: {}", c.name, out.status, String::from_utf8_lossy(&out.stderr));
        let path = golden_path(c.name);
        if update {
            fs::write(&path, &out.stdout).unwrap();
            continue;
        }
        let want = fs::read(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
        assert_eq!(String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&want), "golden {}", c.name);
    }
}

#[test]
fn spec_examples() {
    let out = run_bin(&["slice-check", "--complex", "tests/inputs/ssigma_neg.json", "--n", "-1"], None);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("regular-slice (-1)-connective: true\n"));
    let out = run_bin(&["mackey-show", "--functor", "tests/inputs/z_minus.json"], None);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("0 / Z\n"));
    assert!(text.contains("sigma = [-1]"));
    let out = run_bin(&["mackey-show", "--functor", "tests/inputs/constant_z.json"], None);
    assert!(String::from_utf8(out.stdout).unwrap().contains("tr = [2]"));
}

fn exit_code(args: &[&str]) -> (i32, String) {
    let out = run_bin(args, None);
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn parse_errors_exit_with_two() {
    let (code, err) = exit_code(&["cotangent", "--algebra", "tests/inputs/not_stable.json"]);
    assert_eq!(code, 2);
    assert!(err.contains("rels[0]") && err.contains("y - x"), "{}", err);
    let (code, err) = exit_code(&["hh", "--algebra", r#"{"base": "R", "gens": []}"#]);
    assert_eq!(code, 2);
    assert!(err.contains("base"), "{}", err);
    let (code, err) = exit_code(&["mackey-show", "--functor", r#"{"fixed": [0], "underlying": [0], "res": [[1]], "tr": [[2]], "sigma": [[1]], "extra": 1}"#]);
    assert_eq!(code, 2);
    assert!(err.contains("unknown field 'extra'"), "{}", err);
    let (code, _) = exit_code(&["mackey-show", "--functor", "tests/inputs/missing.json"]);
    assert_eq!(code, 2);
    let (code, err) = exit_code(&["mackey-show", "--functor", "{\"fixed\": [0],\n \"underlying\": }"]);
    assert_eq!(code, 2);
    assert!(err.contains("line 2"), "{}", err);
    // an invalid Lewis diagram is a schema violation
    let (code, err) = exit_code(&["mackey-show", "--functor", r#"{"fixed": [0], "underlying": [0], "res": [[1]], "tr": [[1]], "sigma": [[1]]}"#]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());
    let (code, _) = exit_code(&["slice-check", "--complex", "tests/inputs/ssigma_neg.json"]);
    assert_eq!(code, 2);
    let (code, _) = exit_code(&["hh", "--algebra", "tests/inputs/kx.json", "--nmax", "40"]);
    assert_eq!(code, 2);
}

#[test]
fn domain_errors_exit_with_one() {
    let (code, err) = exit_code(&["dihedral", "--algebra", "tests/inputs/kx.json"]);
    assert_eq!(code, 1);
    assert!(err.contains("2 is not invertible"), "{}", err);
    let (code, err) = exit_code(&["derham", "--algebra", "tests/inputs/hyperelliptic.json"]);
    assert_eq!(code, 1);
    assert!(err.contains("not free"), "{}", err);
    let (code, _) = exit_code(&["hr-gr", "--algebra", "tests/inputs/hyperelliptic.json", "--i", "1"]);
    assert_eq!(code, 1);
    let (code, _) = exit_code(&["slice-check", "--complex", r#"{"terms": {"0": {"builtin": "Z_-"}}}"#, "--n", "0"]);
    assert_eq!(code, 1);
}

#[test]
fn truncation_precedence() {
    let env = run_bin(&["hh", "--algebra", "tests/inputs/kx.json"], Some("3"));
    let flag = run_bin(&["hh", "--algebra", "tests/inputs/kx.json", "--trunc", "3"], None);
    let both = run_bin(&["hh", "--algebra", "tests/inputs/kx.json", "--trunc", "3"], Some("5"));
    let default = run_bin(&["hh", "--algebra", "tests/inputs/kx.json"], None);
    let eight = run_bin(&["hh", "--algebra", "tests/inputs/kx.json", "--trunc", "8"], None);
    assert_eq!(env.stdout, flag.stdout);
    assert_eq!(both.stdout, flag.stdout);
    assert_eq!(default.stdout, eight.stdout);
    assert_ne!(default.stdout, flag.stdout);
    let bad = run_bin(&["hh", "--algebra", "tests/inputs/kx.json"], Some("many"));
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(resolve_trunc(None, None).unwrap(), 8);
    assert_eq!(resolve_trunc(None, Some("5")).unwrap(), 5);
    assert_eq!(resolve_trunc(Some(2), Some("5")).unwrap(), 2);
}

#[test]
fn job_specs_are_validated_before_dispatch() {
    let job = |text: &str| parse_job(text);
    assert!(matches!(job(r#"{"command": "hh", "input": "x.json", "colour": 1}"#), Err(JobError::Parse(_))));
    assert!(matches!(job(r#"{"command": "hh", "options": {"depth": 3}}"#), Err(JobError::Parse(_))));
    assert!(matches!(job(r#"{"command": "integrate"}"#), Err(JobError::Parse(_))));
    // a missing input file is never opened when options are invalid
    let spec = job(r#"{"command": "hh", "input": "does/not/exist.json", "options": {"i": 1}}"#).unwrap();
    let err = run(&spec, None).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("options.i"), "{}", err);
    let spec = JobSpec { command: Command::TambaraFree, input: None, options: Options::default() };
    assert!(validate(&spec).unwrap_err().to_string().contains("kind"));
    let spec = job(r#"{"command": "tambara-free", "options": {"kind": "free", "base": "Z/4", "trunc": 4}}"#).unwrap();
    assert!(run(&spec, None).unwrap().contains("t_1*t_1 = t_2 + 2*x_N"));
}

#[test]
fn job_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("a.json");
    fs::write(&input, r#"{"base": "Q", "gens": [{"name": "x", "sigma": "x"}]}"#).unwrap();
    let spec = dir.path().join("job.json");
    let text = format!(r#"{{"command": "dihedral", "input": "{}", "options": {{"nmax": 2, "trunc": 2}}}}"#, input.display());
    fs::write(&spec, &text).unwrap();
    let from_file = run_bin(&["job", spec.to_str().unwrap()], None);
    let direct = run_bin(&["dihedral", "--algebra", input.to_str().unwrap(), "--nmax", "2", "--trunc", "2"], None);
    assert!(from_file.status.success());
    assert_eq!(from_file.stdout, direct.stdout);
    let spec: JobSpec = parse_job(&text).unwrap();
    let again: JobSpec = parse_job(&serde_json::to_string(&spec).unwrap()).unwrap();
    assert_eq!(spec, again);
}

fn round_trip(text: &str) {
    let first = emit(&parse_input(text).unwrap());
    let second = emit(&parse_input(&first.to_string()).unwrap());
    assert_eq!(first, second, "{}", text);
}

#[test]
fn emit_then_parse_is_identity() {
    for f in fs::read_dir(common::manifest_dir().join("tests/inputs")).unwrap() {
        let path = f.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        if text.contains("\"command\"") || path.ends_with("not_stable.json") {
            continue;
        }
        round_trip(&text);
    }
    let functors = [
        MackeyFunctor::burnside(),
        MackeyFunctor::burnside().box_product(&MackeyFunctor::z_minus()),
        MackeyFunctor::free_orbit().direct_sum(&MackeyFunctor::constant(&c2alg::FgAbGroup::cyclic(4))),
        MackeyFunctor::constant_z().linear_dual().unwrap(),
        MackeyFunctor::zero(),
    ];
    for m in &functors {
        round_trip(&mackey_value(m).to_string());
        match parse_input(&mackey_value(m).to_string()).unwrap() {
            Parsed::Mackey(back) => assert!(back.is_isomorphic(m)),
            _ => panic!("not a functor"),
        }
    }
    for c in [sign_sphere(2), sign_sphere(-2), MackeyComplex::concentrated(MackeyFunctor::burnside(), 3)] {
        let v = complex_value(&c);
        round_trip(&v.to_string());
        match parse_input(&v.to_string()).unwrap() {
            Parsed::Complex(back) => {
                for n in -3..=3 {
                    assert!(back.homology(n).is_isomorphic(&c.homology(n)));
                }
            }
            _ => panic!("not a complex"),
        }
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    for c in CASES.iter().filter(|c| c.name.ends_with("json")) {
        assert_eq!(run_case(c).stdout, run_case(c).stdout, "{}", c.name);
    }
}

#[test]
fn usage_errors_exit_with_two() {
    let (code, _) = exit_code(&["frobnicate"]);
    assert_eq!(code, 2);
    let (code, _) = exit_code(&["hh"]);
    assert_eq!(code, 2);
}
