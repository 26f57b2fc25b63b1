#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub trunc_env: Option<&'static str>,
}

const fn case(name: &'static str, args: &'static [&'static str]) -> Case {
    Case { name, args, trunc_env: None }
}

/// Every golden file and the invocation that produces it.
pub const CASES: &[Case] = &[
    case("mackey_show_z", &["mackey-show", "--functor", "tests/inputs/constant_z.json"]),
    case("mackey_show_z_minus", &["mackey-show", "--functor", "tests/inputs/z_minus.json"]),
    case("mackey_show_z_minus_json", &["mackey-show", "--functor", "tests/inputs/z_minus.json", "--format", "json"]),
    case("mackey_show_zero", &["mackey-show", "--functor", r#"{"builtin": "0"}"#]),
    case("box_free_orbit_sign", &["box", "--left", r#"{"builtin": "Z[C2]"}"#, "--right", "tests/inputs/z_minus.json"]),
    case("box_burnside_z_json", &["box", "--left", r#"{"builtin": "A"}"#, "--right", "tests/inputs/constant_z.json", "--format", "json"]),
    case("phi_burnside", &["phi", "--functor", r#"{"builtin": "A"}"#]),
    case("phi_sign_sphere_2", &["phi", "--complex", r#"{"sign_sphere": 2}"#]),
    case("slice_check_ssigma_neg", &["slice-check", "--complex", "tests/inputs/ssigma_neg.json", "--n", "-1"]),
    case("slice_check_circle_json", &["slice-check", "--complex", "tests/inputs/circle_dual.json", "--n", "0", "--format", "json"]),
    case("tambara_free_free", &["tambara-free", "--kind", "free", "--trunc", "8"]),
    case("tambara_free_trivial_json", &["tambara-free", "--kind", "trivial", "--trunc", "4", "--format", "json"]),
    case("cotangent_kx", &["cotangent", "--algebra", "tests/inputs/kx.json"]),
    case("cotangent_kxx", &["cotangent", "--algebra", "tests/inputs/kxx.json"]),
    case("cotangent_hyperelliptic", &["cotangent", "--algebra", "tests/inputs/hyperelliptic.json"]),
    case("cotangent_hyperelliptic_json", &["cotangent", "--algebra", "tests/inputs/hyperelliptic.json", "--format", "json"]),
    case("derham_kx", &["derham", "--algebra", "tests/inputs/kx.json"]),
    case("derham_kxx_json", &["derham", "--algebra", "tests/inputs/kxx.json", "--imax", "2", "--weight-max", "3", "--format", "json"]),
    case("hr_gr_kx_1", &["hr-gr", "--algebra", "tests/inputs/kx.json", "--i", "1"]),
    case("hr_gr_kxx_2", &["hr-gr", "--algebra", "tests/inputs/kxx.json", "--i", "2", "--weight-max", "4"]),
    case("hr_gr_kxx_1_json", &["hr-gr", "--algebra", "tests/inputs/kxx.json", "--i", "1", "--weight-max", "2", "--format", "json"]),
    case("hh_dual_numbers", &["hh", "--algebra", "tests/inputs/dual_numbers.json", "--trunc", "6"]),
    case("hh_gaussian", &["hh", "--algebra", "tests/inputs/gaussian.json"]),
    Case { name: "hh_kx_env_trunc", args: &["hh", "--algebra", "tests/inputs/kx.json"], trunc_env: Some("3") },
    case("dihedral_q", &["dihedral", "--algebra", "tests/inputs/q.json", "--nmax", "4"]),
    case("dihedral_qx_json", &["dihedral", "--algebra", "tests/inputs/qx.json", "--trunc", "3", "--format", "json"]),
    case("job_hh", &["job", "tests/inputs/job_hh.json"]),
];

pub fn manifest_dir() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

pub fn golden_path(name: &str) -> PathBuf {
    manifest_dir().join("tests/golden").join(format!("{}.txt", name))
}

/// Runs the binary from the crate directory with a clean MACKEY_TRUNC.
pub fn run_bin(args: &[&str], trunc_env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_c2alg"));
    cmd.current_dir(manifest_dir()).args(args).env_remove("MACKEY_TRUNC");
    if let Some(t) = trunc_env {
        cmd.env("MACKEY_TRUNC", t);
    }
    cmd.output().expect("binary runs")
}

pub fn run_case(c: &Case) -> Output {
    run_bin(c.args, c.trunc_env)
}
