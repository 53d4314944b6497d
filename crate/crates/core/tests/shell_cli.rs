use std::path::Path;
use std::process::Command;

use coxfock::linalg::max_abs;
use coxfock::shell::{self, GenParams, Kind, QField, ScenarioSpec};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coxfock"))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn numbers(report: &shell::Report) -> Vec<(String, u64)> {
    report.certificates.iter().map(|c| (c.label.clone(), c.value.to_bits())).collect()
}

#[test]
fn generated_specs_round_trip_through_toml() {
    for kind in Kind::ALL {
        for seed in 0..4u64 {
            let spec = shell::gen_random(kind, seed, &GenParams::default()).unwrap();
            let text = spec.to_toml().unwrap();
            assert_eq!(ScenarioSpec::from_toml(&text).unwrap(), spec, "{kind} seed {seed}");
        }
    }
}

#[test]
fn generation_is_deterministic_and_bounded() {
    let params = GenParams { d: Some(2), bound: Some(0.9), ..GenParams::default() };
    let a = shell::gen_random(Kind::Fock, 7, &params).unwrap();
    let b = shell::gen_random(Kind::Fock, 7, &params).unwrap();
    assert_eq!(a, b);
    for seed in 0..20u64 {
        let q = shell::random_hermitian_q(seed, 3, 0.7);
        assert!(max_abs(&(&q - q.adjoint())) == 0.0);
        assert!(max_abs(&q) <= 0.7 + 1e-15);
    }
}

#[test]
fn runs_are_bit_identical() {
    for kind in Kind::ALL {
        let spec = shell::gen_random(kind, 5, &GenParams { trials: Some(3), ..GenParams::default() }).unwrap();
        let first = shell::run(&spec);
        let second = shell::run(&spec);
        assert_eq!(numbers(&first), numbers(&second), "{kind}");
        assert_eq!(first.verdict, second.verdict);
    }
}

#[test]
fn every_generated_kind_passes() {
    for kind in Kind::ALL {
        let spec = shell::gen_random(kind, 1, &GenParams { trials: Some(4), ..GenParams::default() }).unwrap();
        let report = shell::run(&spec);
        assert!(report.passed(), "{}", report.to_text());
        assert_eq!(shell::exit_code(&report), 0);
    }
}

#[test]
fn minimal_fock_spec_is_the_free_scene() {
    let spec = ScenarioSpec::from_toml("kind = \"fock\"\nd = 2\nq = \"zeros\"\n").unwrap();
    assert_eq!(spec.levels, shell::DEFAULT_LEVELS);
    assert_eq!(spec.seed, 0);
    assert!(matches!(spec.q, Some(QField::Keyword(_))));
    assert_eq!(spec.deformation().unwrap().norm(), 0.0);
    assert!(shell::run(&spec).passed());
}

#[test]
fn non_hermitian_q_names_the_invariant() {
    let text = "kind = \"fock\"\n[q]\nre = [[0.0, 0.5], [0.2, 0.0]]\n";
    let err = ScenarioSpec::from_toml(text).unwrap_err().to_string();
    assert!(err.to_lowercase().contains("hermitian"), "{err}");
}

#[test]
fn named_group_positivity_uses_scalar_family() {
    let spec = ScenarioSpec::from_toml("kind = \"positivity\"\ngroup = \"A3\"\n").unwrap();
    let report = shell::run(&spec);
    assert!(report.passed(), "{}", report.to_text());
    assert_eq!(report.observations["order"], "24");
    assert!(report.observations["family"].starts_with("scalar"));
}

#[test]
fn wick_word_moment_from_both_routes() {
    let spec = ScenarioSpec::from_toml("kind = \"wick\"\nword = [1, 1, 1, 1]\n[q]\nre = [[0.3]]\n").unwrap();
    let report = shell::run(&spec);
    assert!(report.passed());
    for key in ["moment_diagram", "moment_matrix"] {
        let v: f64 = report.observations[key].parse().unwrap();
        assert!((v - 2.3).abs() < 1e-12, "{key} = {v}");
    }
}

#[test]
fn coxeter_a2_summary() {
    let spec = ScenarioSpec::from_toml("kind = \"coxeter\"\ngroup = \"A2\"\n").unwrap();
    let report = shell::run(&spec);
    assert!(report.passed());
    assert_eq!(report.observations["order"], "6");
    assert_eq!(report.observations["longest_length"], "3");
}

#[test]
fn opspace_without_trials_passes_vacuously() {
    let mut spec = shell::gen_random(Kind::Opspace, 2, &GenParams::default()).unwrap();
    spec.trials = Some(0);
    let report = shell::run(&spec);
    assert!(report.passed());
    assert!(!report.certificates.iter().any(|c| c.label.starts_with("sandwich trial")));
}

#[test]
fn generated_opspace_with_three_fields_passes() {
    let params = GenParams { m: Some(3), ..GenParams::default() };
    let spec = shell::gen_random(Kind::Opspace, 1, &params).unwrap();
    let report = shell::run(&spec);
    assert!(report.passed(), "{}", report.to_text());
}

#[test]
fn structured_report_parses_back() {
    let spec = shell::gen_random(Kind::Coxeter, 0, &GenParams::default()).unwrap();
    let report = shell::run(&spec);
    let json = report.to_json().unwrap();
    let back: shell::Report = serde_json::from_str(&json).unwrap();
    assert_eq!(back.verdict, report.verdict);
    assert_eq!(back.scenario, spec);
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let pass = write(dir.path(), "pass.toml", "kind = \"coxeter\"\ngroup = \"A2\"\n");
    let fail = write(dir.path(), "fail.toml", "kind = \"blocklength\"\ngroup = \"A2\"\nscalar = -1.0\n");
    let broken = write(dir.path(), "broken.toml", "kind = \"fock\"\nq = [[1]]\n");

    let status = |args: &[&str]| bin().args(args).output().unwrap().status.code().unwrap();
    assert_eq!(status(&["coxeter", "--spec", &pass]), 0);
    assert_eq!(status(&["blocklength", "--spec", &fail]), 1);
    assert_eq!(status(&["fock", "--spec", &broken]), 2);
    assert_eq!(status(&["fock", "--spec", &pass]), 2);
    assert_eq!(status(&["coxeter", "--spec", "/nonexistent/scenario.toml"]), 2);
    assert_eq!(status(&["gen", "nonsense"]), 2);
}

#[test]
fn cli_gen_then_run_with_out_and_structured_format() {
    let dir = tempfile::tempdir().unwrap();
    let spec_path = dir.path().join("fock.toml");
    let report_path = dir.path().join("report.json");
    let out = bin()
        .args(["gen", "fock", "--d", "2", "--bound", "0.8", "--seed", "9", "--out"])
        .arg(&spec_path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let out = bin()
        .args(["fock", "--format", "structured", "--levels", "3", "--spec"])
        .arg(&spec_path)
        .arg("--out")
        .arg(&report_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: shell::Report = serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert!(report.passed());
    assert_eq!(report.scenario.levels, 3);
    assert_eq!(report.scenario.seed, 9);
}
