//! Scenario documents, pipelines and reports behind the `coxfock` binary.
//!
//! A scenario is a TOML document naming a `kind` plus the data that kind
//! needs; [`run`] turns it into a [`Report`] whose verdict is pass exactly
//! when every certificate passes.

mod gen;
mod report;
mod run;
mod scenario;

pub use gen::{gen_random, random_hermitian_q, GenParams};
pub use report::{Format, Report, ReportError, Verdict, VERSION};
pub use run::{fock_family, run, DEFAULT_AUX_DIM, DEFAULT_SCALAR, DEFAULT_TRIALS};
pub use scenario::{parse_spec, ComplexRows, GroupSpec, Kind, QField, ScenarioSpec, DEFAULT_LEVELS};

/// Process exit status for a finished report.
pub fn exit_code(report: &Report) -> i32 {
    if report.passed() {
        0
    } else if report.error.as_ref().is_some_and(|e| is_input_code(&e.code)) {
        2
    } else {
        1
    }
}

fn is_input_code(code: &str) -> bool {
    matches!(code, "parse" | "invalid_scenario" | "io")
}
