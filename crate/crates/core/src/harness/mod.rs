//! Document loading, check dispatch and reports behind the `l0mod` binary.

pub mod checks;
pub mod document;
pub mod report;

pub use checks::{run_check, run_checks, RunConfig};
pub use document::{CheckKind, CheckSpec, Document, Loaded, CHECK_KINDS, FORMAT_VERSION};
pub use report::{emit_report, CheckReport, Format, Report, Verdict};

/// Runs every check in the document, or only those of kind `name`.
pub fn report(loaded: &Loaded, name: Option<&str>, config: &RunConfig) -> Report {
    let checks = loaded
        .document
        .checks
        .iter()
        .filter(|c| name.is_none_or(|n| c.kind.name() == n));
    Report::new(config.tolerance, config.seed, run_checks(loaded, checks, config))
}

fn synthetic(id: String, kind: CheckKind) -> CheckSpec {
    CheckSpec {
        id,
        kind,
        tolerance: None,
        seed: None,
    }
}

/// Validates every system and system morphism in the document.
pub fn validate_all(loaded: &Loaded, config: &RunConfig) -> Report {
    let specs: Vec<CheckSpec> = loaded
        .systems
        .keys()
        .chain(loaded.system_morphisms.keys())
        .map(|id| {
            synthetic(
                format!("validate:{id}"),
                CheckKind::ValidateSystem { system: id.clone() },
            )
        })
        .collect();
    Report::new(config.tolerance, config.seed, run_checks(loaded, &specs, config))
}

/// Computes the limit of every system of the given variance, or of `only`.
pub fn limits(
    loaded: &Loaded,
    variance: crate::system::Variance,
    only: Option<&str>,
    config: &RunConfig,
) -> Report {
    use crate::system::Variance;
    let specs: Vec<CheckSpec> = loaded
        .systems
        .iter()
        .filter(|(id, s)| only.map_or(s.variance() == variance, |o| o == id.as_str()))
        .map(|(id, _)| {
            let system = id.clone();
            let kind = match variance {
                Variance::Direct => CheckKind::DirectLimit {
                    system,
                    expect_dims: None,
                },
                Variance::Inverse => CheckKind::InverseLimit {
                    system,
                    expect_dims: None,
                },
            };
            synthetic(format!("limit:{id}"), kind)
        })
        .collect();
    Report::new(config.tolerance, config.seed, run_checks(loaded, &specs, config))
}
