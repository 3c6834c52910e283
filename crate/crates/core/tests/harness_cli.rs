mod common;

use std::process::{Command, Output};

use common::fixture;
use l0mod::harness::{self, emit_report, Document, Format, Loaded, RunConfig, Verdict};

const POSITIVE: [&str; 6] = [
    "remark-faithful.json",
    "harmonic-inverse.json",
    "scaling-surjectivity.json",
    "fg-presentation.json",
    "sections-product.json",
    "pullback-commute.json",
];
const NEGATIVE: [&str; 2] = [
    "negative/injected-cocycle.json",
    "negative/injected-noncontractive.json",
];

fn l0mod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_l0mod"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

#[test]
fn fixtures_round_trip_byte_identically() {
    for name in POSITIVE.iter().chain(&NEGATIVE) {
        let bytes = std::fs::read_to_string(fixture(name)).unwrap();
        let doc = Document::read(fixture(name)).unwrap();
        assert_eq!(doc.to_json(), bytes, "{name}");
    }
}

#[test]
fn positive_fixtures_pass() {
    for name in POSITIVE {
        let loaded = Loaded::load(fixture(name)).unwrap();
        let r = harness::report(&loaded, None, &RunConfig::default());
        assert!(!r.checks.is_empty(), "{name}");
        for c in &r.checks {
            assert_eq!(c.verdict, Verdict::Pass, "{name}: {} {}", c.id, c.summary);
        }
    }
}

#[test]
fn negative_fixtures_fail_with_witnesses() {
    let expect = ["cocycle law at (0, 1, 2)", "operator norm 2 at atom x"];
    for (name, needle) in NEGATIVE.iter().zip(expect) {
        let loaded = Loaded::load(fixture(name)).unwrap();
        let r = harness::report(&loaded, None, &RunConfig::default());
        assert_eq!(r.exit_code(), 1, "{name}");
        let failed: Vec<_> = r.checks.iter().filter(|c| c.verdict == Verdict::Fail).collect();
        assert!(!failed.is_empty());
        assert!(failed.iter().all(|c| !c.witnesses.is_empty()));
        assert!(
            failed.iter().any(|c| c.summary.contains(needle)),
            "{name}: {:?}",
            failed[0].summary
        );
    }
}

#[test]
fn exit_codes() {
    assert_eq!(
        l0mod(&["report", &path("remark-faithful.json")]).status.code(),
        Some(0)
    );
    assert_eq!(
        l0mod(&["report", &path("negative/injected-cocycle.json")])
            .status
            .code(),
        Some(1)
    );
    let missing = l0mod(&["report", "/nonexistent/doc.json"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(!missing.stderr.is_empty());
    let unknown = l0mod(&["check", "--name", "no-such-kind", &path("remark-faithful.json")]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn check_subcommand_filters_by_kind() {
    let out = l0mod(&["check", "--name", "sections-iso", &path("sections-product.json")]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().skip(1).all(|l| l.contains("[sections-iso]")));
    assert!(text.lines().count() > 1);
}

#[test]
fn limit_and_validate_subcommands() {
    let out = l0mod(&[
        "limit",
        "--kind",
        "inverse",
        "--system",
        "P",
        &path("harmonic-inverse.json"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("limit:P"), "{text}");

    let out = l0mod(&["validate", &path("remark-faithful.json")]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for id in ["validate:S", "validate:T", "validate:Theta"] {
        assert!(text.contains(id), "{id} missing from {text}");
    }

    let out = l0mod(&["validate", &path("negative/injected-noncontractive.json")]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn structured_output_is_deterministic() {
    let args = [
        "--format",
        "structured",
        "--seed",
        "3",
        "report",
        &path("pullback-commute.json"),
    ];
    let a = l0mod(&args);
    let b = l0mod(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["format_version"], 1);
    assert_eq!(v["seed"], 3);

    let loaded = Loaded::load(fixture("pullback-commute.json")).unwrap();
    let config = RunConfig {
        seed: 3,
        ..RunConfig::default()
    };
    let lib = emit_report(&harness::report(&loaded, None, &config), Format::Structured);
    assert_eq!(lib.as_bytes(), a.stdout.as_slice());
}
