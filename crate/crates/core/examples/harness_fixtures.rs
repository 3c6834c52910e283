//! Loading a document and running its checks, as the command-line tool does.

use std::path::Path;

use l0mod::harness::{self, emit_report, Format, Loaded, RunConfig};

pub fn run_example() -> l0mod::Result<String> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/remark-faithful.json");
    let loaded = Loaded::load(&path)?;
    let report = harness::report(&loaded, None, &RunConfig::default());
    let mut out = emit_report(&report, Format::Text);
    out += &format!("exit code {}\n", report.exit_code());

    let broken = Loaded::load(path.with_file_name("negative").join("injected-cocycle.json"))?;
    let report = harness::validate_all(&broken, &RunConfig::default());
    for c in report
        .checks
        .iter()
        .filter(|c| c.verdict != harness::Verdict::Pass)
    {
        out += &format!("{}: {}\n", c.id, c.summary);
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> l0mod::Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
