use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use l0mod::harness::{self, emit_report, Format, Loaded, RunConfig, CHECK_KINDS};
use l0mod::system::Variance;

#[derive(Parser)]
#[command(name = "l0mod", version, about = "Check normed L0-module documents")]
struct Cli {
    /// Comparison tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for randomized probes.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Direct,
    Inverse,
}

#[derive(Subcommand)]
enum Command {
    /// Load a document and validate every system and system morphism in it.
    Validate { document: PathBuf },
    /// Compute limits of the document's systems.
    Limit {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Restrict to one system id.
        #[arg(long)]
        system: Option<String>,
        document: PathBuf,
    },
    /// Run the document's checks of one kind.
    Check {
        #[arg(long)]
        name: String,
        document: PathBuf,
    },
    /// Run every check in the document.
    Report { document: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = RunConfig {
        tolerance: cli.tol,
        seed: cli.seed,
    };
    let path = match &cli.command {
        Command::Validate { document }
        | Command::Limit { document, .. }
        | Command::Check { document, .. }
        | Command::Report { document } => document,
    };
    let loaded = match Loaded::load(path) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match &cli.command {
        Command::Validate { .. } => harness::validate_all(&loaded, &config),
        Command::Limit { kind, system, .. } => {
            let variance = match kind {
                Kind::Direct => Variance::Direct,
                Kind::Inverse => Variance::Inverse,
            };
            harness::limits(&loaded, variance, system.as_deref(), &config)
        }
        Command::Check { name, .. } => {
            if !CHECK_KINDS.contains(&name.as_str()) {
                eprintln!(
                    "error: unknown check kind `{name}`; expected one of {}",
                    CHECK_KINDS.join(", ")
                );
                return ExitCode::from(2);
            }
            harness::report(&loaded, Some(name), &config)
        }
        Command::Report { .. } => harness::report(&loaded, None, &config),
    };
    print!("{}", emit_report(&report, cli.format));
    ExitCode::from(report.exit_code() as u8)
}
