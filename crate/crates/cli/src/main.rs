//! `spherebound`: evaluate expansions, inspect codes, check certificates and
//! bounds, and run the four-dimensional kissing comparison.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{CliError, Outcome};

#[derive(Parser, Debug)]
#[command(name = "spherebound", version, about = "Bounds and certificate checks for spherical codes")]
struct Cli {
    #[command(flatten)]
    output: OutputArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a Gegenbauer expansion at the given points.
    #[command(allow_negative_numbers = true)]
    Eval(commands::EvalArgs),
    /// Distance distribution, moments and interval masses of a code.
    CodeStats(commands::CodeStatsArgs),
    /// Check every condition a certificate file makes checkable.
    VerifyCert(commands::VerifyArgs),
    /// The distance-distribution bound B(N) next to the LP bound.
    Bound(commands::BoundArgs),
    /// Compare cap configuration maxima with B(N).
    #[command(allow_negative_numbers = true)]
    KissingCheck(commands::KissingArgs),
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Eval(a) => commands::eval(a),
        Command::CodeStats(a) => commands::code_stats(a),
        Command::VerifyCert(a) => commands::verify_cert(a),
        Command::Bound(a) => commands::bound(a),
        Command::KissingCheck(a) => commands::kissing_check(a),
    }
}

fn emit(cli: &Cli, mut outcome: Outcome) -> Result<(), CliError> {
    if let Some(path) = &cli.output.out {
        outcome.manifest.outputs = path.display().to_string();
    }
    let doc = serde_json::json!({
        "manifest": outcome.manifest,
        "status": outcome.status.as_str(),
        "report": outcome.report,
    });
    let json = serde_json::to_string_pretty(&doc).expect("reports are serializable") + "\n";
    match &cli.output.out {
        Some(path) => std::fs::write(path, &json).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            source: e,
        })?,
        None if cli.output.format == Format::Json => print!("{json}"),
        None => {}
    }
    if cli.output.format == Format::Text {
        for line in &outcome.summary {
            println!("{line}");
        }
        println!("status: {}", outcome.status.as_str());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|outcome| {
        let status = outcome.status;
        emit(&cli, outcome).map(|_| status)
    });
    match result {
        Ok(status) => ExitCode::from(status.exit_code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
