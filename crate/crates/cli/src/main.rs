use std::path::Path;
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand};
use ghz_worlds_cli::claims::verify_all;
use ghz_worlds_cli::report::{run_file, CensusBlock};
use ghz_worlds_cli::scenario_file::{builtin, ScenarioFile, BUILTIN_NAMES};
use ghz_worlds_cli::{Format, SchemaError};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Enumerate measurement worlds of GHZ experiments and check them.
#[derive(Parser)]
#[command(name = "ghz-worlds", version)]
struct Cli {
    /// Same as the `dump-scenario` subcommand.
    #[arg(long, value_name = "NAME", exclusive = true)]
    dump_scenario: Option<String>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a built-in scenario or a scenario JSON file.
    Run {
        /// Built-in name (ghz-protocol, charley-deviation, all-z, alice-bob-only) or a path.
        scenario: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Search all local hidden-variable assignments and print the parity certificate.
    Census {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Reproduce every claim in one table.
    #[command(name = "verify-paper")]
    VerifyClaims {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print a built-in scenario as JSON.
    DumpScenario { name: String },
}

fn load(scenario: &str) -> Result<ScenarioFile, SchemaError> {
    if let Some(file) = builtin(scenario) {
        return Ok(file);
    }
    let path = Path::new(scenario);
    if !path.is_file() {
        return Err(SchemaError::new(vec![format!(
            "unknown scenario {scenario:?}; built-ins are {}",
            BUILTIN_NAMES.join(", ")
        )]));
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| SchemaError::new(vec![format!("cannot read {scenario}: {e}")]))?;
    ScenarioFile::from_json(&text)
}

fn usage_error(err: &SchemaError) -> ExitCode {
    eprintln!("error: invalid scenario");
    for p in &err.problems {
        eprintln!("  {p}");
    }
    ExitCode::from(EXIT_USAGE)
}

fn status_code(passed: bool) -> ExitCode {
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}

fn dump(name: &str) -> ExitCode {
    match builtin(name) {
        Some(file) => {
            println!("{}", file.to_json());
            ExitCode::SUCCESS
        }
        None => {
            eprintln!(
                "error: unknown scenario {name:?}; built-ins are {}",
                BUILTIN_NAMES.join(", ")
            );
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(name) = cli.dump_scenario {
        return dump(&name);
    }
    let Some(command) = cli.command else {
        eprintln!("{}", Cli::command().render_help());
        return ExitCode::from(EXIT_USAGE);
    };
    match command {
        Command::Run { scenario, format } => {
            let report = match load(&scenario).and_then(|f| run_file(&f)) {
                Ok(r) => r,
                Err(e) => return usage_error(&e),
            };
            match format {
                Format::Text => print!("{}", report.to_text()),
                Format::Json => println!("{}", report.to_json()),
            }
            status_code(report.status.passed())
        }
        Command::Census { format } => {
            let block = CensusBlock::compute();
            match format {
                Format::Text => {
                    let mut out = String::new();
                    block.render_text(&mut out);
                    print!("{out}");
                    println!("status: {}", block.status.as_str());
                }
                Format::Json => {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&block).expect("reports serialize")
                    )
                }
            }
            status_code(block.status.passed())
        }
        Command::VerifyClaims { format } => {
            let report = verify_all();
            match format {
                Format::Text => print!("{}", report.to_text()),
                Format::Json => println!("{}", report.to_json()),
            }
            status_code(report.status.passed())
        }
        Command::DumpScenario { name } => dump(&name),
    }
}
