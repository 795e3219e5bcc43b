use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dualflow_cli::driver::{execute, EXIT_CONFIG, EXIT_IO};
use dualflow_cli::parse_config;

#[derive(Parser)]
#[command(name = "dualflow", version, about = "Dual curvature flows in hyperbolic and de Sitter space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory; overrides the config's `output` key.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print nothing on success.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a flow preset (inverse_desitter, direct_hyperbolic, dual_pair).
    Run { config: PathBuf },
    /// Run a verification suite (property_suite, duality_check, residual_check).
    Suite { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (path, want_flow) = match &cli.command {
        Command::Run { config } => (config, true),
        Command::Suite { config } => (config, false),
    };
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return code(EXIT_IO);
        }
    };
    let config = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprint!("{}: {e}", path.display());
            return code(EXIT_CONFIG);
        }
    };
    if config.preset.is_flow() != want_flow {
        let (cmd, other) = if want_flow { ("run", "suite") } else { ("suite", "run") };
        eprintln!("preset {} is not started with `dualflow {cmd}`; use `dualflow {other}`", config.preset);
        return code(EXIT_CONFIG);
    }
    let out = cli.out.clone().unwrap_or_else(|| config.output.clone());
    match execute(&config, &out) {
        Ok(report) => {
            if !cli.quiet {
                for (k, v) in &report.summary {
                    println!("{k} = {v}");
                }
                println!("artifacts in {}", out.display());
            }
            code(report.exit_code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            code(e.exit_code())
        }
    }
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}
