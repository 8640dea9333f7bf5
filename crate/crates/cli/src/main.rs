use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use densig_cli::{analyze_source, demos, CliError, RunOptions};

#[derive(Parser)]
#[command(
    name = "densig",
    version,
    about = "Block-expansion signatures and teleportation reports for bipartite states"
)]
struct Cli {
    /// Relative eigenvalue threshold used to count the rank of X.
    #[arg(long, global = true, default_value_t = densig_core::DEFAULT_RANK_TOL)]
    rank_tol: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, run and print a state-description file.
    Analyze { file: PathBuf },
    /// Run one of the built-in programs.
    Demo { name: DemoName },
}

#[derive(Clone, Copy, ValueEnum)]
enum DemoName {
    Eq4,
    Eq7,
    Ghz,
}

fn execute(cli: &Cli) -> Result<String, CliError> {
    let opts = RunOptions {
        rank_tol: cli.rank_tol,
        ..RunOptions::default()
    };
    let source = match &cli.command {
        Command::Analyze { file } => std::fs::read_to_string(file)
            .map_err(|e| CliError::Io(format!("{}: {e}", file.display())))?,
        Command::Demo { name } => {
            let key = match name {
                DemoName::Eq4 => "eq4",
                DemoName::Eq7 => "eq7",
                DemoName::Ghz => "ghz",
            };
            demos::lookup(key)
                .expect("every demo name has a program")
                .to_string()
        }
    };
    analyze_source(&source, &opts)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("densig: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
