mod commands;
mod error;
mod instance;
mod common;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "fairopt", version, about = "Convex fairness measures and fairness-aware optimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate measures on an outcome vector.
    Eval(commands::eval::EvalArgs),
    /// Solve an instance, by direct reformulation or C&CG.
    Solve(commands::solve::SolveArgs),
    /// Solve one instance under several measures.
    Compare(commands::solve::CompareArgs),
    /// Decide whether two measures are positive multiples of each other.
    Equiv(commands::equiv::EquivArgs),
    /// Run the measure-sensitivity experiment on random allocations.
    Stability(commands::stability::StabilityArgs),
    /// Write a random instance.
    Gen(commands::gen::GenArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Eval(a) => commands::eval::run(a),
        Command::Solve(a) => commands::solve::run(a),
        Command::Compare(a) => commands::solve::run_compare(a),
        Command::Equiv(a) => commands::equiv::run(a),
        Command::Stability(a) => commands::stability::run(a),
        Command::Gen(a) => commands::gen::run(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
