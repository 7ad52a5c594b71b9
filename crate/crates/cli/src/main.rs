use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use strata_cli::instance::parse_instance;
use strata_cli::report::{emit_report, Format};
use strata_cli::run::{exit_code, run_command, run_example, Command, Options, RunError};
use strata_core::Field;

/// Proper costratifying and Ext-injective stratifying systems over bound
/// quiver algebras.
///
/// Exit status: 0 passed or constructed, 1 failed with a witness,
/// 2 undecided or cap exceeded, 3 input error.
#[derive(Parser, Debug)]
#[command(name = "strata", version)]
struct Cli {
    /// Ground field: a prime p or `rationals`.
    #[arg(long, global = true)]
    field: Option<Field>,
    /// Candidate budget for exhaustive searches.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Maximum number of modules in one extension chain of construct-q.
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Seed for randomized fallbacks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output format: human or structured.
    #[arg(long, global = true, default_value = "human")]
    format: Format,
    /// Linear order as a 1-based permutation, smallest first (e.g. 2,1,3).
    #[arg(long, global = true, value_delimiter = ',')]
    order: Option<Vec<usize>>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check the axioms of a proper pre-costratifying system on Psi.
    VerifyPpcs { instance: PathBuf },
    /// Check the axioms of a proper costratifying system on (Psi, Q).
    VerifyPcs { instance: PathBuf },
    /// Check the axioms of an Ext-injective stratifying system on (Theta, Q).
    VerifyEss { instance: PathBuf },
    /// Build Q from Psi by iterated non-split extensions.
    ConstructQ { instance: PathBuf },
    /// Standard, proper standard and proper costandard modules.
    StratModules { instance: PathBuf },
    /// Decide whether every projective is filtered by standard modules.
    CheckSs { instance: PathBuf },
    /// Decide whether (Psi, Q) has an Ext-injective partner and build Theta.
    EssFromPcs { instance: PathBuf },
    /// Decide whether Q carries a proper costratifying system and build Psi.
    PcsFromEss { instance: PathBuf },
    /// Decide whether Q is the characteristic tilting module over End(Q).
    CharTilting { instance: PathBuf },
    /// Replay a bundled example: a3, kronecker or loop.
    Example { name: String },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let opts = Options {
        field: cli.field,
        budget: cli.budget,
        cap: cli.cap,
        seed: cli.seed,
        order: cli.order.clone(),
    };
    let (cmd, path) = match cli.command {
        Cmd::VerifyPpcs { instance } => (Command::VerifyPpcs, instance),
        Cmd::VerifyPcs { instance } => (Command::VerifyPcs, instance),
        Cmd::VerifyEss { instance } => (Command::VerifyEss, instance),
        Cmd::ConstructQ { instance } => (Command::ConstructQ, instance),
        Cmd::StratModules { instance } => (Command::StratModules, instance),
        Cmd::CheckSs { instance } => (Command::CheckSs, instance),
        Cmd::EssFromPcs { instance } => (Command::EssFromPcs, instance),
        Cmd::PcsFromEss { instance } => (Command::PcsFromEss, instance),
        Cmd::CharTilting { instance } => (Command::CharTilting, instance),
        Cmd::Example { name } => return finish(run_example(&name, &opts), cli.format),
    };
    let result = std::fs::read_to_string(&path)
        .map_err(|e| RunError::Missing(format!("cannot read {}: {e}", path.display())))
        .and_then(|text| Ok(parse_instance(&text, opts.field)?))
        .and_then(|inst| run_command(cmd, &inst, &path.display().to_string(), &opts));
    finish(result, cli.format)
}

fn finish(result: Result<strata_cli::report::Report, RunError>, format: Format) -> ExitCode {
    let code = exit_code(&result);
    match result {
        Ok(r) => print!("{}", emit_report(&r, format)),
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(code as u8)
}
