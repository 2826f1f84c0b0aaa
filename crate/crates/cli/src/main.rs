//! `kspenta`: command-line front end to the verification pipeline.

mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CliError, SystemArg};

#[derive(Parser)]
#[command(name = "kspenta", version, about = "Kochen-Specker parity proofs from the three-qubit Mermin pentagram")]
struct Cli {
    /// Emit a JSON run report instead of tables.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the pentagram, check its lines and count sign assignments.
    Pentagram,
    /// Derive the forty rays as joint eigenvectors of each line.
    Rays {
        /// Reconcile with the published ray table and settle flagged rows.
        #[arg(long)]
        table_check: bool,
    },
    /// Verify the fifteen rank-1 completeness relations.
    Relations {
        /// List every orthogonal basis formed by the forty rays.
        #[arg(long)]
        enumerate_octads: bool,
    },
    /// Exhaustive search for a noncontextual assignment.
    Search {
        /// `rank1`, `rank2`, or a JSON incidence-system file.
        #[arg(long, value_name = "rank1|rank2|FILE")]
        system: String,
        /// Also report the largest number of simultaneously satisfiable contexts.
        #[arg(long)]
        max_satisfiable: bool,
    },
    /// Rank-2 pairings: verify the published one or enumerate all.
    Pairings {
        /// Enumerate every rank-2 parity proof.
        #[arg(long)]
        enumerate: bool,
        /// Verify the published pairing (default when no flag is given).
        #[arg(long)]
        paper: bool,
    },
    /// Orthogonality hypergraph of the thirty planes.
    Hypergraph {
        #[arg(long, default_value = "dot", value_name = "dot|json")]
        format: String,
        /// Write the document here instead of standard output.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

fn dispatch(cli: &Cli) -> Result<report::Outcome, CliError> {
    match &cli.command {
        Command::Pentagram => commands::pentagram(),
        Command::Rays { table_check } => commands::rays(*table_check),
        Command::Relations { enumerate_octads } => commands::relations(*enumerate_octads),
        Command::Search { system, max_satisfiable } => commands::search(SystemArg::parse(system), *max_satisfiable),
        Command::Pairings { enumerate, paper } => commands::pairings(*enumerate, *paper || !*enumerate),
        Command::Hypergraph { format, out } => commands::hypergraph(format, out.as_deref(), cli.json),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match dispatch(&cli) {
        Ok(o) => o,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(CliError::Internal(e)) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let body = if cli.json {
        let mut s = serde_json::to_string_pretty(&outcome.report).expect("report serializes");
        s.push('\n');
        s
    } else {
        commands::render(&outcome)
    };
    let mut stdout = std::io::stdout().lock();
    if stdout.write_all(body.as_bytes()).and_then(|_| stdout.flush()).is_err() {
        return ExitCode::from(1);
    }
    if !outcome.report.passed {
        for c in outcome.report.checks.iter().filter(|c| !c.pass) {
            eprintln!("check failed: {} ({})", c.name, c.details);
        }
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
