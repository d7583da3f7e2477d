//! `rwclust` command-line interface.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on I/O and data errors.

mod cluster;
mod oracle;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "rwclust", version, about = "Clustering by a modified random walk")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cluster a delimited dataset, optionally sweeping b.
    Cluster(cluster::ClusterArgs),
    /// Compare closed-form walk probabilities against Monte Carlo.
    Oracle(oracle::OracleArgs),
}

const EXIT_USAGE: u8 = 1;
const EXIT_IO: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Cluster(args) => cluster::run(args),
        Command::Oracle(args) => oracle::run(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                rwclust::Error::Usage(_) => ExitCode::from(EXIT_USAGE),
                _ => ExitCode::from(EXIT_IO),
            }
        }
    }
}
