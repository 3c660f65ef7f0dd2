//! `atlas`: exact computations with matrix groups over ℤ/mℤ, on the
//! command line. Builds the named group families, emits torsion-degree and
//! growth-prime tables, runs subgroup censuses and mod-p² lift searches,
//! re-runs the reproduction checks, and ingests externally supplied groups.
//!
//! Exit codes are part of the contract: 0 success, 1 a reproduction check
//! failed, 2 usage or precondition error, 3 a search hit its size cap or an
//! ambient was too large to classify.

mod commands;
mod groupfile;
mod render;

use std::process::ExitCode;

use atlas_core::AlgebraError;
use clap::{Parser, Subcommand};

use commands::Outcome;

#[derive(Parser)]
#[command(
    name = "atlas",
    version,
    about = "Exact mod-m matrix group computations: named families, degree tables, \
             growth-prime tables, censuses, lifts, and reproduction checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a named group family member and print its invariants
    Group(commands::GroupArgs),
    /// Torsion growth degrees at a prime, with CM and conditionality flags
    Degrees(commands::DegreesArgs),
    /// Growth-prime table R*_Q(d): new growth primes per degree d
    Rqd(commands::RqdArgs),
    /// Threshold scans over the general-prime classification
    Scan(commands::ScanArgs),
    /// Run reproduction checks; evidence goes to results/<name>.json
    Check(commands::CheckArgs),
    /// Subgroup census of a named ambient, one row per conjugacy class
    Census(commands::CensusArgs),
    /// Classes of subgroups of GL₂(ℤ/p²) reducing onto a named mod-p group
    Lift(commands::LiftArgs),
    /// Validate an external group file and report the group it generates
    Ingest(commands::IngestArgs),
}

fn run(cli: &Cli) -> Result<Outcome, AlgebraError> {
    match &cli.command {
        Command::Group(args) => commands::cmd_group(args).map(Outcome::emission),
        Command::Degrees(args) => commands::cmd_degrees(args).map(Outcome::emission),
        Command::Rqd(args) => commands::cmd_rqd(args).map(Outcome::emission),
        Command::Scan(args) => commands::cmd_scan(args).map(Outcome::emission),
        Command::Check(args) => commands::cmd_check(args),
        Command::Census(args) => commands::cmd_census(args).map(Outcome::emission),
        Command::Lift(args) => commands::cmd_lift(args).map(Outcome::emission),
        Command::Ingest(args) => commands::cmd_ingest(args).map(Outcome::emission),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            ExitCode::from(outcome.exit)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
