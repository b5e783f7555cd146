//! Command-line front end for quaddom.
//!
//! Exit codes: 0 success, 2 schema or input error, 3 numeric failure,
//! 4 inadmissible test function, 5 geometry violation.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod args;
mod commands;
mod failure;
mod output;
mod svg;

use commands::{contact, family, map, qd};

#[derive(Debug, Parser)]
#[command(name = "quaddom", version, about = "Unbounded quadrature domains from conformal maps")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Evaluate, trace, classify or screen a map.
    #[command(subcommand)]
    Map(map::MapCmd),
    /// Derive or verify quadrature identities.
    #[command(subcommand)]
    Qd(qd::QdCmd),
    /// Solve a family over a parameter grid.
    Family(family::FamilyArgs),
    /// Contact-surface field by both routes.
    Contact(contact::ContactArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(failure::EXIT_SCHEMA)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.cmd {
        Cmd::Map(c) => map::run(c),
        Cmd::Qd(c) => qd::run(c),
        Cmd::Family(a) => family::run(a),
        Cmd::Contact(a) => contact::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
