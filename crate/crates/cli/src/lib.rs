//! Command-line front end for the `contam-runs` library.
//!
//! [`run_cli`] does all the work and returns the exit code plus what should
//! go to stdout, so tests can drive it without spawning a process.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod error;
pub mod files;
pub mod probability;

use clap::Parser;

use args::{Cli, Command};
pub use error::{CliError, CliResult};

/// Outcome of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

pub fn execute(cli: &Cli) -> CliResult<commands::Report> {
    let global = commands::experiment::Global {
        seed: cli.seed,
        threads: cli.threads.map(|t| t as usize),
        out: cli.out.clone(),
    };
    match &cli.command {
        Command::Analytic(a) => commands::analytic::run(a),
        Command::Oracle(a) => commands::oracle::run(a),
        Command::Experiment(a) => commands::experiment::run(a, &global),
        Command::Compare(a) => commands::compare::run(a),
    }
}

pub fn run_cli<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli) {
        Ok(report) => Outcome { code: 0, stdout: report.render(cli.json), stderr: String::new() },
        Err(e) => Outcome { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}
