pub mod analytic;
pub mod compare;
pub mod experiment;
pub mod oracle;

use std::fmt::Write;

use serde_json::Value;

use crate::args::DistArgs;
use crate::error::{CliError, CliResult};
use crate::probability::{parse_dist, ParsedDist};

/// Command output in both renderings, built from the same numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub json: Value,
    pub text: String,
}

impl Report {
    pub fn new(json: Value) -> Self {
        Report { json, text: String::new() }
    }

    pub fn line(&mut self, args: std::fmt::Arguments<'_>) {
        self.text.write_fmt(args).expect("writing to a String");
        self.text.push('\n');
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            let mut s = serde_json::to_string_pretty(&self.json).expect("report serializes");
            s.push('\n');
            s
        } else {
            self.text.clone()
        }
    }
}

pub(crate) fn need<T>(value: Option<T>, what: &str, flag: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::usage(format!("{what} needs {flag}")))
}

pub(crate) fn dist(args: &DistArgs, what: &str) -> CliResult<ParsedDist> {
    match (&args.p, &args.q1, &args.q2) {
        (Some(p), Some(q1), Some(q2)) => parse_dist(p, q1, q2),
        _ => Err(CliError::usage(format!("{what} needs --p, --q1 and --q2"))),
    }
}

pub(crate) fn window(m: usize) -> CliResult<contam_runs::WindowSpec> {
    Ok(contam_runs::WindowSpec::new(m)?)
}

/// Shortest round-trip decimal, switching to scientific notation for very
/// small or large magnitudes.
pub(crate) struct Num(pub f64);

impl std::fmt::Display for Num {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let a = self.0.abs();
        let s = if a != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) { format!("{:e}", self.0) } else { self.0.to_string() };
        match f.width() {
            Some(w) if f.align() == Some(std::fmt::Alignment::Left) => write!(f, "{s:<w$}"),
            Some(w) => write!(f, "{s:>w$}"),
            None => f.write_str(&s),
        }
    }
}
