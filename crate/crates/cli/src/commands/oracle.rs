use contam_runs::oracle::{
    conditional_counts, dp_hitting_tail, dp_hitting_tail_exact, dp_longest_cdf, dp_longest_cdf_exact,
    joint_survival_counts, window_counts, DpOptions, RationalProb,
};
use serde_json::json;

use super::{dist, need, window, Num, Report};
use crate::args::{Arithmetic, OracleArgs, OracleQuery};
use crate::error::CliResult;

fn name(q: OracleQuery) -> &'static str {
    match q {
        OracleQuery::Window => "window",
        OracleQuery::Conditional => "conditional",
        OracleQuery::Joint => "joint",
        OracleQuery::LongestCdf => "longest-cdf",
        OracleQuery::HittingTail => "hitting-tail",
    }
}

pub fn run(a: &OracleArgs) -> CliResult<Report> {
    let what = format!("oracle {}", name(a.query));
    let d = dist(&a.dist, &what)?;
    let m = need(a.m, &what, "--m")?;
    let w = window(m)?;
    let opts = DpOptions { budget: a.budget };
    let n = match a.query {
        OracleQuery::LongestCdf | OracleQuery::HittingTail => Some(need(a.n, &what, "--N")?),
        _ => None,
    };

    let exact: Option<RationalProb> = match a.mode {
        Arithmetic::Float => None,
        Arithmetic::Exact => {
            let r = d.require_exact()?;
            Some(match a.query {
                OracleQuery::Window => window_counts(w)?.probability(r),
                OracleQuery::Joint => joint_survival_counts(w)?.probability(r),
                OracleQuery::Conditional => {
                    let (joint, a1) = conditional_counts(w)?;
                    joint.probability(r).conditional_on(&a1.probability(r))?
                }
                OracleQuery::LongestCdf => dp_longest_cdf_exact(r, n.expect("checked"), w, &opts)?,
                OracleQuery::HittingTail => dp_hitting_tail_exact(r, w, n.expect("checked"), &opts)?,
            })
        }
    };
    let value = match &exact {
        Some(e) => e.to_f64(),
        None => match a.query {
            OracleQuery::Window => window_counts(w)?.probability_f64(&d.float),
            OracleQuery::Joint => joint_survival_counts(w)?.probability_f64(&d.float),
            OracleQuery::Conditional => {
                let (joint, a1) = conditional_counts(w)?;
                joint.probability_f64(&d.float) / a1.probability_f64(&d.float)
            }
            OracleQuery::LongestCdf => dp_longest_cdf(&d.float, n.expect("checked"), w, &opts)?,
            OracleQuery::HittingTail => dp_hitting_tail(&d.float, w, n.expect("checked"), &opts)?,
        },
    };

    let mode = match a.mode {
        Arithmetic::Exact => "exact",
        Arithmetic::Float => "float",
    };
    let exact_text = exact.as_ref().map(|e| e.to_string());
    let mut r = Report::new(json!({
        "query": name(a.query), "mode": mode, "m": m, "N": n, "value": value, "exact": exact_text,
    }));
    let label = match a.query {
        OracleQuery::Window => format!("P(A1), m = {m}"),
        OracleQuery::Joint => format!("P(A1, no qualifying window 2..m), m = {m}"),
        OracleQuery::Conditional => format!("P(no qualifying window 2..m | A1), m = {m}"),
        OracleQuery::LongestCdf => format!("P(mu(N) < m), N = {}, m = {m}", n.expect("checked")),
        OracleQuery::HittingTail => format!("P(tau_m > N), N = {}, m = {m}", n.expect("checked")),
    };
    match &exact_text {
        Some(f) => r.line(format_args!("{label}: {f} = {}", Num(value))),
        None => r.line(format_args!("{label}: {} (float)", Num(value))),
    }
    Ok(r)
}
