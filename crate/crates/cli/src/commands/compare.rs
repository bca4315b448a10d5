use contam_runs::analytic::AccompanyingDistribution;
use contam_runs::montecarlo::{exponential_reference, sup_distance, ReferenceCdf};
use contam_runs::TrialDistribution;
use serde_json::json;

use super::{dist, Num, Report};
use crate::args::CompareArgs;
use crate::error::{CliError, CliResult};
use crate::files::{read_csv, ComparisonRow, CsvFile};

fn meta_f64(file: &CsvFile, key: &str) -> CliResult<f64> {
    let raw = file
        .meta
        .get(key)
        .ok_or_else(|| CliError::usage(format!("{} has no `# {key}=` line; pass it as a flag", file.path.display())))?;
    raw.parse()
        .map_err(|_| CliError::Parse { path: file.path.clone(), line: 0, message: format!("metadata {key}={raw:?} is not a number") })
}

pub fn run(a: &CompareArgs) -> CliResult<Report> {
    let file = read_csv(&a.empirical)?;
    if !file.is_empirical() {
        return Err(CliError::Parse {
            path: file.path.clone(),
            line: 0,
            message: "not an empirical distribution file (expected header value,count,ecdf)".into(),
        });
    }
    let empirical = file.to_empirical()?;

    let against = if a.against == "auto" {
        file.meta.get("reference").cloned().ok_or_else(|| {
            CliError::usage("the file header names no reference; pass --against exponential|accompanying|PATH")
        })?
    } else {
        a.against.clone()
    };

    let reference: Box<dyn ReferenceCdf> = match against.as_str() {
        "exponential" => Box::new(exponential_reference()),
        "accompanying" => {
            let d = if a.dist.given() {
                dist(&a.dist, "compare --against accompanying")?.float
            } else {
                TrialDistribution::new(meta_f64(&file, "p")?, meta_f64(&file, "q1")?, meta_f64(&file, "q2")?)?
            };
            let n = match a.n {
                Some(n) => n,
                None => meta_f64(&file, "N")?,
            };
            Box::new(AccompanyingDistribution::new(&d, n)?)
        }
        path => {
            let other = read_csv(path.as_ref())?;
            if other.is_empirical() {
                Box::new(other.to_empirical()?)
            } else {
                Box::new(other.to_tabulated()?)
            }
        }
    };

    let distance = sup_distance(&empirical, reference.as_ref());
    let mut grid: Vec<f64> = empirical.support().to_vec();
    grid.extend(reference.atoms_in(empirical.min(), empirical.max()));
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let rows: Vec<ComparisonRow> = grid
        .iter()
        .map(|&x| ComparisonRow { value: x, ecdf: empirical.ecdf(x), reference: reference.cdf(x) })
        .collect();

    let mut r = Report::new(json!({
        "empirical": a.empirical.display().to_string(),
        "reference": against,
        "total": empirical.total(),
        "sup_distance": distance,
        "rows": rows,
    }));
    r.line(format_args!("sup distance between {} and {against}: {}", a.empirical.display(), Num(distance)));
    r.line(format_args!("{:>24}  {:>24}  {:>24}", "value", "ecdf", "reference_cdf"));
    for row in &rows {
        r.line(format_args!("{:>24}  {:>24}  {:>24}", Num(row.value), Num(row.ecdf), Num(row.reference)));
    }
    Ok(r)
}
