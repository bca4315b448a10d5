use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use contam_runs::analytic::AccompanyingDistribution;
use contam_runs::montecarlo::{
    exponential_reference, figure_preset, run_hitting_experiment_with_threads, run_longest_experiment_with_threads,
    sup_distance, EmpiricalDistribution, ExperimentConfig, ExperimentMode, ReferenceCdf, RNG_SCHEME,
};
use serde_json::json;

use super::{dist, need, window, Report};
use crate::args::{ExperimentArgs, ModeArg};
use crate::error::{CliError, CliResult};
use crate::files::{write_comparison, write_empirical, write_reference, ComparisonRow, Metadata, RunManifest};

pub const DEFAULT_SEED: u64 = 1;

pub struct Global {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: PathBuf,
}

struct Planned {
    stem: String,
    config: ExperimentConfig,
    figure: Option<u8>,
    scale: Option<f64>,
}

fn mode_of(m: ModeArg) -> ExperimentMode {
    match m {
        ModeArg::Longest => ExperimentMode::Longest,
        ModeArg::Hitting => ExperimentMode::Hitting,
    }
}

fn mode_name(m: ExperimentMode) -> &'static str {
    match m {
        ExperimentMode::Longest => "longest",
        ExperimentMode::Hitting => "hitting",
    }
}

fn scale_count(v: u64, scale: Option<f64>) -> CliResult<u64> {
    match scale {
        None => Ok(v),
        Some(s) if s > 0.0 && s.is_finite() => Ok(((v as f64 * s).round() as u64).max(1)),
        Some(s) => Err(CliError::usage(format!("--scale must be a positive number (got {s})"))),
    }
}

fn plan(a: &ExperimentArgs, g: &Global) -> CliResult<Vec<Planned>> {
    let seed = g.seed.unwrap_or(DEFAULT_SEED);
    let mut planned = Vec::new();
    if let Some(f) = a.figure {
        let mut preset = figure_preset(f).ok_or_else(|| CliError::usage(format!("no preset for figure {f}")))?;
        if let Some(s) = a.scale {
            preset = preset.scaled(s)?;
        }
        let modes = match a.mode {
            Some(m) => vec![mode_of(m)],
            None => vec![ExperimentMode::Longest, ExperimentMode::Hitting],
        };
        for mode in modes {
            let mut config = match mode {
                ExperimentMode::Longest => preset.longest_config(seed),
                ExperimentMode::Hitting => preset.hitting_config(seed),
            };
            apply_overrides(a, &mut config)?;
            planned.push(Planned { stem: format!("fig{f}_{}", mode_name(mode)), config, figure: Some(f), scale: a.scale });
        }
    } else if let Some(path) = &a.config {
        let mut config = crate::files::read_config(path)?;
        if let Some(s) = g.seed {
            config.seed = s;
        }
        config.n = scale_count(config.n, a.scale)?;
        config.s = scale_count(config.s, a.scale)?;
        apply_overrides(a, &mut config)?;
        let base = path.file_stem().and_then(|s| s.to_str()).unwrap_or("run").trim_end_matches("_manifest");
        planned.push(Planned { stem: base.to_string(), config, figure: None, scale: a.scale });
    } else {
        let what = "experiment without --figure or --config";
        let mode = mode_of(need(a.mode, what, "--mode")?);
        let d = dist(&a.dist, what)?.float;
        let s = scale_count(need(a.s, what, "--s")?, a.scale)?;
        let mut config = match mode {
            ExperimentMode::Longest => {
                ExperimentConfig::longest(d, scale_count(need(a.n, what, "--N")?, a.scale)?, s, seed)
            }
            ExperimentMode::Hitting => ExperimentConfig::hitting(d, window(need(a.m, what, "--m")?)?, s, seed),
        };
        if let Some(cap) = a.hitting_cap {
            config.hitting_cap = cap;
        }
        planned.push(Planned { stem: mode_name(mode).to_string(), config, figure: None, scale: a.scale });
    }
    Ok(planned)
}

/// Explicit flags win over preset or file values.
fn apply_overrides(a: &ExperimentArgs, c: &mut ExperimentConfig) -> CliResult<()> {
    if a.dist.given() {
        c.dist = dist(&a.dist, "overriding the distribution")?.float;
    }
    if let Some(n) = a.n {
        c.n = n;
    }
    if let Some(s) = a.s {
        c.s = s;
    }
    if let Some(m) = a.m {
        c.m = Some(window(m)?);
    }
    if let Some(cap) = a.hitting_cap {
        c.hitting_cap = cap;
    }
    Ok(())
}

fn integer_grid(e: &EmpiricalDistribution) -> Vec<f64> {
    let (lo, hi) = (e.min() as i64 - 2, e.max() as i64 + 2);
    (lo..=hi).map(|k| k as f64).collect()
}

fn describe(config: &ExperimentConfig, meta: &mut Metadata) {
    meta.insert("mode".into(), mode_name(config.mode).into());
    meta.insert("p".into(), config.dist.p().to_string());
    meta.insert("q1".into(), config.dist.q1().to_string());
    meta.insert("q2".into(), config.dist.q2().to_string());
    match config.mode {
        ExperimentMode::Longest => {
            meta.insert("N".into(), config.n.to_string());
        }
        ExperimentMode::Hitting => {
            meta.insert("m".into(), config.m.map_or(0, |m| m.len()).to_string());
            meta.insert("hitting_cap".into(), config.hitting_cap.to_string());
        }
    }
    meta.insert("s".into(), config.s.to_string());
    meta.insert("seed".into(), config.seed.to_string());
    meta.insert("rng".into(), RNG_SCHEME.into());
    meta.insert("tool_version".into(), env!("CARGO_PKG_VERSION").into());
}

fn write_run(out: &Path, p: &Planned, threads: Option<usize>) -> CliResult<RunManifest> {
    let start = Instant::now();
    let (empirical, normalization, excluded, variable) = match p.config.mode {
        ExperimentMode::Longest => {
            let r = run_longest_experiment_with_threads(&p.config, threads)?;
            (r.offsets, r.centering as f64, 0, "mu(N) - [m(N)]")
        }
        ExperimentMode::Hitting => {
            let r = run_hitting_experiment_with_threads(&p.config, threads)?;
            (r.scaled, r.scale, r.excluded, "tau_m alpha P(A1)")
        }
    };
    let wall_time_secs = start.elapsed().as_secs_f64();

    let accompanying;
    let exponential = exponential_reference();
    let (reference, reference_name, grid, kind): (&dyn ReferenceCdf, &str, Vec<f64>, &str) = match p.config.mode {
        ExperimentMode::Longest => {
            accompanying = AccompanyingDistribution::new(&p.config.dist, p.config.n as f64)?;
            (&accompanying, "accompanying", integer_grid(&empirical), "lattice")
        }
        ExperimentMode::Hitting => (&exponential, "exponential", empirical.support().to_vec(), "continuous"),
    };
    let distance = sup_distance(&empirical, reference);

    let mut meta = Metadata::new();
    describe(&p.config, &mut meta);
    meta.insert("variable".into(), variable.into());
    meta.insert("normalization".into(), normalization.to_string());
    meta.insert("reference".into(), reference_name.into());
    meta.insert("excluded_repetitions".into(), excluded.to_string());

    let names = ["empirical.csv", "reference.csv", "comparison.csv", "manifest.json"].map(|s| format!("{}_{s}", p.stem));
    write_empirical(&out.join(&names[0]), &meta, &empirical)?;
    let mut ref_meta = meta.clone();
    ref_meta.insert("kind".into(), kind.into());
    write_reference(&out.join(&names[1]), &ref_meta, &grid, reference)?;
    let rows: Vec<ComparisonRow> = grid
        .iter()
        .map(|&x| ComparisonRow { value: x, ecdf: empirical.ecdf(x), reference: reference.cdf(x) })
        .collect();
    let mut cmp_meta = meta;
    cmp_meta.insert("sup_distance".into(), distance.to_string());
    write_comparison(&out.join(&names[2]), &cmp_meta, &rows)?;

    let manifest = RunManifest {
        config: p.config.clone(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        rng_scheme: RNG_SCHEME.into(),
        figure: p.figure,
        scale: p.scale,
        normalization,
        reference: reference_name.into(),
        sup_distance: distance,
        excluded_repetitions: excluded,
        wall_time_secs,
        outputs: names.to_vec(),
    };
    manifest.write(&out.join(&names[3]))?;
    Ok(manifest)
}

pub fn run(a: &ExperimentArgs, g: &Global) -> CliResult<Report> {
    let planned = plan(a, g)?;
    for p in &planned {
        p.config.validate()?;
    }
    fs::create_dir_all(&g.out).map_err(|e| CliError::io(&g.out, e))?;
    let mut runs = Vec::new();
    let mut r = Report::new(json!(null));
    for p in &planned {
        let m = write_run(&g.out, p, g.threads)?;
        let c = &m.config;
        r.line(format_args!(
            "{}: {} experiment, p={} q1={} q2={}, {}s={} seed={}",
            p.stem,
            mode_name(c.mode),
            c.dist.p(),
            c.dist.q1(),
            c.dist.q2(),
            match c.mode {
                ExperimentMode::Longest => format!("N={} ", c.n),
                ExperimentMode::Hitting => format!("m={} ", c.m.map_or(0, |m| m.len())),
            },
            c.s,
            c.seed
        ));
        r.line(format_args!("  sup distance to {} reference: {}", m.reference, m.sup_distance));
        if m.excluded_repetitions > 0 {
            r.line(format_args!("  {} repetitions hit the cap and were excluded", m.excluded_repetitions));
        }
        r.line(format_args!("  wrote {} ({:.2} s)", m.outputs.iter().map(|o| g.out.join(o).display().to_string()).collect::<Vec<_>>().join(", "), m.wall_time_secs));
        runs.push(json!({
            "stem": p.stem,
            "dir": g.out.display().to_string(),
            "manifest": m,
        }));
    }
    r.json = json!({ "runs": runs });
    Ok(r)
}
