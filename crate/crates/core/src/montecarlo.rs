//! Seeded simulation and the two experiments: the longest run over `N`
//! trials and the normalized first hitting time.
//!
//! Repetition `i` of an experiment with seed `s` draws from its own
//! xoshiro256++ stream seeded with [`repetition_seed`]`(s, i)`. Results are
//! collected by repetition index, so output does not depend on the number of
//! worker threads, and the first `k` repetitions do not depend on the total
//! repetition count.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{alpha_correction, m_of_n, window_probability, AccompanyingDistribution};
use crate::error::{Error, Result};
use crate::model::{Outcome, TrialDistribution, WindowSpec};
use crate::scan::ScanState;

/// Identifier of the seeding and sampling scheme, recorded in run manifests.
pub const RNG_SCHEME: &str = "splitmix64-index/xoshiro256++/u64-threshold(0,+,-)";

/// Per-repetition safety cap on the hitting-time horizon.
pub const DEFAULT_HITTING_CAP: u64 = 1_000_000_000;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// `seed_i`: the `i`-th output of a SplitMix64 generator started at `seed`.
///
/// The finalizer is a bijection, so distinct indices give distinct seeds.
pub fn repetition_seed(seed: u64, i: u64) -> u64 {
    let mut z = seed.wrapping_add(i.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Inverse-CDF sampling of one outcome from one 64-bit draw. The unit
/// interval is split in the fixed order Success, FailPlus, FailMinus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutcomeSampler {
    success_below: u64,
    plus_below: u64,
}

impl OutcomeSampler {
    pub fn new(dist: &TrialDistribution) -> Self {
        let scale = |x: f64| -> u64 {
            // x * 2^64, saturating; x in (0, 1)
            let v = x * 18_446_744_073_709_551_616.0;
            if v >= u64::MAX as f64 {
                u64::MAX
            } else {
                v as u64
            }
        };
        OutcomeSampler { success_below: scale(dist.p()), plus_below: scale(dist.p() + dist.q1()) }
    }

    #[inline]
    pub fn sample(&self, u: u64) -> Outcome {
        const BY_CODE: [Outcome; 3] = Outcome::ALL;
        BY_CODE[(u >= self.success_below) as usize + (u >= self.plus_below) as usize]
    }
}

/// Pull-based stream of i.i.d. outcomes.
#[derive(Debug, Clone)]
pub struct OutcomeStream {
    rng: Xoshiro256PlusPlus,
    sampler: OutcomeSampler,
    remaining: Option<u64>,
}

impl Iterator for OutcomeStream {
    type Item = Outcome;

    #[inline]
    fn next(&mut self) -> Option<Outcome> {
        if let Some(r) = self.remaining.as_mut() {
            if *r == 0 {
                return None;
            }
            *r -= 1;
        }
        Some(self.sampler.sample(self.rng.next_u64()))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        match self.remaining {
            Some(r) => {
                let r = usize::try_from(r).unwrap_or(usize::MAX);
                (r, Some(r))
            }
            None => (usize::MAX, None),
        }
    }
}

/// `N` outcomes from the stream identified by `stream_seed`.
pub fn simulate_sequence(dist: &TrialDistribution, n: u64, stream_seed: u64) -> OutcomeStream {
    OutcomeStream {
        rng: Xoshiro256PlusPlus::seed_from_u64(stream_seed),
        sampler: OutcomeSampler::new(dist),
        remaining: Some(n),
    }
}

/// Endless version of [`simulate_sequence`]; same stream, same prefix.
pub fn simulate_unbounded(dist: &TrialDistribution, stream_seed: u64) -> OutcomeStream {
    OutcomeStream {
        rng: Xoshiro256PlusPlus::seed_from_u64(stream_seed),
        sampler: OutcomeSampler::new(dist),
        remaining: None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentMode {
    Longest,
    Hitting,
}

fn default_hitting_cap() -> u64 {
    DEFAULT_HITTING_CAP
}

/// Full description of an experiment; enough to rerun it bit-identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dist: TrialDistribution,
    /// Sequence length; unused in hitting mode.
    pub n: u64,
    /// Number of repetitions.
    pub s: u64,
    /// Window length; required in hitting mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<WindowSpec>,
    pub seed: u64,
    pub mode: ExperimentMode,
    #[serde(default = "default_hitting_cap")]
    pub hitting_cap: u64,
}

impl ExperimentConfig {
    pub fn longest(dist: TrialDistribution, n: u64, s: u64, seed: u64) -> Self {
        ExperimentConfig { dist, n, s, m: None, seed, mode: ExperimentMode::Longest, hitting_cap: DEFAULT_HITTING_CAP }
    }

    pub fn hitting(dist: TrialDistribution, m: WindowSpec, s: u64, seed: u64) -> Self {
        ExperimentConfig {
            dist,
            n: 0,
            s,
            m: Some(m),
            seed,
            mode: ExperimentMode::Hitting,
            hitting_cap: DEFAULT_HITTING_CAP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.s == 0 {
            return Err(Error::domain("repetition count s must be >= 1"));
        }
        match self.mode {
            ExperimentMode::Longest if self.n == 0 => Err(Error::domain("sequence length N must be >= 1")),
            ExperimentMode::Hitting if self.m.is_none() => Err(Error::domain("hitting mode requires m")),
            ExperimentMode::Hitting if self.hitting_cap == 0 => Err(Error::domain("hitting cap must be >= 1")),
            _ => Ok(()),
        }
    }
}

/// Weighted empirical distribution on a strictly increasing support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEmpirical")]
pub struct EmpiricalDistribution {
    support: Vec<f64>,
    weights: Vec<u64>,
    total: u64,
}

#[derive(Deserialize)]
struct RawEmpirical {
    support: Vec<f64>,
    weights: Vec<u64>,
    total: u64,
}

impl TryFrom<RawEmpirical> for EmpiricalDistribution {
    type Error = Error;

    fn try_from(raw: RawEmpirical) -> Result<Self> {
        let e = EmpiricalDistribution::from_parts(raw.support, raw.weights)?;
        if e.total != raw.total {
            return Err(Error::domain(format!("total {} does not match the weights ({})", raw.total, e.total)));
        }
        Ok(e)
    }
}

impl EmpiricalDistribution {
    pub fn from_samples<I: IntoIterator<Item = f64>>(samples: I) -> Result<Self> {
        let mut v: Vec<f64> = samples.into_iter().collect();
        if v.iter().any(|x| x.is_nan()) {
            return Err(Error::domain("empirical sample contains NaN"));
        }
        v.sort_by(f64::total_cmp);
        let mut support: Vec<f64> = Vec::new();
        let mut weights: Vec<u64> = Vec::new();
        for x in v {
            match support.last() {
                Some(&last) if last == x => *weights.last_mut().expect("parallel vectors") += 1,
                _ => {
                    support.push(x);
                    weights.push(1);
                }
            }
        }
        EmpiricalDistribution::from_parts(support, weights)
    }

    pub fn from_parts(support: Vec<f64>, weights: Vec<u64>) -> Result<Self> {
        if support.len() != weights.len() {
            return Err(Error::domain("support and weights differ in length"));
        }
        if support.is_empty() {
            return Err(Error::domain("empirical distribution is empty"));
        }
        if support.iter().any(|x| x.is_nan()) || support.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::domain("support must be strictly increasing"));
        }
        if weights.contains(&0) {
            return Err(Error::domain("weights must be positive"));
        }
        let total = weights
            .iter()
            .try_fold(0u64, |a, &w| a.checked_add(w))
            .ok_or_else(|| Error::domain("total weight overflows"))?;
        Ok(EmpiricalDistribution { support, weights, total })
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// `#{X <= x} / total`.
    pub fn ecdf(&self, x: f64) -> f64 {
        let idx = self.support.partition_point(|&v| v <= x);
        self.cumulative(idx)
    }

    /// `#{X < x} / total`.
    pub fn ecdf_left(&self, x: f64) -> f64 {
        let idx = self.support.partition_point(|&v| v < x);
        self.cumulative(idx)
    }

    fn cumulative(&self, idx: usize) -> f64 {
        let c: u64 = self.weights[..idx].iter().sum();
        c as f64 / self.total as f64
    }

    pub fn mean(&self) -> f64 {
        let s: f64 = self.support.iter().zip(&self.weights).map(|(x, &w)| x * w as f64).sum();
        s / self.total as f64
    }

    pub fn min(&self) -> f64 {
        self.support[0]
    }

    pub fn max(&self) -> f64 {
        *self.support.last().expect("non-empty")
    }
}

/// A reference CDF for Kolmogorov–Smirnov comparisons.
pub trait ReferenceCdf {
    /// `F(x) = P(X <= x)`.
    fn cdf(&self, x: f64) -> f64;

    /// `F(x-) = P(X < x)`.
    fn left_limit(&self, x: f64) -> f64 {
        self.cdf(x)
    }

    /// Jump points of `F` inside `[lo, hi]`.
    fn atoms_in(&self, _lo: f64, _hi: f64) -> Vec<f64> {
        Vec::new()
    }
}

impl ReferenceCdf for EmpiricalDistribution {
    fn cdf(&self, x: f64) -> f64 {
        self.ecdf(x)
    }

    fn left_limit(&self, x: f64) -> f64 {
        self.ecdf_left(x)
    }

    fn atoms_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        self.support.iter().copied().filter(|&x| lo <= x && x <= hi).collect()
    }
}

/// A continuous reference given by a closure.
pub struct ContinuousCdf<F>(pub F);

impl<F: Fn(f64) -> f64> ReferenceCdf for ContinuousCdf<F> {
    fn cdf(&self, x: f64) -> f64 {
        (self.0)(x)
    }
}

/// `1 - e^{-x}`, the Theorem 1 limit.
pub fn exponential_reference() -> ContinuousCdf<fn(f64) -> f64> {
    ContinuousCdf(crate::analytic::theorem1_limit_cdf)
}

/// The accompanying distribution of `mu(N) - [m(N)]` as a lattice CDF on the integers.
impl ReferenceCdf for AccompanyingDistribution {
    fn cdf(&self, x: f64) -> f64 {
        self.cdf_le(x)
    }

    fn left_limit(&self, x: f64) -> f64 {
        // P(X < x) = P(X < ceil(x)) for integer X
        self.cdf(x.ceil() as i64).value
    }

    fn atoms_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let (lo, hi) = (lo.ceil() as i64, hi.floor() as i64);
        (lo..=hi).map(|k| k as f64).collect()
    }
}

/// `sup_x |ECDF(x) - F(x)|`, evaluated on both sides of every jump of
/// either function.
pub fn sup_distance(empirical: &EmpiricalDistribution, reference: &dyn ReferenceCdf) -> f64 {
    let mut points: Vec<f64> = empirical.support().to_vec();
    points.extend(reference.atoms_in(empirical.min(), empirical.max()));
    let mut d: f64 = 0.0;
    for x in points {
        d = d.max((empirical.ecdf(x) - reference.cdf(x)).abs());
        d = d.max((empirical.ecdf_left(x) - reference.left_limit(x)).abs());
    }
    d
}

fn require_mode(cfg: &ExperimentConfig, mode: ExperimentMode) -> Result<()> {
    cfg.validate()?;
    if cfg.mode != mode {
        return Err(Error::domain(format!("expected a {mode:?} experiment, got {:?}", cfg.mode)));
    }
    Ok(())
}

/// Maps `f` over repetition indices, collecting in index order.
fn map_repetitions<T, F>(s: u64, threads: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match threads {
        None => Ok((0..s).into_par_iter().map(f).collect()),
        Some(0) => Err(Error::domain("thread count must be >= 1")),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::domain(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(|| (0..s).into_par_iter().map(f).collect()))
        }
    }
}

/// `mu(N)` for one simulated sequence, without storing it.
pub fn simulate_longest_run(dist: &TrialDistribution, n: u64, stream_seed: u64) -> u64 {
    let mut state = ScanState::new();
    for o in simulate_sequence(dist, n, stream_seed) {
        state.push(o);
    }
    state.best
}

/// `tau_m` for one simulated stream, or `None` past `cap` symbols.
pub fn simulate_hitting_time(dist: &TrialDistribution, m: WindowSpec, cap: u64, stream_seed: u64) -> Option<u64> {
    crate::scan::first_hitting(simulate_sequence(dist, cap, stream_seed), m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongestRunResult {
    /// Distribution of `k = mu(N) - [m(N)]`.
    pub offsets: EmpiricalDistribution,
    /// `[m(N)]`.
    pub centering: i64,
    /// `mu(N)` per repetition, by index.
    pub longest: Vec<u64>,
}

pub fn run_longest_experiment(cfg: &ExperimentConfig) -> Result<LongestRunResult> {
    run_longest_experiment_with_threads(cfg, None)
}

pub fn run_longest_experiment_with_threads(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<LongestRunResult> {
    require_mode(cfg, ExperimentMode::Longest)?;
    let centering = m_of_n(&cfg.dist, cfg.n as f64)?.integer_part();
    let longest = map_repetitions(cfg.s, threads, |i| {
        simulate_longest_run(&cfg.dist, cfg.n, repetition_seed(cfg.seed, i))
    })?;
    let offsets = EmpiricalDistribution::from_samples(longest.iter().map(|&mu| (mu as i64 - centering) as f64))?;
    Ok(LongestRunResult { offsets, centering, longest })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HittingTimeResult {
    /// Distribution of `tau_m alpha P(A_1)` over repetitions that hit in time.
    pub scaled: EmpiricalDistribution,
    /// `alpha P(A_1)`.
    pub scale: f64,
    /// `tau_m` per repetition, `None` where the cap was reached.
    pub hitting_times: Vec<Option<u64>>,
    pub excluded: u64,
}

pub fn run_hitting_experiment(cfg: &ExperimentConfig) -> Result<HittingTimeResult> {
    run_hitting_experiment_with_threads(cfg, None)
}

pub fn run_hitting_experiment_with_threads(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<HittingTimeResult> {
    require_mode(cfg, ExperimentMode::Hitting)?;
    let m = cfg.m.expect("validated");
    let scale = alpha_correction(&cfg.dist, m)?.alpha * window_probability(&cfg.dist, m);
    let hitting_times = map_repetitions(cfg.s, threads, |i| {
        simulate_hitting_time(&cfg.dist, m, cfg.hitting_cap, repetition_seed(cfg.seed, i))
    })?;
    let excluded = hitting_times.iter().filter(|t| t.is_none()).count() as u64;
    if excluded == cfg.s {
        return Err(Error::domain(format!("every repetition exceeded the hitting cap of {} symbols", cfg.hitting_cap)));
    }
    let scaled = EmpiricalDistribution::from_samples(hitting_times.iter().flatten().map(|&t| t as f64 * scale))?;
    Ok(HittingTimeResult { scaled, scale, hitting_times, excluded })
}

/// Parameters printed with one of the eight published simulation panels:
/// a longest-run experiment over `N` trials and a hitting-time experiment
/// with window `m`, both with `s` repetitions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FigurePreset {
    pub figure: u8,
    /// `(p, q1, q2)` as `(numerator, denominator)` pairs.
    pub ratios: [(i64, i64); 3],
    pub n: u64,
    pub s: u64,
    pub m: usize,
}

const PRESETS: [FigurePreset; 8] = [
    FigurePreset { figure: 1, ratios: [(1, 3), (1, 3), (1, 3)], n: 3_000_000, s: 3000, m: 16 },
    FigurePreset { figure: 2, ratios: [(2, 5), (3, 10), (3, 10)], n: 3_000_000, s: 3000, m: 19 },
    FigurePreset { figure: 3, ratios: [(1, 2), (2, 5), (1, 10)], n: 4_000_000, s: 3000, m: 25 },
    FigurePreset { figure: 4, ratios: [(1, 2), (3, 10), (1, 5)], n: 3_000_000, s: 3000, m: 23 },
    FigurePreset { figure: 5, ratios: [(1, 2), (1, 4), (1, 4)], n: 2_000_000, s: 2000, m: 25 },
    FigurePreset { figure: 6, ratios: [(3, 5), (1, 5), (1, 5)], n: 4_000_000, s: 3000, m: 34 },
    FigurePreset { figure: 7, ratios: [(7, 10), (1, 5), (1, 10)], n: 4_000_000, s: 3000, m: 47 },
    FigurePreset { figure: 8, ratios: [(4, 5), (1, 10), (1, 10)], n: 3_000_000, s: 3000, m: 72 },
];

pub fn figure_preset(figure: u8) -> Option<FigurePreset> {
    PRESETS.iter().find(|p| p.figure == figure).copied()
}

pub fn figure_presets() -> &'static [FigurePreset] {
    &PRESETS
}

impl FigurePreset {
    pub fn dist(&self) -> TrialDistribution {
        let [p, q1, q2] = self.ratios.map(|(a, b)| a as f64 / b as f64);
        TrialDistribution::new(p, q1, q2).expect("preset probabilities are valid")
    }

    pub fn window(&self) -> WindowSpec {
        WindowSpec::new(self.m).expect("preset m >= 1")
    }

    /// Multiplies `N` and `s` by `scale`, rounding to the nearest integer (at least 1).
    pub fn scaled(&self, scale: f64) -> Result<FigurePreset> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::domain(format!("scale must be a positive number (got {scale})")));
        }
        let f = |v: u64| ((v as f64 * scale).round() as u64).max(1);
        Ok(FigurePreset { n: f(self.n), s: f(self.s), ..*self })
    }

    pub fn longest_config(&self, seed: u64) -> ExperimentConfig {
        ExperimentConfig::longest(self.dist(), self.n, self.s, seed)
    }

    pub fn hitting_config(&self, seed: u64) -> ExperimentConfig {
        ExperimentConfig { n: self.n, ..ExperimentConfig::hitting(self.dist(), self.window(), self.s, seed) }
    }
}
