//! Exact ground truth at small scale.
//!
//! Two independent routes:
//!
//! - full enumeration of all `3^n` sequences, tallied by composition (number
//!   of `+` and `-`), so a single pass serves every trial distribution;
//! - a forward dynamic program over the gaps to the last two occurrences of
//!   each failure type, exact (composition counts) or in `f64`.
//!
//! Composition counts are integers, so results are exact and independent of
//! how the enumeration is split across threads.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{is_window_valid, Outcome, TrialDistribution, WindowSpec};

/// Largest sequence length accepted by full enumeration (`3^14` sequences).
pub const MAX_ENUMERATION_LEN: usize = 14;

/// Largest `N` for the exact dynamic program; `3^80 < 2^128`.
pub const MAX_EXACT_DP_LEN: u64 = 80;

/// Default work budget in state-transitions per query.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

/// Trial distribution with exact rational probabilities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalDist {
    p: BigRational,
    q1: BigRational,
    q2: BigRational,
}

impl RationalDist {
    pub fn new(p: BigRational, q1: BigRational, q2: BigRational) -> Result<Self> {
        let zero = BigRational::zero();
        let one = BigRational::one();
        let mut violations = Vec::new();
        for (name, v) in [("p", &p), ("q1", &q1), ("q2", &q2)] {
            if *v <= zero {
                violations.push(format!("{name} must be > 0 (got {v})"));
            }
        }
        if p >= one {
            violations.push(format!("p must be < 1 (got {p})"));
        }
        let total = &p + &q1 + &q2;
        if total != one {
            violations.push(format!("p + q1 + q2 must equal 1 exactly (got {total})"));
        }
        if violations.is_empty() {
            Ok(RationalDist { p, q1, q2 })
        } else {
            Err(Error::InvalidDistribution(violations.join("; ")))
        }
    }

    /// Builds from `(numerator, denominator)` pairs.
    pub fn from_ratios(p: (i64, i64), q1: (i64, i64), q2: (i64, i64)) -> Result<Self> {
        let r = |(n, d): (i64, i64)| {
            if d == 0 {
                Err(Error::InvalidDistribution("zero denominator".into()))
            } else {
                Ok(BigRational::new(BigInt::from(n), BigInt::from(d)))
            }
        };
        RationalDist::new(r(p)?, r(q1)?, r(q2)?)
    }

    pub fn uniform() -> Self {
        RationalDist::from_ratios((1, 3), (1, 3), (1, 3)).expect("1/3 triple is valid")
    }

    pub fn p(&self) -> &BigRational {
        &self.p
    }

    pub fn q1(&self) -> &BigRational {
        &self.q1
    }

    pub fn q2(&self) -> &BigRational {
        &self.q2
    }

    pub fn to_trial_distribution(&self) -> Result<TrialDistribution> {
        let f = |r: &BigRational| r.to_f64().unwrap_or(f64::NAN);
        TrialDistribution::new(f(&self.p), f(&self.q1), f(&self.q2))
    }
}

/// Exact probability in `[0, 1]`, always in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalProb(BigRational);

impl RationalProb {
    pub fn new(value: BigRational) -> Result<Self> {
        if value.is_negative() || value > BigRational::one() {
            return Err(Error::domain(format!("{value} is not a probability")));
        }
        Ok(RationalProb(value))
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// `self / other`, for conditional probabilities.
    pub fn conditional_on(&self, other: &RationalProb) -> Result<RationalProb> {
        if other.0.is_zero() {
            return Err(Error::domain("conditioning on a null event"));
        }
        RationalProb::new(&self.0 / &other.0)
    }

    pub fn complement(&self) -> RationalProb {
        RationalProb(BigRational::one() - &self.0)
    }
}

impl fmt::Display for RationalProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

/// Number of length-`n` sequences in an event, split by how many `+` and `-`
/// they contain. Evaluates to a probability under any trial distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositionCounts {
    n: usize,
    counts: Vec<u128>,
}

impl CompositionCounts {
    pub fn zero(n: usize) -> Self {
        CompositionCounts { n, counts: vec![0; (n + 1) * (n + 1)] }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    fn index(&self, plus: usize, minus: usize) -> usize {
        plus * (self.n + 1) + minus
    }

    /// Sequences with `plus` failures of type I and `minus` of type II.
    pub fn get(&self, plus: usize, minus: usize) -> u128 {
        if plus + minus > self.n {
            0
        } else {
            self.counts[self.index(plus, minus)]
        }
    }

    pub fn total(&self) -> u128 {
        self.counts.iter().sum()
    }

    pub fn add_assign(&mut self, other: &CompositionCounts) {
        assert_eq!(self.n, other.n, "composition length mismatch");
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    pub fn probability(&self, dist: &RationalDist) -> RationalProb {
        let pow = |base: &BigRational| {
            let mut v = Vec::with_capacity(self.n + 1);
            let mut acc = BigRational::one();
            for _ in 0..=self.n {
                v.push(acc.clone());
                acc *= base;
            }
            v
        };
        let (pp, p1, p2) = (pow(&dist.p), pow(&dist.q1), pow(&dist.q2));
        let mut sum = BigRational::zero();
        for plus in 0..=self.n {
            for minus in 0..=(self.n - plus) {
                let c = self.counts[self.index(plus, minus)];
                if c != 0 {
                    let w = &pp[self.n - plus - minus] * &p1[plus] * &p2[minus];
                    sum += w * BigRational::from_integer(BigInt::from(c));
                }
            }
        }
        RationalProb::new(sum).expect("a sum of sequence probabilities lies in [0, 1]")
    }

    pub fn probability_f64(&self, dist: &TrialDistribution) -> f64 {
        let mut sum = 0.0;
        for plus in 0..=self.n {
            for minus in 0..=(self.n - plus) {
                let c = self.counts[self.index(plus, minus)];
                if c != 0 {
                    sum += c as f64
                        * dist.p().powi((self.n - plus - minus) as i32)
                        * dist.q1().powi(plus as i32)
                        * dist.q2().powi(minus as i32);
                }
            }
        }
        sum
    }
}

fn check_enumeration_len(n: usize) -> Result<()> {
    if n > MAX_ENUMERATION_LEN {
        return Err(Error::SizeLimit {
            what: "enumeration length",
            requested: n as u64,
            limit: MAX_ENUMERATION_LEN as u64,
        });
    }
    Ok(())
}

/// Enumerates all `3^n` sequences and tallies them into `classes` buckets
/// chosen by `classify`, which must return a value below `classes`.
pub fn count_compositions_by<F>(n: usize, classes: usize, classify: F) -> Result<Vec<CompositionCounts>>
where
    F: Fn(&[Outcome]) -> usize + Sync,
{
    check_enumeration_len(n)?;
    // Split on the leading symbols; each chunk walks its own suffix space.
    let prefix_len = n.min(2);
    let chunks = 3usize.pow(prefix_len as u32);
    let partials: Vec<Vec<CompositionCounts>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut out = vec![CompositionCounts::zero(n); classes];
            let mut seq = vec![Outcome::Success; n];
            let mut c = chunk;
            for slot in seq.iter_mut().take(prefix_len) {
                *slot = Outcome::from_code((c % 3) as u8).expect("code < 3");
                c /= 3;
            }
            loop {
                let class = classify(&seq);
                assert!(class < classes, "classifier returned {class}, expected < {classes}");
                let plus = seq.iter().filter(|&&o| o == Outcome::FailPlus).count();
                let minus = seq.iter().filter(|&&o| o == Outcome::FailMinus).count();
                let idx = out[class].index(plus, minus);
                out[class].counts[idx] += 1;

                // odometer over positions prefix_len..n
                let mut pos = prefix_len;
                loop {
                    if pos == n {
                        return out;
                    }
                    let next = seq[pos].code() + 1;
                    if next < 3 {
                        seq[pos] = Outcome::from_code(next).expect("code < 3");
                        break;
                    }
                    seq[pos] = Outcome::Success;
                    pos += 1;
                }
            }
        })
        .collect();

    let mut merged = vec![CompositionCounts::zero(n); classes];
    for part in partials {
        for (m, p) in merged.iter_mut().zip(&part) {
            m.add_assign(p);
        }
    }
    Ok(merged)
}

/// Exact probability that a length-`n` sequence satisfies `predicate`.
pub fn enumerate_event<F>(dist: &RationalDist, n: usize, predicate: F) -> Result<RationalProb>
where
    F: Fn(&[Outcome]) -> bool + Sync,
{
    let counts = count_compositions_by(n, 2, |s| usize::from(predicate(s)))?;
    Ok(counts[1].probability(dist))
}

/// Whether the `m`-window starting at 0-based offset `start` qualifies.
fn window_at(seq: &[Outcome], start: usize, m: usize) -> bool {
    is_window_valid(&seq[start..start + m]).expect("windows are non-empty")
}

/// Sequences `X_1..X_m` in `A_1`.
pub fn window_counts(m: WindowSpec) -> Result<CompositionCounts> {
    let m = m.len();
    Ok(count_compositions_by(m, 2, |s| usize::from(window_at(s, 0, m)))?.swap_remove(1))
}

/// Sequences `X_1..X_{2m-1}` in `A_1 Ā_2 ... Ā_m`.
pub fn joint_survival_counts(m: WindowSpec) -> Result<CompositionCounts> {
    let m = m.len();
    let mut counts = count_compositions_by(2 * m - 1, 2, |s| {
        usize::from(window_at(s, 0, m) && !(1..m).any(|i| window_at(s, i, m)))
    })?;
    Ok(counts.swap_remove(1))
}

/// Counts of `A_1 Ā_2 ... Ā_m` and of `A_1`, both over `X_1..X_{2m-1}`.
pub fn conditional_counts(m: WindowSpec) -> Result<(CompositionCounts, CompositionCounts)> {
    let mm = m.len();
    let n = 2 * mm - 1;
    if n > MAX_ENUMERATION_LEN {
        return Err(Error::SizeLimit {
            what: "conditional enumeration window length m",
            requested: mm as u64,
            limit: (MAX_ENUMERATION_LEN as u64).div_ceil(2),
        });
    }
    // 0: A_1 fails, 1: A_1 and some later window qualifies, 2: A_1 alone
    let mut counts = count_compositions_by(n, 3, |s| {
        if !window_at(s, 0, mm) {
            0
        } else if (1..mm).any(|i| window_at(s, i, mm)) {
            1
        } else {
            2
        }
    })?;
    let alone = counts.pop().expect("three classes");
    let mut a1 = counts.pop().expect("three classes");
    a1.add_assign(&alone);
    Ok((alone, a1))
}

/// Exact `P(A_1)` by enumerating `X_1..X_m`.
pub fn enumerate_window_probability(dist: &RationalDist, m: WindowSpec) -> Result<RationalProb> {
    Ok(window_counts(m)?.probability(dist))
}

/// Exact `P(A_1 Ā_2 ... Ā_m)` by enumerating `X_1..X_{2m-1}`.
pub fn enumerate_joint_survival(dist: &RationalDist, m: WindowSpec) -> Result<RationalProb> {
    Ok(joint_survival_counts(m)?.probability(dist))
}

/// Exact `P(Ā_2 ... Ā_m | A_1)`; needs `2m - 1 <= 14`.
pub fn enumerate_conditional(dist: &RationalDist, m: WindowSpec) -> Result<RationalProb> {
    let (joint, a1) = conditional_counts(m)?;
    joint.probability(dist).conditional_on(&a1.probability(dist))
}

/// Gaps from the current position to the last and second-to-last occurrence
/// of each failure type, capped at `m`. A never-seen occurrence counts from
/// position 0. Absorbed mass is carried outside the state space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DpState {
    pub gap_last_plus: u16,
    pub gap_prev_plus: u16,
    pub gap_last_minus: u16,
    pub gap_prev_minus: u16,
}

impl DpState {
    pub const START: DpState = DpState { gap_last_plus: 0, gap_prev_plus: 0, gap_last_minus: 0, gap_prev_minus: 0 };

    /// Length of the longest valid run ending here, capped at `m`.
    #[inline]
    pub fn suffix_run(&self) -> u16 {
        self.gap_prev_plus.min(self.gap_prev_minus)
    }

    /// Next state, or `None` once the suffix run reaches `m`.
    pub fn step(&self, next: Outcome, m: u16) -> Option<DpState> {
        let inc = |g: u16| (g + 1).min(m);
        let s = match next {
            Outcome::Success => DpState {
                gap_last_plus: inc(self.gap_last_plus),
                gap_prev_plus: inc(self.gap_prev_plus),
                gap_last_minus: inc(self.gap_last_minus),
                gap_prev_minus: inc(self.gap_prev_minus),
            },
            Outcome::FailPlus => DpState {
                gap_last_plus: 0,
                gap_prev_plus: inc(self.gap_last_plus),
                gap_last_minus: inc(self.gap_last_minus),
                gap_prev_minus: inc(self.gap_prev_minus),
            },
            Outcome::FailMinus => DpState {
                gap_last_plus: inc(self.gap_last_plus),
                gap_prev_plus: inc(self.gap_prev_plus),
                gap_last_minus: 0,
                gap_prev_minus: inc(self.gap_last_minus),
            },
        };
        (s.suffix_run() < m).then_some(s)
    }
}

const ABSORBED: u32 = u32::MAX;

/// Reachable live states and their transitions for one window length.
#[derive(Debug, Clone)]
pub struct DpTable {
    m: u16,
    states: Vec<DpState>,
    transitions: Vec<[u32; 3]>,
}

impl DpTable {
    pub fn build(m: WindowSpec) -> Result<Self> {
        let mm = u16::try_from(m.len()).map_err(|_| Error::SizeLimit {
            what: "DP window length m",
            requested: m.len() as u64,
            limit: u16::MAX as u64 - 1,
        })?;
        let mut index = std::collections::HashMap::new();
        let mut states = vec![DpState::START];
        let mut transitions = Vec::new();
        index.insert(DpState::START, 0u32);
        let mut i = 0;
        while i < states.len() {
            let s = states[i];
            let mut row = [ABSORBED; 3];
            for (slot, o) in row.iter_mut().zip(Outcome::ALL) {
                if let Some(t) = s.step(o, mm) {
                    let next_id = states.len() as u32;
                    let id = *index.entry(t).or_insert_with(|| {
                        states.push(t);
                        next_id
                    });
                    *slot = id;
                }
            }
            transitions.push(row);
            i += 1;
        }
        Ok(DpTable { m: mm, states, transitions })
    }

    pub fn m(&self) -> usize {
        self.m as usize
    }

    pub fn states(&self) -> &[DpState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }
}

/// Upper bound on live states: per failure type the gap pair is `(0, 0)`,
/// `(m, m)` or `0 <= last < prev <= m`.
pub fn dp_state_bound(m: WindowSpec) -> u64 {
    let m = m.len() as u64;
    let per_type = m * (m + 1) / 2 + 2;
    per_type * per_type
}

/// Options for the dynamic-programming oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DpOptions {
    /// Maximum state-transitions (exact mode: coefficient updates) per query.
    pub budget: u64,
}

impl Default for DpOptions {
    fn default() -> Self {
        DpOptions { budget: DEFAULT_BUDGET }
    }
}

fn check_budget(required: u64, opts: &DpOptions) -> Result<()> {
    if required > opts.budget {
        Err(Error::Budget { required, budget: opts.budget })
    } else {
        Ok(())
    }
}

/// Work estimate of the float DP: `N` steps over at most [`dp_state_bound`] states.
pub fn float_dp_work(n: u64, m: WindowSpec) -> u64 {
    n.saturating_mul(dp_state_bound(m))
}

/// Work estimate of the exact DP: every state also carries `(N+1)^2` composition counts.
pub fn exact_dp_work(n: u64, m: WindowSpec) -> u64 {
    float_dp_work(n, m).saturating_mul((n + 1) * (n + 1))
}

/// Forward pass in `f64`; calls `visit` with `P(mu(j) < m)` after each step `j`.
///
/// Live and absorbed mass are tracked separately; whichever is below 1/2 is
/// the accurate one, so the result is accurate in absolute terms near 0 and 1.
fn forward_float(dist: &TrialDistribution, n: u64, m: WindowSpec, opts: &DpOptions, mut visit: impl FnMut(f64)) -> Result<()> {
    check_budget(float_dp_work(n, m), opts)?;
    let table = DpTable::build(m)?;
    let weights = [dist.p(), dist.q1(), dist.q2()];
    let mut mass = vec![0.0f64; table.len()];
    let mut next = vec![0.0f64; table.len()];
    let mut absorbed = 0.0f64;
    mass[0] = 1.0;
    for _ in 0..n {
        next.iter_mut().for_each(|v| *v = 0.0);
        for (s, &v) in mass.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            for (k, &t) in table.transitions[s].iter().enumerate() {
                if t == ABSORBED {
                    absorbed += v * weights[k];
                } else {
                    next[t as usize] += v * weights[k];
                }
            }
        }
        std::mem::swap(&mut mass, &mut next);
        let live: f64 = mass.iter().sum();
        visit(if live < 0.5 { live } else { 1.0 - absorbed });
    }
    Ok(())
}

/// `P(mu(N) < m)` in `f64` by forward dynamic programming.
pub fn dp_longest_cdf(dist: &TrialDistribution, n: u64, m: WindowSpec, opts: &DpOptions) -> Result<f64> {
    if n < m.len() as u64 {
        return Ok(1.0);
    }
    let mut last = 1.0;
    forward_float(dist, n, m, opts, |v| last = v)?;
    Ok(last)
}

/// Composition counts of the length-`N` sequences with `mu(N) < m`.
pub fn dp_longest_counts(n: u64, m: WindowSpec, opts: &DpOptions) -> Result<CompositionCounts> {
    if n > MAX_EXACT_DP_LEN {
        return Err(Error::SizeLimit { what: "exact DP length N", requested: n, limit: MAX_EXACT_DP_LEN });
    }
    check_budget(exact_dp_work(n, m), opts)?;
    let nn = n as usize;
    let table = DpTable::build(m)?;
    let width = (nn + 1) * (nn + 1);
    // counts[state * width + plus * (nn+1) + minus]
    let mut counts = vec![0u128; table.len() * width];
    let mut next = vec![0u128; table.len() * width];
    counts[0] = 1;
    for step in 0..nn {
        next.iter_mut().for_each(|v| *v = 0);
        for s in 0..table.len() {
            let src = &counts[s * width..(s + 1) * width];
            if src.iter().all(|&c| c == 0) {
                continue;
            }
            for (k, &t) in table.transitions[s].iter().enumerate() {
                if t == ABSORBED {
                    continue;
                }
                let dst = t as usize * width;
                for plus in 0..=step {
                    for minus in 0..=(step - plus) {
                        let c = src[plus * (nn + 1) + minus];
                        if c == 0 {
                            continue;
                        }
                        let (np, nm) = match k {
                            0 => (plus, minus),
                            1 => (plus + 1, minus),
                            _ => (plus, minus + 1),
                        };
                        next[dst + np * (nn + 1) + nm] += c;
                    }
                }
            }
        }
        std::mem::swap(&mut counts, &mut next);
    }
    let mut out = CompositionCounts::zero(nn);
    for s in 0..table.len() {
        for (o, c) in out.counts.iter_mut().zip(&counts[s * width..(s + 1) * width]) {
            *o += c;
        }
    }
    Ok(out)
}

/// Exact `P(mu(N) < m)`.
pub fn dp_longest_cdf_exact(dist: &RationalDist, n: u64, m: WindowSpec, opts: &DpOptions) -> Result<RationalProb> {
    if n < m.len() as u64 {
        return RationalProb::new(BigRational::one());
    }
    Ok(dp_longest_counts(n, m, opts)?.probability(dist))
}

/// `P(tau_m > N)`, identical to `P(mu(N) < m)`.
pub fn dp_hitting_tail(dist: &TrialDistribution, m: WindowSpec, n: u64, opts: &DpOptions) -> Result<f64> {
    dp_longest_cdf(dist, n, m, opts)
}

pub fn dp_hitting_tail_exact(dist: &RationalDist, m: WindowSpec, n: u64, opts: &DpOptions) -> Result<RationalProb> {
    dp_longest_cdf_exact(dist, n, m, opts)
}

/// `P(tau_m > j)` for `j = 0..=n` in a single forward pass.
pub fn dp_hitting_tails(dist: &TrialDistribution, m: WindowSpec, n: u64, opts: &DpOptions) -> Result<Vec<f64>> {
    let mut tails = Vec::with_capacity(n as usize + 1);
    tails.push(1.0);
    forward_float(dist, n, m, opts, |v| tails.push(v))?;
    Ok(tails)
}
