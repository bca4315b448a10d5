//! Outcome alphabet, trial distributions and the constants derived from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on `p + q1 + q2 = 1`.
pub const SIMPLEX_TOLERANCE: f64 = 1e-12;

/// Result of a single trial. Stored as one byte.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum Outcome {
    /// Success, written `0`.
    Success = 0,
    /// Failure of type I, written `+`.
    FailPlus = 1,
    /// Failure of type II, written `-`.
    FailMinus = 2,
}

impl Outcome {
    pub const ALL: [Outcome; 3] = [Outcome::Success, Outcome::FailPlus, Outcome::FailMinus];

    #[inline]
    pub fn code(self) -> u8 {
        self as u8
    }

    #[inline]
    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Outcome::Success),
            1 => Some(Outcome::FailPlus),
            2 => Some(Outcome::FailMinus),
            _ => None,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Outcome::Success => '0',
            Outcome::FailPlus => '+',
            Outcome::FailMinus => '-',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            '0' => Some(Outcome::Success),
            '+' => Some(Outcome::FailPlus),
            '-' => Some(Outcome::FailMinus),
            _ => None,
        }
    }
}

/// Parses a string such as `"0+-0"` into outcomes. Whitespace and commas are ignored.
pub fn parse_outcomes(s: &str) -> Result<Vec<Outcome>> {
    s.chars()
        .filter(|c| !c.is_whitespace() && *c != ',')
        .map(|c| {
            Outcome::from_symbol(c)
                .ok_or_else(|| Error::domain(format!("unknown outcome symbol {c:?}; expected 0, + or -")))
        })
        .collect()
}

/// Probabilities of success, type-I failure and type-II failure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution", into = "RawDistribution")]
pub struct TrialDistribution {
    p: f64,
    q1: f64,
    q2: f64,
}

#[derive(Serialize, Deserialize)]
struct RawDistribution {
    p: f64,
    q1: f64,
    q2: f64,
}

impl TryFrom<RawDistribution> for TrialDistribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        TrialDistribution::new(raw.p, raw.q1, raw.q2)
    }
}

impl From<TrialDistribution> for RawDistribution {
    fn from(d: TrialDistribution) -> Self {
        RawDistribution { p: d.p, q1: d.q1, q2: d.q2 }
    }
}

impl TrialDistribution {
    pub fn new(p: f64, q1: f64, q2: f64) -> Result<Self> {
        let mut violations = Vec::new();
        for (name, v) in [("p", p), ("q1", q1), ("q2", q2)] {
            if !v.is_finite() || v <= 0.0 {
                violations.push(format!("{name} must be > 0 (got {v})"));
            }
        }
        if p >= 1.0 {
            violations.push(format!("p must be < 1 (got {p})"));
        }
        let total = p + q1 + q2;
        if !((total - 1.0).abs() <= SIMPLEX_TOLERANCE) {
            violations.push(format!("p + q1 + q2 must equal 1 within {SIMPLEX_TOLERANCE:e} (got {total})"));
        }
        if violations.is_empty() {
            Ok(TrialDistribution { p, q1, q2 })
        } else {
            Err(Error::InvalidDistribution(violations.join("; ")))
        }
    }

    /// The symmetric case `p = q1 = q2 = 1/3`.
    pub fn uniform() -> Self {
        TrialDistribution { p: 1.0 / 3.0, q1: 1.0 / 3.0, q2: 1.0 / 3.0 }
    }

    #[inline]
    pub fn p(&self) -> f64 {
        self.p
    }

    #[inline]
    pub fn q1(&self) -> f64 {
        self.q1
    }

    #[inline]
    pub fn q2(&self) -> f64 {
        self.q2
    }

    /// Same distribution with the two failure types exchanged.
    pub fn swapped(&self) -> Self {
        TrialDistribution { p: self.p, q1: self.q2, q2: self.q1 }
    }

    pub fn probability(&self, outcome: Outcome) -> f64 {
        match outcome {
            Outcome::Success => self.p,
            Outcome::FailPlus => self.q1,
            Outcome::FailMinus => self.q2,
        }
    }

    pub fn constants(&self) -> DerivedConstants {
        derive_constants(self)
    }
}

/// Constants entering the clumping correction and the centering sequence.
///
/// `c` is on the natural-log scale: `c = ln(1/p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    pub c: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub k: f64,
}

impl DerivedConstants {
    /// `K` through its unsimplified form `(C2 - C1)/(C C0) - (C1 - C0)^2/(2 C C0^2)`.
    pub fn k_unsimplified(&self) -> f64 {
        let DerivedConstants { c, c0, c1, c2, .. } = *self;
        (c2 - c1) / (c * c0) - (c1 - c0).powi(2) / (2.0 * c * c0 * c0)
    }

    /// `(C1 - C0) / (C C0)`, the coefficient that recurs throughout the centering sequence.
    pub fn r(&self) -> f64 {
        (self.c1 - self.c0) / (self.c * self.c0)
    }
}

pub fn derive_constants(dist: &TrialDistribution) -> DerivedConstants {
    let TrialDistribution { p, q1, q2 } = *dist;
    let sq = q1 * q1 + q2 * q2;
    let prod = q1 * q2;
    let pm1 = p - 1.0;

    let c = (1.0 / p).ln();
    let c0 = q1 + q2;
    let c1 = p * sq / prod - 1.0;
    let c2 = sq * p * p / (prod * pm1) + p / pm1 + 2.0 * (2.0 * p + 1.0) * prod / pm1.powi(3);
    let k = (2.0 * c0 * c2 - c1 * c1 - c0 * c0) / (2.0 * c * c0 * c0);
    DerivedConstants { c, c0, c1, c2, k }
}

/// Window length `m >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct WindowSpec(usize);

impl WindowSpec {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("window length m must be >= 1"));
        }
        Ok(WindowSpec(m))
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0
    }

    pub(crate) fn require_at_least(self, min: usize, op: &str) -> Result<()> {
        if self.0 < min {
            Err(Error::domain(format!("{op} requires m >= {min} (got m = {})", self.0)))
        } else {
            Ok(())
        }
    }
}

impl TryFrom<usize> for WindowSpec {
    type Error = Error;

    fn try_from(m: usize) -> Result<Self> {
        WindowSpec::new(m)
    }
}

impl From<WindowSpec> for usize {
    fn from(w: WindowSpec) -> usize {
        w.0
    }
}

/// True iff the window holds at most one `+` and at most one `-`.
pub fn is_window_valid(window: &[Outcome]) -> Result<bool> {
    if window.is_empty() {
        return Err(Error::domain("window must be non-empty"));
    }
    let (mut plus, mut minus) = (0usize, 0usize);
    for o in window {
        match o {
            Outcome::Success => {}
            Outcome::FailPlus => plus += 1,
            Outcome::FailMinus => minus += 1,
        }
    }
    Ok(plus <= 1 && minus <= 1)
}
