//! Exact parsing of probabilities given as fractions (`1/3`) or decimals (`0.25`, `2.5e-1`).

use contam_runs::oracle::RationalDist;
use contam_runs::TrialDistribution;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{CliError, CliResult};

pub fn parse_rational(text: &str) -> Result<BigRational, String> {
    let t = text.trim();
    if let Some((num, den)) = t.split_once('/') {
        let n = parse_decimal(num)?;
        let d = parse_decimal(den)?;
        if d.is_zero() {
            return Err(format!("{text:?}: zero denominator"));
        }
        return Ok(n / d);
    }
    parse_decimal(t)
}

fn parse_decimal(text: &str) -> Result<BigRational, String> {
    let bad = || format!("{text:?} is not a number; expected e.g. 0.25, 1/3 or 2.5e-1");
    let t = text.trim();
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(all.parse::<BigInt>().map_err(|_| bad())?);
    let shift = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    if shift.unsigned_abs() > 4000 {
        return Err(format!("{text:?}: exponent out of range"));
    }
    let scale = (0..shift.unsigned_abs()).fold(BigRational::one(), |acc, _| acc * &ten);
    value = if shift >= 0 { value * scale } else { value / scale };
    Ok(if neg { -value } else { value })
}

/// A trial distribution from the command line, with its exact rational form
/// when the three values sum to exactly 1.
#[derive(Debug, Clone)]
pub struct ParsedDist {
    pub float: TrialDistribution,
    pub exact: Option<RationalDist>,
}

pub fn parse_dist(p: &str, q1: &str, q2: &str) -> CliResult<ParsedDist> {
    let r = |name: &str, v: &str| parse_rational(v).map_err(|e| CliError::usage(format!("--{name}: {e}")));
    let (p, q1, q2) = (r("p", p)?, r("q1", q1)?, r("q2", q2)?);
    let f = |x: &BigRational| x.to_f64().unwrap_or(f64::NAN);
    let exact = RationalDist::new(p.clone(), q1.clone(), q2.clone()).ok();
    let float = TrialDistribution::new(f(&p), f(&q1), f(&q2))?;
    Ok(ParsedDist { float, exact })
}

impl ParsedDist {
    pub fn require_exact(&self) -> CliResult<&RationalDist> {
        self.exact.as_ref().ok_or_else(|| {
            CliError::Core(contam_runs::Error::InvalidDistribution(
                "exact mode needs p + q1 + q2 = 1 exactly; use fractions such as 1/3 or pass --mode float".into(),
            ))
        })
    }
}

/// Counts such as `3000000`, `3e6` or `1_000`.
pub fn parse_count(text: &str) -> Result<u64, String> {
    let t: String = text.trim().chars().filter(|&c| c != '_').collect();
    if let Ok(v) = t.parse::<u64>() {
        return Ok(v);
    }
    let r = parse_decimal(&t).map_err(|_| format!("{text:?} is not a non-negative integer"))?;
    if !r.is_integer() || r < BigRational::zero() {
        return Err(format!("{text:?} is not a non-negative integer"));
    }
    r.to_integer().to_u64().ok_or_else(|| format!("{text:?} is too large"))
}
