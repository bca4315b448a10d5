//! Closed-form quantities for at most 1+1 contaminated runs.
//!
//! Window probabilities and the clumping correction `alpha` are exact
//! expressions in `(p, q1, q2, m)`. The centering sequence `m(N)`, the
//! correction `H(x)` and the accompanying distribution of the longest run are
//! asymptotic expansions; every `log` in them is to base `1/p` and goes
//! through [`LogScale`]. Natural logarithms appear only through `C = ln(1/p)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{DerivedConstants, TrialDistribution, WindowSpec};

/// `P(A_1)`: probability that an `m`-window is at most 1+1 contaminated.
pub fn window_probability(dist: &TrialDistribution, m: WindowSpec) -> f64 {
    let m = m.len() as i32;
    let (p, q1, q2) = (dist.p(), dist.q1(), dist.q2());
    let mf = m as f64;
    // p^(m-2) with m = 1 only ever multiplies m - 1 = 0.
    let pm2 = if m >= 2 { p.powi(m - 2) } else { 0.0 };
    p.powi(m) + mf * (1.0 - p) * p.powi(m - 1) + mf * (mf - 1.0) * pm2 * q1 * q2
}

/// [`window_probability`] with a real-valued window length `m >= 1`.
pub fn window_probability_real(dist: &TrialDistribution, m: f64) -> f64 {
    let (p, q1, q2) = (dist.p(), dist.q1(), dist.q2());
    p.powf(m) + m * (1.0 - p) * p.powf(m - 1.0) + m * (m - 1.0) * p.powf(m - 2.0) * q1 * q2
}

/// The clumping correction with its numerator and denominator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaBreakdown {
    /// `C0 + C1/m + C2/(m(m-1))`
    pub numerator: f64,
    /// `1 + p(1-p)/((m-1) q1 q2) + p^2/(m(m-1) q1 q2)`
    pub denominator: f64,
    pub alpha: f64,
}

pub fn alpha_correction(dist: &TrialDistribution, m: WindowSpec) -> Result<AlphaBreakdown> {
    m.require_at_least(2, "alpha_correction")?;
    Ok(alpha_real(dist, m.len() as f64))
}

fn alpha_real(dist: &TrialDistribution, m: f64) -> AlphaBreakdown {
    let k = dist.constants();
    let (p, q12) = (dist.p(), dist.q1() * dist.q2());
    let numerator = k.c0 + k.c1 / m + k.c2 / (m * (m - 1.0));
    let denominator = 1.0 + p * (1.0 - p) / ((m - 1.0) * q12) + p * p / (m * (m - 1.0) * q12);
    AlphaBreakdown { numerator, denominator, alpha: numerator / denominator }
}

fn powers(p: f64, n: usize) -> Vec<f64> {
    let mut pw = Vec::with_capacity(n + 1);
    let mut acc = 1.0;
    for _ in 0..=n {
        pw.push(acc);
        acc *= p;
    }
    pw
}

/// One orientation of the case decomposition of `P(A_1 Ā_2 ... Ā_m)`: the
/// failure with probability `a` is the one placed first inside the window
/// (or alone), `b` is the other type.
fn casewise_half(a: f64, b: f64, m: usize, pw: &[f64]) -> f64 {
    let base = a * b * pw[m - 2];
    let mut sum = 0.0;

    // Single failure at position i, 1 < i < m: the next symbol must repeat it.
    for i in 2..m {
        sum += a * pw[m - 1] * a * (1.0 - pw[i - 1] - (i - 1) as f64 * b * pw[i - 2]);
    }
    // Single failure at position m.
    sum += a * pw[m - 1] * a;

    // Both failures, the `a`-type first at i, the `b`-type at j > i.
    // i = 1, j = m
    sum += base * b;
    // i = 1, 1 < j < m
    for j in 2..m {
        sum += base * b * (1.0 - pw[j - 1] - pw[j - 2] * (j - 1) as f64 * a);
    }
    // 1 < i, j = m
    for i in 2..m {
        sum += base * (a * (1.0 - pw[i - 1]) + b);
    }
    // 1 < i < j < m, split on the symbol at m + 1
    for i in 2..m.saturating_sub(1) {
        for j in (i + 1)..m {
            let next_same = a * (1.0 - pw[i - 1] - (i - 1) as f64 * pw[i - 2] * b * pw[j - i]);
            let next_other = b * (1.0 - pw[j - 1] - (j - 1) as f64 * a * pw[j - 2]);
            sum += base * (next_same + next_other);
        }
    }
    sum
}

/// `P(A_1 Ā_2 ... Ā_m)` by summing every case of the decomposition of `A_1`
/// directly, `O(m^2)` terms.
pub fn joint_survival_casewise(dist: &TrialDistribution, m: WindowSpec) -> Result<f64> {
    m.require_at_least(2, "joint_survival_casewise")?;
    let m = m.len();
    let (p, q1, q2) = (dist.p(), dist.q1(), dist.q2());
    let pw = powers(p, m);
    // A pure window is always followed by a valid shifted window, and so is a
    // window whose only failure sits in the first position; both contribute 0.
    Ok(casewise_half(q1, q2, m, &pw) + casewise_half(q2, q1, m, &pw))
}

/// Same quantity as [`joint_survival_casewise`] via the simplified closed forms
/// of the single-failure and two-failure sums.
pub fn joint_survival_aggregated(dist: &TrialDistribution, m: WindowSpec) -> Result<f64> {
    m.require_at_least(4, "joint_survival_aggregated")?;
    let mf = m.len() as f64;
    let mi = m.len() as i32;
    let (p, q1, q2) = (dist.p(), dist.q1(), dist.q2());
    let sq = q1 * q1 + q2 * q2;
    let prod = q1 * q2;
    let pm1 = p - 1.0;
    let p_m1 = p.powi(mi - 1);
    let p_m2 = p.powi(mi - 2);

    let single = p_m1
        * (sq * ((mf - 1.0) + p / pm1) + prod / pm1 - sq * p_m1 / pm1
            + prod * ((mf - 2.0) * p_m2 - p_m2 / pm1));

    let double = prod
        * p_m2
        * (mf * (mf - 1.0) * (q1 + q2) - (mf - 1.0)
            + 2.0 * (2.0 * p + 1.0) * prod / pm1.powi(3)
            + prod * p_m2 / pm1.powi(3)
                * (-3.0 * pm1 * pm1 * mf * mf + mf * pm1 * (13.0 * p - 7.0) + (-14.0 * p * p + 12.0 * p - 4.0))
            + p_m1 * (mf - 1.0));

    Ok(single + double)
}

/// `P(Ā_2 ... Ā_m | A_1)`.
pub fn conditional_survival(dist: &TrialDistribution, m: WindowSpec) -> Result<f64> {
    let joint = joint_survival_casewise(dist, m)?;
    Ok(joint / window_probability(dist, m))
}

/// Outcome of checking the three hypotheses of the sandwich lemma.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CfkReport {
    pub m: usize,
    pub eps: f64,
    pub p_a1: f64,
    pub alpha: f64,
    /// `|P(Ā_2 ... Ā_m | A_1) - alpha|`
    pub si_discrepancy: f64,
    pub si_holds: bool,
    /// `sum_{i=m+1}^{2m} P(A_i | A_1) = m P(A_1)`
    pub sii_sum: f64,
    pub sii_holds: bool,
    pub siii_holds: bool,
}

impl CfkReport {
    pub fn all_hold(&self) -> bool {
        self.si_holds && self.sii_holds && self.siii_holds
    }
}

/// Upper end (exclusive) of the admissible `eps` range, `min(p/10, 1/42)`.
pub fn cfk_eps_limit(dist: &TrialDistribution) -> f64 {
    (dist.p() / 10.0).min(1.0 / 42.0)
}

pub fn cfk_condition_check(dist: &TrialDistribution, m: WindowSpec, eps: f64) -> Result<CfkReport> {
    m.require_at_least(2, "cfk_condition_check")?;
    let limit = cfk_eps_limit(dist);
    if !(eps > 0.0 && eps < limit) {
        return Err(Error::domain(format!("eps must lie in (0, {limit}) (got {eps})")));
    }
    let p_a1 = window_probability(dist, m);
    let alpha = alpha_correction(dist, m)?.alpha;
    let si_discrepancy = (conditional_survival(dist, m)? - alpha).abs();
    let mf = m.len() as f64;
    // Windows starting more than m apart share no trials.
    let sii_sum = mf * p_a1;
    Ok(CfkReport {
        m: m.len(),
        eps,
        p_a1,
        alpha,
        si_discrepancy,
        si_holds: si_discrepancy < eps,
        sii_sum,
        sii_holds: sii_sum < eps,
        siii_holds: p_a1 < eps / mf,
    })
}

/// `10 p^m`, the stand-in for the (SI) discrepancy when it is not measured.
pub fn fallback_epsilon(dist: &TrialDistribution, m: WindowSpec) -> f64 {
    10.0 * dist.p().powi(m.len() as i32)
}

/// Measured `|P(Ā_2 ... Ā_m | A_1) - alpha|`.
pub fn measured_epsilon(dist: &TrialDistribution, m: WindowSpec) -> Result<f64> {
    let alpha = alpha_correction(dist, m)?.alpha;
    Ok((conditional_survival(dist, m)? - alpha).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CfkBounds {
    pub lower: f64,
    pub upper: f64,
}

impl CfkBounds {
    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

/// Sandwich bounds on `P(Ā_1 ... Ā_N)`:
/// `exp(-(alpha + 10 eps) N P(A_1) - 2 m P(A_1))` and
/// `exp(-(alpha - 10 eps) N P(A_1) + 2 m P(A_1))`.
pub fn cfk_bounds(alpha: f64, eps: f64, n: f64, m: usize, p_a1: f64) -> CfkBounds {
    let mf = m as f64;
    CfkBounds {
        lower: (-(alpha + 10.0 * eps) * n * p_a1 - 2.0 * mf * p_a1).exp(),
        upper: (-(alpha - 10.0 * eps) * n * p_a1 + 2.0 * mf * p_a1).exp(),
    }
}

/// Limit law of `tau_m alpha P(A_1)`: the standard exponential CDF.
pub fn theorem1_limit_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -(-x).exp_m1()
    }
}

/// `log N` and `log log N` to base `1/p`, with `C = ln(1/p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogScale {
    pub c: f64,
    pub log_n: f64,
    pub loglog_n: f64,
}

impl LogScale {
    pub fn new(dist: &TrialDistribution, n: f64) -> Result<Self> {
        let c = dist.constants().c;
        if !(n.is_finite() && n >= 1.0) {
            return Err(Error::domain(format!("N must be a finite count >= 1 (got {n})")));
        }
        let log_n = log_base(c, n);
        if !(log_n > 1.0) {
            return Err(Error::domain(format!(
                "N = {n} too small: need log_(1/p) N > 1 so that log log N > 0 (log N = {log_n})"
            )));
        }
        Ok(LogScale { c, log_n, loglog_n: log_base(c, log_n) })
    }

    /// Logarithm to base `1/p`.
    pub fn log(&self, x: f64) -> f64 {
        log_base(self.c, x)
    }
}

#[inline]
fn log_base(c: f64, x: f64) -> f64 {
    x.ln() / c
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionTerm {
    pub label: &'static str,
    pub value: f64,
}

/// A truncated expansion with its individual summands.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionTerms {
    pub terms: Vec<ExpansionTerm>,
    pub total: f64,
}

impl ExpansionTerms {
    fn from_terms(terms: Vec<ExpansionTerm>) -> Self {
        let total = terms.iter().map(|t| t.value).sum();
        ExpansionTerms { terms, total }
    }

    /// `[total]`
    pub fn integer_part(&self) -> i64 {
        self.total.floor() as i64
    }

    /// `{total} = total - [total]`
    pub fn fractional_part(&self) -> f64 {
        self.total - self.total.floor()
    }
}

/// The centering sequence `m(N)` of the longest run, term by term.
pub fn m_of_n(dist: &TrialDistribution, n: f64) -> Result<ExpansionTerms> {
    let s = LogScale::new(dist, n)?;
    Ok(centering_terms(&dist.constants(), &s))
}

fn centering_terms(k: &DerivedConstants, s: &LogScale) -> ExpansionTerms {
    let (c, l, ll) = (k.c, s.log_n, s.loglog_n);
    let r = k.r();
    let (l2, l3) = (l * l, l * l * l);
    let t = |label, value| ExpansionTerm { label, value };
    ExpansionTerms::from_terms(vec![
        t("log N", l),
        t("2 log log N", 2.0 * ll),
        t("4 log log N / (C log N)", 4.0 * ll / (c * l)),
        t("(C1-C0)/(C C0) / log N", r / l),
        t("-4/C (log log N)^2 / (log N)^2", -4.0 / c * ll * ll / l2),
        t("(8/C^2 - 2(C1-C0)/(C C0)) log log N / (log N)^2", (8.0 / (c * c) - 2.0 * r) * ll / l2),
        t("(2(C1-C0)/(C^2 C0) + K) / (log N)^2", (2.0 * r / c + k.k) / l2),
        t("16/(3C) (log log N)^3 / (log N)^3", 16.0 / (3.0 * c) * ll.powi(3) / l3),
        t(
            "(-16/C^2 + 4(C1-C0)/(C C0)) (log log N)^2 / (log N)^3",
            (-16.0 / (c * c) + 4.0 * r) * ll * ll / l3,
        ),
        t("-(4K + 8(C1-C0)/(C^2 C0)) log log N / (log N)^3", -(4.0 * k.k + 8.0 * r / c) * ll / l3),
        t("16/C^3 log log N / (log N)^3", 16.0 / c.powi(3) * ll / l3),
        t("-8/C^2 (log log N)^2 / (log N)^3", -8.0 / (c * c) * ll * ll / l3),
        t("-4(C1-C0)/(C^2 C0) log log N / (log N)^3", -4.0 * r / c * ll / l3),
    ])
}

/// `H(x)` term by term.
pub fn h_terms(dist: &TrialDistribution, n: f64, x: f64) -> Result<ExpansionTerms> {
    let s = LogScale::new(dist, n)?;
    Ok(h_terms_scaled(&dist.constants(), &s, x))
}

fn h_terms_scaled(k: &DerivedConstants, s: &LogScale, x: f64) -> ExpansionTerms {
    let (c, l, ll) = (k.c, s.log_n, s.loglog_n);
    let r = k.r();
    let (l2, l3) = (l * l, l * l * l);
    let t = |label, value| ExpansionTerm { label, value };
    ExpansionTerms::from_terms(vec![
        t("-x", -x),
        t("2x / (C log N)", 2.0 * x / (c * l)),
        t("-4/C log log N / (log N)^2 x", -4.0 / c * ll / l2 * x),
        t("-(C1-C0)/(C C0) x / (log N)^2", -r / l2 * x),
        t("(4(C1-C0)/(C C0) - 8/C^2) log log N / (log N)^3 x", (4.0 * r - 8.0 / (c * c)) * ll / l3 * x),
        t("8/C (log log N)^2 / (log N)^3 x", 8.0 / c * ll * ll / l3 * x),
        t("-x^2 / (C (log N)^2)", -x * x / (c * l2)),
        t("4/C log log N / (log N)^3 x^2", 4.0 / c * ll / l3 * x * x),
    ])
}

pub fn h_function(dist: &TrialDistribution, n: f64, x: f64) -> Result<f64> {
    Ok(h_terms(dist, n, x)?.total)
}

/// One value of the accompanying CDF `P(mu(N) - [m(N)] < k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AccompanyingCdf {
    pub k: i64,
    pub value: f64,
    /// `log(C0 p^-2 q1 q2) + H(k - {m(N)})`, base `1/p`.
    pub exponent: f64,
    /// Set when the double exponential saturated to exactly 0 or 1.
    pub clamped: bool,
}

/// The accompanying distribution of `mu(N) - [m(N)]` for a fixed `N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccompanyingDistribution {
    dist: TrialDistribution,
    n: f64,
    constants: DerivedConstants,
    scale: LogScale,
    centering: ExpansionTerms,
    /// `log(C0 p^-2 q1 q2)`, base `1/p`.
    offset: f64,
}

impl AccompanyingDistribution {
    pub fn new(dist: &TrialDistribution, n: f64) -> Result<Self> {
        let scale = LogScale::new(dist, n)?;
        let constants = dist.constants();
        let centering = centering_terms(&constants, &scale);
        let (p, q1, q2) = (dist.p(), dist.q1(), dist.q2());
        let offset = scale.log(constants.c0 * q1 * q2 / (p * p));
        Ok(AccompanyingDistribution { dist: *dist, n, constants, scale, centering, offset })
    }

    pub fn centering(&self) -> &ExpansionTerms {
        &self.centering
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    /// `P(mu(N) - [m(N)] < k)` through the exponent form `exp(-p^-(offset + H))`.
    pub fn cdf(&self, k: i64) -> AccompanyingCdf {
        let x = k as f64 - self.centering.fractional_part();
        let exponent = self.offset + h_terms_scaled(&self.constants, &self.scale, x).total;
        // p^-e = exp(C e)
        let inner = (self.constants.c * exponent).exp();
        let value = (-inner).exp();
        let clamped = !inner.is_finite() || inner == 0.0 || value == 0.0 || value == 1.0;
        AccompanyingCdf { k, value, exponent, clamped }
    }

    /// The same CDF as `exp(-C0 p^-2 q1 q2 p^-H)`.
    pub fn cdf_product_form(&self, k: i64) -> f64 {
        let x = k as f64 - self.centering.fractional_part();
        let h = h_terms_scaled(&self.constants, &self.scale, x).total;
        let (p, q1, q2) = (self.dist.p(), self.dist.q1(), self.dist.q2());
        (-(self.constants.c0 * q1 * q2 / (p * p)) * p.powf(-h)).exp()
    }

    /// `P(mu(N) - [m(N)] <= x)` for real `x`, a right-continuous step function.
    pub fn cdf_le(&self, x: f64) -> f64 {
        self.cdf(x.floor() as i64 + 1).value
    }
}

pub fn accompanying_cdf(dist: &TrialDistribution, n: f64, k: i64) -> Result<AccompanyingCdf> {
    Ok(AccompanyingDistribution::new(dist, n)?.cdf(k))
}

/// `l = N p^(m-2) q1 q2 (m^2 C0 + m (C1 - C0) + C2 - C1)` for real `m >= 2`,
/// which equals `alpha N P(A_1)` at integer `m`.
pub fn exponent_l(dist: &TrialDistribution, n: f64, m: f64) -> Result<f64> {
    if !(m >= 2.0) {
        return Err(Error::domain(format!("exponent_l requires m >= 2 (got {m})")));
    }
    let k = dist.constants();
    let poly = m * m * k.c0 + m * (k.c1 - k.c0) + k.c2 - k.c1;
    Ok(n * dist.p().powf(m - 2.0) * dist.q1() * dist.q2() * poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, ToPrimitive};

    fn w(m: usize) -> WindowSpec {
        WindowSpec::new(m).unwrap()
    }

    fn dist(p: f64, q1: f64, q2: f64) -> TrialDistribution {
        TrialDistribution::new(p, q1, q2).unwrap()
    }

    fn triples() -> Vec<TrialDistribution> {
        vec![TrialDistribution::uniform(), dist(0.5, 0.3, 0.2), dist(0.8, 0.1, 0.1)]
    }

    #[test]
    fn window_probability_examples() {
        for d in triples() {
            assert!((window_probability(&d, w(1)) - 1.0).abs() < 1e-15);
        }
        let u = TrialDistribution::uniform();
        assert!((window_probability(&u, w(3)) - 13.0 / 27.0).abs() < 1e-15);
        assert!((window_probability(&dist(0.5, 0.4, 0.1), w(2)) - 0.83).abs() < 1e-15);
    }

    #[test]
    fn real_window_probability_agrees_at_integers() {
        for d in triples() {
            for m in 2..20 {
                let a = window_probability(&d, w(m));
                let b = window_probability_real(&d, m as f64);
                assert!((a - b).abs() <= 1e-13 * a);
            }
        }
    }

    #[test]
    fn alpha_requires_two() {
        assert!(matches!(alpha_correction(&TrialDistribution::uniform(), w(1)), Err(Error::Domain(_))));
    }

    #[test]
    fn alpha_tends_to_c0() {
        let u = TrialDistribution::uniform();
        let a = alpha_correction(&u, w(1_000_000)).unwrap();
        assert!((a.alpha - 2.0 / 3.0).abs() < 1e-4);
        assert!((a.alpha - a.numerator / a.denominator).abs() < 1e-16);
    }

    #[test]
    fn alpha_at_ten_matches_rational_evaluation() {
        let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        let (p, q1, q2) = (r(1, 3), r(1, 3), r(1, 3));
        let one = BigRational::one();
        let m = r(10, 1);
        let sq = &q1 * &q1 + &q2 * &q2;
        let prod = &q1 * &q2;
        let pm1 = &p - &one;
        let c0 = &q1 + &q2;
        let c1 = &p * &sq / &prod - &one;
        let c2 = &sq * &p * &p / (&prod * &pm1) + &p / &pm1 + r(2, 1) * (r(2, 1) * &p + &one) * &prod / (&pm1 * &pm1 * &pm1);
        let mm1 = &m - &one;
        let num = c0 + c1 / &m + c2 / (&m * &mm1);
        let den = &one + &p * (&one - &p) / (&mm1 * &prod) + &p * &p / (&m * &mm1 * &prod);
        let exact = (num / den).to_f64().unwrap();
        let got = alpha_correction(&TrialDistribution::uniform(), w(10)).unwrap().alpha;
        assert!((got - exact).abs() < 1e-14, "{got} vs {exact}");
        assert!((got - 0.494745).abs() < 1e-6);
    }

    #[test]
    fn casewise_and_aggregated_agree() {
        for d in triples() {
            for m in 4..=12 {
                let a = joint_survival_casewise(&d, w(m)).unwrap();
                let b = joint_survival_aggregated(&d, w(m)).unwrap();
                assert!((a - b).abs() <= 1e-9 * a.abs(), "m={m}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn joint_domain_errors() {
        let u = TrialDistribution::uniform();
        assert!(joint_survival_casewise(&u, w(1)).is_err());
        assert!(joint_survival_aggregated(&u, w(3)).is_err());
        assert!(conditional_survival(&u, w(1)).is_err());
    }

    #[test]
    fn joint_bounded_by_window_probability() {
        for d in triples() {
            for m in 2..30 {
                let j = joint_survival_casewise(&d, w(m)).unwrap();
                let c = conditional_survival(&d, w(m)).unwrap();
                assert!(j >= 0.0 && j <= window_probability(&d, w(m)));
                assert!((0.0..=1.0).contains(&c));
            }
        }
    }

    #[test]
    fn aggregated_scaling_approaches_alpha_numerator() {
        let u = TrialDistribution::uniform();
        let k = u.constants();
        let dev = |m: usize| {
            let mf = m as f64;
            let scaled = joint_survival_aggregated(&u, w(m)).unwrap()
                / (mf * (mf - 1.0) * u.p().powi(m as i32 - 2) * u.q1() * u.q2());
            (scaled - (k.c0 + k.c1 / mf + k.c2 / (mf * (mf - 1.0)))).abs()
        };
        assert!(dev(20) < dev(10));
        assert!(dev(20) < 1e-6);
    }

    #[test]
    fn swap_symmetry() {
        for d in triples().into_iter().chain([dist(0.5, 0.4, 0.1), dist(0.7, 0.2, 0.1)]) {
            let s = d.swapped();
            for m in 2..15 {
                let pairs = [
                    (window_probability(&d, w(m)), window_probability(&s, w(m))),
                    (alpha_correction(&d, w(m)).unwrap().alpha, alpha_correction(&s, w(m)).unwrap().alpha),
                    (joint_survival_casewise(&d, w(m)).unwrap(), joint_survival_casewise(&s, w(m)).unwrap()),
                    (exponent_l(&d, 1e6, m as f64).unwrap(), exponent_l(&s, 1e6, m as f64).unwrap()),
                ];
                for (a, b) in pairs {
                    assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300), "m={m}: {a} vs {b}");
                }
            }
            let a = accompanying_cdf(&d, 3e6, 0).unwrap().value;
            let b = accompanying_cdf(&s, 3e6, 0).unwrap().value;
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn cfk_check_examples() {
        let u = TrialDistribution::uniform();
        let r = cfk_condition_check(&u, w(20), 0.01).unwrap();
        assert!(r.sii_holds && r.siii_holds);

        let r = cfk_condition_check(&u, w(3), 1e-6).unwrap();
        assert!(!r.siii_holds);
        assert!((r.p_a1 - 13.0 / 27.0).abs() < 1e-15);

        let r = cfk_condition_check(&u, w(6), 0.01).unwrap();
        assert!(r.si_discrepancy <= 10.0 * u.p().powi(6));

        assert!(cfk_condition_check(&u, w(6), 0.0).is_err());
        assert!(cfk_condition_check(&u, w(6), 0.03).is_err());
        assert!(cfk_condition_check(&u, w(6), 1.0 / 42.0).is_err());
    }

    #[test]
    fn cfk_bounds_properties() {
        let b = cfk_bounds(0.5, 0.0, 1000.0, 10, 0.002);
        assert!((b.upper / b.lower - (4.0 * 10.0 * 0.002f64).exp()).abs() < 1e-12);
        let mut prev = cfk_bounds(0.5, 1e-4, 1.0, 10, 0.002);
        for n in [10.0, 100.0, 1e3, 1e4, 1e5] {
            let b = cfk_bounds(0.5, 1e-4, n, 10, 0.002);
            assert!(b.lower <= b.upper);
            assert!(b.lower <= prev.lower && b.upper <= prev.upper);
            prev = b;
        }
    }

    #[test]
    fn theorem1_examples() {
        assert_eq!(theorem1_limit_cdf(0.0), 0.0);
        assert_eq!(theorem1_limit_cdf(-3.0), 0.0);
        assert!((theorem1_limit_cdf(std::f64::consts::LN_2) - 0.5).abs() < 1e-15);
        assert!((theorem1_limit_cdf(50.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn log_scale_preconditions() {
        let u = TrialDistribution::uniform();
        assert!(LogScale::new(&u, 3.0).is_err());
        assert!(LogScale::new(&u, 0.5).is_err());
        assert!(LogScale::new(&u, f64::INFINITY).is_err());
        assert!(LogScale::new(&u, 4.0).is_ok());
        let err = m_of_n(&u, 2.0).unwrap_err();
        assert!(err.to_string().contains("log log N"));
    }

    #[test]
    fn exponent_l_matches_alpha_n_pa1() {
        for d in triples() {
            for m in 2..40 {
                let n = 1e6;
                let direct = alpha_correction(&d, w(m)).unwrap().alpha * n * window_probability(&d, w(m));
                let l = exponent_l(&d, n, m as f64).unwrap();
                assert!((l - direct).abs() <= 1e-12 * direct.abs(), "m={m}");
            }
        }
        assert!(exponent_l(&TrialDistribution::uniform(), 1e6, 1.5).is_err());
    }

    #[test]
    fn exponent_l_decreasing() {
        let u = TrialDistribution::uniform();
        let mut prev = f64::INFINITY;
        let mut m = 4.0;
        while m < 40.0 {
            let l = exponent_l(&u, 3e6, m).unwrap();
            assert!(l < prev);
            prev = l;
            m += 0.25;
        }
    }

    #[test]
    fn accompanying_forms_agree_and_are_monotone() {
        for d in triples() {
            for n in [1e5, 3e6, 1e9] {
                let acc = AccompanyingDistribution::new(&d, n).unwrap();
                let mut prev = 0.0;
                for k in -15..=15 {
                    let v = acc.cdf(k);
                    assert!((0.0..=1.0).contains(&v.value));
                    if !v.clamped {
                        assert!(v.value > 0.0 && v.value < 1.0);
                    }
                    assert!(v.value >= prev, "k={k}");
                    prev = v.value;
                    let alt = acc.cdf_product_form(k);
                    assert!((v.value - alt).abs() < 1e-12, "k={k}: {} vs {alt}", v.value);
                }
                assert_eq!(acc.cdf(-200).value, 0.0);
                assert!(acc.cdf(-200).clamped);
                assert!(acc.cdf(60).value > 1.0 - 1e-6);
            }
        }
    }
}
