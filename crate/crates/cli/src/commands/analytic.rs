use contam_runs::analytic::{
    alpha_correction, cfk_bounds, cfk_condition_check, cfk_eps_limit, h_terms, m_of_n, measured_epsilon,
    theorem1_limit_cdf, window_probability, AccompanyingDistribution, ExpansionTerms,
};
use contam_runs::oracle::RationalDist;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde_json::{json, Value};

use super::{dist, need, window, Num, Report};
use crate::args::{AnalyticArgs, Quantity};
use crate::error::{CliError, CliResult};

fn fraction(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn int(v: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn exact_window_probability(d: &RationalDist, m: usize) -> BigRational {
    let (p, q1, q2) = (d.p(), d.q1(), d.q2());
    let m_i = m as i32;
    p.pow(m_i) + int(m) * (BigRational::one() - p) * p.pow(m_i - 1) + int(m) * int(m - 1) * p.pow(m_i - 2) * q1 * q2
}

/// `(C0, C1, C2)` as exact rationals.
fn exact_constants(d: &RationalDist) -> (BigRational, BigRational, BigRational) {
    let (p, q1, q2) = (d.p(), d.q1(), d.q2());
    let one = BigRational::one();
    let two = int(2);
    let sq = q1 * q1 + q2 * q2;
    let prod = q1 * q2;
    let pm1 = p - &one;
    let c0 = q1 + q2;
    let c1 = p * &sq / &prod - &one;
    let c2 = &sq * p * p / (&prod * &pm1) + p / &pm1 + &two * (&two * p + &one) * &prod / (&pm1 * &pm1 * &pm1);
    (c0, c1, c2)
}

fn terms_json(t: &ExpansionTerms) -> Value {
    Value::Array(t.terms.iter().map(|e| json!({ "term": e.label, "value": e.value })).collect())
}

fn terms_text(r: &mut Report, t: &ExpansionTerms) {
    let width = t.terms.iter().map(|e| e.label.len()).max().unwrap_or(0);
    for e in &t.terms {
        r.line(format_args!("  {:<width$}  {}", e.label, e.value));
    }
}

pub fn run(a: &AnalyticArgs) -> CliResult<Report> {
    let what = |q: &str| format!("analytic {q}");
    match a.quantity {
        Quantity::Theorem1 => {
            let x = need(a.x, &what("theorem1"), "--x")?;
            let v = theorem1_limit_cdf(x);
            let mut r = Report::new(json!({ "quantity": "theorem1", "x": x, "value": v }));
            r.line(format_args!("1 - exp(-x) at x = {x}: {v}"));
            Ok(r)
        }
        Quantity::PA1 => {
            let d = dist(&a.dist, &what("pA1"))?;
            let m = need(a.m, &what("pA1"), "--m")?;
            let v = window_probability(&d.float, window(m)?);
            let exact = d.exact.as_ref().map(|e| fraction(&exact_window_probability(e, m)));
            let mut r = Report::new(json!({ "quantity": "pA1", "m": m, "value": v, "exact": exact }));
            match &exact {
                Some(f) => r.line(format_args!("P(A1) for m = {m}: {f} = {v}")),
                None => r.line(format_args!("P(A1) for m = {m}: {v}")),
            }
            Ok(r)
        }
        Quantity::Alpha => {
            let d = dist(&a.dist, &what("alpha"))?;
            let m = need(a.m, &what("alpha"), "--m")?;
            let b = alpha_correction(&d.float, window(m)?)?;
            let mut r = Report::new(json!({
                "quantity": "alpha", "m": m, "value": b.alpha,
                "numerator": b.numerator, "denominator": b.denominator,
            }));
            r.line(format_args!("alpha for m = {m}: {}", b.alpha));
            r.line(format_args!("  numerator    {}", b.numerator));
            r.line(format_args!("  denominator  {}", b.denominator));
            Ok(r)
        }
        Quantity::MN => {
            let d = dist(&a.dist, &what("mN"))?;
            let n = need(a.n, &what("mN"), "--N")?;
            let t = m_of_n(&d.float, n)?;
            let mut r = Report::new(json!({
                "quantity": "mN", "N": n, "value": t.total, "integer_part": t.integer_part(),
                "fractional_part": t.fractional_part(), "terms": terms_json(&t),
            }));
            r.line(format_args!("m(N) at N = {n}: {}  ([m(N)] = {}, {{m(N)}} = {})", t.total, t.integer_part(), t.fractional_part()));
            terms_text(&mut r, &t);
            Ok(r)
        }
        Quantity::H => {
            let d = dist(&a.dist, &what("H"))?;
            let n = need(a.n, &what("H"), "--N")?;
            let x = need(a.x, &what("H"), "--x")?;
            let t = h_terms(&d.float, n, x)?;
            let mut r = Report::new(json!({ "quantity": "H", "N": n, "x": x, "value": t.total, "terms": terms_json(&t) }));
            r.line(format_args!("H(x) at N = {n}, x = {x}: {}", t.total));
            terms_text(&mut r, &t);
            Ok(r)
        }
        Quantity::Accompanying => {
            let d = dist(&a.dist, &what("accompanying"))?;
            let n = need(a.n, &what("accompanying"), "--N")?;
            let acc = AccompanyingDistribution::new(&d.float, n)?;
            let ks: Vec<i64> = match a.k {
                Some(k) => vec![k],
                None if a.k_min <= a.k_max => (a.k_min..=a.k_max).collect(),
                None => return Err(CliError::usage("--k-min must not exceed --k-max")),
            };
            let rows: Vec<_> = ks.iter().map(|&k| acc.cdf(k)).collect();
            let c = acc.centering();
            let mut r = Report::new(json!({
                "quantity": "accompanying", "N": n, "mN": c.total, "integer_part": c.integer_part(),
                "fractional_part": c.fractional_part(),
                "values": rows.iter().map(|v| json!({ "k": v.k, "value": v.value, "exponent": v.exponent, "clamped": v.clamped })).collect::<Vec<_>>(),
            }));
            r.line(format_args!("P(mu(N) - [m(N)] < k) at N = {n}  (m(N) = {}, [m(N)] = {})", c.total, c.integer_part()));
            r.line(format_args!("  {:>5}  {:<24}  exponent", "k", "value"));
            for v in &rows {
                let mark = if v.clamped { "  (saturated)" } else { "" };
                r.line(format_args!("  {:>5}  {:<24}  {}{mark}", v.k, Num(v.value), Num(v.exponent)));
            }
            Ok(r)
        }
        Quantity::Bounds => {
            let d = dist(&a.dist, &what("bounds"))?;
            let m = need(a.m, &what("bounds"), "--m")?;
            let n = need(a.n, &what("bounds"), "--N")?;
            let w = window(m)?;
            let alpha = alpha_correction(&d.float, w)?.alpha;
            let p_a1 = window_probability(&d.float, w);
            let (eps, source) = match a.eps {
                Some(e) => (e, "given"),
                None => (measured_epsilon(&d.float, w)?, "exact discrepancy at m"),
            };
            let b = cfk_bounds(alpha, eps, n, m, p_a1);
            let check = cfk_condition_check(&d.float, w, eps).ok();
            let mut r = Report::new(json!({
                "quantity": "bounds", "m": m, "N": n, "alpha": alpha, "pA1": p_a1, "eps": eps,
                "eps_source": source, "lower": b.lower, "upper": b.upper,
                "hypotheses": check.map(|c| json!({ "SI": c.si_holds, "SII": c.sii_holds, "SIII": c.siii_holds })),
            }));
            r.line(format_args!("bounds on P(no qualifying window among N = {n}) for m = {m}:"));
            r.line(format_args!("  lower  {}", Num(b.lower)));
            r.line(format_args!("  upper  {}", Num(b.upper)));
            r.line(format_args!("  alpha {alpha}, P(A1) {}, eps {} ({source})", Num(p_a1), Num(eps)));
            match check {
                Some(c) => r.line(format_args!("  hypotheses: SI {}, SII {}, SIII {}", c.si_holds, c.sii_holds, c.siii_holds)),
                None => r.line(format_args!("  eps outside (0, {}); hypotheses not checked", cfk_eps_limit(&d.float))),
            }
            Ok(r)
        }
        Quantity::Constants => {
            let d = dist(&a.dist, &what("constants"))?;
            let k = d.float.constants();
            let exact = d.exact.as_ref().map(exact_constants);
            let ex = |i: usize| exact.as_ref().map(|(c0, c1, c2)| fraction([c0, c1, c2][i]));
            let mut r = Report::new(json!({
                "quantity": "constants", "C": k.c, "C0": k.c0, "C1": k.c1, "C2": k.c2, "K": k.k,
                "exact": exact.as_ref().map(|_| json!({ "C0": ex(0), "C1": ex(1), "C2": ex(2) })),
            }));
            r.line(format_args!("C  = {}", k.c));
            for (i, (name, v)) in [("C0", k.c0), ("C1", k.c1), ("C2", k.c2)].into_iter().enumerate() {
                match ex(i) {
                    Some(f) => r.line(format_args!("{name} = {f} = {v}")),
                    None => r.line(format_args!("{name} = {v}")),
                }
            }
            r.line(format_args!("K  = {}", k.k));
            Ok(r)
        }
    }
}
