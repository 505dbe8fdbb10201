//! Turan ratios, sharp constants, determinant-series oracles, and certified
//! inequality verdicts.
//!
//! For the e-remainders the two-sided bound is
//!
//! ```text
//! (1-q^{n+1})/(1-q^{n+2}) < I_{n-1} I_{n+1} / I_n^2 < 1,    0 < z < 1
//! ```
//!
//! and for the E-remainders
//!
//! ```text
//! (q-q^{n+2})/(1-q^{n+2}) <= J_{n-1} J_{n+1} / J_n^2 < 1,   z > 0
//! ```
//!
//! with the lower constants attained in the z -> 0 limit, so no larger
//! constant can work. A verdict is `Certified` only when both margins exceed
//! a conservative error budget; results inside the budget band are
//! `Indeterminate`, never guessed. The closed-form determinant series (a sum
//! of same-sign terms, no cancellation) provides an independent sign check on
//! the upper inequality, and the q -> 1 limit recovers the classical
//! exponential-remainder bound (n+1)/(n+2), which is also verified here
//! directly via [`verify_alzer`].

use std::fmt;
use std::str::FromStr;

use crate::dd::{Dd, DD_EPS, F64_EPS_HALF, TINY_ABS};
use crate::error::{Error, Result};
use crate::qcore::{check_q, check_tol, table_for, EvalResult, Method, QDomain};
use crate::sums::{classical_tail, det_series_i, det_series_j, term_classical};
use crate::tails::{check_z_for_tail, remainder_dd, series_term_dd, RemainderKind};

/// Three-state certification outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Certified,
    Violated,
    Indeterminate,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Certified => "certified",
            Outcome::Violated => "violated",
            Outcome::Indeterminate => "indeterminate",
        })
    }
}

impl FromStr for Outcome {
    type Err = Error;
    fn from_str(s: &str) -> Result<Outcome> {
        match s {
            "certified" => Ok(Outcome::Certified),
            "violated" => Ok(Outcome::Violated),
            "indeterminate" => Ok(Outcome::Indeterminate),
            other => Err(Error::Parse(format!("unknown outcome {other:?}"))),
        }
    }
}

/// One certified (or not) Turan verdict.
///
/// Invariants: `certified` iff both margins exceed `error_budget`;
/// `violated` iff some margin lies below `-error_budget`; `indeterminate`
/// otherwise. `upper_constant` is always 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TuranVerdict {
    pub ratio: f64,
    pub lower_constant: f64,
    pub upper_constant: f64,
    pub lower_margin: f64,
    pub upper_margin: f64,
    pub error_budget: f64,
    pub outcome: Outcome,
}

fn classify(lower_margin: f64, upper_margin: f64, budget: f64) -> Outcome {
    if lower_margin < -budget || upper_margin < -budget {
        Outcome::Violated
    } else if lower_margin > budget && upper_margin > budget {
        Outcome::Certified
    } else {
        Outcome::Indeterminate
    }
}

struct RatioParts {
    ratio: Dd,
    /// relative first-order bound on the ratio
    rel: f64,
}

/// The three remainders from one direct tail at n plus both index shifts,
/// combined into the Turan ratio with a first-order error bound.
fn ratio_parts(kind: RemainderKind, q: f64, z: f64, n: u32) -> Result<RatioParts> {
    let (mid, e_mid) = remainder_dd(kind, q, z, n)?;
    let (t_dn, e_tdn) = series_term_dd(kind, q, z, n);
    let (t_up, e_tup) = series_term_dd(kind, q, z, n + 1);
    let lo = mid.add(t_dn);
    let hi = mid.sub(t_up);
    if !hi.is_positive() {
        return Err(Error::NonPositive(format!(
            "up-shifted remainder at q={q}, z={z}, n={n} is not positive"
        )));
    }
    let e_lo = e_mid + e_tdn + lo.hi.abs() * DD_EPS;
    let e_hi = e_mid + e_tup + hi.hi.abs() * DD_EPS;
    let ratio = lo.mul(hi).div(mid.mul(mid));
    let rel = e_lo / lo.hi + e_hi / hi.hi + 2.0 * e_mid / mid.hi + 8.0 * DD_EPS;
    Ok(RatioParts { ratio, rel })
}

/// R = T_{n-1} T_{n+1} / T_n^2 with a first-order propagated error bound.
///
/// The three remainders come from one direct tail evaluation at n plus the
/// two index shifts; n >= 1 is required since n = 0 would need the (-1)
/// extension on the certified surface.
pub fn turan_ratio(kind: RemainderKind, dom: &QDomain, tol: f64) -> Result<EvalResult> {
    check_tol(tol)?;
    if dom.n() == 0 {
        return Err(Error::Index("turan_ratio needs n >= 1".into()));
    }
    check_z_for_tail(kind, dom.z())?;
    let parts = ratio_parts(kind, dom.q(), dom.z(), dom.n())?;
    let value = parts.ratio.to_f64();
    let abs_error = value.abs() * (parts.rel + F64_EPS_HALF) + TINY_ABS;
    Ok(EvalResult::new(value, abs_error, Method::TailSeries))
}

fn one_minus_pow(q: f64, m: u32) -> f64 {
    -f64::exp_m1(m as f64 * q.ln())
}

/// The sharp lower constant: (1-q^{n+1})/(1-q^{n+2}) for the e-remainders,
/// (q-q^{n+2})/(1-q^{n+2}) for the E-remainders.
///
/// Evaluated through expm1 so the numerator and denominator stay accurate as
/// q -> 1, where both differences vanish linearly.
pub fn best_constant(kind: RemainderKind, q: f64, n: u32) -> Result<f64> {
    check_q(q)?;
    if n == 0 {
        return Err(Error::Index("best_constant needs n >= 1".into()));
    }
    let num = one_minus_pow(q, n + 1);
    let den = one_minus_pow(q, n + 2);
    Ok(match kind {
        RemainderKind::TailI => num / den,
        RemainderKind::TailJ => q * num / den,
    })
}

/// Same constant in double-word precision, with an absolute error bound.
fn best_constant_dd(kind: RemainderKind, q: f64, n: u32) -> (Dd, f64) {
    let table = table_for(q);
    let entries = table.at_least(n as usize + 3);
    let num = Dd::ONE.sub(entries[n as usize + 1].qpow);
    let den = Dd::ONE.sub(entries[n as usize + 2].qpow);
    let c = match kind {
        RemainderKind::TailI => num.div(den),
        RemainderKind::TailJ => num.div(den).mul_f64(q),
    };
    let rel = |m: u32| {
        let p = entries[m as usize].qpow.hi;
        m as f64 * DD_EPS * p / (1.0 - p)
    };
    let err = c.hi.abs() * (rel(n + 1) + rel(n + 2) + 8.0 * DD_EPS) + TINY_ABS;
    (c, err)
}

/// The closed-form series for T_{n-1} T_{n+1} - T_n^2.
///
/// Every term carries the same (negative) sign, so the sign of the
/// determinant is certain whenever the bound is smaller than the value; this
/// is the independent route the verdicts are cross-checked against.
pub fn turan_determinant_series(kind: RemainderKind, dom: &QDomain, tol: f64) -> Result<EvalResult> {
    check_tol(tol)?;
    if dom.n() == 0 {
        return Err(Error::Index("turan_determinant_series needs n >= 1".into()));
    }
    check_z_for_tail(kind, dom.z())?;
    let s = match kind {
        RemainderKind::TailI => det_series_i(dom.q(), dom.z(), dom.n())?,
        RemainderKind::TailJ => det_series_j(dom.q(), dom.z(), dom.n())?,
    };
    let value = s.sum.to_f64();
    Ok(EvalResult::new(
        value,
        s.abs_err + value.abs() * F64_EPS_HALF,
        Method::TailSeries,
    ))
}

/// Full verdict: ratio, sharp constants, margins, conservative budget, and
/// the three-state outcome, with the determinant-series sign cross-check.
pub fn verify_turan(kind: RemainderKind, dom: &QDomain, tol: f64) -> Result<TuranVerdict> {
    check_tol(tol)?;
    if dom.n() == 0 {
        return Err(Error::Index("verify_turan needs n >= 1".into()));
    }
    check_z_for_tail(kind, dom.z())?;
    let (q, z, n) = (dom.q(), dom.z(), dom.n());

    let parts = ratio_parts(kind, q, z, n)?;
    let (c, e_c) = best_constant_dd(kind, q, n);

    let lower_margin = parts.ratio.sub(c).to_f64();
    let upper_margin = Dd::ONE.sub(parts.ratio).to_f64();
    let ratio = parts.ratio.to_f64();

    // Margin rounding is proportional to the margin itself and cannot flip
    // its own comparison; the budget only needs the propagated value errors,
    // slightly inflated to absorb that rounding.
    let propagated = ratio.abs() * parts.rel;
    let error_budget = (8.0 * propagated + e_c) * (1.0 + 1e-14) + TINY_ABS;
    let outcome = classify(lower_margin, upper_margin, error_budget);

    // Independent route: the determinant series has certain sign; it must not
    // contradict a certified upper side.
    let det = turan_determinant_series(kind, dom, tol)?;
    let det_certainly_positive = det.value - det.abs_error > 0.0;
    let det_certainly_negative = det.value + det.abs_error < 0.0;
    let upper_certified = upper_margin > error_budget;
    let upper_violated = upper_margin < -error_budget;
    if upper_certified && det_certainly_positive {
        return Err(Error::CrossCheck(format!(
            "ratio margin says R < 1 but determinant series is positive at q={q}, z={z}, n={n}"
        )));
    }
    if upper_violated && det_certainly_negative {
        return Err(Error::CrossCheck(format!(
            "ratio margin says R > 1 but determinant series is negative at q={q}, z={z}, n={n}"
        )));
    }

    Ok(TuranVerdict {
        ratio,
        lower_constant: c.to_f64(),
        upper_constant: 1.0,
        lower_margin,
        upper_margin,
        error_budget,
        outcome,
    })
}

/// One probe point of the z -> 0 sharpness limit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SharpnessPoint {
    pub z: f64,
    pub ratio: f64,
    pub best_constant: f64,
    pub deviation: f64,
}

/// Follow the Turan ratio down a decreasing z-sequence toward the sharp
/// constant. The sequence must be strictly decreasing, positive, and
/// in-domain for the kind.
pub fn sharpness_probe(
    kind: RemainderKind,
    q: f64,
    n: u32,
    z_sequence: &[f64],
) -> Result<Vec<SharpnessPoint>> {
    check_q(q)?;
    if n == 0 {
        return Err(Error::Index("sharpness_probe needs n >= 1".into()));
    }
    if z_sequence.is_empty() {
        return Err(Error::Argument("empty z sequence".into()));
    }
    for w in z_sequence.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::Argument(format!(
                "z sequence must be strictly decreasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    let c = best_constant(kind, q, n)?;
    let mut out = Vec::with_capacity(z_sequence.len());
    for &z in z_sequence {
        check_z_for_tail(kind, z)?;
        let dom = QDomain::new(q, z, n)?;
        let r = turan_ratio(kind, &dom, 1e-12)?;
        out.push(SharpnessPoint {
            z,
            ratio: r.value,
            best_constant: c,
            deviation: (r.value - c).abs(),
        });
    }
    Ok(out)
}

/// The classical exponential remainder e^x - sum_{k<=n} x^k/k!, computed as
/// the direct tail sum_{k>n} x^k/k! (same cancellation hazard, same cure).
pub fn classical_remainder(x: f64, n: u32) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::Domain(format!("classical remainder needs x > 0, got {x}")));
    }
    Ok(classical_tail(x, n)?.sum.to_f64())
}

fn classical_ratio_parts(x: f64, n: u32) -> Result<RatioParts> {
    let mid = classical_tail(x, n)?;
    let t_dn = term_classical(x, n);
    let t_up = term_classical(x, n + 1);
    let term_rel = (64.0 + 16.0 * (n as f64 + 1.0)) * DD_EPS;
    let lo = mid.sum.add(t_dn);
    let hi = mid.sum.sub(t_up);
    if !hi.is_positive() {
        return Err(Error::NonPositive(format!(
            "classical up-shift at x={x}, n={n} is not positive"
        )));
    }
    let e_mid = mid.abs_err;
    let e_lo = e_mid + t_dn.hi * term_rel + lo.hi.abs() * DD_EPS;
    let e_hi = e_mid + t_up.hi * term_rel + hi.hi.abs() * DD_EPS;
    let ratio = lo.mul(hi).div(mid.sum.mul(mid.sum));
    let rel = e_lo / lo.hi + e_hi / hi.hi + 2.0 * e_mid / mid.sum.hi + 8.0 * DD_EPS;
    Ok(RatioParts { ratio, rel })
}

/// Verdict for the classical bound (n+1)/(n+2) < I_{n-1} I_{n+1} / I_n^2 < 1
/// on the exponential remainders.
pub fn verify_alzer(x: f64, n: u32) -> Result<TuranVerdict> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::Domain(format!("verify_alzer needs x > 0, got {x}")));
    }
    if n == 0 {
        return Err(Error::Index("verify_alzer needs n >= 1".into()));
    }
    let parts = classical_ratio_parts(x, n)?;
    let c = Dd::from_f64((n + 1) as f64).div(Dd::from_f64((n + 2) as f64));
    let e_c = c.hi * 4.0 * DD_EPS + TINY_ABS;
    let ratio = parts.ratio.to_f64();
    let lower_margin = parts.ratio.sub(c).to_f64();
    let upper_margin = Dd::ONE.sub(parts.ratio).to_f64();
    let error_budget = (8.0 * ratio.abs() * parts.rel + e_c) * (1.0 + 1e-14) + TINY_ABS;
    Ok(TuranVerdict {
        ratio,
        lower_constant: c.to_f64(),
        upper_constant: 1.0,
        lower_margin,
        upper_margin,
        error_budget,
        outcome: classify(lower_margin, upper_margin, error_budget),
    })
}

/// Track the E-family ratio at z = (1-q) x against the classical ratio at x
/// as q runs up an increasing sequence toward 1.
///
/// Returns (q, |q_ratio - classical_ratio|) per step; the sharp constants
/// converge too, since (q-q^{n+2})/(1-q^{n+2}) -> (n+1)/(n+2).
pub fn q_limit_check(x: f64, n: u32, q_sequence: &[f64]) -> Result<Vec<(f64, f64)>> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::Domain(format!("q_limit_check needs x > 0, got {x}")));
    }
    if n == 0 {
        return Err(Error::Index("q_limit_check needs n >= 1".into()));
    }
    if q_sequence.is_empty() {
        return Err(Error::Argument("empty q sequence".into()));
    }
    for w in q_sequence.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Argument(format!(
                "q sequence must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    let classical = classical_ratio_parts(x, n)?.ratio.to_f64();
    let mut out = Vec::with_capacity(q_sequence.len());
    for &q in q_sequence {
        check_q(q)?;
        let z = (1.0 - q) * x;
        let dom = QDomain::new(q, z, n)?;
        let r = turan_ratio(RemainderKind::TailJ, &dom, 1e-12)?;
        out.push((q, (r.value - classical).abs()));
    }
    Ok(out)
}
