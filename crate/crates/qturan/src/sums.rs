//! Direct series summation with certified geometric tail bounds.
//!
//! Every series here has eventually-monotone term ratios, so once the ratio
//! bound r drops below 1 the discarded tail is at most |next_term| / (1 - r).
//! Summation runs in double-word precision and each result carries a
//! conservative relative error model:
//!
//! ```text
//! rel <= (A(q) + 16 K + extra) * DD_EPS
//! ```
//!
//! where K is the number of terms, A(q) = 64 + 4q/(1-q)^3 dominates the
//! accumulated error of the q-power/factor chains, and `extra` covers the
//! per-term q^{k(k-1)/2} chains (E-family) and the cancellation inside the
//! determinant-series numerators. The bounds are deliberately loose by an
//! order of magnitude; they still sit 8-10 decades below the margins the
//! verdicts need to resolve.

use std::sync::Arc;

use crate::dd::{Dd, DD_EPS, TINY_ABS};
use crate::error::{Error, Result};
use crate::qcore::{table_for, QEntry, QTable};

/// Relative truncation target: tails are driven to the double-word floor.
const REL_FLOOR: f64 = 1e-30;
/// Upward fudge applied to f64-computed ratio bounds.
const UP: f64 = 1.0 + 1e-12;
const MAX_TERMS: usize = 4_000_000;

pub(crate) struct SeriesSum {
    pub sum: Dd,
    /// Conservative absolute error bound (arithmetic + truncation).
    pub abs_err: f64,
    /// The truncation part of `abs_err`.
    pub truncation: f64,
    pub terms: usize,
}

fn arith_rel(q: f64, k_final: usize, extra: f64) -> f64 {
    let omq = 1.0 - q;
    let k = k_final as f64;
    // sum_j j q^j/(1-q^j) is bounded both by q/(1-q)^3 and by K q/(1-q)
    let chain = (q / (omq * omq * omq)).min((k + 1.0) * q / omq);
    (64.0 + 4.0 * chain + 16.0 * k + extra) * DD_EPS
}

struct RawSum {
    sum: Dd,
    truncation: f64,
    last_k: usize,
    terms: usize,
}

/// Shared loop: add terms from k0 while the geometric bound on the rest
/// exceeds the relative floor.
fn run_series<S, R>(table: &Arc<QTable>, k0: usize, first: Dd, step: S, ratio_bound: R) -> Result<RawSum>
where
    S: Fn(&[QEntry], usize, Dd) -> Dd,
    R: Fn(&[QEntry], usize) -> f64,
{
    let mut entries = table.at_least(k0 + 128);
    let mut term = first;
    let mut sum = Dd::ZERO;
    let mut k = k0;
    loop {
        sum = sum.add(term);
        if k + 4 >= entries.len() {
            entries = table.at_least(entries.len() * 2);
        }
        let next = step(&entries, k, term);
        k += 1;
        if next.hi == 0.0 {
            // everything beyond is below the subnormal floor
            return Ok(RawSum { sum, truncation: TINY_ABS, last_k: k, terms: k - k0 });
        }
        let r = ratio_bound(&entries, k) * UP;
        if r < 1.0 {
            let bound = next.hi.abs() * UP / (1.0 - r);
            if bound <= sum.hi.abs() * REL_FLOOR {
                return Ok(RawSum { sum, truncation: bound + TINY_ABS, last_k: k, terms: k - k0 });
            }
        }
        term = next;
        if k - k0 > MAX_TERMS {
            return Err(Error::Convergence(format!(
                "series did not meet its tail bound within {MAX_TERMS} terms"
            )));
        }
    }
}

/// t_k = z^k / (q;q)_k for the e-series.
pub(crate) fn term_small_e(q: f64, z: f64, k: u32) -> Dd {
    let table = table_for(q);
    let entries = table.at_least(k as usize + 1);
    Dd::from_f64(z).powi(k).div(entries[k as usize].qq)
}

/// t_k = q^{k(k-1)/2} z^k / (q;q)_k for the E-series.
pub(crate) fn term_big_e(q: f64, z: f64, k: u32) -> Dd {
    let table = table_for(q);
    let entries = table.at_least(k as usize + 1);
    let tri = if k == 0 { 0 } else { k as u64 * (k as u64 - 1) / 2 };
    debug_assert!(tri <= u32::MAX as u64);
    Dd::from_f64(q)
        .powi(tri as u32)
        .mul(Dd::from_f64(z).powi(k))
        .div(entries[k as usize].qq)
}

/// Relative error bound for a single directly-built term.
pub(crate) fn term_rel_err(q: f64, k: u32) -> f64 {
    arith_rel(q, k as usize, 0.0)
}

/// sum_{k >= k0} z^k / (q;q)_k  (requires 0 < z < 1).
pub(crate) fn sum_small_e_from(q: f64, z: f64, k0: u32) -> Result<SeriesSum> {
    let table = table_for(q);
    let first = term_small_e(q, z, k0);
    let raw = run_series(
        &table,
        k0 as usize,
        first,
        |ents, k, t| t.mul_f64(z).div(Dd::ONE.sub(ents[k + 1].qpow)),
        // ratios z/(1 - q^{j+1}) decrease in j, so the value at j = k bounds the rest
        |ents, k| z / (1.0 - ents[k + 1].qpow.hi),
    )?;
    finish(q, raw, 0.0)
}

/// sum_{k >= k0} q^{k(k-1)/2} z^k / (q;q)_k  (any z > 0).
pub(crate) fn sum_big_e_from(q: f64, z: f64, k0: u32) -> Result<SeriesSum> {
    let table = table_for(q);
    let first = term_big_e(q, z, k0);
    let raw = run_series(
        &table,
        k0 as usize,
        first,
        |ents, k, t| t.mul(ents[k].qpow).mul_f64(z).div(Dd::ONE.sub(ents[k + 1].qpow)),
        |ents, k| z * ents[k].qpow.hi / (1.0 - ents[k + 1].qpow.hi),
    )?;
    let extra = (raw.last_k as f64) * (raw.last_k as f64) / 2.0;
    finish(q, raw, extra)
}

/// Closed-form Turan determinant series for the e-remainders:
///
/// sum_{k=n+2}^{inf} (q^k - q^{n+1}) / ((q;q)_{n+1} (q;q)_k) * z^{k+n}
///
/// Every term is negative; no cancellation between terms.
pub(crate) fn det_series_i(q: f64, z: f64, n: u32) -> Result<SeriesSum> {
    let table = table_for(q);
    let nu = n as usize;
    let k0 = nu + 2;
    let entries = table.at_least(k0 + 2);
    let pref = entries[nu + 1].qq.recip();
    let zp0 = Dd::from_f64(z).powi((k0 + nu) as u32);
    let first = pref
        .mul(entries[k0].qpow.sub(entries[nu + 1].qpow))
        .mul(zp0)
        .div(entries[k0].qq);
    let raw = run_series(
        &table,
        k0,
        first,
        |ents, k, t| {
            // t_{k+1}/t_k = z (q^{n+1}-q^{k+1}) / ((q^{n+1}-q^k)(1-q^{k+1}))
            let num = ents[nu + 1].qpow.sub(ents[k + 1].qpow);
            let den = ents[nu + 1].qpow.sub(ents[k].qpow).mul(Dd::ONE.sub(ents[k + 1].qpow));
            t.mul_f64(z).mul(num).div(den)
        },
        |ents, k| {
            let num = ents[nu + 1].qpow.hi - ents[k + 1].qpow.hi;
            let den = (ents[nu + 1].qpow.hi - ents[k].qpow.hi) * (1.0 - ents[k + 1].qpow.hi);
            z * num / den
        },
    )?;
    let extra = 4.0 * raw.last_k as f64 / (1.0 - q);
    finish(q, raw, extra)
}

/// Closed-form Turan determinant series for the E-remainders:
///
/// sum_{j=n+2}^{inf} q^{(n(n-1)+(j-1)(j-2))/2} (q^{j-1} - q^n)
///                   / ((q;q)_{n+1} (q;q)_j) * z^{j+n}
pub(crate) fn det_series_j(q: f64, z: f64, n: u32) -> Result<SeriesSum> {
    let table = table_for(q);
    let nu = n as usize;
    let j0 = nu + 2;
    let entries = table.at_least(j0 + 2);
    let pref = entries[nu + 1].qq.recip();
    // exponent at j0: (n(n-1) + (n+1)n)/2 = n^2
    let qbig = Dd::from_f64(q).powi((n * n) as u32);
    let zp0 = Dd::from_f64(z).powi((j0 + nu) as u32);
    let first = pref
        .mul(qbig)
        .mul(entries[j0 - 1].qpow.sub(entries[nu].qpow))
        .mul(zp0)
        .div(entries[j0].qq);
    let raw = run_series(
        &table,
        j0,
        first,
        |ents, j, t| {
            // t_{j+1}/t_j = z q^{j-1} (q^j - q^n) / ((q^{j-1} - q^n)(1 - q^{j+1}))
            let num = ents[j].qpow.sub(ents[nu].qpow).mul(ents[j - 1].qpow);
            let den = ents[j - 1].qpow.sub(ents[nu].qpow).mul(Dd::ONE.sub(ents[j + 1].qpow));
            t.mul_f64(z).mul(num).div(den)
        },
        |ents, j| {
            let num = (ents[nu].qpow.hi - ents[j].qpow.hi) * ents[j - 1].qpow.hi;
            let den = (ents[nu].qpow.hi - ents[j - 1].qpow.hi) * (1.0 - ents[j + 1].qpow.hi);
            z * num / den
        },
    )?;
    let extra = (raw.last_k as f64) * (raw.last_k as f64) / 2.0 + 4.0 * raw.last_k as f64 / (1.0 - q);
    finish(q, raw, extra)
}

fn finish(q: f64, raw: RawSum, extra: f64) -> Result<SeriesSum> {
    let rel = arith_rel(q, raw.last_k, extra);
    let abs_err = raw.sum.hi.abs() * rel + raw.truncation + TINY_ABS;
    Ok(SeriesSum { sum: raw.sum, abs_err, truncation: raw.truncation, terms: raw.terms })
}

/// t_k = x^k / k! of the classical exponential series.
pub(crate) fn term_classical(x: f64, k: u32) -> Dd {
    let mut t = Dd::from_f64(x).powi(k);
    for j in 1..=k {
        t = t.div(Dd::from_f64(j as f64));
    }
    t
}

/// Direct classical tail sum_{k >= n+1} x^k / k!.
pub(crate) fn classical_tail(x: f64, n: u32) -> Result<SeriesSum> {
    let mut term = term_classical(x, n + 1);
    let mut sum = Dd::ZERO;
    let mut k = n as usize + 1;
    let k0 = k;
    loop {
        sum = sum.add(term);
        let next = term.mul_f64(x).div(Dd::from_f64((k + 1) as f64));
        k += 1;
        if next.hi == 0.0 {
            break;
        }
        let r = x / (k + 1) as f64 * UP;
        if r < 1.0 {
            let bound = next.hi.abs() * UP / (1.0 - r);
            if bound <= sum.hi.abs() * REL_FLOOR {
                let rel = (64.0 + 16.0 * k as f64) * DD_EPS;
                return Ok(SeriesSum {
                    sum,
                    abs_err: sum.hi.abs() * rel + bound + TINY_ABS,
                    truncation: bound,
                    terms: k - k0,
                });
            }
        }
        term = next;
        if k - k0 > MAX_TERMS {
            return Err(Error::Convergence("classical tail did not converge".into()));
        }
    }
    let rel = (64.0 + 16.0 * k as f64) * DD_EPS;
    Ok(SeriesSum {
        sum,
        abs_err: sum.hi.abs() * rel + TINY_ABS,
        truncation: TINY_ABS,
        terms: k - k0,
    })
}
