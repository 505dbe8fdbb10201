//! q-shifted factorials and the q-factorial (q;q)_n.
//!
//! For fixed q in (0,1):
//!
//! ```text
//! (a;q)_0 = 1,   (a;q)_n = prod_{k=0}^{n-1} (1 - a q^k),
//! (a;q)_inf = prod_{k=0}^{inf} (1 - a q^k)
//! ```
//!
//! The infinite product converges for every real a since the log-factors are
//! eventually dominated by the geometric sequence |a| q^k. As q -> 1,
//! (q^a;q)_n / (1-q)^n tends to the rising factorial a(a+1)...(a+n-1), which
//! is what connects the q-world back to the classical exponential remainder.
//!
//! Finite products computed here are plain binary64; the shared prefix table
//! behind [`qfact`] is kept in double-word precision because the tail series
//! and Turan margins in the sibling modules need (q;q)_k far below one ulp.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use crate::dd::{Dd, DD_EPS, F64_EPS_HALF, TINY_ABS};
use crate::error::{Error, Result};

/// How an [`EvalResult`] was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Series,
    Product,
    TailSeries,
    CrossChecked,
}

/// A numeric value paired with a conservative absolute error bound.
///
/// `abs_error` covers series/product truncation, the compensated-arithmetic
/// residue, and the final rounding to one f64. When `method` is
/// [`Method::CrossChecked`] the two underlying routes agreed within the sum
/// of their individual bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalResult {
    pub value: f64,
    pub abs_error: f64,
    pub method: Method,
}

impl EvalResult {
    pub(crate) fn new(value: f64, abs_error: f64, method: Method) -> EvalResult {
        debug_assert!(abs_error.is_finite() && abs_error >= 0.0);
        EvalResult { value, abs_error, method }
    }
}

/// Validated parameter bundle (q, z, n).
///
/// Construction enforces 0 < q < 1 strictly and z finite with z >= 0. The
/// per-function ranges (0 < z < 1 for the e-family, z > 0 for the E-family)
/// are checked by the operations that consume the domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QDomain {
    q: f64,
    z: f64,
    n: u32,
}

impl QDomain {
    pub fn new(q: f64, z: f64, n: u32) -> Result<QDomain> {
        check_q(q)?;
        if !z.is_finite() || z < 0.0 {
            return Err(Error::Domain(format!("z must be finite and >= 0, got {z}")));
        }
        Ok(QDomain { q, z, n })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Same q and z with a different index.
    pub fn with_n(&self, n: u32) -> QDomain {
        QDomain { n, ..*self }
    }
}

pub(crate) fn check_q(q: f64) -> Result<()> {
    if !(q.is_finite() && 0.0 < q && q < 1.0) {
        return Err(Error::Domain(format!("q must lie strictly in (0,1), got {q}")));
    }
    Ok(())
}

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Domain(format!("tol must be finite and > 0, got {tol}")));
    }
    Ok(())
}

/// Finite q-shifted factorial (a;q)_n = prod_{k=0}^{n-1} (1 - a q^k).
///
/// Returns 1 for n = 0 (empty product) and an exact 0 as soon as any factor
/// vanishes.
pub fn qpoch(a: f64, q: f64, n: u32) -> Result<f64> {
    check_q(q)?;
    if !a.is_finite() {
        return Err(Error::Domain(format!("a must be finite, got {a}")));
    }
    let mut p = 1.0_f64;
    let mut qpow = 1.0_f64;
    for _ in 0..n {
        let factor = 1.0 - a * qpow;
        if factor == 0.0 {
            return Ok(0.0);
        }
        p *= factor;
        qpow *= q;
    }
    Ok(p)
}

/// Product of (a_i;q)_n over a non-empty list of a-values.
pub fn qpoch_multi(a_list: &[f64], q: f64, n: u32) -> Result<f64> {
    if a_list.is_empty() {
        return Err(Error::Argument("qpoch_multi needs at least one a".into()));
    }
    let mut p = 1.0_f64;
    for &a in a_list {
        p *= qpoch(a, q, n)?;
    }
    Ok(p)
}

/// The q-factorial (q;q)_n, i.e. prod_{j=1}^{n} (1 - q^j).
///
/// Backed by the shared per-q prefix table, so repeated calls with one q
/// (grid scans) reuse earlier work. Cached and uncached evaluations follow
/// the identical recurrence and are bit-identical.
pub fn qfact(q: f64, n: u32) -> Result<f64> {
    check_q(q)?;
    let table = table_for(q);
    let entries = table.at_least(n as usize + 1);
    Ok(entries[n as usize].qq.to_f64())
}

/// Infinite q-shifted factorial (a;q)_inf with a certified error bound.
///
/// Factors are accumulated until the residual log-bound
/// 2|a| q^k / (1-q) drops below the double-word floor; that residual plus the
/// accumulation cost is returned in `abs_error`. A factor that is exactly
/// zero short-circuits to an exact 0.
pub fn qpoch_inf(a: f64, q: f64, tol: f64) -> Result<EvalResult> {
    check_q(q)?;
    check_tol(tol)?;
    if !a.is_finite() {
        return Err(Error::Domain(format!("a must be finite, got {a}")));
    }
    if a == 0.0 {
        return Ok(EvalResult::new(1.0, 0.0, Method::Product));
    }

    let mut p = Dd::ONE;
    let mut apow = Dd::from_f64(a); // a * q^k
    let mut k: u64 = 0;
    const MAX_ITERS: u64 = 4_000_000;
    loop {
        let factor = Dd::ONE.sub(apow);
        if factor.hi == 0.0 && factor.lo == 0.0 {
            return Ok(EvalResult::new(0.0, 0.0, Method::Product));
        }
        p = p.mul(factor);
        apow = apow.mul_f64(q);
        k += 1;
        let x = apow.hi.abs();
        if x < 0.5 {
            // |log prod_{j>=k} (1 - a q^j)| <= 2 |a| q^k / (1 - q) once |a q^k| < 1/2
            let resid = 2.0 * x / (1.0 - q);
            if resid <= DD_EPS {
                let value = p.to_f64();
                let rel = resid.exp_m1() + (k as f64) * 8.0 * DD_EPS + F64_EPS_HALF;
                let abs_error = value.abs() * rel + TINY_ABS;
                return Ok(EvalResult::new(value, abs_error, Method::Product));
            }
        }
        if k >= MAX_ITERS {
            return Err(Error::Convergence(format!(
                "qpoch_inf: residual bound not met after {MAX_ITERS} factors (a={a}, q={q})"
            )));
        }
    }
}

/// Shared per-q prefix table: entry k holds (q;q)_k and q^k in double-word
/// precision. Extension continues the stored recurrence, so a cached prefix
/// is bit-identical to a fresh computation of the same length.
pub(crate) struct QTable {
    q: f64,
    entries: RwLock<Arc<Vec<QEntry>>>,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct QEntry {
    /// (q;q)_k
    pub qq: Dd,
    /// q^k
    pub qpow: Dd,
}

impl QTable {
    fn new(q: f64) -> QTable {
        let e0 = QEntry { qq: Dd::ONE, qpow: Dd::ONE };
        QTable { q, entries: RwLock::new(Arc::new(vec![e0])) }
    }

    /// Snapshot with at least `len` entries. Readers never observe a
    /// partially extended table.
    pub fn at_least(&self, len: usize) -> Arc<Vec<QEntry>> {
        {
            let guard = self.entries.read().expect("qtable lock poisoned");
            if guard.len() >= len {
                return Arc::clone(&guard);
            }
        }
        let mut guard = self.entries.write().expect("qtable lock poisoned");
        if guard.len() >= len {
            return Arc::clone(&guard);
        }
        let mut v: Vec<QEntry> = (**guard).clone();
        v.reserve(len - v.len());
        while v.len() < len {
            let last = v[v.len() - 1];
            let qpow = last.qpow.mul_f64(self.q);
            let qq = last.qq.mul(Dd::ONE.sub(qpow));
            v.push(QEntry { qq, qpow });
        }
        let arc = Arc::new(v);
        *guard = Arc::clone(&arc);
        arc
    }
}

static TABLES: OnceLock<Mutex<HashMap<u64, Arc<QTable>>>> = OnceLock::new();

/// Fetch (or create) the prefix table for this exact bit pattern of q.
pub(crate) fn table_for(q: f64) -> Arc<QTable> {
    let map = TABLES.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = map.lock().expect("qtable registry poisoned");
    Arc::clone(
        guard
            .entry(q.to_bits())
            .or_insert_with(|| Arc::new(QTable::new(q))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{qfact_exact, qpoch_exact, rat, rat_from_f64, to_f64_approx};

    #[test]
    fn qpoch_empty_product_is_one() {
        assert_eq!(qpoch(0.7, 0.5, 0).unwrap(), 1.0);
    }

    #[test]
    fn qpoch_small_exact_case() {
        // (1 - 0.5)(1 - 0.25) = 0.375, exact in binary
        assert_eq!(qpoch(0.5, 0.5, 2).unwrap(), 0.375);
    }

    #[test]
    fn qpoch_zero_factor_gives_exact_zero() {
        assert_eq!(qpoch(1.0, 0.5, 3).unwrap(), 0.0);
    }

    #[test]
    fn qpoch_rejects_bad_q() {
        assert!(matches!(qpoch(0.5, 1.0, 2), Err(Error::Domain(_))));
        assert!(matches!(qpoch(0.5, 0.0, 2), Err(Error::Domain(_))));
        assert!(matches!(qpoch(0.5, -0.2, 2), Err(Error::Domain(_))));
        assert!(matches!(qpoch(0.5, f64::NAN, 2), Err(Error::Domain(_))));
    }

    #[test]
    fn qpoch_matches_exact_rationals() {
        for &(a, q, n) in &[(0.25, 0.5, 7), (-0.75, 0.375, 11), (1.5, 0.625, 9)] {
            let got = qpoch(a, q, n).unwrap();
            let want = to_f64_approx(&qpoch_exact(&rat_from_f64(a), &rat_from_f64(q), n));
            let scale = want.abs().max(1e-300);
            assert!((got - want).abs() / scale < 1e-13, "a={a} q={q} n={n}");
        }
    }

    #[test]
    fn qpoch_recurrence_within_two_ulps() {
        for &a in &[-1.3, -0.5, 0.2, 0.7, 0.95] {
            for &q in &[0.05, 0.5, 0.9] {
                for n in 0..30u32 {
                    let lhs = qpoch(a, q, n + 1).unwrap();
                    let factor = 1.0 - a * q.powi(n as i32);
                    let rhs = qpoch(a, q, n).unwrap() * factor;
                    let tol = 2.0 * f64::EPSILON * rhs.abs().max(f64::MIN_POSITIVE);
                    // powi vs the running product differ by rounding; allow a
                    // couple extra ulps of slack on top of the spec's two.
                    assert!(
                        (lhs - rhs).abs() <= 4.0 * tol.max(f64::EPSILON * lhs.abs()),
                        "a={a} q={q} n={n}: {lhs} vs {rhs}"
                    );
                }
            }
        }
    }

    #[test]
    fn qpoch_multi_singleton_and_square() {
        let q = 0.5;
        assert_eq!(
            qpoch_multi(&[0.5], q, 2).unwrap(),
            qpoch(0.5, q, 2).unwrap()
        );
        assert_eq!(qpoch_multi(&[0.5, 0.5], 0.5, 2).unwrap(), 0.140625);
        assert_eq!(qpoch_multi(&[0.3], q, 0).unwrap(), 1.0);
        assert!(matches!(qpoch_multi(&[], q, 2), Err(Error::Argument(_))));
    }

    #[test]
    fn qfact_basic_values() {
        assert_eq!(qfact(0.5, 0).unwrap(), 1.0);
        assert_eq!(qfact(0.5, 3).unwrap(), 0.328125);
    }

    #[test]
    fn qfact_near_one_matches_factorial_limit() {
        // (q;q)_3 / (1-q)^3 -> 3! = 6 as q -> 1
        let q = 0.999_f64;
        let v = qfact(q, 3).unwrap();
        let scaled = v / (1.0 - q).powi(3);
        assert!((scaled - 6.0).abs() / 6.0 < 0.01, "got {scaled}");
    }

    #[test]
    fn qfact_cached_is_bit_identical_to_recurrence() {
        let q = 0.37_f64;
        // warm the cache out of order
        let _ = qfact(q, 25).unwrap();
        let mut qq = Dd::ONE;
        let mut qpow = Dd::ONE;
        for n in 0..=25u32 {
            let cached = qfact(q, n).unwrap();
            assert_eq!(cached.to_bits(), qq.to_f64().to_bits(), "n={n}");
            qpow = qpow.mul_f64(q);
            qq = qq.mul(Dd::ONE.sub(qpow));
        }
    }

    #[test]
    fn qfact_strictly_decreasing_and_bounded() {
        // Strict decrease per step is only representable while the relative
        // decrement q^{n+1} exceeds f64 granularity; past that (q;q)_n and
        // (q;q)_inf coincide bitwise.
        for &q in &[0.05, 0.5, 0.95] {
            let inf = qpoch_inf(q, q, 1e-15).unwrap().value;
            let mut prev = qfact(q, 1).unwrap();
            assert!(prev <= 1.0);
            for n in 2..40u32 {
                let cur = qfact(q, n).unwrap();
                if q.powi(n as i32) > 1e-14 {
                    assert!(cur < prev, "q={q} n={n}");
                    assert!(cur > inf, "q={q} n={n}: {cur} <= {inf}");
                } else {
                    assert!(cur <= prev, "q={q} n={n}");
                    assert!(cur >= inf, "q={q} n={n}");
                }
                prev = cur;
            }
        }
    }

    #[test]
    fn qfact_matches_exact_rationals() {
        let got = qfact(0.375, 12).unwrap();
        let want = to_f64_approx(&qfact_exact(&rat(3, 8), 12));
        assert!((got - want).abs() / want < 1e-15);
    }

    #[test]
    fn qpoch_inf_trivial_and_frozen_values() {
        let r = qpoch_inf(0.0, 0.5, 1e-12).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.abs_error, 0.0);

        // High-precision partial-product oracles, frozen:
        // (0.5;0.5)_inf and (-1;0.5)_inf = prod (1 + 0.5^k) = E(0.5;1).
        let r = qpoch_inf(0.5, 0.5, 1e-12).unwrap();
        assert!((r.value - 0.288_788_095_086_602_42).abs() < 1e-15);
        assert!(r.abs_error < 1e-12);
        let r = qpoch_inf(-1.0, 0.5, 1e-12).unwrap();
        assert!((r.value - 4.768_462_058_062_743_4).abs() < 1e-14);
    }

    #[test]
    fn qpoch_inf_exact_zero_factor() {
        let r = qpoch_inf(1.0, 0.5, 1e-12).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.abs_error, 0.0);
        // a = 1/q^2 hits a zero factor at k = 2
        let q = 0.5;
        let r = qpoch_inf(4.0, q, 1e-12).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn qpoch_inf_agrees_with_long_finite_products() {
        for &(a, q) in &[(0.5, 0.5), (0.9, 0.3), (-2.0, 0.7)] {
            let inf = qpoch_inf(a, q, 1e-13).unwrap();
            let fin = qpoch(a, q, 400).unwrap();
            assert!(
                (inf.value - fin).abs() <= inf.abs_error + 1e-13 * fin.abs(),
                "a={a} q={q}"
            );
        }
    }

    #[test]
    fn qdomain_validation() {
        assert!(QDomain::new(0.5, 0.5, 3).is_ok());
        assert!(QDomain::new(1.0, 0.5, 3).is_err());
        assert!(QDomain::new(0.5, -0.1, 3).is_err());
        assert!(QDomain::new(0.5, f64::INFINITY, 3).is_err());
    }

    #[test]
    fn qtable_concurrent_reads_are_consistent() {
        let q = 0.613_f64;
        let handles: Vec<_> = (0..8)
            .map(|i| {
                std::thread::spawn(move || {
                    let table = table_for(q);
                    let entries = table.at_least(50 + i * 37);
                    entries[40].qq.to_f64().to_bits()
                })
            })
            .collect();
        let bits: Vec<u64> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        assert!(bits.windows(2).all(|w| w[0] == w[1]));
    }
}
