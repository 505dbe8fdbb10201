//! Exact-rational evaluation routes, used as independent oracles by the test
//! suites.
//!
//! Partial products and partial sums are computed without rounding on
//! `BigRational`; the discarded infinite tails are enclosed by geometric
//! bounds, also in rational arithmetic. The result is a rigorous interval
//! `[lower, upper]` containing the true real value, sharing no code with the
//! double-word evaluation path it is used to check.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

/// Rational n/d.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// The exact rational value of a finite double.
pub fn rat_from_f64(x: f64) -> Rat {
    Rat::from_float(x).expect("finite f64")
}

/// Lossy conversion for comparing oracle values against f64 results.
pub fn to_f64_approx(r: &Rat) -> f64 {
    r.to_f64().expect("rational within f64 range")
}

/// Finite q-shifted factorial (a;q)_n, exact.
pub fn qpoch_exact(a: &Rat, q: &Rat, n: u32) -> Rat {
    let mut p = Rat::one();
    let mut qpow = Rat::one();
    for _ in 0..n {
        p *= Rat::one() - a * &qpow;
        qpow *= q;
    }
    p
}

/// (q;q)_n, exact.
pub fn qfact_exact(q: &Rat, n: u32) -> Rat {
    qpoch_exact(q, q, n)
}

/// Rigorous enclosure of (a;q)_inf from `terms` exact factors.
///
/// Requires |a| q^terms <= 1/2 so the log-factor bound applies; the residual
/// product then lies in [1 - 2S, 1/(1 - S)] with S = |a| q^terms / (1-q).
pub fn qpoch_inf_bounds(a: &Rat, q: &Rat, terms: u32) -> (Rat, Rat) {
    assert!(q > &Rat::zero() && q < &Rat::one());
    let p = qpoch_exact(a, q, terms);
    let s = a.abs() * q.pow(terms as i32) / (Rat::one() - q.clone());
    assert!(
        s <= rat(1, 2),
        "qpoch_inf_bounds: increase terms until |a| q^K/(1-q) <= 1/2"
    );
    let lo_factor = Rat::one() - s.clone() - s.clone();
    let hi_factor = Rat::one() / (Rat::one() - s);
    if p.is_positive() {
        (&p * lo_factor, &p * hi_factor)
    } else {
        (&p * hi_factor, &p * lo_factor)
    }
}

/// Exact partial sum sum_{k=0}^{upto} z^k / (q;q)_k of the e-series.
pub fn small_e_partial(q: &Rat, z: &Rat, upto: u32) -> Rat {
    let mut sum = Rat::zero();
    let mut term = Rat::one();
    for k in 0..=upto {
        sum += &term;
        term = term * z / (Rat::one() - q.pow(k as i32 + 1));
    }
    sum
}

/// Exact partial sum sum_{k=0}^{upto} q^{k(k-1)/2} z^k / (q;q)_k of the E-series.
pub fn big_e_partial(q: &Rat, z: &Rat, upto: u32) -> Rat {
    let mut sum = Rat::zero();
    let mut term = Rat::one();
    for k in 0..=upto {
        sum += &term;
        term = term * z * q.pow(k as i32) / (Rat::one() - q.pow(k as i32 + 1));
    }
    sum
}

/// Rigorous enclosure of the e-series tail sum_{k=n+1}^{inf} z^k/(q;q)_k.
///
/// Sums `terms` exact terms, then bounds the rest geometrically: the term
/// ratio beyond index K is at most r = z/(1 - q^{K+2}), which must be < 1
/// (always reachable for 0 < z < 1).
pub fn tail_i_bounds(q: &Rat, z: &Rat, n: u32, terms: u32) -> (Rat, Rat) {
    assert!(z > &Rat::zero() && z < &Rat::one());
    let mut term = z.pow(n as i32 + 1) / qfact_exact(q, n + 1);
    let mut sum = Rat::zero();
    for k in (n + 1)..(n + 1 + terms) {
        sum += &term;
        term = term * z / (Rat::one() - q.pow(k as i32 + 1));
    }
    // `term` is now the first omitted term, at index K+1 = n+1+terms.
    let k_next = (n + 1 + terms) as i32;
    let r = z / (Rat::one() - q.pow(k_next + 1));
    assert!(r < Rat::one(), "tail_i_bounds: increase terms");
    let rest = &term / (Rat::one() - r);
    (sum.clone(), sum + rest)
}

/// Rigorous enclosure of the E-series tail
/// sum_{k=n+1}^{inf} q^{k(k-1)/2} z^k/(q;q)_k.
pub fn tail_j_bounds(q: &Rat, z: &Rat, n: u32, terms: u32) -> (Rat, Rat) {
    assert!(z > &Rat::zero());
    let k0 = n + 1;
    let exp0 = (k0 as i32) * (k0 as i32 - 1) / 2;
    let mut term = q.pow(exp0) * z.pow(k0 as i32) / qfact_exact(q, k0);
    let mut sum = Rat::zero();
    for k in k0..(k0 + terms) {
        sum += &term;
        term = term * z * q.pow(k as i32) / (Rat::one() - q.pow(k as i32 + 1));
    }
    let k_next = (k0 + terms) as i32;
    let r = z * q.pow(k_next) / (Rat::one() - q.pow(k_next + 1));
    assert!(r < Rat::one(), "tail_j_bounds: increase terms");
    let rest = &term / (Rat::one() - r);
    (sum.clone(), sum + rest)
}

/// Rigorous enclosure of the classical remainder e^x - sum_{k<=n} x^k/k!,
/// computed as the direct tail sum_{k=n+1}^{inf} x^k/k!.
pub fn classical_tail_bounds(x: &Rat, n: u32, terms: u32) -> (Rat, Rat) {
    assert!(x > &Rat::zero());
    let mut term = x.pow(n as i32 + 1);
    for k in 1..=(n as i64 + 1) {
        term /= Rat::from_integer(BigInt::from(k));
    }
    let mut sum = Rat::zero();
    for k in (n + 1)..(n + 1 + terms) {
        sum += &term;
        term = term * x / Rat::from_integer(BigInt::from(k as i64 + 1));
    }
    let r = x / Rat::from_integer(BigInt::from((n + terms + 2) as i64));
    assert!(r < Rat::one(), "classical_tail_bounds: increase terms");
    let rest = &term / (Rat::one() - r);
    (sum.clone(), sum + rest)
}

/// Enclosure of the Turan ratio T_{n-1} T_{n+1} / T_n^2 from per-remainder
/// enclosures. All inputs must be positive intervals.
pub fn ratio_bounds(
    lo_nm1: &Rat,
    hi_nm1: &Rat,
    lo_n: &Rat,
    hi_n: &Rat,
    lo_np1: &Rat,
    hi_np1: &Rat,
) -> (Rat, Rat) {
    assert!(lo_nm1.is_positive() && lo_n.is_positive() && lo_np1.is_positive());
    let lower = lo_nm1 * lo_np1 / (hi_n * hi_n);
    let upper = hi_nm1 * hi_np1 / (lo_n * lo_n);
    (lower, upper)
}

/// Exact check of (1 - q^{k+1})/(1 - q) <= k + 1, returning whether the
/// inequality holds and whether it is an equality.
pub fn geometric_partial_sum_bound(q: &Rat, k: u32) -> (bool, bool) {
    let lhs = (Rat::one() - q.pow(k as i32 + 1)) / (Rat::one() - q.clone());
    let rhs = Rat::from_integer(BigInt::from(k as i64 + 1));
    (lhs <= rhs, lhs == rhs)
}
