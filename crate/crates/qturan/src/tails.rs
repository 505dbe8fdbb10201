//! Series remainders of the q-exponentials, computed directly as tails.
//!
//! ```text
//! I_n(q;z) = e(q;z) - sum_{k=0}^{n} z^k/(q;q)_k
//!          = sum_{k=n+1}^{inf} z^k/(q;q)_k,                    0 < z < 1
//! J_n(q;z) = E(q;z) - sum_{k=0}^{n} q^{k(k-1)/2} z^k/(q;q)_k
//!          = sum_{k=n+1}^{inf} q^{k(k-1)/2} z^k/(q;q)_k,       z > 0
//! ```
//!
//! The tails are never formed as "full value minus partial sum": at small z
//! that subtraction cancels every significant digit (z = 1e-6, n = 3 already
//! loses ~24 of them), and the small-z ratios are exactly where the sharp
//! Turan constants live. The index-shift identities
//!
//! ```text
//! I_{n-1} = I_n + z^n/(q;q)_n          I_{n+1} = I_n - z^{n+1}/(q;q)_{n+1}
//! J_{n-1} = J_n + q^{n(n-1)/2} z^n/(q;q)_n
//! J_{n+1} = J_n - q^{n(n+1)/2} z^{n+1}/(q;q)_{n+1}
//! ```
//!
//! drop out of the definitions and give the verdict module its three
//! remainders from a single tail evaluation. The n = -1 extension (empty
//! partial sum) is the full function value: I_{-1} = e(q;z), J_{-1} = E(q;z).

use crate::dd::{Dd, F64_EPS_HALF, TINY_ABS};
use crate::error::{Error, Result};
use crate::qcore::{check_tol, EvalResult, Method, QDomain};
use crate::sums::{
    sum_big_e_from, sum_small_e_from, term_big_e, term_rel_err, term_small_e,
};

/// Which remainder family: `TailI` are the e-remainders I_n (0 < z < 1),
/// `TailJ` the E-remainders (z > 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RemainderKind {
    TailI,
    TailJ,
}

/// Index-shift direction for [`shift_remainder`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftDirection {
    /// n -> n-1: add the degree-n series term back.
    Down,
    /// n -> n+1: subtract the degree-(n+1) series term.
    Up,
}

pub(crate) fn check_z_for_tail(kind: RemainderKind, z: f64) -> Result<()> {
    match kind {
        RemainderKind::TailI => {
            if !(z > 0.0 && z < 1.0) {
                return Err(Error::Domain(format!("I_n(q;z) needs 0 < z < 1, got z={z}")));
            }
        }
        RemainderKind::TailJ => {
            if z <= 0.0 {
                return Err(Error::Domain(format!("J_n(q;z) needs z > 0, got z={z}")));
            }
        }
    }
    Ok(())
}

/// Tail value in double-word precision plus a conservative absolute bound.
pub(crate) fn remainder_dd(kind: RemainderKind, q: f64, z: f64, n: u32) -> Result<(Dd, f64)> {
    let s = match kind {
        RemainderKind::TailI => sum_small_e_from(q, z, n + 1)?,
        RemainderKind::TailJ => sum_big_e_from(q, z, n + 1)?,
    };
    if !(s.sum.hi > 0.0) {
        return Err(Error::NonPositive(format!(
            "tail at q={q}, z={z}, n={n} evaluated to {}; below the representable range",
            s.sum.hi
        )));
    }
    Ok((s.sum, s.abs_err))
}

/// The degree-k series term of the family, with its error bound.
pub(crate) fn series_term_dd(kind: RemainderKind, q: f64, z: f64, k: u32) -> (Dd, f64) {
    let t = match kind {
        RemainderKind::TailI => term_small_e(q, z, k),
        RemainderKind::TailJ => term_big_e(q, z, k),
    };
    let err = t.hi.abs() * term_rel_err(q, k) + TINY_ABS;
    (t, err)
}

/// Remainder after the degree-n partial sum, evaluated as a direct tail.
///
/// The value is positive everywhere in-domain (every series term is), and
/// `abs_error` combines the geometric truncation bound with the accumulated
/// arithmetic bound.
pub fn remainder(kind: RemainderKind, dom: &QDomain, tol: f64) -> Result<EvalResult> {
    check_tol(tol)?;
    check_z_for_tail(kind, dom.z())?;
    let (sum, err) = remainder_dd(kind, dom.q(), dom.z(), dom.n())?;
    let value = sum.to_f64();
    Ok(EvalResult::new(
        value,
        err + value.abs() * F64_EPS_HALF,
        Method::TailSeries,
    ))
}

/// Move a remainder evaluation one index down or up via the shift identities.
///
/// `value_at_n` is a finite evaluation of the kind-n remainder at `dom`. An
/// up-shift that lands at or below zero signals accumulated numerical error
/// in the input and is reported as an error rather than clamped.
pub fn shift_remainder(
    kind: RemainderKind,
    dom: &QDomain,
    value_at_n: f64,
    direction: ShiftDirection,
) -> Result<f64> {
    check_z_for_tail(kind, dom.z())?;
    if !value_at_n.is_finite() {
        return Err(Error::Argument(format!("value_at_n must be finite, got {value_at_n}")));
    }
    let (q, z, n) = (dom.q(), dom.z(), dom.n());
    match direction {
        ShiftDirection::Down => {
            let (t, _) = series_term_dd(kind, q, z, n);
            Ok(Dd::from_f64(value_at_n).add(t).to_f64())
        }
        ShiftDirection::Up => {
            let (t, _) = series_term_dd(kind, q, z, n + 1);
            let shifted = Dd::from_f64(value_at_n).sub(t).to_f64();
            if shifted <= 0.0 {
                return Err(Error::NonPositive(format!(
                    "up-shift at q={q}, z={z}, n={n} gave {shifted}; input value carries too much error"
                )));
            }
            Ok(shifted)
        }
    }
}
