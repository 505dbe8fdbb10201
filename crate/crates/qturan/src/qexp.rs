//! The q-analogue exponential pair, evaluated by series and by product.
//!
//! ```text
//! e(q;z) = sum_{n>=0} z^n / (q;q)_n           = 1/(z;q)_inf,   |z| < 1
//! E(q;z) = sum_{n>=0} q^{n(n-1)/2} z^n/(q;q)_n = (-z;q)_inf,   entire
//! ```
//!
//! Both routes carry certified error bounds, and `CrossChecked` runs them
//! against each other: a disagreement beyond the summed bounds is an internal
//! consistency failure, not a value.

use crate::dd::{Dd, F64_EPS_HALF, TINY_ABS};
use crate::error::{Error, Result};
use crate::qcore::{check_tol, qpoch_inf, EvalResult, Method, QDomain};
use crate::sums::{sum_big_e_from, sum_small_e_from};

/// Which q-exponential a domain is used with.
///
/// `SmallE` is e(q;z) and needs 0 <= z < 1 (the series diverges at the unit
/// disk boundary); `BigE` is E(q;z) and accepts any z >= 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QExpKind {
    SmallE,
    BigE,
}

/// Requested evaluation route.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalMethod {
    Series,
    Product,
    CrossChecked,
}

pub(crate) fn check_z_for_exp(kind: QExpKind, z: f64) -> Result<()> {
    match kind {
        QExpKind::SmallE => {
            if !(z >= 0.0 && z < 1.0) {
                return Err(Error::Domain(format!(
                    "e(q;z) needs 0 <= z < 1 (series diverges at |z| = 1), got z={z}"
                )));
            }
        }
        QExpKind::BigE => {
            if z < 0.0 {
                return Err(Error::Domain(format!("E(q;z) is evaluated for z >= 0, got z={z}")));
            }
        }
    }
    Ok(())
}

fn series_route(kind: QExpKind, q: f64, z: f64) -> Result<EvalResult> {
    if z == 0.0 {
        return Ok(EvalResult::new(1.0, 0.0, Method::Series));
    }
    let s = match kind {
        QExpKind::SmallE => sum_small_e_from(q, z, 0)?,
        QExpKind::BigE => sum_big_e_from(q, z, 0)?,
    };
    let value = s.sum.to_f64();
    let abs_error = s.abs_err + value.abs() * F64_EPS_HALF;
    Ok(EvalResult::new(value, abs_error, Method::Series))
}

fn product_route(kind: QExpKind, q: f64, z: f64, tol: f64) -> Result<EvalResult> {
    if z == 0.0 {
        return Ok(EvalResult::new(1.0, 0.0, Method::Product));
    }
    match kind {
        QExpKind::SmallE => {
            let p = qpoch_inf(z, q, tol)?;
            // e = 1/P; relative error carries over, plus one division rounding
            let value = 1.0 / p.value;
            let rel = p.abs_error / p.value.abs() + F64_EPS_HALF;
            Ok(EvalResult::new(value, value.abs() * rel + TINY_ABS, Method::Product))
        }
        QExpKind::BigE => {
            let p = qpoch_inf(-z, q, tol)?;
            Ok(EvalResult::new(p.value, p.abs_error, Method::Product))
        }
    }
}

/// Evaluate e(q;z) or E(q;z) by the requested route.
///
/// In `CrossChecked` mode both routes run; their values must agree within the
/// sum of the two error bounds and the product-route value is returned.
pub fn eval_qexp(kind: QExpKind, dom: &QDomain, tol: f64, method: EvalMethod) -> Result<EvalResult> {
    check_tol(tol)?;
    check_z_for_exp(kind, dom.z())?;
    let (q, z) = (dom.q(), dom.z());
    match method {
        EvalMethod::Series => series_route(kind, q, z),
        EvalMethod::Product => product_route(kind, q, z, tol),
        EvalMethod::CrossChecked => {
            let s = series_route(kind, q, z)?;
            let p = product_route(kind, q, z, tol)?;
            let gap = (s.value - p.value).abs();
            let budget = s.abs_error + p.abs_error;
            if gap > budget {
                return Err(Error::CrossCheck(format!(
                    "series {:.17e} vs product {:.17e}: gap {gap:.3e} exceeds combined bound {budget:.3e}",
                    s.value, p.value
                )));
            }
            Ok(EvalResult::new(p.value, p.abs_error, Method::CrossChecked))
        }
    }
}

/// e(q;z) * E(q;-z) - 1, which vanishes identically because the two product
/// representations are exact reciprocals.
///
/// E at the negative argument is reached through its product form (the
/// product converges for every real argument); this is the only place the
/// crate evaluates E off the z > 0 range.
pub fn euler_pair_residual(q: f64, z: f64, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::Domain(format!("euler_pair_residual needs z in (0,1), got {z}")));
    }
    let dom = QDomain::new(q, z, 0)?;
    let e = eval_qexp(QExpKind::SmallE, &dom, tol, EvalMethod::CrossChecked)?;
    // E(q;-z) = (z;q)_inf
    let big_e = qpoch_inf(z, q, tol)?;
    let prod = Dd::from_f64(e.value).mul_f64(big_e.value);
    Ok(prod.sub(Dd::ONE).to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dom(q: f64, z: f64) -> QDomain {
        QDomain::new(q, z, 0).unwrap()
    }

    #[test]
    fn z_zero_is_one_exactly() {
        for kind in [QExpKind::SmallE, QExpKind::BigE] {
            for m in [EvalMethod::Series, EvalMethod::Product, EvalMethod::CrossChecked] {
                let r = eval_qexp(kind, &dom(0.5, 0.0), 1e-12, m).unwrap();
                assert_eq!(r.value, 1.0);
            }
        }
    }

    #[test]
    fn frozen_reference_values() {
        // e(0.5;0.5) = 3.46274661945506361..., E(0.5;1) = 4.76846205806274345...
        let r = eval_qexp(QExpKind::SmallE, &dom(0.5, 0.5), 1e-12, EvalMethod::CrossChecked).unwrap();
        assert!((r.value - 3.462_746_619_455_063_6).abs() < 1e-14);
        assert_eq!(r.method, Method::CrossChecked);
        let r = eval_qexp(QExpKind::BigE, &dom(0.5, 1.0), 1e-12, EvalMethod::CrossChecked).unwrap();
        assert!((r.value - 4.768_462_058_062_743_4).abs() < 1e-14);
    }

    #[test]
    fn small_e_rejects_unit_disk_boundary() {
        assert!(matches!(
            eval_qexp(QExpKind::SmallE, &dom(0.5, 1.0), 1e-12, EvalMethod::Series),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            eval_qexp(QExpKind::SmallE, &dom(0.5, 1.5), 1e-12, EvalMethod::Product),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn routes_agree_near_the_boundary() {
        // z > 0.9: series converges slowly; both routes must still agree.
        let r = eval_qexp(QExpKind::SmallE, &dom(0.9, 0.95), 1e-12, EvalMethod::CrossChecked).unwrap();
        let s = eval_qexp(QExpKind::SmallE, &dom(0.9, 0.95), 1e-12, EvalMethod::Series).unwrap();
        assert!((r.value - s.value).abs() <= r.abs_error + s.abs_error);
        assert!((r.value - s.value).abs() / r.value < 1e-12);
    }

    #[test]
    fn strictly_increasing_in_z() {
        let mut prev = eval_qexp(QExpKind::SmallE, &dom(0.7, 0.05), 1e-12, EvalMethod::Series)
            .unwrap()
            .value;
        for i in 2..19 {
            let z = 0.05 * i as f64;
            let v = eval_qexp(QExpKind::SmallE, &dom(0.7, z), 1e-12, EvalMethod::Series)
                .unwrap()
                .value;
            assert!(v > prev, "z={z}");
            prev = v;
        }
        let mut prev = 1.0;
        for i in 1..20 {
            let z = 0.5 * i as f64;
            let v = eval_qexp(QExpKind::BigE, &dom(0.7, z), 1e-12, EvalMethod::Series)
                .unwrap()
                .value;
            assert!(v > prev, "z={z}");
            prev = v;
        }
    }

    #[test]
    fn euler_residual_examples() {
        assert!(euler_pair_residual(0.5, 0.5, 1e-12).unwrap().abs() < 1e-12);
        assert!(euler_pair_residual(0.9, 0.1, 1e-12).unwrap().abs() < 1e-12);
        assert!(euler_pair_residual(0.3, 1e-9, 1e-12).unwrap().abs() < 1e-13);
        assert!(matches!(euler_pair_residual(0.5, 1.2, 1e-12), Err(Error::Domain(_))));
    }
}
