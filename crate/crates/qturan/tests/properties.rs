//! Property tests for the spec'd invariants: recurrences, monotonicity,
//! positivity, dual-route agreement, and the certified-verdict guarantees,
//! over randomized in-domain parameters.

use proptest::prelude::*;

use qturan::{
    best_constant, eval_qexp, parse_csv_str, qfact, qpoch, qpoch_inf, remainder, shift_remainder,
    turan_determinant_series, turan_ratio, verify_turan, EvalMethod, Outcome, QDomain, QExpKind,
    RemainderKind, ShiftDirection,
};

fn q_strategy() -> impl Strategy<Value = f64> {
    (0.02f64..0.97).prop_map(|q| q)
}

fn z_unit() -> impl Strategy<Value = f64> {
    0.01f64..0.97
}

fn z_positive() -> impl Strategy<Value = f64> {
    0.01f64..8.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn qpoch_recurrence(a in -1.5f64..1.5, q in q_strategy(), n in 0u32..40) {
        let lhs = qpoch(a, q, n + 1).unwrap();
        let mut qpow = 1.0f64;
        for _ in 0..n { qpow *= q; }
        let rhs = qpoch(a, q, n).unwrap() * (1.0 - a * qpow);
        let tol = 4.0 * f64::EPSILON * rhs.abs().max(lhs.abs()).max(f64::MIN_POSITIVE);
        prop_assert!((lhs - rhs).abs() <= tol, "{lhs} vs {rhs}");
    }

    #[test]
    fn qfact_within_infinite_product_bracket(q in q_strategy(), n in 1u32..30) {
        let v = qfact(q, n).unwrap();
        let inf = qpoch_inf(q, q, 1e-14).unwrap();
        prop_assert!(v <= 1.0);
        prop_assert!(v >= inf.value - inf.abs_error);
    }

    #[test]
    fn qpoch_inf_agrees_with_long_partial(a in -1.5f64..0.97, q in 0.02f64..0.9) {
        let inf = qpoch_inf(a, q, 1e-13).unwrap();
        let fin = qpoch(a, q, 900).unwrap();
        prop_assert!((inf.value - fin).abs() <= inf.abs_error + 1e-12 * fin.abs().max(1.0));
    }

    #[test]
    fn qexp_dual_route(q in q_strategy(), z in z_unit()) {
        let dom = QDomain::new(q, z, 0).unwrap();
        let s = eval_qexp(QExpKind::SmallE, &dom, 1e-12, EvalMethod::Series).unwrap();
        let p = eval_qexp(QExpKind::SmallE, &dom, 1e-12, EvalMethod::Product).unwrap();
        prop_assert!((s.value - p.value).abs() <= s.abs_error + p.abs_error);
        prop_assert!((s.value - p.value).abs() <= 1e-12 * p.value.abs());
        // cross_checked returns the product value
        let c = eval_qexp(QExpKind::SmallE, &dom, 1e-12, EvalMethod::CrossChecked).unwrap();
        prop_assert_eq!(c.value, p.value);
    }

    #[test]
    fn remainder_positive_and_decreasing(q in q_strategy(), z in z_unit(), n in 0u32..12) {
        let r0 = remainder(RemainderKind::TailI, &QDomain::new(q, z, n).unwrap(), 1e-12).unwrap();
        let r1 = remainder(RemainderKind::TailI, &QDomain::new(q, z, n + 1).unwrap(), 1e-12).unwrap();
        prop_assert!(r0.value > 0.0 && r1.value > 0.0);
        prop_assert!(r1.value < r0.value);
    }

    #[test]
    fn shifts_match_direct_neighbors(
        kind_j in any::<bool>(), q in q_strategy(), zi in z_unit(), zj in z_positive(), n in 1u32..12
    ) {
        let (kind, z) = if kind_j { (RemainderKind::TailJ, zj) } else { (RemainderKind::TailI, zi) };
        let dom = QDomain::new(q, z, n).unwrap();
        let at_n = remainder(kind, &dom, 1e-13).unwrap();
        let down = shift_remainder(kind, &dom, at_n.value, ShiftDirection::Down).unwrap();
        let up = shift_remainder(kind, &dom, at_n.value, ShiftDirection::Up).unwrap();
        let direct_dn = remainder(kind, &dom.with_n(n - 1), 1e-13).unwrap();
        let direct_up = remainder(kind, &dom.with_n(n + 1), 1e-13).unwrap();
        let slack_dn = at_n.abs_error + direct_dn.abs_error + 4.0 * f64::EPSILON * direct_dn.value;
        let slack_up = at_n.abs_error + direct_up.abs_error + 4.0 * f64::EPSILON * direct_up.value.max(at_n.value * f64::EPSILON);
        prop_assert!((down - direct_dn.value).abs() <= slack_dn, "down {down} vs {}", direct_dn.value);
        prop_assert!((up - direct_up.value).abs() <= slack_up, "up {up} vs {}", direct_up.value);
    }

    #[test]
    fn theorem_never_violated(
        kind_j in any::<bool>(), q in q_strategy(), zi in z_unit(), zj in z_positive(), n in 1u32..12
    ) {
        let (kind, z) = if kind_j { (RemainderKind::TailJ, zj) } else { (RemainderKind::TailI, zi) };
        let dom = QDomain::new(q, z, n).unwrap();
        let v = verify_turan(kind, &dom, 1e-12).unwrap();
        prop_assert!(v.outcome != Outcome::Violated, "violated at q={q} z={z} n={n}");
        // the ratio sits inside the open interval predicted by the theorems
        let c = best_constant(kind, q, n).unwrap();
        let r = turan_ratio(kind, &dom, 1e-12).unwrap();
        prop_assert!(r.value > c - r.abs_error - 1e-15);
        prop_assert!(r.value < 1.0 + r.abs_error + 1e-15);
    }

    #[test]
    fn determinant_negative_in_domain(
        kind_j in any::<bool>(), q in q_strategy(), zi in z_unit(), zj in z_positive(), n in 1u32..10
    ) {
        let (kind, z) = if kind_j { (RemainderKind::TailJ, zj) } else { (RemainderKind::TailI, zi) };
        let d = turan_determinant_series(kind, &QDomain::new(q, z, n).unwrap(), 1e-12).unwrap();
        prop_assert!(d.value < 0.0);
    }

    #[test]
    fn csv_parser_never_panics(bytes in proptest::collection::vec(any::<u8>(), 0..512)) {
        if let Ok(text) = std::str::from_utf8(&bytes) {
            let _ = parse_csv_str(text);
        }
    }

    #[test]
    fn csv_row_round_trip_from_valid_docs(q in q_strategy(), z in z_unit(), n in 1u32..8) {
        let dom = QDomain::new(q, z, n).unwrap();
        let v = verify_turan(RemainderKind::TailI, &dom, 1e-12).unwrap();
        let rec = qturan::ScanRecord {
            kind: qturan::ScanKind::I,
            q, n, z,
            ratio: v.ratio,
            lower_constant: v.lower_constant,
            lower_margin: v.lower_margin,
            upper_margin: v.upper_margin,
            error_budget: v.error_budget,
            outcome: v.outcome,
        };
        let line = rec.to_csv_row();
        let back = qturan::ScanRecord::parse_csv_row(&line).unwrap();
        prop_assert_eq!(rec, back);
    }
}
