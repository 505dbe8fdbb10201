//! Double-word (double-double) arithmetic for the series and product kernels.
//!
//! A [`Dd`] holds a real number as an unevaluated sum `hi + lo` with
//! `|lo| <= ulp(hi)/2`. Sums and products of two doubles are error-free
//! transformations (Knuth two-sum, FMA two-product); the compound operations
//! below carry relative errors of a few units in 2^-104. That headroom is what
//! lets the Turan verdicts resolve margins far below one ulp of the ratio.
//!
//! The algorithms are the standard double-word building blocks (Dekker/Knuth,
//! and the accurate-addition variant from the double-word literature).

/// Conservative per-operation relative error bound for `Dd` add/mul/div.
///
/// The literature bounds are 3u^2 (add), 5u^2 (mul), 10u^2 (div) with
/// u = 2^-53; 2^-100 covers all of them with an order of magnitude to spare.
pub(crate) const DD_EPS: f64 = 7.9e-31; // 2^-100

/// Relative rounding error of collapsing a `Dd` to one f64 (half an ulp).
pub(crate) const F64_EPS_HALF: f64 = 1.2e-16; // slightly above 2^-53

/// Absolute floor added to every reported error bound. Covers underflow of
/// the error-free transformations in the far subnormal range.
pub(crate) const TINY_ABS: f64 = 1e-300;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

/// Knuth's two-sum: s + e == a + b exactly, s = fl(a + b).
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Dekker's fast two-sum; requires |a| >= |b| (or a == 0).
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

/// FMA two-product: p + e == a * b exactly.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Collapse to a single double (one rounding).
    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            self.neg()
        } else {
            self
        }
    }

    /// Accurate double-word addition (relative error <= 3 * 2^-106).
    pub fn add(self, o: Dd) -> Dd {
        let (sh, sl) = two_sum(self.hi, o.hi);
        let (th, tl) = two_sum(self.lo, o.lo);
        let c = sl + th;
        let (vh, vl) = quick_two_sum(sh, c);
        let w = tl + vl;
        let (zh, zl) = quick_two_sum(vh, w);
        Dd { hi: zh, lo: zl }
    }

    #[inline]
    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn add_f64(self, y: f64) -> Dd {
        self.add(Dd::from_f64(y))
    }

    /// Double-word multiplication (relative error <= 5 * 2^-106).
    pub fn mul(self, o: Dd) -> Dd {
        let (ph, pl) = two_prod(self.hi, o.hi);
        let t = self.hi.mul_add(o.lo, self.lo.mul_add(o.hi, pl));
        let (zh, zl) = quick_two_sum(ph, t);
        Dd { hi: zh, lo: zl }
    }

    pub fn mul_f64(self, y: f64) -> Dd {
        let (ph, pl) = two_prod(self.hi, y);
        let t = self.lo.mul_add(y, pl);
        let (zh, zl) = quick_two_sum(ph, t);
        Dd { hi: zh, lo: zl }
    }

    /// Double-word division via three corrected quotient digits.
    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r1 = self.sub(o.mul_f64(q1));
        let q2 = r1.hi / o.hi;
        let r2 = r1.sub(o.mul_f64(q2));
        let q3 = r2.hi / o.hi;
        let (h, l) = quick_two_sum(q1, q2);
        Dd { hi: h, lo: l }.add(Dd::from_f64(q3))
    }

    pub fn recip(self) -> Dd {
        Dd::ONE.div(self)
    }

    /// Integer power by binary exponentiation.
    pub fn powi(self, mut e: u32) -> Dd {
        let mut base = self;
        let mut acc = Dd::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(base);
            }
        }
        acc
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.hi > 0.0 || (self.hi == 0.0 && self.lo > 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{qfact_exact, rat, to_f64_approx};
    use num::BigRational;

    #[test]
    fn two_sum_recovers_lost_bits() {
        let a = 1e18;
        let b = 1.0;
        let (s, e) = two_sum(a, b);
        assert_eq!(s, 1e18);
        assert_eq!(e, 1.0);
    }

    #[test]
    fn two_prod_is_exact() {
        let a = 1.0 + f64::EPSILON;
        let b = 1.0 - f64::EPSILON;
        let (p, e) = two_prod(a, b);
        // a*b = 1 - eps^2 exactly; p rounds to 1, e carries -eps^2.
        assert_eq!(p, 1.0);
        assert_eq!(e, -f64::EPSILON * f64::EPSILON);
    }

    #[test]
    fn third_round_trips_to_dd_precision() {
        let third = Dd::ONE.div(Dd::from_f64(3.0));
        let one = third.mul_f64(3.0);
        let err = one.sub(Dd::ONE).to_f64().abs();
        assert!(err < 1e-31, "1/3*3 off by {err}");
    }

    #[test]
    fn large_cancellation_is_exact() {
        let big = Dd::from_f64(1e20);
        let x = big.add_f64(1.0);
        let back = x.sub(big);
        assert_eq!(back.to_f64(), 1.0);
    }

    #[test]
    fn product_chain_matches_rationals() {
        // prod_{j=1..30} (1 - (3/8)^j) against exact rational arithmetic.
        let q = 0.375_f64;
        let mut p = Dd::ONE;
        let mut qp = Dd::ONE;
        for _ in 0..30 {
            qp = qp.mul_f64(q);
            p = p.mul(Dd::ONE.sub(qp));
        }
        let exact: BigRational = qfact_exact(&rat(3, 8), 30);
        let rel = (p.to_f64() - to_f64_approx(&exact)).abs() / to_f64_approx(&exact);
        assert!(rel < 1e-15);
        // hi+lo should agree with the rational value to dd precision
        let exact_hi = to_f64_approx(&exact);
        let resid = to_f64_approx(&(&exact - BigRational::from_float(exact_hi).unwrap()));
        let lo_err = (p.hi - exact_hi).abs() + (p.lo - resid).abs();
        assert!(lo_err < 1e-28, "lo part off by {lo_err}");
    }

    #[test]
    fn powi_small_cases() {
        assert_eq!(Dd::from_f64(2.0).powi(0).to_f64(), 1.0);
        assert_eq!(Dd::from_f64(2.0).powi(10).to_f64(), 1024.0);
        let p = Dd::from_f64(0.5).powi(100);
        assert!((p.to_f64() - 0.5f64.powi(100)).abs() < 1e-46);
    }
}
