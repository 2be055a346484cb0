//! Log-likelihood ratios, hard bits and the soft-XOR (box-plus) operator.
//!
//! Sign convention: `L(b) = ln(P(b = 0) / P(b = 1))`, so a non-negative LLR
//! decides bit 0.

use std::fmt;
use std::ops::{BitXor, Neg};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Magnitude at which every LLR is saturated.
pub const LLR_MAX: f64 = 300.0;

/// Complex baseband sample, unit-energy symbol convention.
pub type ComplexSample = Complex64;

/// A single binary digit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Bit {
    #[default]
    Zero = 0,
    One = 1,
}

impl Bit {
    pub fn from_u8(v: u8) -> Self {
        if v & 1 == 0 {
            Bit::Zero
        } else {
            Bit::One
        }
    }

    pub fn as_u8(self) -> u8 {
        self as u8
    }

    /// Antipodal image of the bit: `+1` for 0, `-1` for 1.
    pub fn bipolar(self) -> f64 {
        match self {
            Bit::Zero => 1.0,
            Bit::One => -1.0,
        }
    }
}

impl From<bool> for Bit {
    fn from(b: bool) -> Self {
        if b {
            Bit::One
        } else {
            Bit::Zero
        }
    }
}

impl BitXor for Bit {
    type Output = Bit;

    fn bitxor(self, rhs: Bit) -> Bit {
        Bit::from_u8(self.as_u8() ^ rhs.as_u8())
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

/// Log-likelihood ratio of a bit, always finite and within `±LLR_MAX`.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(into = "f64", from = "f64")]
pub struct Llr(f64);

impl Llr {
    pub const ZERO: Llr = Llr(0.0);
    /// Certain bit 0.
    pub const MAX: Llr = Llr(LLR_MAX);
    /// Certain bit 1.
    pub const MIN: Llr = Llr(-LLR_MAX);

    /// Builds an LLR, saturating to `±LLR_MAX` (infinities included).
    ///
    /// NaN is a logic error upstream and panics.
    #[inline]
    pub fn new(value: f64) -> Self {
        assert!(!value.is_nan(), "NaN LLR");
        Llr(value.clamp(-LLR_MAX, LLR_MAX))
    }

    /// Saturated LLR that asserts `bit` with certainty.
    pub fn certain(bit: Bit) -> Self {
        Llr(LLR_MAX * bit.bipolar())
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn abs(self) -> f64 {
        self.0.abs()
    }
}

impl From<f64> for Llr {
    fn from(v: f64) -> Self {
        Llr::new(v)
    }
}

impl From<Llr> for f64 {
    fn from(l: Llr) -> f64 {
        l.0
    }
}

impl Neg for Llr {
    type Output = Llr;

    fn neg(self) -> Llr {
        Llr(-self.0)
    }
}

impl fmt::Display for Llr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Sign function with `sign(0) = +1`.
#[inline]
pub fn sign(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Hard decision: bit 0 for non-negative LLRs.
#[inline]
pub fn hard_decide(l: Llr) -> Bit {
    if l.0 < 0.0 {
        Bit::One
    } else {
        Bit::Zero
    }
}

/// Min-sum soft-XOR: `sign(v1)·sign(v2)·min(|v1|, |v2|)`.
#[inline]
pub fn soft_xor_approx(v1: Llr, v2: Llr) -> Llr {
    Llr(sign(v1.0) * sign(v2.0) * v1.0.abs().min(v2.0.abs()))
}

/// Exact soft-XOR: LLR of `b1 XOR b2` for independent bits.
///
/// Evaluated as `sign·(min + ln(1 + e^{−(|v1|+|v2|)}) − ln(1 + e^{−||v1|−|v2||}))`,
/// which equals `2·atanh(tanh(v1/2)·tanh(v2/2))` without the cancellation
/// that form suffers for large arguments.
#[inline]
pub fn soft_xor_exact(v1: Llr, v2: Llr) -> Llr {
    let (a, b) = (v1.0, v2.0);
    if a == 0.0 || b == 0.0 {
        return Llr::ZERO;
    }
    let s = sign(a) * sign(b);
    let m = a.abs().min(b.abs());
    let (x, y) = (a.abs(), b.abs());
    let corr = (-(x + y)).exp().ln_1p() - (-(x - y).abs()).exp().ln_1p();
    Llr::new(s * (m + corr).max(0.0))
}

/// Which form of the soft-XOR to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoxPlus {
    /// Min-sum approximation.
    #[default]
    Approx,
    /// Exact tanh rule.
    Exact,
}

impl BoxPlus {
    #[inline]
    pub fn apply(self, v1: Llr, v2: Llr) -> Llr {
        match self {
            BoxPlus::Approx => soft_xor_approx(v1, v2),
            BoxPlus::Exact => soft_xor_exact(v1, v2),
        }
    }

    /// Left fold over a non-empty sequence; `None` when empty.
    pub fn fold<I: IntoIterator<Item = Llr>>(self, values: I) -> Option<Llr> {
        let mut it = values.into_iter();
        let first = it.next()?;
        Some(it.fold(first, |acc, v| self.apply(acc, v)))
    }

    pub fn name(self) -> &'static str {
        match self {
            BoxPlus::Approx => "approx",
            BoxPlus::Exact => "exact",
        }
    }
}

impl std::str::FromStr for BoxPlus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "approx" | "min-sum" => Ok(BoxPlus::Approx),
            "exact" => Ok(BoxPlus::Exact),
            other => Err(format!("unknown box-plus form '{other}' (expected approx|exact)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Literal tanh-rule oracle.
    fn tanh_rule(a: f64, b: f64) -> f64 {
        2.0 * ((a / 2.0).tanh() * (b / 2.0).tanh()).atanh()
    }

    #[test]
    fn sign_examples() {
        assert_eq!(sign(-3.2), -1.0);
        assert_eq!(sign(0.0), 1.0);
        assert_eq!(sign(7.0), 1.0);
    }

    #[test]
    fn approx_examples() {
        assert_eq!(soft_xor_approx(Llr::new(-2.0), Llr::new(5.0)).value(), -2.0);
        assert_eq!(soft_xor_approx(Llr::new(0.0), Llr::new(-7.5)).value(), 0.0);
        let folded = BoxPlus::Approx
            .fold([-114.6471, -166.5584, -43.2565].map(Llr::new))
            .unwrap();
        assert_eq!(folded.value(), -43.2565);
    }

    #[test]
    fn exact_examples() {
        assert_eq!(soft_xor_exact(Llr::new(0.0), Llr::new(9.9)).value(), 0.0);
        // 2·atanh(tanh(1)^2) evaluated with mpmath at 30 digits.
        let v = soft_xor_exact(Llr::new(2.0), Llr::new(2.0)).value();
        assert_abs_diff_eq!(v, 1.325_002_747_357_864_4, epsilon = 1e-12);
        assert_abs_diff_eq!(v, tanh_rule(2.0, 2.0), epsilon = 1e-12);
        let v = soft_xor_exact(Llr::new(-50.0), Llr::new(3.0)).value();
        assert_abs_diff_eq!(v, -3.0, epsilon = 1e-9);
    }

    #[test]
    fn hard_decisions() {
        assert_eq!(hard_decide(Llr::new(3.0)), Bit::Zero);
        assert_eq!(hard_decide(Llr::new(-1.0)), Bit::One);
        assert_eq!(hard_decide(Llr::new(0.0)), Bit::Zero);
    }

    #[test]
    fn construction_saturates() {
        assert_eq!(Llr::new(1e9).value(), LLR_MAX);
        assert_eq!(Llr::new(f64::NEG_INFINITY).value(), -LLR_MAX);
        assert_eq!(Llr::certain(Bit::One).value(), -LLR_MAX);
    }

    #[test]
    #[should_panic]
    fn nan_rejected() {
        let _ = Llr::new(f64::NAN);
    }

    #[test]
    fn neutrality() {
        for v in [-300.0, -4.0, 0.0, 1e-3, 250.0] {
            assert_eq!(soft_xor_approx(Llr::new(v), Llr::ZERO).value().abs(), 0.0);
            assert_eq!(soft_xor_exact(Llr::new(v), Llr::ZERO).value(), 0.0);
        }
    }

    fn llr_strategy() -> impl Strategy<Value = f64> {
        prop_oneof![-LLR_MAX..LLR_MAX, -20.0..20.0f64]
    }

    proptest! {
        #[test]
        fn approx_sign_law(a in llr_strategy(), b in llr_strategy()) {
            let r = soft_xor_approx(Llr::new(a), Llr::new(b)).value();
            prop_assert_eq!(sign(r), sign(a) * sign(b));
        }

        #[test]
        fn exact_matches_tanh_rule(a in -15.0..15.0f64, b in -15.0..15.0f64) {
            let r = soft_xor_exact(Llr::new(a), Llr::new(b)).value();
            prop_assert!((r - tanh_rule(a, b)).abs() < 1e-9);
        }

        #[test]
        fn dominance_and_gap(a in llr_strategy(), b in llr_strategy()) {
            let ap = soft_xor_approx(Llr::new(a), Llr::new(b)).value();
            let ex = soft_xor_exact(Llr::new(a), Llr::new(b)).value();
            prop_assert!(ex.abs() <= ap.abs());
            prop_assert!((ap - ex).abs() <= std::f64::consts::LN_2 + 1e-12);
            if a != 0.0 && b != 0.0 && ex != 0.0 {
                prop_assert_eq!(sign(ex), sign(a) * sign(b));
            }
        }

        #[test]
        fn hard_homomorphism(a in llr_strategy(), b in llr_strategy()) {
            prop_assume!(a != 0.0 && b != 0.0);
            let (la, lb) = (Llr::new(a), Llr::new(b));
            prop_assert_eq!(
                hard_decide(soft_xor_approx(la, lb)),
                hard_decide(la) ^ hard_decide(lb)
            );
        }

        #[test]
        fn approx_fold_order_free(mut v in prop::collection::vec(llr_strategy(), 1..8), rot in 0usize..8) {
            let fwd = BoxPlus::Approx.fold(v.iter().copied().map(Llr::new)).unwrap();
            let k = rot % v.len();
            v.rotate_left(k);
            v.reverse();
            let other = BoxPlus::Approx.fold(v.iter().copied().map(Llr::new)).unwrap();
            prop_assert_eq!(fwd.value(), other.value());
        }
    }
}
