//! Binary KL divergence, its one-sided variant, and monotone inversions.
//!
//! All logarithms are natural, so divergences are in nats and the
//! budget algebra `exp(-n * c)` is consistent. Boundary conventions:
//! `0 * log 0 = 0`, `kl(q, 0) = +inf` for `q > 0`, `kl(q, 1) = +inf` for
//! `q < 1`, and `kl(q, q) = 0` for every `q` including the endpoints.
//!
//! Every inversion here is a plain bisection on a monotone branch. The
//! bisection runs on the IEEE-754 ordering of non-negative doubles rather
//! than on arithmetic midpoints, so it always ends with the two bracket
//! endpoints being adjacent representable numbers (at most 64 halvings,
//! under the [`MAX_BISECTION_ITERATIONS`] cap).

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance on the position of an inversion result.
pub const POSITION_TOLERANCE: f64 = 1e-12;

/// Tolerance on `|kl(.) - c|` at an unsaturated inversion result.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;

/// Hard cap on bisection halvings.
pub const MAX_BISECTION_ITERATIONS: u32 = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KlError {
    #[error("value {0} is not in the unit interval [0, 1]")]
    OutOfUnitInterval(f64),
    #[error("divergence budget must be a finite non-negative number, got {0}")]
    InvalidBudget(f64),
    #[error("root budget must be a finite positive number, got {0}")]
    NonPositiveRootBudget(f64),
    #[error("no root exists above p = 1")]
    NoRootAbove,
    #[error("no root exists below p = 0")]
    NoRootBelow,
    #[error("kl(x, {0}) is infinite for every x other than {0}, so no root exists")]
    NoFiniteRoot(f64),
    #[error("delta must lie in the open interval (0, 1), got {0}")]
    InvalidDelta(f64),
    #[error("sample count must be at least 1")]
    EmptySample,
}

/// A real number in `[0, 1]`. NaN and out-of-range values are rejected.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct UnitValue(f64);

impl UnitValue {
    pub const ZERO: UnitValue = UnitValue(0.0);
    pub const ONE: UnitValue = UnitValue(1.0);

    pub fn new(value: f64) -> Result<Self, KlError> {
        if (0.0..=1.0).contains(&value) {
            Ok(UnitValue(value))
        } else {
            Err(KlError::OutOfUnitInterval(value))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// `1 - value`.
    #[inline]
    pub fn complement(self) -> Self {
        UnitValue(1.0 - self.0)
    }
}

impl TryFrom<f64> for UnitValue {
    type Error = KlError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        UnitValue::new(value)
    }
}

impl From<UnitValue> for f64 {
    fn from(v: UnitValue) -> f64 {
        v.0
    }
}

impl fmt::Display for UnitValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A divergence in nats. Always `>= 0`; `+inf` is a legitimate value.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Divergence(f64);

impl Divergence {
    pub const ZERO: Divergence = Divergence(0.0);
    pub const INFINITE: Divergence = Divergence(f64::INFINITY);

    #[inline]
    pub fn nats(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    // Rounding in the two-term sum can dip a hair below zero when q ~ p.
    #[inline]
    fn from_sum(value: f64) -> Self {
        Divergence(value.max(0.0))
    }
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Whether a confidence budget is spent on one tail or split over two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sidedness {
    One,
    Two,
}

/// The divergence budget `c = log(k / delta) / n` with `k = 1` (one-sided)
/// or `k = 2` (two-sided), together with the inputs it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceBudget {
    pub c: f64,
    pub n: u64,
    pub delta: f64,
    pub sided: Sidedness,
}

impl ConfidenceBudget {
    pub fn new(n: u64, delta: f64, sided: Sidedness) -> Result<Self, KlError> {
        if n == 0 {
            return Err(KlError::EmptySample);
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(KlError::InvalidDelta(delta));
        }
        // -ln(delta) is accurate for delta near 1 where ln(1/delta) would round.
        let log_inverse = match sided {
            Sidedness::One => -delta.ln(),
            Sidedness::Two => std::f64::consts::LN_2 - delta.ln(),
        };
        Ok(ConfidenceBudget {
            c: log_inverse / n as f64,
            n,
            delta,
            sided,
        })
    }

    pub fn one_sided(n: u64, delta: f64) -> Result<Self, KlError> {
        Self::new(n, delta, Sidedness::One)
    }

    pub fn two_sided(n: u64, delta: f64) -> Result<Self, KlError> {
        Self::new(n, delta, Sidedness::Two)
    }
}

/// Result of a root search that may have been clamped to the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub value: UnitValue,
    /// The budget exceeded the divergence reachable at the boundary, so
    /// `value` is the boundary itself rather than a solution.
    pub saturated: bool,
}

/// `a * ln(a / b)` for `a, b > 0`.
#[inline]
fn weighted_log_ratio(a: f64, b: f64) -> f64 {
    let d = a - b;
    // log1p keeps full relative accuracy when a/b is close to 1.
    if d.abs() <= 0.5 * b {
        return a * (d / b).ln_1p();
    }
    let ratio = a / b;
    if ratio.is_finite() && ratio > 0.0 {
        a * ratio.ln()
    } else {
        a * (a.ln() - b.ln())
    }
}

/// Binary KL divergence `kl(q, p) = q ln(q/p) + (1-q) ln((1-q)/(1-p))`.
///
/// The two terms are evaluated by the same routine on `(q, p)` and on
/// `(1-q, 1-p)` and then added, so whenever the complements are exact
/// (e.g. on dyadic grids) `kl(q, p)` and `kl(1-q, 1-p)` agree bitwise.
pub fn kl(q: UnitValue, p: UnitValue) -> Divergence {
    let (q, p) = (q.0, p.0);
    if q == p {
        return Divergence::ZERO;
    }
    if (p == 0.0 && q > 0.0) || (p == 1.0 && q < 1.0) {
        return Divergence::INFINITE;
    }
    let head = if q > 0.0 { weighted_log_ratio(q, p) } else { 0.0 };
    let tail = if q < 1.0 {
        weighted_log_ratio(1.0 - q, 1.0 - p)
    } else {
        0.0
    };
    Divergence::from_sum(head + tail)
}

/// One-sided divergence: `kl(q, p)` when `q <= p`, otherwise exactly zero.
pub fn kl_m(q: UnitValue, p: UnitValue) -> Divergence {
    if q.0 > p.0 {
        Divergence::ZERO
    } else {
        kl(q, p)
    }
}

fn check_budget(c: f64) -> Result<(), KlError> {
    if c.is_finite() && c >= 0.0 {
        Ok(())
    } else {
        Err(KlError::InvalidBudget(c))
    }
}

fn check_root_budget(c: f64) -> Result<(), KlError> {
    if c.is_finite() && c > 0.0 {
        Ok(())
    } else {
        Err(KlError::NonPositiveRootBudget(c))
    }
}

/// Bisection over `[lo, hi]` (both in `[0, 1]`) for a predicate that holds
/// on a prefix of the interval: `holds(lo)` is assumed true and
/// `holds(hi)` false. Returns the final bracket `(last_true, first_false)`.
pub(crate) fn bisect_prefix(lo: f64, hi: f64, holds: impl Fn(f64) -> bool) -> (f64, f64) {
    let mut lo_bits = lo.to_bits();
    let mut hi_bits = hi.to_bits();
    let mut iterations = 0;
    while hi_bits - lo_bits > 1 && iterations < MAX_BISECTION_ITERATIONS {
        let mid_bits = lo_bits + (hi_bits - lo_bits) / 2;
        if holds(f64::from_bits(mid_bits)) {
            lo_bits = mid_bits;
        } else {
            hi_bits = mid_bits;
        }
        iterations += 1;
    }
    (f64::from_bits(lo_bits), f64::from_bits(hi_bits))
}

/// Upper inverse `sup { p in [0,1] : kl(q, p) <= c }`.
///
/// The search runs on `[q, 1]`, where `p -> kl(q, p)` is strictly
/// increasing. The upper endpoint of the final bracket is returned, so the
/// result never lies below the exact supremum.
pub fn kl_inverse_upper(q: UnitValue, c: f64) -> Result<UnitValue, KlError> {
    check_budget(c)?;
    if c == 0.0 || q.0 == 1.0 {
        return Ok(q);
    }
    // kl(q, 1) is infinite for q < 1, so the supremum is strictly below 1.
    let (_, first_outside) = bisect_prefix(q.0, 1.0, |p| kl(q, UnitValue(p)).0 <= c);
    Ok(UnitValue(first_outside))
}

/// Lower inverse `inf { p in [0,1] : kl(q, p) <= c }`.
///
/// Mirror of [`kl_inverse_upper`] on `[0, q]`; returns the lower endpoint
/// of the final bracket, so the result never lies above the exact infimum.
pub fn kl_inverse_lower(q: UnitValue, c: f64) -> Result<UnitValue, KlError> {
    check_budget(c)?;
    if c == 0.0 || q.0 == 0.0 {
        return Ok(q);
    }
    // Predicate "kl(q, p) > c" holds on a prefix [0, inf) of [0, q].
    let (last_outside, _) = bisect_prefix(0.0, q.0, |p| kl(q, UnitValue(p)).0 > c);
    Ok(UnitValue(last_outside))
}

fn closer_endpoint(lo: f64, hi: f64, residual: impl Fn(f64) -> f64) -> f64 {
    if residual(lo).abs() <= residual(hi).abs() {
        lo
    } else {
        hi
    }
}

/// The unique `x` in `(p, 1]` with `kl(x, p) = c`.
///
/// When `c > kl(1, p) = -ln p` no such `x` exists; the result is then `1`
/// with `saturated` set. At `p = 0` every `x > 0` has infinite divergence,
/// so there is nothing to solve and an error is returned.
pub fn kl_upper_root(p: UnitValue, c: f64) -> Result<Root, KlError> {
    check_root_budget(c)?;
    if p.0 == 1.0 {
        return Err(KlError::NoRootAbove);
    }
    if p.0 == 0.0 {
        return Err(KlError::NoFiniteRoot(0.0));
    }
    let at_boundary = kl(UnitValue::ONE, p).0;
    if c >= at_boundary {
        return Ok(Root {
            value: UnitValue::ONE,
            saturated: c > at_boundary,
        });
    }
    let (lo, hi) = bisect_prefix(p.0, 1.0, |x| kl(UnitValue(x), p).0 <= c);
    let x = closer_endpoint(lo, hi, |x| kl(UnitValue(x), p).0 - c);
    Ok(Root {
        value: UnitValue(x),
        saturated: false,
    })
}

/// The unique `x` in `[0, p)` with `kl(x, p) = c`.
///
/// When `c > kl(0, p) = -ln(1 - p)` the result is `0` with `saturated` set.
/// At `p = 1` there is no finite-divergence `x` and an error is returned.
pub fn kl_lower_root(p: UnitValue, c: f64) -> Result<Root, KlError> {
    check_root_budget(c)?;
    if p.0 == 0.0 {
        return Err(KlError::NoRootBelow);
    }
    if p.0 == 1.0 {
        return Err(KlError::NoFiniteRoot(1.0));
    }
    let at_boundary = kl(UnitValue::ZERO, p).0;
    if c >= at_boundary {
        return Ok(Root {
            value: UnitValue::ZERO,
            saturated: c > at_boundary,
        });
    }
    let (lo, hi) = bisect_prefix(0.0, p.0, |x| kl(UnitValue(x), p).0 > c);
    let x = closer_endpoint(lo, hi, |x| kl(UnitValue(x), p).0 - c);
    Ok(Root {
        value: UnitValue(x),
        saturated: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn u(x: f64) -> UnitValue {
        UnitValue::new(x).unwrap()
    }

    #[test]
    fn unit_value_rejects_nan_and_out_of_range() {
        assert!(UnitValue::new(f64::NAN).is_err());
        assert!(UnitValue::new(-1e-300).is_err());
        assert!(UnitValue::new(1.0 + f64::EPSILON).is_err());
        assert!(UnitValue::new(f64::INFINITY).is_err());
        assert_eq!(UnitValue::new(0.0).unwrap().get(), 0.0);
        assert_eq!(UnitValue::new(1.0).unwrap().get(), 1.0);
    }

    #[test]
    fn unit_value_serde_validates() {
        assert!(serde_json::from_str::<UnitValue>("1.5").is_err());
        assert_eq!(serde_json::from_str::<UnitValue>("0.25").unwrap(), u(0.25));
    }

    #[test]
    fn kl_examples() {
        assert_eq!(kl(u(0.3), u(0.3)).nats(), 0.0);
        assert_abs_diff_eq!(kl(u(0.0), u(0.5)).nats(), std::f64::consts::LN_2, epsilon = 1e-15);
        // 60-digit reference value.
        assert_abs_diff_eq!(kl(u(0.5), u(0.75)).nats(), 0.143_841_036_225_890_46, epsilon = 1e-15);
        assert!(kl(u(0.2), u(0.0)).is_infinite());
    }

    #[test]
    fn kl_boundary_conventions() {
        assert_eq!(kl(u(0.0), u(0.0)).nats(), 0.0);
        assert_eq!(kl(u(1.0), u(1.0)).nats(), 0.0);
        assert!(kl(u(0.5), u(1.0)).is_infinite());
        assert!(kl(u(0.0), u(1.0)).is_infinite());
        assert!(kl(u(1.0), u(0.0)).is_infinite());
        assert_abs_diff_eq!(kl(u(1.0), u(0.25)).nats(), -(0.25f64).ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(kl(u(0.0), u(0.25)).nats(), -(0.75f64).ln(), epsilon = 1e-15);
    }

    #[test]
    fn kl_survives_subnormal_arguments() {
        let tiny = f64::from_bits(1);
        let d = kl(u(1.0), u(tiny)).nats();
        assert!(d.is_finite());
        assert_abs_diff_eq!(d, -tiny.ln(), epsilon = 1e-12);
    }

    #[test]
    fn kl_m_examples() {
        assert_eq!(kl_m(u(0.7), u(0.3)).nats(), 0.0);
        assert_eq!(kl_m(u(0.3), u(0.3)).nats(), 0.0);
        assert_abs_diff_eq!(kl_m(u(0.1), u(0.2)).nats(), 0.036_690_014_034_750_58, epsilon = 1e-15);
        assert_eq!(kl_m(u(0.1), u(0.2)), kl(u(0.1), u(0.2)));
    }

    #[test]
    fn inverse_upper_examples() {
        assert_eq!(kl_inverse_upper(u(0.4), 0.0).unwrap().get(), 0.4);
        assert_abs_diff_eq!(
            kl_inverse_upper(u(0.0), 0.5).unwrap().get(),
            1.0 - (-0.5f64).exp(),
            epsilon = 1e-12
        );
        assert_eq!(kl_inverse_upper(u(1.0), 0.5).unwrap().get(), 1.0);
    }

    #[test]
    fn inverse_lower_examples() {
        assert_eq!(kl_inverse_lower(u(0.4), 0.0).unwrap().get(), 0.4);
        assert_abs_diff_eq!(
            kl_inverse_lower(u(1.0), 0.5).unwrap().get(),
            (-0.5f64).exp(),
            epsilon = 1e-12
        );
        assert_eq!(kl_inverse_lower(u(0.0), 0.5).unwrap().get(), 0.0);
    }

    #[test]
    fn inversions_reject_bad_budgets() {
        for c in [-1e-9, f64::NAN, f64::INFINITY] {
            assert!(matches!(kl_inverse_upper(u(0.3), c), Err(KlError::InvalidBudget(_))));
            assert!(matches!(kl_inverse_lower(u(0.3), c), Err(KlError::InvalidBudget(_))));
        }
        for c in [0.0, -1.0, f64::NAN] {
            assert!(kl_upper_root(u(0.3), c).is_err());
            assert!(kl_lower_root(u(0.3), c).is_err());
        }
    }

    #[test]
    fn inverse_upper_returns_upper_bracket_endpoint() {
        let q = u(0.1);
        let c = 0.05;
        let x = kl_inverse_upper(q, c).unwrap().get();
        assert!(kl(q, u(x)).nats() > c);
        let below = f64::from_bits(x.to_bits() - 1);
        assert!(kl(q, u(below)).nats() <= c);
    }

    #[test]
    fn root_examples() {
        let ln2 = std::f64::consts::LN_2;
        let r = kl_upper_root(u(0.5), ln2).unwrap();
        assert_eq!(r.value.get(), 1.0);
        assert!(!r.saturated);
        let r = kl_upper_root(u(0.5), 1.0).unwrap();
        assert_eq!(r.value.get(), 1.0);
        assert!(r.saturated);

        let r = kl_lower_root(u(0.5), ln2).unwrap();
        assert_eq!(r.value.get(), 0.0);
        assert!(!r.saturated);
        let r = kl_lower_root(u(0.5), 1.0).unwrap();
        assert_eq!(r.value.get(), 0.0);
        assert!(r.saturated);
    }

    #[test]
    fn roots_reject_degenerate_centres() {
        assert_eq!(kl_upper_root(u(1.0), 0.1), Err(KlError::NoRootAbove));
        assert_eq!(kl_lower_root(u(0.0), 0.1), Err(KlError::NoRootBelow));
        assert_eq!(kl_upper_root(u(0.0), 0.1), Err(KlError::NoFiniteRoot(0.0)));
        assert_eq!(kl_lower_root(u(1.0), 0.1), Err(KlError::NoFiniteRoot(1.0)));
    }

    #[test]
    fn budget_formulae() {
        let b = ConfidenceBudget::one_sided(100, 0.05).unwrap();
        assert_abs_diff_eq!(b.c, 0.029_957_322_735_539_91, epsilon = 1e-16);
        let b = ConfidenceBudget::two_sided(10, 0.05).unwrap();
        assert_abs_diff_eq!(b.c, (40.0f64).ln() / 10.0, epsilon = 1e-16);
        assert!(ConfidenceBudget::one_sided(0, 0.05).is_err());
        for d in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(ConfidenceBudget::one_sided(10, d).is_err());
        }
    }
}
