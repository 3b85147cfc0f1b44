//! Confidence bounds on the mean of i.i.d. samples in `[0, 1]`.
//!
//! With probability at least `1 - delta`,
//!
//! ```text
//! p <= kl_inverse_upper(mean, ln(1/delta) / n)
//! ```
//!
//! and this holds whether the samples are binary or arbitrary values in the
//! unit interval; both cases go through [`one_sided_upper_bound`] with no
//! special-casing. The two-sided statement `kl(mean, p) <= ln(2/delta) / n`
//! gives [`two_sided_interval`].
//!
//! The two-sided statement does imply a one-sided bound, but only with the
//! budget `ln(2/delta) / n`; [`two_sided_interval`]'s upper endpoint is
//! exactly that weaker bound, which is why it always sits at or above
//! [`one_sided_upper_bound`] at the same `delta`.

use serde::{Deserialize, Serialize};

use crate::kl::{kl, kl_inverse_lower, kl_inverse_upper, ConfidenceBudget, KlError, UnitValue};

/// Sample size and empirical mean of observations in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    n: u64,
    mean: UnitValue,
}

impl SampleSummary {
    pub fn new(n: u64, mean: UnitValue) -> Result<Self, KlError> {
        if n == 0 {
            return Err(KlError::EmptySample);
        }
        Ok(SampleSummary { n, mean })
    }

    /// Summarises raw observations. The mean is `sum / n`, clamped into
    /// `[0, 1]` against rounding.
    pub fn from_samples(samples: &[UnitValue]) -> Result<Self, KlError> {
        let sum: f64 = samples.iter().map(|x| x.get()).sum();
        Self::from_sum(samples.len() as u64, sum)
    }

    pub(crate) fn from_sum(n: u64, sum: f64) -> Result<Self, KlError> {
        if n == 0 {
            return Err(KlError::EmptySample);
        }
        let mean = (sum / n as f64).clamp(0.0, 1.0);
        Ok(SampleSummary {
            n,
            mean: UnitValue::new(mean)?,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> UnitValue {
        self.mean
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    KlOneSided,
    KlTwoSided,
    HoeffdingBaseline,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub bound_upper: UnitValue,
    /// Present exactly for [`BoundMethod::KlTwoSided`].
    pub bound_lower: Option<UnitValue>,
    pub budget: ConfidenceBudget,
    pub method: BoundMethod,
}

/// Upper confidence bound `kl_inverse_upper(mean, ln(1/delta) / n)`.
pub fn one_sided_upper_bound(s: &SampleSummary, delta: f64) -> Result<BoundResult, KlError> {
    let budget = ConfidenceBudget::one_sided(s.n, delta)?;
    Ok(BoundResult {
        bound_upper: kl_inverse_upper(s.mean, budget.c)?,
        bound_lower: None,
        budget,
        method: BoundMethod::KlOneSided,
    })
}

/// The set `{ p : kl(mean, p) <= ln(2/delta) / n }`, returned as its two
/// endpoints. `kl(mean, .)` is convex, so the set is a closed interval.
pub fn two_sided_interval(s: &SampleSummary, delta: f64) -> Result<BoundResult, KlError> {
    let budget = ConfidenceBudget::two_sided(s.n, delta)?;
    Ok(BoundResult {
        bound_upper: kl_inverse_upper(s.mean, budget.c)?,
        bound_lower: Some(kl_inverse_lower(s.mean, budget.c)?),
        budget,
        method: BoundMethod::KlTwoSided,
    })
}

/// `min(1, mean + sqrt(ln(1/delta) / (2n)))`, the Pinsker relaxation of
/// [`one_sided_upper_bound`].
pub fn hoeffding_baseline(s: &SampleSummary, delta: f64) -> Result<BoundResult, KlError> {
    let budget = ConfidenceBudget::one_sided(s.n, delta)?;
    let radius = (budget.c / 2.0).sqrt();
    let upper = (s.mean.get() + radius).min(1.0);
    Ok(BoundResult {
        bound_upper: UnitValue::new(upper)?,
        bound_lower: None,
        budget,
        method: BoundMethod::HoeffdingBaseline,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailDirection {
    /// The event `mean <= p - t`.
    Below,
    /// The event `mean >= p + t`.
    Above,
}

/// A deviation event for the sample mean of `n` draws with true mean `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailQuery {
    p: UnitValue,
    t: f64,
    n: u64,
    direction: TailDirection,
}

impl TailQuery {
    pub fn new(p: UnitValue, t: f64, n: u64, direction: TailDirection) -> Result<Self, TailError> {
        if n == 0 {
            return Err(TailError::EmptySample);
        }
        let room = match direction {
            TailDirection::Below => p.get(),
            TailDirection::Above => 1.0 - p.get(),
        };
        if !(t >= 0.0 && t <= room) {
            return Err(TailError::OffsetOutOfRange { t, max: room });
        }
        Ok(TailQuery { p, t, n, direction })
    }

    pub fn p(&self) -> UnitValue {
        self.p
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn direction(&self) -> TailDirection {
        self.direction
    }

    /// The deviation threshold `p - t` or `p + t`, clamped to `[0, 1]`.
    pub fn threshold(&self) -> UnitValue {
        let x = match self.direction {
            TailDirection::Below => self.p.get() - self.t,
            TailDirection::Above => self.p.get() + self.t,
        };
        UnitValue::new(x.clamp(0.0, 1.0)).expect("clamped")
    }

    /// Whether an observed sample mean lies in the tail event.
    pub fn contains(&self, mean: f64) -> bool {
        match self.direction {
            TailDirection::Below => mean <= self.p.get() - self.t,
            TailDirection::Above => mean >= self.p.get() + self.t,
        }
    }

    /// The same event seen through `X -> 1 - X`.
    pub fn complement(&self) -> Self {
        TailQuery {
            p: self.p.complement(),
            t: self.t,
            n: self.n,
            direction: match self.direction {
                TailDirection::Below => TailDirection::Above,
                TailDirection::Above => TailDirection::Below,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TailError {
    #[error("tail offset t = {t} outside [0, {max}]")]
    OffsetOutOfRange { t: f64, max: f64 },
    #[error("sample count must be at least 1")]
    EmptySample,
    #[error("tail_bound_low needs a query with direction `below`")]
    ExpectedBelow,
    #[error("tail_bound_high needs a query with direction `above`")]
    ExpectedAbove,
}

fn tail_bound(q: &TailQuery) -> f64 {
    if q.t == 0.0 {
        return 1.0;
    }
    (-(q.n as f64) * kl(q.threshold(), q.p).nats()).exp()
}

/// `exp(-n kl(p - t, p))`, an upper bound on `Pr(mean <= p - t)`.
pub fn tail_bound_low(q: &TailQuery) -> Result<f64, TailError> {
    if q.direction != TailDirection::Below {
        return Err(TailError::ExpectedBelow);
    }
    Ok(tail_bound(q))
}

/// `exp(-n kl(p + t, p))`, an upper bound on `Pr(mean >= p + t)`.
pub fn tail_bound_high(q: &TailQuery) -> Result<f64, TailError> {
    if q.direction != TailDirection::Above {
        return Err(TailError::ExpectedAbove);
    }
    Ok(tail_bound(q))
}

/// Dispatches on the query's direction.
pub fn tail_bound_for(q: &TailQuery) -> f64 {
    tail_bound(q)
}
