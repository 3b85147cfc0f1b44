use serde::{Deserialize, Serialize};

use super::ingest::LossSet;
use crate::bounds::{hoeffding_baseline, one_sided_upper_bound, two_sided_interval, BoundMethod, SampleSummary};
use crate::kl::{KlError, UnitValue};

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

pub const DEFAULT_DELTA: f64 = 0.05;

/// Machine-readable record of a generalisation-risk bound.
///
/// `empirical_risk` is the mean held-out loss and `bound_upper` bounds the
/// expected loss with probability at least `1 - delta`, provided the
/// hypothesis was chosen without looking at these examples. Nothing in the
/// losses can verify that; `provenance_note` carries the caller's word.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundCertificate {
    pub n: u64,
    pub empirical_risk: UnitValue,
    pub delta: f64,
    pub method: BoundMethod,
    pub budget_nats: f64,
    pub bound_upper: UnitValue,
    pub bound_lower: Option<UnitValue>,
    pub baseline_hoeffding: UnitValue,
    pub input_digest: String,
    pub tool_version: String,
    pub provenance_note: Option<String>,
}

impl BoundCertificate {
    /// Pretty JSON with a trailing newline. Field order is fixed by the
    /// struct and floats use shortest round-trip formatting, so the output
    /// is byte-stable for fixed inputs.
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("certificate is always serializable");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

/// Bounds the expected loss from held-out losses.
///
/// The Hoeffding baseline is computed at the same confidence split as the
/// KL bound (`delta` one-sided, `delta / 2` per side two-sided) so the two
/// are comparable.
pub fn certify(
    losses: &LossSet,
    delta: f64,
    two_sided: bool,
    provenance_note: Option<String>,
) -> Result<BoundCertificate, KlError> {
    let summary = SampleSummary::from_sum(losses.len() as u64, losses.sum())?;
    let (bound, baseline) = if two_sided {
        (
            two_sided_interval(&summary, delta)?,
            hoeffding_baseline(&summary, delta / 2.0)?,
        )
    } else {
        (
            one_sided_upper_bound(&summary, delta)?,
            hoeffding_baseline(&summary, delta)?,
        )
    };
    Ok(BoundCertificate {
        n: summary.n(),
        empirical_risk: summary.mean(),
        delta,
        method: bound.method,
        budget_nats: bound.budget.c,
        bound_upper: bound.bound_upper,
        bound_lower: bound.bound_lower,
        baseline_hoeffding: baseline.bound_upper,
        input_digest: losses.digest.clone(),
        tool_version: TOOL_VERSION.to_string(),
        provenance_note,
    })
}
