//! Seeded Monte Carlo checks of the coverage and tail guarantees, plus a
//! deterministic scan of the one-sided divergence equivalence.
//!
//! Trials run on the ambient rayon pool. Each trial draws from its own
//! ChaCha8 stream keyed by `(seed, trial index)` and contributes a 0/1
//! outcome, so a report is identical for any thread count.

mod distribution;
mod equivalence;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    one_sided_upper_bound, tail_bound_for, two_sided_interval, SampleSummary, TailDirection,
    TailError, TailQuery,
};
use crate::kl::{ConfidenceBudget, KlError};

pub use distribution::{
    sample, trial_stream, DistributionError, DistributionKind, DistributionSpec, Sampler, TrialRng,
};
pub use equivalence::{run_equivalence_scan, EquivalenceReport, DEFAULT_GRID_STEP};
pub(crate) use equivalence::run_equivalence_scan_with;

/// Number of binomial standard errors allowed between an empirical rate
/// and its target.
pub const SLACK_SIGMAS: f64 = 3.0;

/// `SLACK_SIGMAS * sqrt(rate (1 - rate) / trials)`.
pub fn binomial_slack(rate: f64, trials: u64) -> f64 {
    let r = rate.clamp(0.0, 1.0);
    SLACK_SIGMAS * (r * (1.0 - r) / trials as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VerificationError {
    #[error(transparent)]
    Kl(#[from] KlError),
    #[error(transparent)]
    Tail(#[from] TailError),
    #[error("invalid experiment: {0}")]
    InvalidConfig(String),
    #[error("experiment mode `{0}` is not handled by this runner")]
    WrongMode(ExperimentMode),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentMode {
    CoverageOneSided,
    CoverageTwoSided,
    TailLow { t: f64 },
    TailHigh { t: f64 },
    EquivalenceScan,
}

impl ExperimentMode {
    pub fn is_coverage(&self) -> bool {
        matches!(self, ExperimentMode::CoverageOneSided | ExperimentMode::CoverageTwoSided)
    }

    pub fn is_tail(&self) -> bool {
        matches!(self, ExperimentMode::TailLow { .. } | ExperimentMode::TailHigh { .. })
    }
}

impl fmt::Display for ExperimentMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExperimentMode::CoverageOneSided => f.write_str("coverage-one-sided"),
            ExperimentMode::CoverageTwoSided => f.write_str("coverage-two-sided"),
            ExperimentMode::TailLow { t } => write!(f, "tail-low:t={t}"),
            ExperimentMode::TailHigh { t } => write!(f, "tail-high:t={t}"),
            ExperimentMode::EquivalenceScan => f.write_str("equivalence-scan"),
        }
    }
}

impl FromStr for ExperimentMode {
    type Err = String;

    /// Accepts `coverage-one-sided`, `coverage-two-sided`, `tail-low:t=T`,
    /// `tail-high:t=T` and `equivalence-scan` (underscores also accepted).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let normalized = s.trim().replace('_', "-");
        let (name, arg) = match normalized.split_once(':') {
            Some((name, arg)) => (name.to_string(), Some(arg.to_string())),
            None => (normalized.clone(), None),
        };
        let offset = || -> Result<f64, String> {
            let arg = arg.as_deref().ok_or_else(|| format!("mode `{s}` needs `:t=VALUE`"))?;
            let value = arg
                .trim()
                .strip_prefix("t=")
                .ok_or_else(|| format!("mode `{s}` needs `:t=VALUE`"))?;
            value
                .trim()
                .parse::<f64>()
                .map_err(|_| format!("bad tail offset in `{s}`"))
        };
        let no_arg = |mode: ExperimentMode| {
            if arg.is_some() {
                Err(format!("mode `{s}` takes no arguments"))
            } else {
                Ok(mode)
            }
        };
        match name.as_str() {
            "coverage-one-sided" => no_arg(ExperimentMode::CoverageOneSided),
            "coverage-two-sided" => no_arg(ExperimentMode::CoverageTwoSided),
            "equivalence-scan" => no_arg(ExperimentMode::EquivalenceScan),
            "tail-low" => Ok(ExperimentMode::TailLow { t: offset()? }),
            "tail-high" => Ok(ExperimentMode::TailHigh { t: offset()? }),
            _ => Err(format!("unknown mode `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dist: DistributionSpec,
    pub n: u64,
    pub delta: f64,
    pub trials: u64,
    pub seed: u64,
    pub mode: ExperimentMode,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), VerificationError> {
        if self.trials == 0 {
            return Err(VerificationError::InvalidConfig("trials must be >= 1".into()));
        }
        ConfidenceBudget::one_sided(self.n, self.delta)?;
        if self.mode.is_tail() {
            self.tail_query()?;
        }
        Ok(())
    }

    fn tail_query(&self) -> Result<TailQuery, VerificationError> {
        let (t, direction) = match self.mode {
            ExperimentMode::TailLow { t } => (t, TailDirection::Below),
            ExperimentMode::TailHigh { t } => (t, TailDirection::Above),
            other => return Err(VerificationError::WrongMode(other)),
        };
        Ok(TailQuery::new(self.dist.true_mean(), t, self.n, direction)?)
    }
}

/// Outcome of a coverage or tail experiment.
///
/// For coverage modes `successes` counts trials whose bound contained the
/// true mean and `pass` means `empirical_rate >= target_rate - slack`. For
/// tail modes it counts trials that landed in the tail event and `pass`
/// means `empirical_rate <= target_rate + slack`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub config: ExperimentConfig,
    pub successes: u64,
    pub trials: u64,
    pub empirical_rate: f64,
    pub target_rate: f64,
    pub slack: f64,
    pub pass: bool,
}

impl CoverageReport {
    fn assemble(config: ExperimentConfig, successes: u64, target_rate: f64) -> Self {
        let trials = config.trials;
        let empirical_rate = successes as f64 / trials as f64;
        let slack = binomial_slack(target_rate, trials);
        let pass = if config.mode.is_coverage() {
            empirical_rate >= target_rate - slack
        } else {
            empirical_rate <= target_rate + slack
        };
        CoverageReport {
            config,
            successes,
            trials,
            empirical_rate,
            target_rate,
            slack,
            pass,
        }
    }
}

fn count_trials(cfg: &ExperimentConfig, hit: impl Fn(u64) -> bool + Sync) -> u64 {
    (0..cfg.trials).into_par_iter().filter(|&i| hit(i)).count() as u64
}

/// Coverage bound as a function of the sample sum.
///
/// For binary distributions the sum is an exact integer `k`, so the bound
/// for every `k in 0..=n` is computed once up front (on the same
/// `SampleSummary` a direct computation would build). A point mass always
/// produces the same sum, which is memoised by its bit pattern.
struct BoundLookup {
    two_sided: bool,
    n: u64,
    delta: f64,
    table: Option<Vec<(f64, f64)>>,
    constant: Option<(u64, (f64, f64))>,
}

impl BoundLookup {
    const MAX_TABLE_N: u64 = 1 << 16;

    fn new(cfg: &ExperimentConfig) -> Result<Self, VerificationError> {
        let two_sided = cfg.mode == ExperimentMode::CoverageTwoSided;
        let mut lookup = BoundLookup {
            two_sided,
            n: cfg.n,
            delta: cfg.delta,
            table: None,
            constant: None,
        };
        if cfg.dist.is_binary() && cfg.n <= Self::MAX_TABLE_N {
            let table = (0..=cfg.n)
                .map(|k| lookup.compute(k as f64))
                .collect::<Result<Vec<_>, _>>()?;
            lookup.table = Some(table);
        } else if let DistributionKind::PointMass { .. } = cfg.dist.kind() {
            let sum = cfg.dist.sampler().sum(cfg.n, &mut trial_stream(cfg.seed, 0));
            lookup.constant = Some((sum.to_bits(), lookup.compute(sum)?));
        }
        Ok(lookup)
    }

    fn compute(&self, sum: f64) -> Result<(f64, f64), VerificationError> {
        let s = SampleSummary::from_sum(self.n, sum)?;
        if self.two_sided {
            let b = two_sided_interval(&s, self.delta)?;
            Ok((b.bound_lower.map_or(0.0, |l| l.get()), b.bound_upper.get()))
        } else {
            let b = one_sided_upper_bound(&s, self.delta)?;
            Ok((0.0, b.bound_upper.get()))
        }
    }

    fn interval(&self, sum: f64) -> (f64, f64) {
        if let Some(table) = &self.table {
            return table[sum as usize];
        }
        match self.constant {
            Some((bits, interval)) if bits == sum.to_bits() => interval,
            _ => self.compute(sum).expect("domain validated before the run"),
        }
    }
}

/// Fraction of trials whose confidence bound contains the true mean.
///
/// One-sided success is the closed inequality `p <= bound_upper`; two-sided
/// success is `bound_lower <= p <= bound_upper`.
pub fn run_coverage(cfg: &ExperimentConfig) -> Result<CoverageReport, VerificationError> {
    if !cfg.mode.is_coverage() {
        return Err(VerificationError::WrongMode(cfg.mode));
    }
    cfg.validate()?;
    let p = cfg.dist.true_mean().get();
    let sampler = cfg.dist.sampler();
    let lookup = BoundLookup::new(cfg)?;
    let successes = count_trials(cfg, |trial| {
        let mut rng = trial_stream(cfg.seed, trial);
        let (lower, upper) = lookup.interval(sampler.sum(cfg.n, &mut rng));
        lower <= p && p <= upper
    });
    Ok(CoverageReport::assemble(*cfg, successes, 1.0 - cfg.delta))
}

/// Frequency of the tail event `{mean <= p - t}` or `{mean >= p + t}`,
/// compared against `exp(-n kl(p -/+ t, p))`.
pub fn run_tail_check(cfg: &ExperimentConfig) -> Result<CoverageReport, VerificationError> {
    if !cfg.mode.is_tail() {
        return Err(VerificationError::WrongMode(cfg.mode));
    }
    cfg.validate()?;
    let query = cfg.tail_query()?;
    let bound = tail_bound_for(&query);
    let sampler = cfg.dist.sampler();
    let n = cfg.n as f64;
    let hits = count_trials(cfg, |trial| {
        let mut rng = trial_stream(cfg.seed, trial);
        let mean = sampler.sum(cfg.n, &mut rng) / n;
        query.contains(mean)
    });
    Ok(CoverageReport::assemble(*cfg, hits, bound))
}

/// Report from [`run_experiment`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "report", rename_all = "snake_case")]
pub enum ExperimentReport {
    Coverage(CoverageReport),
    Tail(CoverageReport),
    Equivalence(EquivalenceReport),
}

impl ExperimentReport {
    pub fn pass(&self) -> bool {
        match self {
            ExperimentReport::Coverage(r) | ExperimentReport::Tail(r) => r.pass,
            ExperimentReport::Equivalence(r) => r.pass,
        }
    }
}

/// Runs whichever experiment `cfg.mode` names. The equivalence scan uses
/// [`DEFAULT_GRID_STEP`] with the single budget `ln(1/delta) / n`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, VerificationError> {
    match cfg.mode {
        ExperimentMode::CoverageOneSided | ExperimentMode::CoverageTwoSided => {
            run_coverage(cfg).map(ExperimentReport::Coverage)
        }
        ExperimentMode::TailLow { .. } | ExperimentMode::TailHigh { .. } => {
            run_tail_check(cfg).map(ExperimentReport::Tail)
        }
        ExperimentMode::EquivalenceScan => {
            cfg.validate()?;
            let c = ConfidenceBudget::one_sided(cfg.n, cfg.delta)?.c;
            run_equivalence_scan(DEFAULT_GRID_STEP, &[c]).map(ExperimentReport::Equivalence)
        }
    }
}
