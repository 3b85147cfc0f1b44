//! Fixed verification matrix with pinned seeds.
//!
//! Suites run cheapest first (equivalence, tail, one-sided coverage,
//! two-sided coverage) and the run stops at the first failing suite.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::bounds::TailDirection;
use crate::kl::kl_m;
use crate::verification::{
    binomial_slack, run_coverage, run_equivalence_scan_with, run_tail_check, CoverageReport,
    DistributionSpec, EquivalenceReport, ExperimentConfig, ExperimentMode,
    VerificationError, DEFAULT_GRID_STEP,
};

pub const SELFCHECK_SEED: u64 = 0x5EED_C0DE_2024;
pub const SELFCHECK_TRIALS: u64 = 100_000;
pub const COVERAGE_N: [u64; 3] = [10, 50, 200];
pub const COVERAGE_DELTA: [f64; 2] = [0.05, 0.1];
pub const EQUIVALENCE_BUDGETS: [f64; 4] = [0.001, 0.01, 0.1, 0.7];

/// Deliberate defects for checking that the harness notices them.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Negates the divergence seen by the equivalence suite.
    KlSignFlip,
}

impl FromStr for Fault {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "kl-sign-flip" => Ok(Fault::KlSignFlip),
            other => Err(format!("unknown fault `{other}`")),
        }
    }
}

pub fn coverage_distributions() -> Vec<DistributionSpec> {
    vec![
        DistributionSpec::bernoulli(0.1).unwrap(),
        DistributionSpec::bernoulli(0.5).unwrap(),
        DistributionSpec::beta(2.0, 5.0).unwrap(),
        DistributionSpec::uniform(),
        DistributionSpec::two_point(0.0, 1.0, 0.3).unwrap(),
        DistributionSpec::point_mass(0.3).unwrap(),
    ]
}

/// Every (distribution, n, delta) cell, each with its own pinned seed.
pub fn coverage_matrix(two_sided: bool) -> Vec<ExperimentConfig> {
    let mode = if two_sided {
        ExperimentMode::CoverageTwoSided
    } else {
        ExperimentMode::CoverageOneSided
    };
    let base = SELFCHECK_SEED + if two_sided { 1_000 } else { 0 };
    let mut cells = Vec::new();
    for dist in coverage_distributions() {
        for n in COVERAGE_N {
            for delta in COVERAGE_DELTA {
                cells.push(ExperimentConfig {
                    dist,
                    n,
                    delta,
                    trials: SELFCHECK_TRIALS,
                    seed: base + cells.len() as u64,
                    mode,
                });
            }
        }
    }
    cells
}

/// Tail cells; the first is Bernoulli(0.5), n = 10, t = 0.25 below.
pub fn tail_matrix() -> Vec<ExperimentConfig> {
    let cell = |dist: DistributionSpec, n: u64, t: f64, direction: TailDirection| (dist, n, t, direction);
    let bern = |p| DistributionSpec::bernoulli(p).unwrap();
    let beta = DistributionSpec::beta(2.0, 5.0).unwrap();
    let uniform = DistributionSpec::uniform();
    let two_point = DistributionSpec::two_point(0.0, 1.0, 0.3).unwrap();
    use TailDirection::{Above, Below};
    [
        cell(bern(0.5), 10, 0.25, Below),
        cell(bern(0.5), 10, 0.25, Above),
        cell(bern(0.1), 50, 0.06, Below),
        cell(bern(0.1), 50, 0.1, Above),
        cell(uniform, 20, 0.2, Above),
        cell(uniform, 20, 0.15, Below),
        cell(beta, 30, 0.1, Below),
        cell(beta, 30, 0.15, Above),
        cell(two_point, 40, 0.15, Below),
    ]
    .into_iter()
    .enumerate()
    .map(|(i, (dist, n, t, direction))| ExperimentConfig {
        dist,
        n,
        delta: 0.05,
        trials: SELFCHECK_TRIALS,
        seed: SELFCHECK_SEED + 2_000 + i as u64,
        mode: match direction {
            Below => ExperimentMode::TailLow { t },
            Above => ExperimentMode::TailHigh { t },
        },
    })
    .collect()
}

/// Exact probability that the mean of `n` Bernoulli(`p`) draws, computed
/// as `k / n`, satisfies `event`.
pub fn binomial_event_probability(n: u64, p: f64, event: impl Fn(f64) -> bool) -> f64 {
    (0..=n)
        .filter(|&k| event(k as f64 / n as f64))
        .map(|k| binomial_pmf(n, k, p))
        .sum()
}

fn binomial_pmf(n: u64, k: u64, p: f64) -> f64 {
    if p == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    let mut log_choose = 0.0;
    for i in 0..k {
        log_choose += ((n - i) as f64).ln() - ((i + 1) as f64).ln();
    }
    (log_choose + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p()).exp()
}

/// A tail cell's report, plus the exact-probability cross-check for
/// binary distributions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailCell {
    pub report: CoverageReport,
    pub exact_probability: Option<f64>,
    pub exact_within_slack: Option<bool>,
}

impl TailCell {
    pub fn pass(&self) -> bool {
        self.report.pass && self.exact_within_slack.unwrap_or(true)
    }
}

pub fn run_tail_cell(cfg: &ExperimentConfig) -> Result<TailCell, VerificationError> {
    let report = run_tail_check(cfg)?;
    let p = cfg.dist.true_mean().get();
    // For {0,1}-valued draws the mean is the probability of a one.
    let binary_p = cfg.dist.is_binary().then_some(p);
    let (exact, within) = match (binary_p, cfg.mode) {
        (Some(q), ExperimentMode::TailLow { t }) => {
            let exact = binomial_event_probability(cfg.n, q, |m| m <= p - t);
            (Some(exact), Some((report.empirical_rate - exact).abs() <= binomial_slack(exact, cfg.trials)))
        }
        (Some(q), ExperimentMode::TailHigh { t }) => {
            let exact = binomial_event_probability(cfg.n, q, |m| m >= p + t);
            (Some(exact), Some((report.empirical_rate - exact).abs() <= binomial_slack(exact, cfg.trials)))
        }
        _ => (None, None),
    };
    Ok(TailCell {
        report,
        exact_probability: exact,
        exact_within_slack: within,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub name: &'static str,
    pub status: SuiteStatus,
    pub cells: usize,
    pub passed: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfcheckReport {
    pub suites: Vec<SuiteSummary>,
    pub equivalence: Option<EquivalenceReport>,
    pub tail: Vec<TailCell>,
    pub coverage_one_sided: Vec<CoverageReport>,
    pub coverage_two_sided: Vec<CoverageReport>,
}

impl SelfcheckReport {
    pub fn pass(&self) -> bool {
        self.suites.iter().all(|s| s.status == SuiteStatus::Pass)
    }

    pub fn first_failure(&self) -> Option<&SuiteSummary> {
        self.suites.iter().find(|s| s.status == SuiteStatus::Fail)
    }

    /// Human-readable summary; identical for identical reports.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            let status = match s.status {
                SuiteStatus::Pass => "PASS",
                SuiteStatus::Fail => "FAIL",
                SuiteStatus::Skipped => "SKIP",
            };
            let _ = writeln!(
                out,
                "{:<20} {status}  {}/{} cells  {}",
                s.name, s.passed, s.cells, s.detail
            );
        }
        match self.first_failure() {
            None => out.push_str("selfcheck: PASS\n"),
            Some(s) => {
                let _ = writeln!(out, "selfcheck: FAIL (first failing suite: {})", s.name);
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report is always serializable");
        text.push('\n');
        text
    }
}

fn summary(name: &'static str, cells: usize, passed: usize, detail: String) -> SuiteSummary {
    SuiteSummary {
        name,
        status: if passed == cells { SuiteStatus::Pass } else { SuiteStatus::Fail },
        cells,
        passed,
        detail,
    }
}

fn coverage_suite(name: &'static str, reports: &[CoverageReport]) -> SuiteSummary {
    let passed = reports.iter().filter(|r| r.pass).count();
    let worst = reports
        .iter()
        .map(|r| r.empirical_rate - (r.target_rate - r.slack))
        .fold(f64::INFINITY, f64::min);
    summary(name, reports.len(), passed, format!("min margin {worst:.5}"))
}

/// Runs the matrix. `fault` is for exercising the harness itself.
pub fn run_selfcheck(fault: Option<Fault>) -> Result<SelfcheckReport, VerificationError> {
    let mut report = SelfcheckReport {
        suites: Vec::new(),
        equivalence: None,
        tail: Vec::new(),
        coverage_one_sided: Vec::new(),
        coverage_two_sided: Vec::new(),
    };
    const NAMES: [&str; 4] = ["equivalence", "tail", "coverage-one-sided", "coverage-two-sided"];

    for (i, name) in NAMES.iter().enumerate() {
        if report.first_failure().is_some() {
            report.suites.push(SuiteSummary {
                name,
                status: SuiteStatus::Skipped,
                cells: 0,
                passed: 0,
                detail: String::new(),
            });
            continue;
        }
        let suite = match i {
            0 => {
                let flip = if fault == Some(Fault::KlSignFlip) { -1.0 } else { 1.0 };
                let eq = run_equivalence_scan_with(DEFAULT_GRID_STEP, &EQUIVALENCE_BUDGETS, |q, p| {
                    flip * kl_m(q, p).nats()
                })?;
                let s = summary(
                    name,
                    1,
                    usize::from(eq.pass),
                    format!(
                        "{} triples, {} violations, {} boundary, {} ulp-bracket, max sup gap {:e}",
                        eq.triples_checked, eq.violations, eq.boundary_disagreements, eq.bracket_disagreements, eq.max_suprema_gap
                    ),
                );
                report.equivalence = Some(eq);
                s
            }
            1 => {
                report.tail = tail_matrix().iter().map(run_tail_cell).collect::<Result<_, _>>()?;
                let passed = report.tail.iter().filter(|c| c.pass()).count();
                let exact = report.tail.iter().filter(|c| c.exact_probability.is_some()).count();
                summary(name, report.tail.len(), passed, format!("{exact} exact binomial cross-checks"))
            }
            2 => {
                report.coverage_one_sided =
                    coverage_matrix(false).iter().map(run_coverage).collect::<Result<_, _>>()?;
                coverage_suite(name, &report.coverage_one_sided)
            }
            _ => {
                report.coverage_two_sided =
                    coverage_matrix(true).iter().map(run_coverage).collect::<Result<_, _>>()?;
                coverage_suite(name, &report.coverage_two_sided)
            }
        };
        report.suites.push(suite);
    }
    Ok(report)
}
