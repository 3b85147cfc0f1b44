use serde::{Deserialize, Serialize};

use super::VerificationError;
use crate::kl::{bisect_prefix, kl_inverse_upper, kl_m, UnitValue, RESIDUAL_TOLERANCE};

pub const DEFAULT_GRID_STEP: f64 = 1.0 / 256.0;

/// Result of [`run_equivalence_scan`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub grid_step: f64,
    pub c_values: Vec<f64>,
    /// Number of `(mean, p, c)` triples checked.
    pub triples_checked: u64,
    /// Disagreements with `|kl_m(mean, p) - c| <= RESIDUAL_TOLERANCE`.
    pub boundary_disagreements: u64,
    /// Disagreements where `p` is exactly the returned inverse, i.e. `p`
    /// sits inside the final one-ulp bisection bracket and the exact
    /// supremum lies strictly between `p` and its predecessor double.
    pub bracket_disagreements: u64,
    /// Disagreements outside both bands.
    pub violations: u64,
    /// Number of `(mean, c)` pairs whose two suprema were compared.
    pub suprema_checked: u64,
    /// Pairs whose suprema differ by more than `RESIDUAL_TOLERANCE`.
    pub suprema_violations: u64,
    pub max_suprema_gap: f64,
    pub pass: bool,
}

fn grid(step: f64) -> Vec<f64> {
    let steps = (1.0 / step + 1e-9).floor() as u64;
    let mut points: Vec<f64> = (0..=steps).map(|i| (i as f64 * step).min(1.0)).collect();
    if *points.last().expect("non-empty") < 1.0 {
        points.push(1.0);
    }
    points
}

/// Checks, for every grid pair `(mean, p)` and every budget `c`, that
///
/// ```text
/// p <= kl_inverse_upper(mean, c)   <=>   kl_m(mean, p) <= c
/// ```
///
/// and that `sup { p : kl(mean, p) <= c }` (searched on `[mean, 1]`)
/// agrees with `sup { p : kl_m(mean, p) <= c }` (searched on all of
/// `[0, 1]`).
///
/// The inverse is the first double above the exact supremum, so when that
/// supremum is not representable (e.g. `1 - 4e-18` for mean `0.98`,
/// `c = 0.7`) a grid point equal to the returned inverse satisfies the
/// left side but not the right. Those are counted in
/// `bracket_disagreements`, apart from genuine `violations`.
pub fn run_equivalence_scan(grid_step: f64, c_values: &[f64]) -> Result<EquivalenceReport, VerificationError> {
    run_equivalence_scan_with(grid_step, c_values, |q, p| kl_m(q, p).nats())
}

pub(crate) fn run_equivalence_scan_with(
    grid_step: f64,
    c_values: &[f64],
    one_sided: impl Fn(UnitValue, UnitValue) -> f64,
) -> Result<EquivalenceReport, VerificationError> {
    if !(grid_step > 0.0 && grid_step <= 0.1) {
        return Err(VerificationError::InvalidConfig(format!(
            "grid step {grid_step} outside (0, 0.1]"
        )));
    }
    if let Some(c) = c_values.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
        return Err(VerificationError::InvalidConfig(format!(
            "budget {c} must be positive and finite"
        )));
    }
    let points: Vec<UnitValue> = grid(grid_step)
        .into_iter()
        .map(|x| UnitValue::new(x).expect("grid inside [0, 1]"))
        .collect();

    let mut report = EquivalenceReport {
        grid_step,
        c_values: c_values.to_vec(),
        triples_checked: 0,
        boundary_disagreements: 0,
        bracket_disagreements: 0,
        violations: 0,
        suprema_checked: 0,
        suprema_violations: 0,
        max_suprema_gap: 0.0,
        pass: false,
    };

    for &c in c_values {
        for &mean in &points {
            let sup_kl = kl_inverse_upper(mean, c)?.get();

            let sup_one_sided = if one_sided(mean, UnitValue::ONE) <= c {
                1.0
            } else {
                bisect_prefix(0.0, 1.0, |p| one_sided(mean, UnitValue::new(p).unwrap()) <= c).1
            };
            let gap = (sup_kl - sup_one_sided).abs();
            report.suprema_checked += 1;
            report.max_suprema_gap = report.max_suprema_gap.max(gap);
            if gap.is_nan() || gap > RESIDUAL_TOLERANCE {
                report.suprema_violations += 1;
            }

            for &p in &points {
                report.triples_checked += 1;
                let divergence = one_sided(mean, p);
                let below_inverse = p.get() <= sup_kl;
                let within_budget = divergence <= c;
                if below_inverse != within_budget {
                    if (divergence - c).abs() <= RESIDUAL_TOLERANCE {
                        report.boundary_disagreements += 1;
                    } else if p.get() == sup_kl {
                        report.bracket_disagreements += 1;
                    } else {
                        report.violations += 1;
                    }
                }
            }
        }
    }
    report.pass = report.violations == 0 && report.suprema_violations == 0;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kl::{kl, kl_inverse_upper};

    fn u(x: f64) -> UnitValue {
        UnitValue::new(x).unwrap()
    }

    #[test]
    fn grid_covers_endpoints() {
        let g = grid(0.25);
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let g = grid(0.3);
        assert_eq!(g.first(), Some(&0.0));
        assert_eq!(g.last(), Some(&1.0));
        assert_eq!(grid(1.0 / 256.0).len(), 257);
    }

    #[test]
    fn worked_triples() {
        // mean = p: both sides hold.
        let c = 0.05;
        assert!(kl_m(u(0.4), u(0.4)).nats() <= c);
        assert!(0.4 <= kl_inverse_upper(u(0.4), c).unwrap().get());

        // mean = 0.1, p = 0.5, c = 0.01: both sides fail.
        let d = kl_m(u(0.1), u(0.5)).nats();
        assert!((d - 0.368_064_207_168_497_1).abs() < 1e-15);
        let sup = kl_inverse_upper(u(0.1), 0.01).unwrap().get();
        assert!((sup - 0.147_675_539_298_007_48).abs() < 1e-12);
        assert!(d > 0.01 && sup < 0.5);

        // mean = 0.9 > p = 0.2: kl_m vanishes and p sits below the inverse.
        assert_eq!(kl_m(u(0.9), u(0.2)).nats(), 0.0);
        assert!(0.2 < kl_inverse_upper(u(0.9), 0.01).unwrap().get());
        assert!(kl(u(0.9), u(0.2)).nats() > 0.01);
    }

    #[test]
    fn coarse_scan_passes() {
        let r = run_equivalence_scan(1.0 / 32.0, &[0.01, 0.3]).unwrap();
        assert_eq!(r.triples_checked, 2 * 33 * 33);
        assert_eq!(r.suprema_checked, 2 * 33);
        assert_eq!(r.violations, 0);
        assert_eq!(r.suprema_violations, 0);
        assert!(r.pass);
    }

    #[test]
    fn sign_flipped_divergence_is_caught() {
        let r = run_equivalence_scan_with(1.0 / 32.0, &[0.01], |q, p| -kl_m(q, p).nats()).unwrap();
        assert!(r.violations > 0);
        assert!(!r.pass);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(run_equivalence_scan(0.0, &[0.1]).is_err());
        assert!(run_equivalence_scan(0.2, &[0.1]).is_err());
        assert!(run_equivalence_scan(0.1, &[0.0]).is_err());
        assert!(run_equivalence_scan(0.1, &[f64::INFINITY]).is_err());
    }
}
