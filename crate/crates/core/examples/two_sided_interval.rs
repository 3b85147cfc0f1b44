//! Two-sided confidence interval for a mean.
//!
//! cargo run --example two_sided_interval

use chernoff_kl::bounds::{one_sided_upper_bound, two_sided_interval, SampleSummary};
use chernoff_kl::kl::UnitValue;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let delta = 0.05;
    for (n, mean) in [(20, 0.5), (200, 0.05), (2000, 0.9), (50, 0.0)] {
        let s = SampleSummary::new(n, UnitValue::new(mean)?)?;
        let two = two_sided_interval(&s, delta)?;
        let one = one_sided_upper_bound(&s, delta)?;
        let lower = two.bound_lower.expect("two-sided results carry a lower end");
        println!(
            "n = {n:>4}, mean = {mean:<4}: [{:.5}, {:.5}]  budget {:.5} nats  (one-sided upper {:.5})",
            lower.get(),
            two.bound_upper.get(),
            two.budget.c,
            one.bound_upper.get()
        );
    }
    Ok(())
}
