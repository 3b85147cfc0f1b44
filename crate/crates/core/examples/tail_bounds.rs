//! Chernoff tail bounds for the sample mean next to exact binomial tails.
//!
//! cargo run --example tail_bounds

use chernoff_kl::bounds::{tail_bound_high, tail_bound_low, TailDirection, TailQuery};
use chernoff_kl::cert::selfcheck::binomial_event_probability;
use chernoff_kl::kl::UnitValue;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = 0.5;
    for n in [10u64, 40, 160] {
        for t in [0.1, 0.25] {
            let below = TailQuery::new(UnitValue::new(p)?, t, n, TailDirection::Below)?;
            let above = below.complement();
            let exact_below = binomial_event_probability(n, p, |m| below.contains(m));
            let exact_above = binomial_event_probability(n, p, |m| above.contains(m));
            println!(
                "n = {n:>3}, t = {t}: Pr(mean <= p - t) = {exact_below:.3e} <= {:.3e};  Pr(mean >= p + t) = {exact_above:.3e} <= {:.3e}",
                tail_bound_low(&below)?,
                tail_bound_high(&above)?
            );
        }
    }
    Ok(())
}
