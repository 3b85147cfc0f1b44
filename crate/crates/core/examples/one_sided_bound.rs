//! One-sided upper confidence bound on a mean, against the Hoeffding radius.
//!
//! cargo run --example one_sided_bound

use chernoff_kl::bounds::{hoeffding_baseline, one_sided_upper_bound, SampleSummary};
use chernoff_kl::kl::UnitValue;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let delta = 0.05;
    println!("{:>6} {:>6} {:>10} {:>10}", "n", "mean", "kl bound", "hoeffding");
    for n in [10, 100, 1000, 10_000] {
        for mean in [0.0, 0.01, 0.1, 0.5] {
            let s = SampleSummary::new(n, UnitValue::new(mean)?)?;
            let kl = one_sided_upper_bound(&s, delta)?;
            let h = hoeffding_baseline(&s, delta)?;
            println!(
                "{n:>6} {mean:>6} {:>10.6} {:>10.6}",
                kl.bound_upper.get(),
                h.bound_upper.get()
            );
        }
    }

    // Bounds can also be computed straight from observations.
    let draws: Vec<UnitValue> = [0.0, 0.2, 0.0, 0.1, 0.4, 0.0, 0.0, 0.3]
        .into_iter()
        .map(UnitValue::new)
        .collect::<Result<_, _>>()?;
    let s = SampleSummary::from_samples(&draws)?;
    let b = one_sided_upper_bound(&s, delta)?;
    println!(
        "\n8 draws, mean {:.4}: expected value <= {:.4} with probability >= {}",
        s.mean().get(),
        b.bound_upper.get(),
        1.0 - delta
    );
    Ok(())
}
