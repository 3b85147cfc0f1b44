//! Seeded Monte Carlo check that the bounds cover the true mean.
//!
//! cargo run --release --example coverage_simulation

use chernoff_kl::verification::{run_experiment, DistributionSpec, ExperimentConfig, ExperimentMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dists: [DistributionSpec; 3] = ["beta:a=2,b=5".parse()?, "bernoulli:p=0.1".parse()?, "uniform".parse()?];
    for dist in dists {
        for mode in [ExperimentMode::CoverageOneSided, ExperimentMode::CoverageTwoSided] {
            let cfg = ExperimentConfig {
                dist,
                n: 30,
                delta: 0.1,
                trials: 20_000,
                seed: 42,
                mode,
            };
            let report = run_experiment(&cfg)?;
            println!("{dist:<18} {mode:<20} pass = {}", report.pass());
            println!("{}", serde_json::to_string(&report)?);
        }
    }

    // Tail frequencies against exp(-n kl(p - t, p)).
    let cfg = ExperimentConfig {
        dist: "twopoint:v0=0,v1=1,w=0.3".parse()?,
        n: 40,
        delta: 0.05,
        trials: 20_000,
        seed: 7,
        mode: "tail-low:t=0.15".parse()?,
    };
    println!("{}", serde_json::to_string_pretty(&run_experiment(&cfg)?)?);
    Ok(())
}
