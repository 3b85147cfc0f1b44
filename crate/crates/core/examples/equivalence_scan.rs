//! Grid scan comparing `p <= kl_inverse_upper(q, c)` with `kl_m(q, p) <= c`.
//!
//! cargo run --release --example equivalence_scan

use chernoff_kl::verification::{run_equivalence_scan, DEFAULT_GRID_STEP};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let report = run_equivalence_scan(DEFAULT_GRID_STEP, &[0.001, 0.01, 0.1, 0.7])?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    println!("pass: {}", report.pass);
    Ok(())
}
