//! CSV table of bounds over a grid of sample sizes, confidence levels and means.
//!
//! cargo run --example bound_table

use chernoff_kl::cert::{table_rows, write_table};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rows = table_rows(&[10, 100, 1000], &[0.01, 0.05], &[0.0, 0.05, 0.2, 0.5])?;
    write_table(&rows, std::io::stdout().lock())?;
    eprintln!("{} rows", rows.len());
    Ok(())
}
