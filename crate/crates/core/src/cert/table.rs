use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::bounds::{hoeffding_baseline, one_sided_upper_bound, two_sided_interval, SampleSummary};
use crate::kl::{KlError, UnitValue};

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("`{0}` list is empty")]
    EmptyList(&'static str),
    #[error(transparent)]
    Domain(#[from] KlError),
    #[error("cannot write table: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot write table: {0}")]
    Csv(#[from] csv::Error),
}

/// One line of the bound table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub n: u64,
    pub delta: f64,
    pub mean: f64,
    pub budget_nats: f64,
    pub kl_upper: f64,
    pub two_sided_lower: f64,
    pub two_sided_upper: f64,
    pub hoeffding_upper: f64,
}

fn sorted_unique(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Rows for every `(n, delta, mean)`, ordered by `n`, then `delta`, then
/// `mean`, ascending. Duplicate inputs collapse to one row.
pub fn table_rows(n_values: &[u64], delta_values: &[f64], mean_values: &[f64]) -> Result<Vec<TableRow>, TableError> {
    if n_values.is_empty() {
        return Err(TableError::EmptyList("n"));
    }
    if delta_values.is_empty() {
        return Err(TableError::EmptyList("delta"));
    }
    if mean_values.is_empty() {
        return Err(TableError::EmptyList("mean"));
    }
    let mut ns = n_values.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let deltas = sorted_unique(delta_values);
    let means = sorted_unique(mean_values);

    let mut rows = Vec::with_capacity(ns.len() * deltas.len() * means.len());
    for &n in &ns {
        for &delta in &deltas {
            for &mean in &means {
                let s = SampleSummary::new(n, UnitValue::new(mean)?)?;
                let one = one_sided_upper_bound(&s, delta)?;
                let two = two_sided_interval(&s, delta)?;
                let baseline = hoeffding_baseline(&s, delta)?;
                rows.push(TableRow {
                    n,
                    delta,
                    mean,
                    budget_nats: one.budget.c,
                    kl_upper: one.bound_upper.get(),
                    two_sided_lower: two.bound_lower.map_or(0.0, |l| l.get()),
                    two_sided_upper: two.bound_upper.get(),
                    hoeffding_upper: baseline.bound_upper.get(),
                });
            }
        }
    }
    Ok(rows)
}

pub fn write_table(rows: &[TableRow], out: impl Write) -> Result<(), TableError> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Computes [`table_rows`] and writes them as CSV to `output`.
pub fn emit_table(
    n_values: &[u64],
    delta_values: &[f64],
    mean_values: &[f64],
    output: impl AsRef<Path>,
) -> Result<usize, TableError> {
    let rows = table_rows(n_values, delta_values, mean_values)?;
    let file = std::fs::File::create(output)?;
    write_table(&rows, std::io::BufWriter::new(file))?;
    Ok(rows.len())
}
