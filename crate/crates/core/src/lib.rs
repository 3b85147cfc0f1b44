//! Chernoff-KL confidence bounds for the mean of i.i.d. random variables
//! taking values in `[0, 1]`.
//!
//! - [`kl`]: binary KL divergence, the one-sided divergence `kl_m`, and
//!   bisection-based inversions in both arguments.
//! - [`bounds`]: one-sided upper bounds, two-sided intervals, tail
//!   probabilities for the sample mean, and a Hoeffding baseline.
//! - [`verification`]: seeded Monte Carlo coverage and tail experiments and
//!   a deterministic equivalence scan.
//! - [`cert`]: loss-file ingestion, risk certificates, bound tables, and the
//!   self-check behind the `klcert` binary.
//!
//! ```
//! use chernoff_kl::bounds::{one_sided_upper_bound, SampleSummary};
//! use chernoff_kl::kl::UnitValue;
//!
//! let s = SampleSummary::new(100, UnitValue::new(0.1).unwrap()).unwrap();
//! let b = one_sided_upper_bound(&s, 0.05).unwrap();
//! assert!((b.bound_upper.get() - 0.18883).abs() < 1e-5);
//! ```

pub mod bounds;
pub mod cert;
pub mod kl;
pub mod verification;

pub use bounds::{
    hoeffding_baseline, one_sided_upper_bound, tail_bound_high, tail_bound_low, two_sided_interval,
    BoundMethod, BoundResult, SampleSummary, TailDirection, TailQuery,
};
pub use kl::{
    kl, kl_inverse_lower, kl_inverse_upper, kl_lower_root, kl_m, kl_upper_root, ConfidenceBudget,
    Divergence, KlError, Root, Sidedness, UnitValue,
};
