//! Binary KL divergence and its four inversions.
//!
//! cargo run --example kl_divergence

use chernoff_kl::kl::{kl, kl_inverse_lower, kl_inverse_upper, kl_lower_root, kl_m, kl_upper_root, UnitValue};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q = UnitValue::new(0.1)?;
    let p = UnitValue::new(0.3)?;
    println!("kl(0.1, 0.3)   = {:.6} nats", kl(q, p).nats());
    println!("kl_m(0.3, 0.1) = {} (zero: the mean already exceeds p)", kl_m(p, q).nats());
    println!("kl(0.5, 0)     = {}", kl(UnitValue::new(0.5)?, UnitValue::ZERO).nats());

    let c = 0.05;
    let up = kl_inverse_upper(q, c)?;
    let lo = kl_inverse_lower(q, c)?;
    println!("\nlargest p with kl(0.1, p) <= {c}:  {:.9}", up.get());
    println!("smallest p with kl(0.1, p) <= {c}: {:.9}", lo.get());

    let centre = UnitValue::new(0.2)?;
    let above = kl_upper_root(centre, c)?;
    let below = kl_lower_root(centre, c)?;
    println!("\nroots of kl(x, 0.2) = {c}: {:.9} and {:.9}", below.value.get(), above.value.get());

    // Past kl(1, 0.2) = ln 5 the upper root saturates at 1.
    let saturated = kl_upper_root(centre, 2.0)?;
    println!("kl(x, 0.2) = 2 above 0.2: x = {} (saturated: {})", saturated.value.get(), saturated.saturated);
    Ok(())
}
