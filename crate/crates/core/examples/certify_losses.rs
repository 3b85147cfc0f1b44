//! Risk certificate from held-out losses, in each supported input format.
//!
//! cargo run --example certify_losses

use chernoff_kl::cert::{certify, ingest_reader, LossFormat};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inputs = [
        (LossFormat::Csv, "loss\n0\n1\n0\n0\n0.5\n0\n0\n0\n0\n0\n"),
        (LossFormat::Jsonl, "{\"id\": 1, \"loss\": 0}\n{\"id\": 2, \"loss\": 1}\n{\"id\": 3, \"loss\": 0.25}\n"),
        (LossFormat::Plain, "0\n0\n0\n0\n0\n0\n0\n0\n0\n0\n"),
    ];
    for (format, text) in inputs {
        let losses = ingest_reader(text.as_bytes(), format)?;
        let cert = certify(&losses, 0.05, false, Some("validation fold, not used for training".into()))?;
        println!("--- {format}\n{}", cert.to_json());
    }

    let two_sided = certify(&ingest_reader("0.1\n0.4\n0.2\n0.3\n".as_bytes(), LossFormat::Plain)?, 0.1, true, None)?;
    println!("--- two-sided\n{}", two_sided.to_json());

    match ingest_reader("loss\n0.2\n1.5\n".as_bytes(), LossFormat::Csv) {
        Ok(_) => unreachable!("1.5 is not a valid loss"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
