//! Exact and Stirling rate bounds for a few homogeneous types.
//!
//!     cargo run --example rate_bounds

use siet::prelude::*;

fn main() -> Result<()> {
    let n = 80;
    let cases = [
        ("uniform 16", InputType::uniform(16)),
        (
            "four corners",
            InputType::from_weights(&[
                0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 1., 1., 1., 1.,
            ])?,
        ),
        (
            "skewed",
            InputType::from_weights(&[
                8., 4., 2., 1., 1., 1., 1., 1., 1., 1., 1., 1., 1., 1., 1., 1.,
            ])?,
        ),
    ];
    println!(
        "{:<14} {:>8} {:>10} {:>10} {:>10}",
        "type", "H bits", "exact", "stirling", "log2 C"
    );
    for (name, ty) in cases {
        let counts = rationalize(&ty, n)?;
        println!(
            "{:<14} {:>8.4} {:>10.6} {:>10.6} {:>10.3}",
            name,
            entropy(&ty, LogBase::Two),
            rate_ub_exact(&counts),
            rate_ub_stirling(&ty, n)?,
            multinomial_log2(&counts),
        );
    }
    Ok(())
}
