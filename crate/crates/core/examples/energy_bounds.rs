//! Energy-rate upper bound and energy-outage lower bound on 16-QAM.
//!
//!     cargo run --example energy_bounds

use siet::bounds::mean_expected_energy;
use siet::prelude::*;

fn main() -> Result<()> {
    let c = Constellation::rect_qam(16, 5.0)?;
    let ch = ChannelParams::new(2.0)?;
    let m = HarvesterModel::unit();
    let corner = c.index_of(ComplexSymbol::new(15.0, 15.0)).expect("corner");

    for x in [
        ComplexSymbol::new(5.0, 5.0),
        ComplexSymbol::new(15.0, 5.0),
        c.symbol(corner),
    ] {
        println!(
            "E[g] at {:>5}{:+}i: {}",
            x.re,
            x.im,
            m.expected_energy(x, &ch)
        );
    }

    let uniform = InputType::uniform(16);
    let mean = mean_expected_energy(&c, &uniform, &ch, &m)?;
    println!("\nuniform type, mean expected energy {mean}");
    for delta in [0.0, 1e-4, 1e-2, 0.1] {
        println!(
            "  delta {delta:<6} energy_rate_ub {:.3}",
            energy_rate_ub(&c, &uniform, delta, &ch, &m)?
        );
    }
    for b in [0.5 * mean, mean, 2.0 * mean] {
        println!(
            "  B {b:<10.1} eop_lb {:.4}",
            eop_lb(&c, &uniform, b, &ch, &m)?
        );
    }
    Ok(())
}
