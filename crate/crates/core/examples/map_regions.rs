//! MAP decision-region probabilities under uniform and skewed priors,
//! computed in closed form, by quadrature and by Monte Carlo.
//!
//!     cargo run --release --example map_regions

use siet::detection::{
    region_probs_closed_form, region_probs_monte_carlo, region_probs_quadrature,
};
use siet::prelude::*;

fn main() -> Result<()> {
    let c = Constellation::rect_qam(4, 1.0)?;
    let ch = ChannelParams::new(1.0)?;

    let uniform = MapDetector::new(&c, &InputType::uniform(4), ch)?;
    let closed = region_probs_closed_form(&uniform).expect("uniform grid");
    let quad = region_probs_quadrature(&uniform);
    println!("uniform prior");
    println!("  closed form {:?}", closed.p);
    println!("  quadrature  {:?}", quad.p);

    let prior = InputType::new(vec![0.7, 0.1, 0.1, 0.1])?;
    let skewed = MapDetector::new(&c, &prior, ch)?;
    let quad = region_probs_quadrature(&skewed);
    let mc = region_probs_monte_carlo(&skewed, 1_000_000, 1);
    println!("skewed prior {:?}", prior.probs());
    for l in 0..4 {
        println!(
            "  symbol {}: quadrature {:.6}  monte carlo {:.6} +- {:.6}",
            l + 1,
            quad.p[l],
            mc.p[l],
            mc.stderr[l]
        );
    }
    println!("  q_pmf {:?}", q_pmf(&quad)?.probs());

    let y = ComplexSymbol::new(-0.1, 0.2);
    println!(
        "\ny = {y:?}: uniform decides {}, skewed decides {}",
        uniform.classify(y) + 1,
        skewed.classify(y) + 1
    );
    Ok(())
}
