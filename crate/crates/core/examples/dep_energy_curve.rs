//! Largest energy bound reachable under a decoding-error budget.
//!
//! On the 16-QAM reference link the corners are both the most energetic and
//! the most reliable symbols, so every budget is met at λ = 1. The second
//! link puts the energetic symbol next to a close neighbour, which makes
//! the trade-off visible.
//!
//!     cargo run --release --example dep_energy_curve

use siet::prelude::*;

fn show(title: &str, setup: &FrontierSetup, targets: &[f64]) -> Result<()> {
    println!("{title}");
    for p in dep_energy_curve(setup, targets)? {
        println!(
            "  target {:<9.3e} lambda {:.6} dep_lb {:.3e} energy_ub {:.4} feasible {}",
            p.dep_target.unwrap_or(f64::NAN),
            p.lambda,
            p.dep_lb,
            p.energy_ub,
            p.feasible
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    let reference = FrontierSetup {
        constellation: Constellation::rect_qam(16, 5.0)?,
        ch: ChannelParams::new(2.0)?,
        harvester: HarvesterModel::unit(),
        n: 80,
        delta: 1e-4,
        sampler: RegionSampler::Auto,
    };
    show(
        "16-QAM reference link",
        &reference,
        &[1e-6, 1e-4, 1e-2, 1.0],
    )?;

    let crowded = FrontierSetup {
        constellation: Constellation::new(
            vec![
                ComplexSymbol::new(3.0, 0.25),
                ComplexSymbol::new(3.0, -0.25),
                ComplexSymbol::ZERO,
                ComplexSymbol::new(-1.0, 0.0),
            ],
            None,
        )?,
        ch: ChannelParams::new(0.1)?,
        harvester: HarvesterModel::new(1.0, 0.0, 1.0)?,
        n: 4,
        delta: 1e-3,
        sampler: RegionSampler::Auto,
    };
    let ends = sweep(&crowded, &[0.0, 1.0])?;
    let (lo, hi) = (ends[0].dep_lb, ends[1].dep_lb);
    let targets: Vec<f64> = (0..8)
        .map(|i| 0.5 * lo + (hi - 0.5 * lo) * i as f64 / 7.0)
        .collect();
    show("crowded high-energy pair", &crowded, &targets)?;
    Ok(())
}
