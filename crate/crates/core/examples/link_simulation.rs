//! Monte Carlo decoding-error and energy-outage estimates against the bounds.
//!
//!     cargo run --release --example link_simulation

use siet::bounds::mean_expected_energy;
use siet::prelude::*;

fn main() -> Result<()> {
    let c = Constellation::rect_qam(16, 1.0)?;
    let m = HarvesterModel::new(1.0, 0.5, 1.0)?;
    let n = 16;
    let counts = rationalize(&InputType::uniform(16), n)?;
    let code = build_code(&counts, 4096, BuildMode::Sample { seed: 7 })?;
    let ty = code.code_type();

    for sigma2 in [0.05, 0.1, 0.2] {
        let ch = ChannelParams::new(sigma2)?;
        let d = MapDetector::new(&c, &ty, ch)?;
        let rp = region_probs(&d, RegionSampler::Auto);
        let lb = dep_lb_homogeneous(&ty, &rp, n)?.value;
        let dep = simulate_dep(&code, &d, 500_000, 1)?;
        let b = mean_expected_energy(&c, &ty, &ch, &m)?;
        let eop = simulate_eop(&code, &c, &ch, &m, b, 500_000, 1)?;
        println!(
            "sigma2 {sigma2:<5} dep_hat {:.5} +- {:.5}  dep_lb {:.5}  eop_hat(B=mean) {:.4}  eop_lb {:.4}",
            dep.dep_hat,
            dep.dep_stderr,
            lb,
            eop.eop_hat,
            eop_lb(&c, &ty, b, &ch, &m)?
        );
    }

    let ch = ChannelParams::new(0.1)?;
    let d = MapDetector::new(&c, &ty, ch)?;
    let ledger = validate_bounds(&code, &d, &m, 3.0, 0.01, 200_000, 3)?;
    for check in &ledger.checks {
        println!(
            "{:<30} passed={} margin={:.4e}",
            check.name, check.passed, check.margin
        );
    }
    Ok(())
}
