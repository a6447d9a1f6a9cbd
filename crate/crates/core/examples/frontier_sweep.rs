//! Rate/energy trade-off along the interpolation family on the reference
//! 16-QAM link, written as CSV to stdout.
//!
//!     cargo run --release --example frontier_sweep > frontier.csv

use siet::frontier::write_csv;
use siet::prelude::*;

fn main() -> Result<()> {
    let setup = FrontierSetup {
        constellation: Constellation::rect_qam(16, 5.0)?,
        ch: ChannelParams::new(2.0)?,
        harvester: HarvesterModel::unit(),
        n: 80,
        delta: 1e-4,
        sampler: RegionSampler::Auto,
    };
    let points = sweep(&setup, &lambda_grid(21))?;
    write_csv(&points, std::io::stdout().lock())?;

    let order = setup.energy_order();
    eprintln!("top-energy group: {:?}", order.top_group());
    Ok(())
}
