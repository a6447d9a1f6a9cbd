//! Finite-blocklength bounds on simultaneous information and energy
//! transmission over a complex AWGN channel with a finite constellation.
//!
//! For a homogeneous code (every codeword has the same symbol type, every
//! symbol is decoded by the same region) the crate evaluates
//!
//! * an upper bound on the information rate, exactly from the multinomial
//!   count and through its Stirling relaxation,
//! * an upper bound on the energy rate at a given outage probability,
//! * lower bounds on the decoding-error and energy-outage probabilities,
//!
//! and checks them against a seeded Monte Carlo link simulation.
//!
//! ```
//! use siet::prelude::*;
//!
//! let qam = Constellation::rect_qam(16, 5.0)?;
//! let counts = rationalize(&InputType::uniform(16), 80)?;
//! let rate = rate_ub_exact(&counts);
//! assert!((rate - 3.554).abs() < 1e-3);
//! # Ok::<(), siet::Error>(())
//! ```

pub mod bounds;
pub mod channel;
pub mod cli;
pub mod codec;
pub mod config;
pub mod constellation;
pub mod detection;
mod error;
pub mod frontier;
pub mod harvester;
pub mod montecarlo;
pub mod normal;
pub mod output;
pub mod typespace;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::bounds::{
        bounds_report, dep_lb_general, dep_lb_homogeneous, energy_rate_ub, eop_lb, rate_ub_exact,
        rate_ub_stirling, BoundsReport, ReportInputs,
    };
    pub use crate::channel::{log_density, sample_noise, ChannelParams, NoiseStream};
    pub use crate::codec::{build_code, codeword_type, BuildMode, HomogeneousCode};
    pub use crate::constellation::{symbol_energy, ComplexSymbol, Constellation};
    pub use crate::detection::{
        q_pmf, region_probs, MapDetector, RegionMethod, RegionProbs, RegionSampler,
    };
    pub use crate::frontier::{
        dep_energy_curve, interpolation_family, lambda_grid, sweep, EnergyOrder, FrontierPoint,
        FrontierSetup,
    };
    pub use crate::harvester::HarvesterModel;
    pub use crate::montecarlo::{simulate_dep, simulate_eop, validate_bounds};
    pub use crate::typespace::{
        entropy, kl_divergence, multinomial_log2, rationalize, InputType, LogBase, SymbolCounts,
    };
    pub use crate::{Error, Result};
}
