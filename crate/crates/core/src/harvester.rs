//! Energy harvester model.
//!
//! The harvested energy of a channel output `z` is
//! `g(z) = k2·|h z|² + k4·|h z|⁴`, a second- plus fourth-order diode
//! expansion. The coefficients are configurable.

use serde::{Deserialize, Serialize};

use crate::channel::ChannelParams;
use crate::constellation::ComplexSymbol;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHarvester")]
pub struct HarvesterModel {
    pub k2: f64,
    pub k4: f64,
    pub h_mag: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHarvester {
    k2: f64,
    k4: f64,
    #[serde(default = "unit_gain")]
    h_mag: f64,
}

fn unit_gain() -> f64 {
    1.0
}

impl TryFrom<RawHarvester> for HarvesterModel {
    type Error = Error;
    fn try_from(r: RawHarvester) -> Result<Self> {
        Self::new(r.k2, r.k4, r.h_mag)
    }
}

impl HarvesterModel {
    pub fn new(k2: f64, k4: f64, h_mag: f64) -> Result<Self> {
        let finite = k2.is_finite() && k4.is_finite() && h_mag.is_finite();
        if !finite || k2 < 0.0 || k4 < 0.0 || k2 + k4 <= 0.0 {
            return Err(Error::invalid(format!(
                "harvester coefficients must be nonnegative with k2 + k4 > 0, got k2={k2}, k4={k4}"
            )));
        }
        if h_mag <= 0.0 {
            return Err(Error::invalid(format!(
                "channel gain must be positive, got {h_mag}"
            )));
        }
        Ok(Self { k2, k4, h_mag })
    }

    /// `k2 = k4 = 1`, unit gain.
    pub fn unit() -> Self {
        Self {
            k2: 1.0,
            k4: 1.0,
            h_mag: 1.0,
        }
    }

    /// `g(z)`
    #[inline]
    pub fn energy(&self, z: ComplexSymbol) -> f64 {
        let s = self.h_mag * self.h_mag * z.norm_sqr();
        self.k2 * s + self.k4 * s * s
    }

    /// `ḡ(z) = (1/n) Σ g(z_t)`
    pub fn mean_energy(&self, z: &[ComplexSymbol]) -> Result<f64> {
        if z.is_empty() {
            return Err(Error::invalid("cannot average energy over an empty block"));
        }
        Ok(z.iter().map(|&v| self.energy(v)).sum::<f64>() / z.len() as f64)
    }

    /// `E[g(x + W)]` with `W` complex Gaussian of variance `σ²`.
    ///
    /// With `s = |h x|²` and `v = |h|² σ²`:
    /// `E|h(x+W)|² = s + v` and `E|h(x+W)|⁴ = s² + 4 s v + 2 v²`.
    pub fn expected_energy(&self, x: ComplexSymbol, ch: &ChannelParams) -> f64 {
        let g2 = self.h_mag * self.h_mag;
        let s = g2 * x.norm_sqr();
        let v = g2 * ch.sigma2();
        self.k2 * (s + v) + self.k4 * (s * s + 4.0 * s * v + 2.0 * v * v)
    }
}
