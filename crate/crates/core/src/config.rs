//! JSON run configuration shared by the CLI subcommands.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "constellation": {"preset": "qam16", "half_spacing": 5.0},
//!   "sigma2": 2.0,
//!   "n": 80,
//!   "delta": 1e-4,
//!   "harvester": {"k2": 1.0, "k4": 1.0, "h_mag": 1.0},
//!   "type": "uniform",
//!   "B": 100000.0,
//!   "trials": 100000,
//!   "seed": 7
//! }
//! ```
//!
//! `constellation` may instead list symbols explicitly:
//! `{"symbols": [[5, 5], [-5, 5]], "peak_power": 7.08}`. `type` is
//! `"uniform"`, `{"probs": [...]}` or `{"lambda": 0.3}` (a member of the
//! interpolation family used by the frontier sweeps).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::ChannelParams;
use crate::constellation::{ComplexSymbol, Constellation};
use crate::detection::{RegionSampler, DEFAULT_REGION_SAMPLES};
use crate::error::{Error, Result};
use crate::frontier::{interpolation_family, EnergyOrder};
use crate::harvester::HarvesterModel;
use crate::typespace::InputType;

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

fn schema_version() -> u32 {
    CONFIG_SCHEMA_VERSION
}

fn unit() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConstellationSpec {
    Preset {
        preset: String,
        half_spacing: f64,
    },
    Explicit {
        symbols: Vec<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        peak_power: Option<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarvesterSpec {
    pub k2: f64,
    pub k4: f64,
    #[serde(default = "unit")]
    pub h_mag: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TypeSpec {
    Named(String),
    Probs { probs: Vec<f64> },
    Family { lambda: f64 },
}

impl Default for TypeSpec {
    fn default() -> Self {
        TypeSpec::Named("uniform".into())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionMethodSpec {
    #[default]
    Auto,
    Quadrature,
    MonteCarlo,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    #[serde(default)]
    pub method: RegionMethodSpec,
    #[serde(default)]
    pub samples: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub constellation: ConstellationSpec,
    pub sigma2: f64,
    pub n: u64,
    #[serde(default)]
    pub delta: f64,
    pub harvester: HarvesterSpec,
    #[serde(default, rename = "type")]
    pub input_type: TypeSpec,
    #[serde(default, rename = "B", skip_serializing_if = "Option::is_none")]
    pub energy_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Number of messages `M` of the simulated code.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub messages: Option<u64>,
    #[serde(default)]
    pub region: RegionSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deltas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dep_targets: Option<Vec<f64>>,
    /// Externally reported rate bound to compare `rate_ub_exact` against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_rate_ub: Option<f64>,
}

/// A validated configuration.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub constellation: Constellation,
    pub ch: ChannelParams,
    pub harvester: HarvesterModel,
    pub n: u64,
    pub delta: f64,
    pub input_type: InputType,
    pub region: RegionSpec,
}

impl Scenario {
    pub fn sampler(&self, seed: u64) -> RegionSampler {
        match self.region.method {
            RegionMethodSpec::Auto => RegionSampler::Auto,
            RegionMethodSpec::Quadrature => RegionSampler::Quadrature,
            RegionMethodSpec::MonteCarlo => RegionSampler::MonteCarlo {
                samples_per_symbol: self.region.samples.unwrap_or(DEFAULT_REGION_SAMPLES),
                seed,
            },
        }
    }
}

fn field<T>(name: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::InvalidArgument(m) => Error::config(name, m),
        other => other,
    })
}

/// Field named by serde's "missing field `x`" / "unknown field `x`" errors.
fn offending_field(msg: &str) -> Option<&str> {
    let rest = msg
        .strip_prefix("missing field `")
        .or_else(|| msg.strip_prefix("unknown field `"))?;
    rest.split('`').next()
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            let field = offending_field(&msg).unwrap_or("<root>").to_string();
            Error::config(field, msg)
        })?;
        if cfg.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(Error::config(
                "schema_version",
                format!(
                    "unsupported version {} (expected {CONFIG_SCHEMA_VERSION})",
                    cfg.schema_version
                ),
            ));
        }
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::config("--config", format!("cannot read {}: {e}", path.display()))
        })?;
        Self::from_json(&text)
    }

    pub fn resolve(&self) -> Result<Scenario> {
        let constellation = field(
            "constellation",
            match &self.constellation {
                ConstellationSpec::Preset {
                    preset,
                    half_spacing,
                } => {
                    let order = match preset.to_ascii_lowercase().as_str() {
                        "qam4" => 4,
                        "qam16" => 16,
                        "qam64" => 64,
                        "qam256" => 256,
                        other => {
                            return Err(Error::config(
                                "constellation.preset",
                                format!("unknown preset `{other}`"),
                            ))
                        }
                    };
                    Constellation::rect_qam(order, *half_spacing)
                }
                ConstellationSpec::Explicit {
                    symbols,
                    peak_power,
                } => Constellation::new(
                    symbols
                        .iter()
                        .map(|s| ComplexSymbol::new(s[0], s[1]))
                        .collect(),
                    *peak_power,
                ),
            },
        )?;
        let ch = field("sigma2", ChannelParams::new(self.sigma2))?;
        let h = &self.harvester;
        let harvester = field("harvester", HarvesterModel::new(h.k2, h.k4, h.h_mag))?;
        if self.n == 0 {
            return Err(Error::config("n", "block length must be at least 1"));
        }
        if !(0.0..1.0).contains(&self.delta) {
            return Err(Error::config(
                "delta",
                format!("must lie in [0, 1), got {}", self.delta),
            ));
        }
        let input_type = match &self.input_type {
            TypeSpec::Named(name) if name == "uniform" => InputType::uniform(constellation.len()),
            TypeSpec::Named(name) => {
                return Err(Error::config("type", format!("unknown type `{name}`")))
            }
            TypeSpec::Probs { probs } => {
                if probs.len() != constellation.len() {
                    return Err(Error::config(
                        "type.probs",
                        format!(
                            "{} entries for {} symbols",
                            probs.len(),
                            constellation.len()
                        ),
                    ));
                }
                field("type.probs", InputType::new(probs.clone()))?
            }
            TypeSpec::Family { lambda } => field(
                "type.lambda",
                interpolation_family(*lambda, &EnergyOrder::new(&constellation, &ch, &harvester)),
            )?,
        };
        if let Some(b) = self.energy_threshold {
            if !(b >= 0.0 && b.is_finite()) {
                return Err(Error::config("B", format!("must be nonnegative, got {b}")));
            }
        }
        if self.region.samples == Some(0) {
            return Err(Error::config("region.samples", "must be positive"));
        }
        Ok(Scenario {
            constellation,
            ch,
            harvester,
            n: self.n,
            delta: self.delta,
            input_type,
            region: self.region.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{
        "constellation": {"preset": "qam16", "half_spacing": 5.0},
        "sigma2": 2.0, "n": 80, "delta": 1e-4,
        "harvester": {"k2": 1.0, "k4": 1.0}
    }"#;

    #[test]
    fn minimal_config_resolves() {
        let cfg = RunConfig::from_json(BASE).unwrap();
        let s = cfg.resolve().unwrap();
        assert_eq!(s.constellation.len(), 16);
        assert!(s.input_type.is_uniform());
        assert_eq!(s.harvester, HarvesterModel::unit());
    }

    #[test]
    fn explicit_symbols_and_type_variants() {
        let text = r#"{
            "constellation": {"symbols": [[1, 0], [0, 1], [-1, 0]]},
            "sigma2": 1.0, "n": 6,
            "harvester": {"k2": 1.0, "k4": 0.0, "h_mag": 2.0},
            "type": {"probs": [0.5, 0.25, 0.25]}
        }"#;
        let s = RunConfig::from_json(text).unwrap().resolve().unwrap();
        assert_eq!(s.constellation.peak_power(), 1.0);
        assert_eq!(s.input_type.probs(), &[0.5, 0.25, 0.25]);
        let text = BASE.replace(
            "\"delta\": 1e-4,",
            "\"delta\": 1e-4, \"type\": {\"lambda\": 1.0},",
        );
        let s = RunConfig::from_json(&text).unwrap().resolve().unwrap();
        assert_eq!(s.input_type.support().len(), 4);
    }

    #[test]
    fn errors_name_the_field() {
        let missing = r#"{"sigma2": 2.0, "n": 80, "harvester": {"k2": 1.0, "k4": 1.0}}"#;
        match RunConfig::from_json(missing) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "constellation"),
            other => panic!("{other:?}"),
        }
        let bad_sigma = BASE.replace("\"sigma2\": 2.0", "\"sigma2\": -2.0");
        match RunConfig::from_json(&bad_sigma).unwrap().resolve() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "sigma2"),
            other => panic!("{other:?}"),
        }
        let bad_type = BASE.replace(
            "\"delta\": 1e-4,",
            "\"delta\": 1e-4, \"type\": {\"probs\": [1.0]},",
        );
        match RunConfig::from_json(&bad_type).unwrap().resolve() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "type.probs"),
            other => panic!("{other:?}"),
        }
        let unknown = BASE.replace("\"n\": 80", "\"n\": 80, \"bogus\": 1");
        assert!(RunConfig::from_json(&unknown).is_err());
    }

    #[test]
    fn config_round_trips() {
        let cfg = RunConfig::from_json(BASE).unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), cfg);
    }
}
