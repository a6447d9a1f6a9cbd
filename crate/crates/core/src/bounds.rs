//! Finite-blocklength bounds for homogeneous codes.
//!
//! * energy-rate upper bound and energy-outage lower bound (Markov),
//! * decoding-error lower bounds, general and homogeneous,
//! * information-rate upper bounds: the exact multinomial count and its
//!   Stirling relaxation,
//! * a combined [`BoundsReport`] for one type.
//!
//! The decoding-error exponent is evaluated in nats,
//! `-n H(P) - n D(P‖Q) + n ln Σ p_j`, and the result clamped to `[0, 1]`
//! with the raw value kept alongside.

use serde::{Deserialize, Serialize};

use crate::channel::ChannelParams;
use crate::constellation::Constellation;
use crate::detection::{q_pmf, RegionMethod, RegionProbs};
use crate::error::{Error, Result};
use crate::harvester::HarvesterModel;
use crate::typespace::{
    entropy_nats, kl_nats, multinomial_log2, rationalize, InputType, SymbolCounts,
};

/// Version tag written into every JSON report.
pub const SCHEMA_VERSION: u32 = 1;

/// A reference rate further than this from `rate_ub_exact` is flagged.
pub const REFERENCE_RATE_TOLERANCE: f64 = 0.01;

fn check_len(p: &InputType, l: usize, what: &str) -> Result<()> {
    if p.len() != l {
        return Err(Error::invalid(format!(
            "type has {} entries but {what} has {l}",
            p.len()
        )));
    }
    Ok(())
}

/// `Σ_ℓ p_ℓ E[g(x_ℓ + W)]`
pub fn mean_expected_energy(
    c: &Constellation,
    p: &InputType,
    ch: &ChannelParams,
    m: &HarvesterModel,
) -> Result<f64> {
    check_len(p, c.len(), "the constellation")?;
    Ok(c.symbols()
        .iter()
        .zip(p.probs())
        .filter(|(_, &w)| w > 0.0)
        .map(|(&x, &w)| w * m.expected_energy(x, ch))
        .sum())
}

/// Upper bound on the energy rate `B` at outage probability `delta`.
pub fn energy_rate_ub(
    c: &Constellation,
    p: &InputType,
    delta: f64,
    ch: &ChannelParams,
    m: &HarvesterModel,
) -> Result<f64> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::invalid(format!(
            "outage probability must lie in [0, 1), got {delta}"
        )));
    }
    Ok(mean_expected_energy(c, p, ch, m)? / (1.0 - delta))
}

/// Lower bound on the energy-outage probability at threshold `b`.
pub fn eop_lb(
    c: &Constellation,
    p: &InputType,
    b: f64,
    ch: &ChannelParams,
    m: &HarvesterModel,
) -> Result<f64> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::invalid(format!(
            "energy threshold must be positive, got {b}"
        )));
    }
    Ok((1.0 - mean_expected_energy(c, p, ch, m)? / b).max(0.0))
}

/// A decoding-error lower bound with its diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepBound {
    /// Clamped to `[0, 1]`.
    pub value: f64,
    /// Before clamping.
    pub raw: f64,
    /// Some codeword puts mass on a symbol whose region has zero
    /// probability; its term contributes `exp(-∞) = 0`.
    pub unsupported_mass: bool,
}

impl DepBound {
    fn from_raw(raw: f64, unsupported_mass: bool) -> Self {
        Self {
            value: raw.clamp(0.0, 1.0) + 0.0, // no -0
            raw,
            unsupported_mass,
        }
    }
}

/// `-H(P) - D(P‖Q) + ln Σ p_j` in nats; `None` when `D` is infinite.
fn per_use_exponent(p: &[f64], q: &[f64], log_total: f64) -> Option<f64> {
    let d = kl_nats(p, q);
    d.is_finite().then(|| -entropy_nats(p) - d + log_total)
}

/// General decoding-error lower bound over codeword types
/// `types[i] = P_{u(i)}`.
pub fn dep_lb_general(types: &[InputType], rp: &RegionProbs, n: u64) -> Result<DepBound> {
    if types.is_empty() {
        return Err(Error::invalid("need at least one codeword type"));
    }
    if n == 0 {
        return Err(Error::invalid("block length must be at least 1"));
    }
    for t in types {
        check_len(t, rp.len(), "the region probabilities")?;
    }
    let q = q_pmf(rp)?;
    let log_total = rp.total().ln();
    let nf = n as f64;
    let mut unsupported = false;
    let mut success = 0.0;
    for t in types {
        match per_use_exponent(t.probs(), q.probs(), log_total) {
            Some(e) => success += (nf * e).exp(),
            None => unsupported = true,
        }
    }
    let mean = success / types.len() as f64;
    Ok(DepBound::from_raw(1.0 - mean, unsupported))
}

/// Decoding-error lower bound for a homogeneous code of type `p`.
pub fn dep_lb_homogeneous(p: &InputType, rp: &RegionProbs, n: u64) -> Result<DepBound> {
    if n == 0 {
        return Err(Error::invalid("block length must be at least 1"));
    }
    check_len(p, rp.len(), "the region probabilities")?;
    let q = q_pmf(rp)?;
    match per_use_exponent(p.probs(), q.probs(), rp.total().ln()) {
        // 1 - e^x without cancellation for small x
        Some(e) => Ok(DepBound::from_raw(-(n as f64 * e).exp_m1(), false)),
        None => Ok(DepBound::from_raw(1.0, true)),
    }
}

/// `(1/n) log₂( n! / Π c_ℓ! )` in bits per channel use.
pub fn rate_ub_exact(c: &SymbolCounts) -> f64 {
    let r = multinomial_log2(c) / c.n() as f64;
    debug_assert!(r <= (c.len() as f64).log2() + 1e-12);
    r
}

/// Stirling relaxation of the multinomial rate bound over a strictly
/// positive pmf, with every logarithm in base 2:
///
/// `H(p) + (1/n²)(1/12 - Σ 1/(12 p_ℓ + 1))
///  + (1/n)(log √(2π) - Σ log √(2π p_ℓ)) - (log n / n)(L - 1)/2`.
pub fn stirling_rate_bound(probs: &[f64], n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("block length must be at least 1"));
    }
    if probs.is_empty() {
        return Err(Error::invalid("empty pmf"));
    }
    if let Some(i) = probs.iter().position(|&p| !(p > 0.0)) {
        return Err(Error::invalid(format!(
            "symbol {} has zero probability; restrict the pmf to its support first",
            i + 1
        )));
    }
    let nf = n as f64;
    let l = probs.len() as f64;
    let two_pi = 2.0 * std::f64::consts::PI;
    let h: f64 = -probs.iter().map(|&p| p * p.log2()).sum::<f64>();
    let second =
        (1.0 / 12.0 - probs.iter().map(|&p| 1.0 / (12.0 * p + 1.0)).sum::<f64>()) / (nf * nf);
    let first = (0.5 * two_pi.log2()
        - probs
            .iter()
            .map(|&p| 0.5 * (two_pi * p).log2())
            .sum::<f64>())
        / nf;
    let log_term = nf.log2() / nf * (l - 1.0) / 2.0;
    Ok(h + second + first - log_term)
}

/// [`stirling_rate_bound`] applied to the support of `p`.
pub fn rate_ub_stirling(p: &InputType, n: u64) -> Result<f64> {
    let support: Vec<f64> = p.probs().iter().copied().filter(|&v| v > 0.0).collect();
    stirling_rate_bound(&support, n)
}

/// All bounds for one type.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub schema_version: u32,
    pub probs: Vec<f64>,
    pub counts: Vec<u64>,
    pub n: u64,
    pub delta: f64,
    pub sigma2: f64,
    pub harvester: HarvesterModel,
    /// bits per channel use
    pub rate_ub_exact: f64,
    /// bits per channel use
    pub rate_ub_stirling: f64,
    /// energy units per channel use
    pub energy_rate_ub: f64,
    pub mean_expected_energy: f64,
    pub dep_lb: f64,
    pub dep_lb_raw: f64,
    pub dep_lb_unsupported_mass: bool,
    pub region_probs: Vec<f64>,
    pub region_method: RegionMethod,
    pub region_est_error: f64,
    pub energy_threshold: Option<f64>,
    pub eop_lb: Option<f64>,
    /// A published or externally computed rate to compare against.
    pub reference_rate_ub: Option<f64>,
    /// `rate_ub_exact - reference_rate_ub`
    pub reference_rate_gap: Option<f64>,
    /// Set when the gap exceeds [`REFERENCE_RATE_TOLERANCE`].
    pub reference_rate_discrepancy: bool,
}

/// Inputs of [`bounds_report`] beyond the type itself.
#[derive(Clone, Debug)]
pub struct ReportInputs<'a> {
    pub constellation: &'a Constellation,
    pub n: u64,
    pub delta: f64,
    pub ch: ChannelParams,
    pub harvester: HarvesterModel,
    pub energy_threshold: Option<f64>,
    pub reference_rate_ub: Option<f64>,
}

/// Rate, energy and decoding-error bounds of a homogeneous code of type `p`.
/// The exact rate uses `rationalize(p, n)`.
pub fn bounds_report(
    p: &InputType,
    inputs: &ReportInputs<'_>,
    rp: &RegionProbs,
) -> Result<BoundsReport> {
    let c = inputs.constellation;
    check_len(p, c.len(), "the constellation")?;
    let counts = rationalize(p, inputs.n)?;
    let mean_energy = mean_expected_energy(c, p, &inputs.ch, &inputs.harvester)?;
    let energy = energy_rate_ub(c, p, inputs.delta, &inputs.ch, &inputs.harvester)?;
    let dep = dep_lb_homogeneous(p, rp, inputs.n)?;
    let eop = inputs
        .energy_threshold
        .map(|b| eop_lb(c, p, b, &inputs.ch, &inputs.harvester))
        .transpose()?;
    let rate_exact = rate_ub_exact(&counts);
    let gap = inputs.reference_rate_ub.map(|r| rate_exact - r);
    Ok(BoundsReport {
        schema_version: SCHEMA_VERSION,
        probs: p.probs().to_vec(),
        counts: counts.counts().to_vec(),
        n: inputs.n,
        delta: inputs.delta,
        sigma2: inputs.ch.sigma2(),
        harvester: inputs.harvester,
        rate_ub_exact: rate_exact,
        rate_ub_stirling: rate_ub_stirling(p, inputs.n)?,
        energy_rate_ub: energy,
        mean_expected_energy: mean_energy,
        dep_lb: dep.value,
        dep_lb_raw: dep.raw,
        dep_lb_unsupported_mass: dep.unsupported_mass,
        region_probs: rp.p.clone(),
        region_method: rp.method,
        region_est_error: rp.est_error,
        energy_threshold: inputs.energy_threshold,
        eop_lb: eop,
        reference_rate_ub: inputs.reference_rate_ub,
        reference_rate_gap: gap,
        reference_rate_discrepancy: gap.is_some_and(|g| g.abs() > REFERENCE_RATE_TOLERANCE),
    })
}
