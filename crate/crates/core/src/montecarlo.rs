//! Seeded link simulation of homogeneous codes.
//!
//! Trial `t` of a decoding-error run draws from stream `t` of the seed; trial
//! `t` of an energy-outage run from stream `t | 2^63`, so the information
//! and energy branches see independent noise even under one seed. Trials
//! are tallied as integers, so results do not depend on thread scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{dep_lb_homogeneous, eop_lb, rate_ub_exact, SCHEMA_VERSION};
use crate::channel::{ChannelParams, NoiseStream};
use crate::codec::HomogeneousCode;
use crate::constellation::Constellation;
use crate::detection::{region_probs, MapDetector, RegionProbs, RegionSampler};
use crate::error::{Error, Result};
use crate::harvester::HarvesterModel;
use crate::typespace::InputType;

/// Below this analytic error probability the Monte Carlo comparison is
/// skipped and flagged.
pub const RARE_EVENT_THRESHOLD: f64 = 1e-8;

/// Width of the agreement and dominance checks, in standard errors.
pub const CHECK_SIGMAS: f64 = 4.0;

const EOP_STREAM_OFFSET: u64 = 1 << 63;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepEstimate {
    pub dep_hat: f64,
    pub dep_stderr: f64,
    pub errors: u64,
    pub trials: u64,
    pub seed: u64,
    /// `1 - Π p_ℓ^{n P(ℓ)}`, exact for the symbol-wise MAP decoder.
    pub analytic_dep: f64,
    pub rare_event: bool,
}

impl DepEstimate {
    /// Standard error used for comparisons: the larger of the empirical one
    /// and the binomial one at `analytic_dep`, so that a run with zero
    /// observed errors is not treated as exact.
    pub fn check_stderr(&self) -> f64 {
        let a = self.analytic_dep;
        let null = (a * (1.0 - a) / self.trials as f64).sqrt();
        self.dep_stderr.max(null)
    }

    /// `|dep_hat - analytic_dep| <= 4·stderr`; `true` in the rare-event
    /// regime, where the comparison is skipped.
    pub fn consistent(&self) -> bool {
        self.rare_event
            || (self.dep_hat - self.analytic_dep).abs() <= CHECK_SIGMAS * self.check_stderr()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EopEstimate {
    pub eop_hat: f64,
    pub eop_stderr: f64,
    pub outages: u64,
    pub trials: u64,
    pub seed: u64,
    pub energy_threshold: f64,
}

fn binomial_stderr(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// `1 - Π_ℓ p_ℓ^{n P(ℓ)}` from region probabilities.
pub fn analytic_dep(ty: &InputType, rp: &RegionProbs, n: u64) -> f64 {
    let mut log_success = 0.0;
    for (&w, &p) in ty.probs().iter().zip(&rp.p) {
        if w > 0.0 {
            if p <= 0.0 {
                return 1.0;
            }
            log_success += n as f64 * w * p.ln();
        }
    }
    -log_success.exp_m1()
}

fn check_code_matches(code: &HomogeneousCode, detector: &MapDetector) -> Result<()> {
    let ty = code.code_type();
    if ty.len() != detector.constellation().len() {
        return Err(Error::invalid(format!(
            "code uses {} symbols but the constellation has {}",
            ty.len(),
            detector.constellation().len()
        )));
    }
    let mismatch = ty
        .probs()
        .iter()
        .zip(detector.prior().probs())
        .any(|(a, b)| (a - b).abs() > 1e-12);
    if mismatch {
        return Err(Error::invalid(
            "detector prior differs from the code type; the decoder would not be the homogeneous MAP decoder",
        ));
    }
    Ok(())
}

/// Empirical decoding-error probability of `code` under the symbol-wise MAP
/// decoder. A trial succeeds only if every symbol of the sent codeword is
/// recovered.
pub fn simulate_dep(
    code: &HomogeneousCode,
    detector: &MapDetector,
    trials: u64,
    seed: u64,
) -> Result<DepEstimate> {
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    check_code_matches(code, detector)?;
    let rp = region_probs(detector, RegionSampler::Auto);
    let analytic = analytic_dep(&code.code_type(), &rp, code.counts().n());
    let symbols = detector.constellation().symbols();
    let ch = *detector.channel();
    let m = code.messages() as u64;
    let errors = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let mut src = NoiseStream::new(seed, t).source();
            let msg = src.below(m) as usize;
            code.codewords()[msg]
                .iter()
                .any(|&s| detector.classify(symbols[s] + src.complex_noise(&ch)) != s)
        })
        .count() as u64;
    let dep_hat = errors as f64 / trials as f64;
    Ok(DepEstimate {
        dep_hat,
        dep_stderr: binomial_stderr(dep_hat, trials),
        errors,
        trials,
        seed,
        analytic_dep: analytic,
        rare_event: analytic < RARE_EVENT_THRESHOLD,
    })
}

/// Empirical energy-outage probability `Pr[ḡ(Z) < B]` averaged over
/// uniformly drawn messages.
pub fn simulate_eop(
    code: &HomogeneousCode,
    constellation: &Constellation,
    ch: &ChannelParams,
    m: &HarvesterModel,
    energy_threshold: f64,
    trials: u64,
    seed: u64,
) -> Result<EopEstimate> {
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    if !(energy_threshold >= 0.0 && energy_threshold.is_finite()) {
        return Err(Error::invalid(format!(
            "energy threshold must be nonnegative, got {energy_threshold}"
        )));
    }
    if code.counts().len() != constellation.len() {
        return Err(Error::invalid("code and constellation sizes differ"));
    }
    let symbols = constellation.symbols();
    let msgs = code.messages() as u64;
    let n = code.block_length() as f64;
    let outages = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let mut src = NoiseStream::new(seed, EOP_STREAM_OFFSET | t).source();
            let msg = src.below(msgs) as usize;
            let total: f64 = code.codewords()[msg]
                .iter()
                .map(|&s| m.energy(symbols[s] + src.complex_noise(ch)))
                .sum();
            total / n < energy_threshold
        })
        .count() as u64;
    let eop_hat = outages as f64 / trials as f64;
    Ok(EopEstimate {
        eop_hat,
        eop_stderr: binomial_stderr(eop_hat, trials),
        outages,
        trials,
        seed,
        energy_threshold,
    })
}

/// One bound-versus-simulation assertion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub skipped: bool,
    /// `lhs - rhs` of the `lhs >= rhs` assertion.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationLedger {
    pub schema_version: u32,
    pub dep: DepEstimate,
    pub eop: EopEstimate,
    pub dep_lb: f64,
    pub eop_lb: f64,
    pub rate: f64,
    pub rate_ub_exact: f64,
    pub delta_target: f64,
    pub energy_rate_ub: f64,
    pub checks: Vec<Check>,
}

impl ValidationLedger {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Runs both simulations and checks them against the bounds:
/// (a) `dep_hat + 4σ >= dep_lb`, (b) `eop_hat + 4σ >= eop_lb`,
/// (c) `log₂ M / n <= rate_ub_exact`.
pub fn validate_bounds(
    code: &HomogeneousCode,
    detector: &MapDetector,
    m: &HarvesterModel,
    energy_threshold: f64,
    delta_target: f64,
    trials: u64,
    seed: u64,
) -> Result<ValidationLedger> {
    let c = detector.constellation();
    let ch = detector.channel();
    let ty = code.code_type();
    let n = code.counts().n();
    let dep = simulate_dep(code, detector, trials, seed)?;
    let eop = simulate_eop(code, c, ch, m, energy_threshold, trials, seed)?;
    let rp = region_probs(detector, RegionSampler::Auto);
    let dep_lb = dep_lb_homogeneous(&ty, &rp, n)?.value;
    let eop_bound = if energy_threshold > 0.0 {
        eop_lb(c, &ty, energy_threshold, ch, m)?
    } else {
        0.0
    };
    let energy_ub = crate::bounds::energy_rate_ub(c, &ty, delta_target, ch, m)?;
    let rate = code.rate();
    let rate_ub = rate_ub_exact(code.counts());

    let dep_margin = dep.dep_hat + CHECK_SIGMAS * dep.check_stderr() - dep_lb;
    let eop_margin = eop.eop_hat + CHECK_SIGMAS * eop.eop_stderr - eop_bound;
    let rate_margin = rate_ub - rate;
    let checks = vec![
        Check {
            name: "dep_dominates_bound".into(),
            passed: dep.rare_event || dep_margin >= 0.0,
            skipped: dep.rare_event,
            margin: dep_margin,
        },
        Check {
            name: "eop_dominates_bound".into(),
            passed: eop_margin >= 0.0,
            skipped: false,
            margin: eop_margin,
        },
        Check {
            name: "rate_below_multinomial_bound".into(),
            passed: rate_margin >= -1e-9,
            skipped: false,
            margin: rate_margin,
        },
    ];
    Ok(ValidationLedger {
        schema_version: SCHEMA_VERSION,
        dep,
        eop,
        dep_lb,
        eop_lb: eop_bound,
        rate,
        rate_ub_exact: rate_ub,
        delta_target,
        energy_rate_ub: energy_ub,
        checks,
    })
}

/// Output of the `simulate` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub schema_version: u32,
    pub n: u64,
    pub messages: u64,
    pub sigma2: f64,
    pub counts: Vec<u64>,
    pub dep: DepEstimate,
    pub eop: Option<EopEstimate>,
}
