//! Symbol-wise MAP detection.
//!
//! Decision regions are never stored. A point `y` belongs to region `ℓ` when
//! `ℓ` maximizes `ln π_ℓ - |y - x_ℓ|²/σ²` over the symbols with positive
//! prior, with ties going to the lowest index.
//!
//! Correct-detection probabilities `p_ℓ = Pr[Y ∈ E_ℓ | X = x_ℓ]` are computed
//! by one of three routes:
//!
//! * closed form, for a uniform prior on a full Cartesian grid, where the
//!   regions are products of intervals bounded by coordinate midpoints;
//! * quadrature, for everything else: each region is a convex polygon (an
//!   intersection of half-planes), and its Gaussian mass is integrated along
//!   one axis with the other axis handled by the normal CDF;
//! * Monte Carlo, which applies [`MapDetector::classify`] to sampled outputs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelParams, NoiseStream};
use crate::constellation::{ComplexSymbol, Constellation};
use crate::error::{Error, Result};
use crate::normal;
use crate::typespace::InputType;

/// Default Monte Carlo sample count per symbol.
pub const DEFAULT_REGION_SAMPLES: u64 = 1_000_000;

/// MAP symbol detector for a given prior.
#[derive(Clone, Debug)]
pub struct MapDetector {
    constellation: Constellation,
    prior: InputType,
    log_prior: Vec<f64>,
    ch: ChannelParams,
}

impl MapDetector {
    pub fn new(
        constellation: &Constellation,
        prior: &InputType,
        ch: ChannelParams,
    ) -> Result<Self> {
        if prior.len() != constellation.len() {
            return Err(Error::invalid(format!(
                "prior has {} entries but the constellation has {} symbols",
                prior.len(),
                constellation.len()
            )));
        }
        if prior.probs().iter().all(|&p| p <= 0.0) {
            return Err(Error::invalid("prior has no positive entry"));
        }
        let log_prior = prior
            .probs()
            .iter()
            .map(|&p| if p > 0.0 { p.ln() } else { f64::NEG_INFINITY })
            .collect();
        Ok(Self {
            constellation: constellation.clone(),
            prior: prior.clone(),
            log_prior,
            ch,
        })
    }

    pub fn constellation(&self) -> &Constellation {
        &self.constellation
    }

    pub fn prior(&self) -> &InputType {
        &self.prior
    }

    pub fn channel(&self) -> &ChannelParams {
        &self.ch
    }

    /// Index of the region containing `y`.
    pub fn classify(&self, y: ComplexSymbol) -> usize {
        let inv = 1.0 / self.ch.sigma2();
        let mut best = usize::MAX;
        let mut best_metric = f64::NEG_INFINITY;
        for (i, (&x, &lp)) in self
            .constellation
            .symbols()
            .iter()
            .zip(&self.log_prior)
            .enumerate()
        {
            if lp == f64::NEG_INFINITY {
                continue;
            }
            let metric = lp - (y - x).norm_sqr() * inv;
            if best == usize::MAX || metric > best_metric {
                best = i;
                best_metric = metric;
            }
        }
        best
    }
}

/// How a [`RegionProbs`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionMethod {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

/// Which route [`region_probs`] should take.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionSampler {
    /// Closed form when it applies, quadrature otherwise.
    Auto,
    Quadrature,
    MonteCarlo {
        samples_per_symbol: u64,
        seed: u64,
    },
}

/// Correct-detection probability of every symbol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionProbs {
    pub p: Vec<f64>,
    pub method: RegionMethod,
    /// Closed form: 0. Quadrature: difference between two rule orders.
    /// Monte Carlo: largest per-symbol standard error.
    pub est_error: f64,
    /// Monte Carlo only: per-symbol standard errors.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stderr: Vec<f64>,
}

impl RegionProbs {
    /// Wraps externally computed region integrals.
    pub fn from_values(p: Vec<f64>, method: RegionMethod) -> Result<Self> {
        if p.is_empty()
            || p.iter()
                .any(|v| !(v.is_finite() && (0.0..=1.0).contains(v)))
        {
            return Err(Error::invalid("region probabilities must lie in [0, 1]"));
        }
        Ok(Self {
            p,
            method,
            est_error: 0.0,
            stderr: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }
}

pub fn region_probs(d: &MapDetector, sampler: RegionSampler) -> RegionProbs {
    match sampler {
        RegionSampler::Auto => {
            region_probs_closed_form(d).unwrap_or_else(|| region_probs_quadrature(d))
        }
        RegionSampler::Quadrature => region_probs_quadrature(d),
        RegionSampler::MonteCarlo {
            samples_per_symbol,
            seed,
        } => region_probs_monte_carlo(d, samples_per_symbol, seed),
    }
}

/// Product-of-intervals evaluation; `None` unless the prior is uniform and
/// the constellation is a full Cartesian grid.
pub fn region_probs_closed_form(d: &MapDetector) -> Option<RegionProbs> {
    if !d.prior.is_uniform() {
        return None;
    }
    let (re_axis, im_axis) = d.constellation.product_grid()?;
    let s = d.ch.component_std();
    let axis_prob = |axis: &[f64], v: f64| -> f64 {
        let k = axis
            .iter()
            .position(|&a| a == v)
            .expect("coordinate on grid");
        let lo = if k == 0 {
            f64::NEG_INFINITY
        } else {
            0.5 * (axis[k - 1] + axis[k])
        };
        let hi = if k + 1 == axis.len() {
            f64::INFINITY
        } else {
            0.5 * (axis[k] + axis[k + 1])
        };
        normal::interval((lo - v) / s, (hi - v) / s)
    };
    let p = d
        .constellation
        .symbols()
        .iter()
        .map(|x| axis_prob(&re_axis, x.re) * axis_prob(&im_axis, x.im))
        .collect();
    Some(RegionProbs {
        p,
        method: RegionMethod::ClosedForm,
        est_error: 0.0,
        stderr: Vec::new(),
    })
}

/// Half-plane `a1·u1 + a2·u2 >= c` in standardized noise coordinates.
#[derive(Clone, Copy, Debug)]
struct HalfPlane {
    a1: f64,
    a2: f64,
    c: f64,
}

/// Coefficients below this are treated as zero when a half-plane is
/// (nearly) vertical in the `(u1, u2)` frame.
const VERTICAL_EPS: f64 = 1e-13;
/// Integration range on the first standardized axis; `φ` beyond it is below 1e-18.
const U_MAX: f64 = 9.0;
const PIECE_WIDTH: f64 = 0.5;
const FINE_ORDER: usize = 24;
const COARSE_ORDER: usize = 12;

/// Half-planes whose intersection is region `ℓ`, expressed in the
/// standardized coordinates `u = (y - x_ℓ)/s`, `s = sqrt(σ²/2)`.
fn region_half_planes(d: &MapDetector, l: usize) -> Vec<HalfPlane> {
    let x = d.constellation.symbols();
    let s = d.ch.component_std();
    let s2 = d.ch.sigma2();
    let xl = x[l];
    let mut planes = Vec::with_capacity(x.len());
    for (j, &xj) in x.iter().enumerate() {
        if j == l || d.log_prior[j] == f64::NEG_INFINITY {
            continue;
        }
        // 2 y·(x_ℓ - x_j) >= |x_ℓ|² - |x_j|² + σ² ln(π_j/π_ℓ)
        let a = (xl - xj) * 2.0;
        let b = xl.norm_sqr() - xj.norm_sqr() + s2 * (d.log_prior[j] - d.log_prior[l]);
        let c = b - (a.re * xl.re + a.im * xl.im);
        let norm = a.abs();
        planes.push(HalfPlane {
            a1: a.re / norm,
            a2: a.im / norm,
            c: c / (s * norm),
        });
    }
    planes
}

/// Conditional mass `Pr[u ∈ region | u1]` (without the `φ(u1)` factor).
fn slice_mass(planes: &[HalfPlane], u1: f64) -> f64 {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for h in planes {
        if h.a2.abs() < VERTICAL_EPS {
            if h.a1 * u1 < h.c {
                return 0.0;
            }
        } else {
            let t = (h.c - h.a1 * u1) / h.a2;
            if h.a2 > 0.0 {
                lo = lo.max(t);
            } else {
                hi = hi.min(t);
            }
        }
    }
    normal::interval(lo, hi)
}

/// Breakpoints of `slice_mass` on `[-U_MAX, U_MAX]`: a regular grid plus every
/// abscissa where the active constraint set can change.
fn breakpoints(planes: &[HalfPlane]) -> Vec<f64> {
    let mut pts: Vec<f64> = Vec::new();
    let steps = (2.0 * U_MAX / PIECE_WIDTH).round() as usize;
    pts.extend((0..=steps).map(|k| -U_MAX + k as f64 * PIECE_WIDTH));
    for (i, h) in planes.iter().enumerate() {
        if h.a2.abs() < VERTICAL_EPS {
            pts.push(h.c / h.a1);
        }
        for g in &planes[i + 1..] {
            let det = h.a1 * g.a2 - h.a2 * g.a1;
            if det.abs() > 1e-14 {
                pts.push((h.c * g.a2 - h.a2 * g.c) / det);
            }
        }
    }
    pts.retain(|&u| u.is_finite() && (-U_MAX..=U_MAX).contains(&u));
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    pts
}

fn integrate_region(planes: &[HalfPlane], pts: &[f64], rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let (nodes, weights) = rule;
    let mut total = 0.0;
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut piece = 0.0;
        for (t, wt) in nodes.iter().zip(weights) {
            let u1 = mid + half * t;
            piece += wt * normal::pdf(u1) * slice_mass(planes, u1);
        }
        total += half * piece;
    }
    total
}

/// Gaussian mass of every MAP region by piecewise Gauss–Legendre quadrature.
pub fn region_probs_quadrature(d: &MapDetector) -> RegionProbs {
    let fine = normal::gauss_legendre(FINE_ORDER);
    let coarse = normal::gauss_legendre(COARSE_ORDER);
    let results: Vec<(f64, f64)> = (0..d.constellation.len())
        .into_par_iter()
        .map(|l| {
            if d.log_prior[l] == f64::NEG_INFINITY {
                return (0.0, 0.0);
            }
            let planes = region_half_planes(d, l);
            let pts = breakpoints(&planes);
            let hi = integrate_region(&planes, &pts, &fine);
            let lo = integrate_region(&planes, &pts, &coarse);
            (hi.clamp(0.0, 1.0), (hi - lo).abs())
        })
        .collect();
    RegionProbs {
        p: results.iter().map(|r| r.0).collect(),
        method: RegionMethod::Quadrature,
        est_error: results.iter().map(|r| r.1).fold(0.0, f64::max),
        stderr: Vec::new(),
    }
}

const MC_CHUNK: u64 = 1 << 16;

/// Fraction of `samples_per_symbol` noisy copies of each symbol that
/// [`MapDetector::classify`] maps back to it. Symbol `ℓ`, chunk `k` draws from
/// stream id `(ℓ << 32) | k`.
pub fn region_probs_monte_carlo(
    d: &MapDetector,
    samples_per_symbol: u64,
    seed: u64,
) -> RegionProbs {
    let samples = samples_per_symbol.max(1);
    let chunks = samples.div_ceil(MC_CHUNK);
    let l_count = d.constellation.len();
    let hits: Vec<u64> = (0..l_count)
        .map(|l| {
            if d.log_prior[l] == f64::NEG_INFINITY {
                return 0;
            }
            let x = d.constellation.symbol(l);
            (0..chunks)
                .into_par_iter()
                .map(|k| {
                    let mut src = NoiseStream::new(seed, ((l as u64) << 32) | k).source();
                    let todo = MC_CHUNK.min(samples - k * MC_CHUNK);
                    (0..todo)
                        .filter(|_| d.classify(x + src.complex_noise(&d.ch)) == l)
                        .count() as u64
                })
                .sum()
        })
        .collect();
    let nf = samples as f64;
    let p: Vec<f64> = hits.iter().map(|&h| h as f64 / nf).collect();
    let stderr: Vec<f64> = p.iter().map(|&v| (v * (1.0 - v) / nf).sqrt()).collect();
    RegionProbs {
        est_error: stderr.iter().copied().fold(0.0, f64::max),
        p,
        method: RegionMethod::MonteCarlo,
        stderr,
    }
}

/// `Q_ℓ = p_ℓ / Σ_j p_j`.
pub fn q_pmf(rp: &RegionProbs) -> Result<InputType> {
    let total = rp.total();
    if !(total > 0.0) {
        return Err(Error::DegenerateDetector);
    }
    InputType::from_weights(&rp.p)
}

/// Per symbol, the candidate region with the smallest correct-detection
/// integral (first listed on ties). `candidates[ℓ]` lists the integrals of
/// the distinct per-position regions used for symbol `ℓ`.
pub fn min_region_select(candidates: &[Vec<f64>]) -> Result<Vec<(usize, f64)>> {
    if candidates.is_empty() {
        return Err(Error::invalid("no symbols given"));
    }
    candidates
        .iter()
        .enumerate()
        .map(|(l, c)| {
            if c.is_empty() {
                return Err(Error::invalid(format!(
                    "symbol {} has no candidate region",
                    l + 1
                )));
            }
            let mut best = 0;
            for (k, &v) in c.iter().enumerate().skip(1) {
                if v < c[best] {
                    best = k;
                }
            }
            Ok((best, c[best]))
        })
        .collect()
}
