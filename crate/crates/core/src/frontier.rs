//! Sweeps over a one-parameter family of types, tracing the rate–energy and
//! energy–decoding-error trade-offs.
//!
//! The family mixes the uniform type with the uniform type over the
//! symbols of largest expected harvested energy:
//! `P_λ = (1-λ)·U(all) + λ·U(top group)`. The MAP prior follows the type,
//! so region probabilities are recomputed for every λ.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{bounds_report, ReportInputs};
use crate::channel::ChannelParams;
use crate::constellation::Constellation;
use crate::detection::{region_probs, MapDetector, RegionSampler};
use crate::error::{Error, Result};
use crate::harvester::HarvesterModel;
use crate::output::{sig12, write_rows};
use crate::typespace::{InputType, SymbolCounts};

/// Relative tolerance for grouping symbols of equal expected energy.
const ENERGY_TIE: f64 = 1e-12;
/// Coarse λ grid used to bracket a decoding-error target.
const BRACKET_POINTS: usize = 33;
const BISECTION_TOL: f64 = 1e-9;
pub const MAX_BISECTIONS: usize = 60;

/// Symbols sorted by expected harvested energy, descending (stable).
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyOrder {
    order: Vec<usize>,
    energies: Vec<f64>,
}

impl EnergyOrder {
    pub fn new(c: &Constellation, ch: &ChannelParams, m: &HarvesterModel) -> Self {
        let energies: Vec<f64> = c
            .symbols()
            .iter()
            .map(|&x| m.expected_energy(x, ch))
            .collect();
        let mut order: Vec<usize> = (0..energies.len()).collect();
        order.sort_by(|&a, &b| energies[b].total_cmp(&energies[a]));
        Self { order, energies }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Expected energy of each symbol, by symbol index.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Symbols tied for the largest expected energy, in index order.
    pub fn top_group(&self) -> Vec<usize> {
        let max = self.energies[self.order[0]];
        let mut g: Vec<usize> = self
            .order
            .iter()
            .copied()
            .take_while(|&i| self.energies[i] >= max * (1.0 - ENERGY_TIE))
            .collect();
        g.sort_unstable();
        g
    }
}

/// `(1-λ)·uniform + λ·uniform(top group)`.
pub fn interpolation_family(lambda: f64, order: &EnergyOrder) -> Result<InputType> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::invalid(format!(
            "λ must lie in [0, 1], got {lambda}"
        )));
    }
    let l = order.len();
    let top = order.top_group();
    let base = (1.0 - lambda) / l as f64;
    let bump = lambda / top.len() as f64;
    let mut probs = vec![base; l];
    for &i in &top {
        probs[i] += bump;
    }
    if lambda == 1.0 {
        // exact zeros off the top group
        for (i, p) in probs.iter_mut().enumerate() {
            if !top.contains(&i) {
                *p = 0.0;
            }
        }
    }
    InputType::new(probs)
}

/// Everything a sweep needs besides the λ values.
#[derive(Clone, Debug)]
pub struct FrontierSetup {
    pub constellation: Constellation,
    pub ch: ChannelParams,
    pub harvester: HarvesterModel,
    pub n: u64,
    pub delta: f64,
    pub sampler: RegionSampler,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    pub lambda: f64,
    pub probs: Vec<f64>,
    pub rate_ub_exact: f64,
    pub rate_ub_stirling: f64,
    pub energy_ub: f64,
    pub dep_lb: f64,
    pub delta: f64,
    pub feasible: bool,
    pub dep_target: Option<f64>,
}

impl FrontierSetup {
    fn sampler_for(&self, index: usize) -> RegionSampler {
        match self.sampler {
            RegionSampler::MonteCarlo {
                samples_per_symbol,
                seed,
            } => RegionSampler::MonteCarlo {
                samples_per_symbol,
                seed: seed.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
            },
            s => s,
        }
    }

    /// Bounds for an arbitrary type.
    pub fn evaluate_type(
        &self,
        ty: &InputType,
        lambda: f64,
        index: usize,
    ) -> Result<FrontierPoint> {
        let d = MapDetector::new(&self.constellation, ty, self.ch)?;
        let rp = region_probs(&d, self.sampler_for(index));
        let inputs = ReportInputs {
            constellation: &self.constellation,
            n: self.n,
            delta: self.delta,
            ch: self.ch,
            harvester: self.harvester,
            energy_threshold: None,
            reference_rate_ub: None,
        };
        let r = bounds_report(ty, &inputs, &rp)?;
        Ok(FrontierPoint {
            lambda,
            probs: r.probs,
            rate_ub_exact: r.rate_ub_exact,
            rate_ub_stirling: r.rate_ub_stirling,
            energy_ub: r.energy_rate_ub,
            dep_lb: r.dep_lb,
            delta: self.delta,
            feasible: true,
            dep_target: None,
        })
    }

    fn evaluate(&self, order: &EnergyOrder, lambda: f64, index: usize) -> Result<FrontierPoint> {
        self.evaluate_type(&interpolation_family(lambda, order)?, lambda, index)
    }

    pub fn energy_order(&self) -> EnergyOrder {
        EnergyOrder::new(&self.constellation, &self.ch, &self.harvester)
    }
}

/// Evenly spaced grid `0, 1/(k-1), …, 1`.
pub fn lambda_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        k => (0..k).map(|i| i as f64 / (k - 1) as f64).collect(),
    }
}

/// One [`FrontierPoint`] per λ, in grid order.
pub fn sweep(setup: &FrontierSetup, grid: &[f64]) -> Result<Vec<FrontierPoint>> {
    if grid.is_empty() {
        return Err(Error::invalid("λ grid is empty"));
    }
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::invalid("λ grid must be sorted ascending"));
    }
    let order = setup.energy_order();
    grid.par_iter()
        .enumerate()
        .map(|(i, &l)| setup.evaluate(&order, l, i))
        .collect()
}

/// [`sweep`] repeated for each outage probability in `deltas`.
pub fn sweep_deltas(
    setup: &FrontierSetup,
    grid: &[f64],
    deltas: &[f64],
) -> Result<Vec<FrontierPoint>> {
    let mut out = Vec::with_capacity(grid.len() * deltas.len());
    for &d in deltas {
        let s = FrontierSetup {
            delta: d,
            ..setup.clone()
        };
        out.extend(sweep(&s, grid)?);
    }
    Ok(out)
}

/// For each decoding-error target, the family member of largest energy
/// bound whose decoding-error bound does not exceed the target.
///
/// Feasibility is bracketed on a coarse λ grid and the boundary refined by
/// bisection to `|Δλ| < 1e-9`. Unreachable targets yield a point with
/// `feasible = false` carrying the λ = 0 values.
pub fn dep_energy_curve(setup: &FrontierSetup, targets: &[f64]) -> Result<Vec<FrontierPoint>> {
    if targets.is_empty() {
        return Err(Error::invalid("no decoding-error targets"));
    }
    if let Some(t) = targets.iter().find(|t| !(**t > 0.0 && **t <= 1.0)) {
        return Err(Error::invalid(format!(
            "decoding-error targets must lie in (0, 1], got {t}"
        )));
    }
    let order = setup.energy_order();
    let grid = lambda_grid(BRACKET_POINTS);
    let coarse = sweep(setup, &grid)?;
    targets
        .par_iter()
        .enumerate()
        .map(|(ti, &target)| {
            let feasible = |p: &FrontierPoint| p.dep_lb <= target;
            let Some(k) = coarse.iter().rposition(feasible) else {
                let mut p = coarse[0].clone();
                p.feasible = false;
                p.dep_target = Some(target);
                return Ok(p);
            };
            let mut best = coarse[k].clone();
            if k + 1 < coarse.len() {
                let (mut lo, mut hi) = (grid[k], grid[k + 1]);
                let mut iterations = 0;
                while hi - lo > BISECTION_TOL && iterations < MAX_BISECTIONS {
                    let mid = 0.5 * (lo + hi);
                    let p = setup.evaluate(
                        &order,
                        mid,
                        BRACKET_POINTS + ti * MAX_BISECTIONS + iterations,
                    )?;
                    if feasible(&p) {
                        lo = mid;
                        best = p;
                    } else {
                        hi = mid;
                    }
                    iterations += 1;
                }
            }
            best.dep_target = Some(target);
            Ok(best)
        })
        .collect()
}

/// Every rational type with denominator `n`, for small alphabets only.
/// These points are not family members; their λ is reported as 0.
pub fn exhaustive_types(setup: &FrontierSetup) -> Result<Vec<FrontierPoint>> {
    let l = setup.constellation.len();
    if l > 4 || setup.n > 64 {
        return Err(Error::invalid(
            "exhaustive mode is limited to L <= 4 and n <= 64",
        ));
    }
    let mut compositions = Vec::new();
    let mut cur = vec![0u64; l];
    compose(setup.n, 0, &mut cur, &mut compositions);
    compositions
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let ty = InputType::from_counts(&SymbolCounts::new(c.clone())?);
            setup.evaluate_type(&ty, 0.0, i)
        })
        .collect()
}

fn compose(remaining: u64, pos: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if pos + 1 == cur.len() {
        cur[pos] = remaining;
        out.push(cur.clone());
        return;
    }
    for k in 0..=remaining {
        cur[pos] = k;
        compose(remaining - k, pos + 1, cur, out);
    }
}

/// Points not dominated in (`rate_ub_exact`, `energy_ub`), sorted by energy.
pub fn pareto_front(points: &[FrontierPoint]) -> Vec<FrontierPoint> {
    let mut sorted: Vec<&FrontierPoint> = points.iter().collect();
    sorted.sort_by(|a, b| {
        b.energy_ub
            .total_cmp(&a.energy_ub)
            .then(b.rate_ub_exact.total_cmp(&a.rate_ub_exact))
    });
    let mut front = Vec::new();
    let mut best_rate = f64::NEG_INFINITY;
    for p in sorted {
        if p.rate_ub_exact > best_rate {
            best_rate = p.rate_ub_exact;
            front.push(p.clone());
        }
    }
    front.reverse();
    front
}

/// Largest rate shortfall of `family` against `front`: for each front point,
/// how far the best family rate at no smaller energy falls below it.
pub fn family_gap(family: &[FrontierPoint], front: &[FrontierPoint]) -> f64 {
    front
        .iter()
        .map(|f| {
            let best = family
                .iter()
                .filter(|p| p.energy_ub >= f.energy_ub * (1.0 - 1e-12))
                .map(|p| p.rate_ub_exact)
                .fold(f64::NEG_INFINITY, f64::max);
            (f.rate_ub_exact - best).max(0.0)
        })
        .fold(0.0, f64::max)
}

/// CSV: `lambda,p_1..p_L,rate_ub_exact,rate_ub_stirling,energy_ub,dep_lb,delta`,
/// plus `dep_target,feasible` when any point carries a target.
pub fn write_csv<W: Write>(points: &[FrontierPoint], w: W) -> Result<()> {
    let l = points.first().map_or(0, |p| p.probs.len());
    let with_target = points.iter().any(|p| p.dep_target.is_some());
    let mut header = vec!["lambda".to_string()];
    header.extend((1..=l).map(|i| format!("p_{i}")));
    header.extend(
        [
            "rate_ub_exact",
            "rate_ub_stirling",
            "energy_ub",
            "dep_lb",
            "delta",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    if with_target {
        header.push("dep_target".into());
        header.push("feasible".into());
    }
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| {
            let mut r = vec![sig12(p.lambda)];
            r.extend(p.probs.iter().map(|&v| sig12(v)));
            r.extend(
                [
                    p.rate_ub_exact,
                    p.rate_ub_stirling,
                    p.energy_ub,
                    p.dep_lb,
                    p.delta,
                ]
                .map(sig12),
            );
            if with_target {
                r.push(p.dep_target.map(sig12).unwrap_or_default());
                r.push(p.feasible.to_string());
            }
            r
        })
        .collect();
    write_rows(w, &header, &rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::ComplexSymbol;

    fn qam16_setup() -> FrontierSetup {
        FrontierSetup {
            constellation: Constellation::rect_qam(16, 5.0).unwrap(),
            ch: ChannelParams::new(2.0).unwrap(),
            harvester: HarvesterModel::unit(),
            n: 80,
            delta: 1e-4,
            sampler: RegionSampler::Auto,
        }
    }

    #[test]
    fn family_endpoints_and_midpoint() {
        let s = qam16_setup();
        let order = s.energy_order();
        assert!(interpolation_family(0.0, &order).unwrap().is_uniform());
        let top = order.top_group();
        assert_eq!(top.len(), 4);
        for &i in &top {
            let x = s.constellation.symbol(i);
            assert_eq!((x.re.abs(), x.im.abs()), (15.0, 15.0));
        }
        let one = interpolation_family(1.0, &order).unwrap();
        for (i, p) in one.probs().iter().enumerate() {
            assert_eq!(*p, if top.contains(&i) { 0.25 } else { 0.0 });
        }
        let half = interpolation_family(0.5, &order).unwrap();
        for (i, p) in half.probs().iter().enumerate() {
            let expect = if top.contains(&i) {
                0.15625
            } else {
                1.0 / 32.0
            };
            assert!((p - expect).abs() < 1e-15);
        }
        assert!(interpolation_family(1.5, &order).is_err());
        let corner = s
            .constellation
            .index_of(ComplexSymbol::new(-15.0, 15.0))
            .unwrap();
        assert!(top.contains(&corner));
    }

    #[test]
    fn sweep_is_monotone_with_expected_endpoints() {
        let s = qam16_setup();
        let pts = sweep(&s, &lambda_grid(21)).unwrap();
        assert_eq!(pts.len(), 21);
        for w in pts.windows(2) {
            assert!(w[1].energy_ub >= w[0].energy_ub);
            assert!(w[1].rate_ub_exact <= w[0].rate_ub_exact);
        }
        assert!((pts[0].rate_ub_exact - 3.554).abs() < 0.002);
        assert!((pts[20].rate_ub_exact - 1.881).abs() < 0.002);
        assert!((pts[0].energy_ub - 84_768.48).abs() < 0.01);
        for p in &pts {
            assert!((0.0..=1.0).contains(&p.dep_lb));
            assert!(InputType::new(p.probs.clone()).is_ok());
        }
    }

    #[test]
    fn delta_scaling() {
        let s = qam16_setup();
        let pts = sweep_deltas(&s, &[0.3], &[0.0, 0.1, 0.5]).unwrap();
        assert!((pts[1].energy_ub - pts[0].energy_ub / 0.9).abs() < 1e-9 * pts[1].energy_ub);
        assert!((pts[2].energy_ub - 2.0 * pts[0].energy_ub).abs() < 1e-9 * pts[2].energy_ub);
    }

    #[test]
    fn grid_validation() {
        let s = qam16_setup();
        assert!(sweep(&s, &[]).is_err());
        assert!(sweep(&s, &[0.5, 0.2]).is_err());
        assert!(dep_energy_curve(&s, &[0.0]).is_err());
    }

    #[test]
    fn vacuous_target_selects_maximum_energy() {
        let s = qam16_setup();
        let pts = dep_energy_curve(&s, &[1.0]).unwrap();
        assert_eq!(pts[0].lambda, 1.0);
        assert!(pts[0].feasible);
    }

    #[test]
    fn bisection_locates_boundary_for_increasing_dep() {
        // the two top-energy symbols sit close together, so pushing mass onto
        // them raises the error bound
        let c = Constellation::new(
            vec![
                ComplexSymbol::new(3.0, 0.25),
                ComplexSymbol::new(3.0, -0.25),
                ComplexSymbol::new(0.0, 0.0),
                ComplexSymbol::new(-1.0, 0.0),
            ],
            None,
        )
        .unwrap();
        let s = FrontierSetup {
            constellation: c,
            ch: ChannelParams::new(0.1).unwrap(),
            harvester: HarvesterModel::new(1.0, 0.0, 1.0).unwrap(),
            n: 4,
            delta: 0.0,
            sampler: RegionSampler::Auto,
        };
        let grid = lambda_grid(11);
        let pts = sweep(&s, &grid).unwrap();
        for w in pts.windows(2) {
            assert!(
                w[1].dep_lb >= w[0].dep_lb,
                "{} -> {}",
                w[0].dep_lb,
                w[1].dep_lb
            );
        }
        let lo = pts[0].dep_lb;
        let hi = pts[10].dep_lb;
        let target = 0.5 * (lo + hi);
        let got = dep_energy_curve(&s, &[target]).unwrap().remove(0);
        assert!(got.feasible);
        assert!(got.dep_lb <= target);
        let beyond = s.evaluate(&s.energy_order(), got.lambda + 2e-9, 0).unwrap();
        assert!(beyond.dep_lb > target);
        let below = dep_energy_curve(&s, &[lo * 0.5]).unwrap().remove(0);
        assert!(!below.feasible);
    }

    #[test]
    fn exhaustive_front_contains_family_extremes() {
        let c = Constellation::new(
            vec![
                ComplexSymbol::new(1.0, 0.0),
                ComplexSymbol::new(0.0, 2.0),
                ComplexSymbol::new(-3.0, 0.0),
            ],
            None,
        )
        .unwrap();
        let s = FrontierSetup {
            constellation: c,
            ch: ChannelParams::new(1.0).unwrap(),
            harvester: HarvesterModel::unit(),
            n: 12,
            delta: 0.0,
            sampler: RegionSampler::Auto,
        };
        let all = exhaustive_types(&s).unwrap();
        assert_eq!(all.len(), 91); // C(14, 2)
        let front = pareto_front(&all);
        for w in front.windows(2) {
            assert!(w[1].energy_ub > w[0].energy_ub);
            assert!(w[1].rate_ub_exact < w[0].rate_ub_exact);
        }
        let family = sweep(&s, &[0.0, 1.0]).unwrap();
        // the uniform type reaches the highest rate, the top-energy point mass the highest energy
        assert!((front[0].rate_ub_exact - family[0].rate_ub_exact).abs() < 1e-12);
        assert!((front.last().unwrap().energy_ub - family[1].energy_ub).abs() < 1e-9);
        let fine = sweep(&s, &lambda_grid(13)).unwrap();
        assert!(family_gap(&fine, &front) < 1.0);
    }

    #[test]
    fn csv_layout() {
        let s = qam16_setup();
        let pts = sweep(&s, &[0.0]).unwrap();
        let mut buf = Vec::new();
        write_csv(&pts, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("lambda,p_1,p_2"));
        assert!(header.ends_with("p_16,rate_ub_exact,rate_ub_stirling,energy_ub,dep_lb,delta"));
        assert_eq!(lines.next().unwrap().split(',').count(), 1 + 16 + 5);
    }
}
