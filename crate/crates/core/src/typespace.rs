//! Types (empirical pmfs) over constellation indices.
//!
//! Internally every logarithm is natural; the public entropy and divergence
//! functions take an explicit [`LogBase`].

use std::f64::consts::LN_2;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on `Σ p = 1`.
pub const SUM_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogBase {
    /// bits
    Two,
    /// nats
    E,
}

impl LogBase {
    #[inline]
    fn convert_nats(self, nats: f64) -> f64 {
        match self {
            LogBase::Two => nats / LN_2,
            LogBase::E => nats,
        }
    }
}

/// A pmf over the symbols of a constellation, aligned to symbol index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct InputType {
    probs: Vec<f64>,
}

impl InputType {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::invalid("a type needs at least one entry"));
        }
        if let Some((i, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !(p.is_finite() && (0.0..=1.0).contains(*p)))
        {
            return Err(Error::invalid(format!(
                "probability {} at index {} is outside [0, 1]",
                p,
                i + 1
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::invalid(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(Self { probs })
    }

    /// Normalizes nonnegative weights into a pmf.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total.is_finite() && total > 0.0) || weights.iter().any(|w| *w < 0.0) {
            return Err(Error::invalid(
                "weights must be nonnegative with a positive finite sum",
            ));
        }
        Self::new(weights.iter().map(|w| w / total).collect())
    }

    pub fn uniform(len: usize) -> Self {
        assert!(len > 0);
        Self {
            probs: vec![1.0 / len as f64; len],
        }
    }

    pub fn point_mass(len: usize, index: usize) -> Self {
        assert!(index < len);
        let mut probs = vec![0.0; len];
        probs[index] = 1.0;
        Self { probs }
    }

    pub fn from_counts(counts: &SymbolCounts) -> Self {
        let n = counts.n() as f64;
        Self {
            probs: counts.counts().iter().map(|&c| c as f64 / n).collect(),
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Indices with positive mass.
    pub fn support(&self) -> Vec<usize> {
        (0..self.probs.len())
            .filter(|&i| self.probs[i] > 0.0)
            .collect()
    }

    /// Whether every entry is an integer multiple of `1/n`.
    pub fn is_rational(&self, n: u64) -> bool {
        let n = n as f64;
        self.probs.iter().all(|p| {
            let c = p * n;
            (c - c.round()).abs() < 1e-9
        })
    }

    /// Whether all entries agree within the sum tolerance.
    pub fn is_uniform(&self) -> bool {
        let u = 1.0 / self.probs.len() as f64;
        self.probs.iter().all(|p| (p - u).abs() <= SUM_TOLERANCE)
    }
}

impl TryFrom<Vec<f64>> for InputType {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<InputType> for Vec<f64> {
    fn from(t: InputType) -> Self {
        t.probs
    }
}

/// Integer symbol counts of a block of `n` channel uses.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymbolCounts {
    counts: Vec<u64>,
    n: u64,
}

impl SymbolCounts {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::invalid("counts need at least one entry"));
        }
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return Err(Error::invalid(
                "block length (sum of counts) must be positive",
            ));
        }
        Ok(Self { counts, n })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// `-Σ p log p` with `0 log 0 = 0`.
pub fn entropy(p: &InputType, base: LogBase) -> f64 {
    base.convert_nats(entropy_nats(p.probs()))
}

pub(crate) fn entropy_nats(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.ln())
        .sum::<f64>()
}

/// `Σ p log(p/q)`; `+∞` when `p` is not absolutely continuous w.r.t. `q`.
pub fn kl_divergence(p: &InputType, q: &InputType, base: LogBase) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::invalid(format!(
            "length mismatch: {} vs {}",
            p.len(),
            q.len()
        )));
    }
    Ok(base.convert_nats(kl_nats(p.probs(), q.probs())))
}

pub(crate) fn kl_nats(p: &[f64], q: &[f64]) -> f64 {
    let mut d = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            if qi <= 0.0 {
                return f64::INFINITY;
            }
            d += pi * (pi / qi).ln();
        }
    }
    // rounding can leave a tiny negative value when p ≈ q
    d.max(0.0)
}

/// Largest-remainder rounding of `n·p` to integer counts summing to `n`.
/// Ties go to the lower index.
pub fn rationalize(p: &InputType, n: u64) -> Result<SymbolCounts> {
    if n == 0 {
        return Err(Error::invalid("block length must be at least 1"));
    }
    let nf = n as f64;
    let scaled: Vec<f64> = p.probs().iter().map(|&x| x * nf).collect();
    let mut counts: Vec<u64> = scaled.iter().map(|&x| x.floor() as u64).collect();
    let assigned: u64 = counts.iter().sum();
    let mut deficit = n.saturating_sub(assigned);
    let mut order: Vec<usize> = (0..counts.len()).collect();
    // stable sort keeps lower indices first among equal remainders
    order.sort_by(|&a, &b| {
        let ra = scaled[a] - scaled[a].floor();
        let rb = scaled[b] - scaled[b].floor();
        rb.total_cmp(&ra)
    });
    while deficit > 0 {
        for &i in &order {
            if deficit == 0 {
                break;
            }
            counts[i] += 1;
            deficit -= 1;
        }
    }
    let mut surplus = counts.iter().sum::<u64>().saturating_sub(n);
    // only reachable through floating-point overshoot of Σ n·p
    for &i in order.iter().rev() {
        while surplus > 0 && counts[i] > 0 {
            counts[i] -= 1;
            surplus -= 1;
        }
    }
    SymbolCounts::new(counts)
}

/// Exact multinomial coefficient `n! / Π c_ℓ!`.
pub fn multinomial(c: &SymbolCounts) -> BigUint {
    // build it as a product of binomials so intermediate values stay small
    let mut acc = BigUint::one();
    let mut placed: u64 = 0;
    for &k in c.counts() {
        for j in 1..=k {
            acc *= placed + j;
            acc /= j;
        }
        placed += k;
    }
    acc
}

/// `log₂` of a big unsigned integer, accurate to f64 precision.
pub fn log2_biguint(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 64 {
        return v.to_u64().expect("fits in u64").to_f64().unwrap().log2();
    }
    let shift = bits - 64;
    let top = (v >> shift).to_u64().expect("fits in u64") as f64;
    top.log2() + shift as f64
}

/// `log₂( n! / Π c_ℓ! )`, evaluated exactly in integers before the final
/// conversion.
pub fn multinomial_log2(c: &SymbolCounts) -> f64 {
    log2_biguint(&multinomial(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(p: &[f64]) -> InputType {
        InputType::new(p.to_vec()).unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert!((entropy(&InputType::uniform(16), LogBase::Two) - 4.0).abs() < 1e-12);
        assert_eq!(entropy(&InputType::point_mass(5, 2), LogBase::Two), 0.0);
        assert_eq!(entropy(&InputType::point_mass(5, 2), LogBase::E), 0.0);
        // -(0.75 log2 0.75 + 0.25 log2 0.25)
        assert!((entropy(&t(&[0.75, 0.25]), LogBase::Two) - 0.8112781244591328).abs() < 1e-12);
    }

    #[test]
    fn kl_examples() {
        let p = t(&[0.2, 0.3, 0.5]);
        assert_eq!(kl_divergence(&p, &p, LogBase::E).unwrap(), 0.0);
        let d = kl_divergence(&t(&[1.0, 0.0]), &t(&[0.5, 0.5]), LogBase::E).unwrap();
        assert!((d - std::f64::consts::LN_2).abs() < 1e-15);
        let inf = kl_divergence(&t(&[0.5, 0.5]), &t(&[1.0, 0.0]), LogBase::Two).unwrap();
        assert!(inf.is_infinite());
        assert!(kl_divergence(&t(&[0.5, 0.5]), &InputType::uniform(3), LogBase::E).is_err());
    }

    #[test]
    fn rationalize_examples() {
        let c = rationalize(&InputType::uniform(16), 80).unwrap();
        assert!(c.counts().iter().all(|&k| k == 5));
        let c = rationalize(&t(&[1.0, 0.0, 0.0]), 7).unwrap();
        assert_eq!(c.counts(), &[7, 0, 0]);
        let c = rationalize(&InputType::uniform(3), 4).unwrap();
        assert_eq!(c.counts(), &[2, 1, 1]);
        assert!(rationalize(&InputType::uniform(3), 0).is_err());
    }

    #[test]
    fn multinomial_examples() {
        assert!((multinomial_log2(&SymbolCounts::new(vec![1, 1]).unwrap()) - 1.0).abs() < 1e-15);
        assert_eq!(
            multinomial_log2(&SymbolCounts::new(vec![4, 0]).unwrap()),
            0.0
        );
        // log2(80! / (5!)^16), from exact integer arithmetic in an independent tool
        let v = multinomial_log2(&SymbolCounts::new(vec![5; 16]).unwrap());
        assert!((v - 284.3166097018229).abs() < 1e-9, "{v}");
    }

    #[test]
    fn multinomial_matches_factorial_ratio() {
        // brute-force n!/(a!b!c!) for small n
        fn fact(n: u64) -> u128 {
            (1..=n as u128).product()
        }
        for (a, b, c) in [(3, 4, 5), (0, 7, 2), (10, 1, 1), (6, 6, 6)] {
            let expect = fact(a + b + c) / (fact(a) * fact(b) * fact(c));
            let got = multinomial(&SymbolCounts::new(vec![a, b, c]).unwrap());
            assert_eq!(got, BigUint::from(expect));
        }
    }

    #[test]
    fn invalid_types_are_rejected() {
        assert!(InputType::new(vec![0.5, 0.6]).is_err());
        assert!(InputType::new(vec![-0.1, 1.1]).is_err());
        assert!(InputType::new(vec![]).is_err());
        assert!(InputType::new(vec![f64::NAN, 1.0]).is_err());
        assert!(SymbolCounts::new(vec![0, 0]).is_err());
    }

    #[test]
    fn multinomial_rate_approaches_entropy() {
        let p = t(&[0.5, 0.25, 0.125, 0.125]);
        let h = entropy(&p, LogBase::Two);
        let mut last_gap = f64::INFINITY;
        for n in [10, 100, 1000] {
            let c = rationalize(&p, n).unwrap();
            let r = multinomial_log2(&c) / n as f64;
            let gap = h - r;
            assert!(gap >= -1e-12, "rate {r} exceeds entropy {h} at n={n}");
            assert!(gap < last_gap);
            last_gap = gap;
        }
    }

    fn pmf(len: std::ops::Range<usize>) -> impl Strategy<Value = InputType> {
        prop::collection::vec(0.0f64..1.0, len)
            .prop_filter("positive mass", |w| w.iter().sum::<f64>() > 1e-6)
            .prop_map(|w| InputType::from_weights(&w).unwrap())
    }

    proptest! {
        #[test]
        fn entropy_is_at_most_log_len(p in pmf(1..20)) {
            let h = entropy(&p, LogBase::Two);
            prop_assert!(h <= (p.len() as f64).log2() + 1e-12);
            prop_assert!(h >= 0.0);
        }

        #[test]
        fn gibbs_inequality(w in prop::collection::vec((0.01f64..1.0, 0.01f64..1.0), 2..12)) {
            let p = InputType::from_weights(&w.iter().map(|x| x.0).collect::<Vec<_>>()).unwrap();
            let q = InputType::from_weights(&w.iter().map(|x| x.1).collect::<Vec<_>>()).unwrap();
            prop_assert!(kl_divergence(&p, &q, LogBase::E).unwrap() >= 0.0);
            prop_assert!(kl_divergence(&p, &p, LogBase::E).unwrap().abs() < 1e-15);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn rationalize_preserves_block_length(p in pmf(1..17), n in 1u64..500) {
            let c = rationalize(&p, n).unwrap();
            prop_assert_eq!(c.n(), n);
            prop_assert_eq!(c.counts().iter().sum::<u64>(), n);
            for (k, x) in c.counts().iter().zip(p.probs()) {
                prop_assert!((*k as f64 - x * n as f64).abs() < 1.0 + 1e-9);
            }
        }
    }
}
