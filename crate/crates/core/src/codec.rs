//! Homogeneous codebooks: every codeword is a distinct arrangement of the
//! same symbol multiset.

use std::collections::HashSet;
use std::io::Write;

use num_bigint::BigUint;
use rand::seq::SliceRandom;

use crate::channel::NoiseStream;
use crate::error::{Error, Result};
use crate::typespace::{multinomial, InputType, SymbolCounts};

/// Consecutive duplicate draws tolerated before sampling falls back to
/// lexicographic enumeration.
const MAX_CONSECUTIVE_REJECTIONS: u32 = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BuildMode {
    /// First `M` arrangements in lexicographic order.
    Enumerate,
    /// `M` distinct uniformly random arrangements.
    Sample { seed: u64 },
}

/// Codewords are sequences of 0-based symbol indices. Message `i` (1-based)
/// is `codewords()[i - 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneousCode {
    counts: SymbolCounts,
    codewords: Vec<Vec<usize>>,
}

impl HomogeneousCode {
    pub fn counts(&self) -> &SymbolCounts {
        &self.counts
    }

    pub fn codewords(&self) -> &[Vec<usize>] {
        &self.codewords
    }

    /// Codeword of message `i ∈ {1, …, M}`.
    pub fn codeword(&self, message: usize) -> &[usize] {
        &self.codewords[message - 1]
    }

    /// Number of messages `M`.
    pub fn messages(&self) -> usize {
        self.codewords.len()
    }

    pub fn block_length(&self) -> usize {
        self.counts.n() as usize
    }

    /// `P_C(ℓ) = counts_ℓ / n`.
    pub fn code_type(&self) -> InputType {
        InputType::from_counts(&self.counts)
    }

    /// `log₂ M / n` bits per channel use.
    pub fn rate(&self) -> f64 {
        (self.messages() as f64).log2() / self.counts.n() as f64
    }

    /// CSV with columns `message_id,t,symbol_index`, all 1-based.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "message_id,t,symbol_index")?;
        for (i, cw) in self.codewords.iter().enumerate() {
            for (t, &s) in cw.iter().enumerate() {
                writeln!(w, "{},{},{}", i + 1, t + 1, s + 1)?;
            }
        }
        Ok(())
    }
}

fn sorted_multiset(c: &SymbolCounts) -> Vec<usize> {
    c.counts()
        .iter()
        .enumerate()
        .flat_map(|(i, &k)| std::iter::repeat_n(i, k as usize))
        .collect()
}

/// In-place lexicographic successor; `false` once `v` is the last arrangement.
fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn enumerate(c: &SymbolCounts, m: usize) -> Vec<Vec<usize>> {
    let mut cur = sorted_multiset(c);
    let mut out = Vec::with_capacity(m);
    out.push(cur.clone());
    while out.len() < m && next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

fn sample(c: &SymbolCounts, m: usize, seed: u64) -> Option<Vec<Vec<usize>>> {
    let base = sorted_multiset(c);
    let mut src = NoiseStream::new(seed, 0).source();
    let mut seen: HashSet<Vec<usize>> = HashSet::with_capacity(m);
    let mut out = Vec::with_capacity(m);
    let mut rejections = 0;
    while out.len() < m {
        let mut w = base.clone();
        w.shuffle(src.rng_mut());
        if seen.insert(w.clone()) {
            out.push(w);
            rejections = 0;
        } else {
            rejections += 1;
            if rejections >= MAX_CONSECUTIVE_REJECTIONS {
                return None;
            }
        }
    }
    Some(out)
}

/// Builds a homogeneous code with `m` messages over the multiset `c`.
pub fn build_code(c: &SymbolCounts, m: u64, mode: BuildMode) -> Result<HomogeneousCode> {
    if m == 0 {
        return Err(Error::invalid("a code needs at least one message"));
    }
    let capacity = multinomial(c);
    if BigUint::from(m) > capacity {
        return Err(Error::CapacityExceeded {
            requested: m,
            capacity: capacity.to_string(),
        });
    }
    let m =
        usize::try_from(m).map_err(|_| Error::invalid("message count does not fit in memory"))?;
    let codewords = match mode {
        BuildMode::Enumerate => enumerate(c, m),
        BuildMode::Sample { seed } => sample(c, m, seed).unwrap_or_else(|| enumerate(c, m)),
    };
    Ok(HomogeneousCode {
        counts: c.clone(),
        codewords,
    })
}

/// Empirical frequency of each of `alphabet` indices in `w`.
pub fn codeword_type(w: &[usize], alphabet: usize) -> Result<InputType> {
    if w.is_empty() {
        return Err(Error::invalid("empty codeword"));
    }
    let mut counts = vec![0u64; alphabet];
    for &s in w {
        if s >= alphabet {
            return Err(Error::invalid(format!(
                "symbol index {} outside alphabet of {alphabet}",
                s + 1
            )));
        }
        counts[s] += 1;
    }
    Ok(InputType::from_counts(&SymbolCounts::new(counts)?))
}
