//! Memoryless complex AWGN channel: density evaluation and seeded noise.
//!
//! All randomness in the crate comes from [`NoiseStream`]: a ChaCha8 stream
//! cipher keyed by a 64-bit seed, with the 64-bit stream selector set to a
//! caller-chosen id (a trial or chunk index). Standard normals are produced
//! by the Box–Muller transform from 53-bit uniforms, so a given
//! `(seed, stream_id)` yields the same sequence on every run of a build.

use std::f64::consts::PI;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constellation::ComplexSymbol;
use crate::error::{Error, Result};

/// Complex circularly symmetric Gaussian noise with total variance `σ²`
/// (each real component has variance `σ²/2`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ChannelParams {
    sigma2: f64,
}

impl ChannelParams {
    pub fn new(sigma2: f64) -> Result<Self> {
        if !(sigma2.is_finite() && sigma2 > 0.0) {
            return Err(Error::invalid(format!(
                "noise variance must be positive and finite, got {sigma2}"
            )));
        }
        Ok(Self { sigma2 })
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// Standard deviation of each real component, `sqrt(σ²/2)`.
    pub fn component_std(&self) -> f64 {
        (0.5 * self.sigma2).sqrt()
    }
}

impl TryFrom<f64> for ChannelParams {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ChannelParams> for f64 {
    fn from(c: ChannelParams) -> f64 {
        c.sigma2
    }
}

/// Natural log of `f(y|x) = exp(-|y-x|²/σ²) / (πσ²)`.
pub fn log_density(y: ComplexSymbol, x: ComplexSymbol, ch: &ChannelParams) -> f64 {
    -(PI * ch.sigma2).ln() - (y - x).norm_sqr() / ch.sigma2
}

/// Identifies one reproducible random sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NoiseStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl NoiseStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn source(&self) -> RandomSource {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        RandomSource { rng }
    }
}

/// Generator handed out by a [`NoiseStream`].
pub struct RandomSource {
    rng: ChaCha8Rng,
}

impl RandomSource {
    /// Uniform on `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..bound`.
    #[inline]
    pub fn below(&mut self, bound: u64) -> u64 {
        self.rng.gen_range(0..bound)
    }

    /// A pair of independent standard normals (Box–Muller).
    #[inline]
    pub fn normal_pair(&mut self) -> (f64, f64) {
        let u1 = 1.0 - self.uniform(); // (0, 1]
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (2.0 * PI * u2).sin_cos();
        (r * c, r * s)
    }

    /// One complex noise sample with total variance `σ²`.
    #[inline]
    pub fn complex_noise(&mut self, ch: &ChannelParams) -> ComplexSymbol {
        let (a, b) = self.normal_pair();
        ComplexSymbol::new(a, b) * ch.component_std()
    }

    pub(crate) fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// `count` i.i.d. noise samples from `stream`.
pub fn sample_noise(ch: &ChannelParams, stream: NoiseStream, count: usize) -> Vec<ComplexSymbol> {
    let mut src = stream.source();
    (0..count).map(|_| src.complex_noise(ch)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const ORIGIN: ComplexSymbol = ComplexSymbol::ZERO;

    #[test]
    fn log_density_values() {
        let ch1 = ChannelParams::new(1.0).unwrap();
        assert!((log_density(ORIGIN, ORIGIN, &ch1) + PI.ln()).abs() < 1e-15);
        assert!((log_density(ORIGIN, ORIGIN, &ch1) + 1.1447298858494002).abs() < 1e-12);
        let ch2 = ChannelParams::new(2.0).unwrap();
        let v = log_density(ComplexSymbol::new(1.0, 0.0), ORIGIN, &ch2);
        assert!((v - (-(2.0 * PI).ln() - 0.5)).abs() < 1e-15);
        assert!((v + 2.337877066409345).abs() < 1e-12);
    }

    #[test]
    fn density_integrates_to_one() {
        // midpoint rule on a square of half-width 8σ
        let ch = ChannelParams::new(2.0).unwrap();
        let x = ComplexSymbol::new(0.7, -1.3);
        let half = 8.0 * ch.sigma2().sqrt();
        let steps = 800;
        let h = 2.0 * half / steps as f64;
        let mut total = 0.0;
        for i in 0..steps {
            for j in 0..steps {
                let y = ComplexSymbol::new(
                    x.re - half + (i as f64 + 0.5) * h,
                    x.im - half + (j as f64 + 0.5) * h,
                );
                total += log_density(y, x, &ch).exp() * h * h;
            }
        }
        assert!((total - 1.0).abs() < 1e-6, "{total}");
    }

    #[test]
    fn density_peaks_at_the_symbol() {
        let ch = ChannelParams::new(0.8).unwrap();
        let x = ComplexSymbol::new(1.0, 2.0);
        let peak = log_density(x, x, &ch);
        for i in -10..=10 {
            for j in -10..=10 {
                let y = x + ComplexSymbol::new(i as f64 * 0.1, j as f64 * 0.1);
                assert!(log_density(y, x, &ch) <= peak);
            }
        }
    }

    #[test]
    fn rejects_bad_variance() {
        assert!(ChannelParams::new(0.0).is_err());
        assert!(ChannelParams::new(-1.0).is_err());
        assert!(ChannelParams::new(f64::NAN).is_err());
    }

    #[test]
    fn empty_and_reproducible() {
        let ch = ChannelParams::new(2.0).unwrap();
        assert!(sample_noise(&ch, NoiseStream::new(1, 0), 0).is_empty());
        let a = sample_noise(&ch, NoiseStream::new(9, 3), 100);
        let b = sample_noise(&ch, NoiseStream::new(9, 3), 100);
        let c = sample_noise(&ch, NoiseStream::new(9, 4), 100);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn noise_moments_and_covariance() {
        let ch = ChannelParams::new(2.0).unwrap();
        let n = 1_000_000;
        let w = sample_noise(&ch, NoiseStream::new(2024, 0), n);
        let nf = n as f64;
        let m2 = w.iter().map(|x| x.norm_sqr()).sum::<f64>() / nf;
        let m4 = w.iter().map(|x| x.norm_sqr().powi(2)).sum::<f64>() / nf;
        assert!((m2 - 2.0).abs() < 0.01, "E|W|^2 = {m2}");
        assert!((m4 - 8.0).abs() < 0.1, "E|W|^4 = {m4}");
        let mre = w.iter().map(|x| x.re).sum::<f64>() / nf;
        let mim = w.iter().map(|x| x.im).sum::<f64>() / nf;
        let vre = w.iter().map(|x| (x.re - mre).powi(2)).sum::<f64>() / nf;
        let vim = w.iter().map(|x| (x.im - mim).powi(2)).sum::<f64>() / nf;
        let cov = w.iter().map(|x| (x.re - mre) * (x.im - mim)).sum::<f64>() / nf;
        assert!((vre / 1.0 - 1.0).abs() < 0.01, "var re {vre}");
        assert!((vim / 1.0 - 1.0).abs() < 0.01, "var im {vim}");
        assert!(cov.abs() < 0.01 * ch.sigma2(), "cov {cov}");
    }
}
