//! Privacy parameters, the seeded randomness contract and Laplace sampling.
//!
//! All noise in the crate flows through [`RandomSource`], a ChaCha8 stream
//! keyed by a 64-bit seed, so a fixed seed reproduces a mechanism's output
//! trace bit for bit. Laplace draws use the inverse CDF of a single uniform,
//! which keeps the number of generator words consumed per draw fixed.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

/// Whether mechanisms add their calibrated noise or run deterministically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum NoiseMode {
    #[default]
    Standard,
    /// Every sampled noise value is exactly zero.
    Off,
}

/// The `(epsilon, delta, beta)` bundle that parameterizes a mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrivacyBudget {
    pub epsilon: f64,
    pub delta: f64,
    pub beta: f64,
    pub noise_mode: NoiseMode,
}

impl PrivacyBudget {
    pub fn new(epsilon: f64, delta: f64, beta: f64, noise_mode: NoiseMode) -> Result<Self> {
        let budget = Self { epsilon, delta, beta, noise_mode };
        budget.validate()?;
        Ok(budget)
    }

    /// Pure `epsilon`-DP budget with standard noise.
    pub fn pure(epsilon: f64, beta: f64) -> Result<Self> {
        Self::new(epsilon, 0.0, beta, NoiseMode::Standard)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(param(format!("epsilon must be positive and finite, got {}", self.epsilon)));
        }
        if !(0.0..1.0).contains(&self.delta) {
            return Err(param(format!("delta must lie in [0, 1), got {}", self.delta)));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(param(format!("beta must lie in (0, 1), got {}", self.beta)));
        }
        Ok(())
    }

    pub fn with_noise(mut self, noise_mode: NoiseMode) -> Self {
        self.noise_mode = noise_mode;
        self
    }

    /// Same budget with `epsilon` divided by `parts`.
    pub fn split(self, parts: f64) -> Result<Self> {
        if !(parts > 0.0) {
            return Err(param(format!("cannot split a budget into {parts} parts")));
        }
        Self::new(self.epsilon / parts, self.delta, self.beta, self.noise_mode)
    }

    pub fn noise_off(&self) -> bool {
        self.noise_mode == NoiseMode::Off
    }
}

/// Seeded, platform-independent source of randomness owned by one mechanism.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self { seed, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Derives an independent child source from the next word of this stream.
    pub fn fork(&mut self) -> RandomSource {
        RandomSource::new(self.rng.next_u64())
    }

    /// Uniform draw from the open interval `(0, 1)`; never returns 0, 1 or 1/2.
    pub fn open_unit(&mut self) -> f64 {
        let k = self.rng.next_u64() >> 11;
        (k as f64 + 0.5) / (1u64 << 53) as f64
    }

    /// Uniform draw from `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.open_unit()
    }

    pub fn below(&mut self, bound: usize) -> usize {
        self.rng.gen_range(0..bound)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.open_unit() < p
    }

    /// One Laplace draw of the given scale, or exactly 0 when noise is off.
    pub fn laplace(&mut self, scale: f64, mode: NoiseMode) -> Result<f64> {
        check_scale(scale)?;
        Ok(self.laplace_unchecked(scale, mode))
    }

    /// Laplace draw without validating `scale`; hot loops validate once up front.
    #[inline]
    pub(crate) fn laplace_unchecked(&mut self, scale: f64, mode: NoiseMode) -> f64 {
        let u = self.open_unit();
        match mode {
            NoiseMode::Off => 0.0,
            NoiseMode::Standard => laplace_from_uniform(scale, u),
        }
    }
}

/// Draws `Lap(scale)` through the generator, honoring the noise mode.
pub fn sample_laplace(scale: f64, mode: NoiseMode, rng: &mut RandomSource) -> Result<f64> {
    rng.laplace(scale, mode)
}

/// Inverse CDF of the zero-centered Laplace distribution at `u` in `(0, 1)`.
#[inline]
pub fn laplace_from_uniform(scale: f64, u: f64) -> f64 {
    let centered = u - 0.5;
    let magnitude = -scale * (1.0 - 2.0 * centered.abs()).ln();
    if centered < 0.0 {
        -magnitude
    } else if centered > 0.0 {
        magnitude
    } else {
        0.0
    }
}

pub(crate) fn check_scale(scale: f64) -> Result<()> {
    if scale > 0.0 && scale.is_finite() {
        Ok(())
    } else {
        Err(param(format!("Laplace scale must be positive and finite, got {scale}")))
    }
}
