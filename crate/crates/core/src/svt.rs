//! Sparse vector technique with caller-supplied adaptive queries and thresholds.

use crate::error::{param, state, Result};
use crate::privacy::{check_scale, PrivacyBudget, RandomSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SvtAnswer {
    Positive,
    Negative,
}

impl SvtAnswer {
    pub fn is_positive(self) -> bool {
        self == SvtAnswer::Positive
    }
}

/// One above-threshold instance that halts after `cap` positive answers.
///
/// The instance only sees query values; the caller is responsible for the
/// queries having sensitivity at most `sensitivity`.
#[derive(Debug, Clone)]
pub struct SvtInstance {
    budget: PrivacyBudget,
    cap: usize,
    sensitivity: f64,
    sigma: f64,
    rho: f64,
    positives: usize,
    queries: usize,
    rng: RandomSource,
}

impl SvtInstance {
    pub fn new(budget: &PrivacyBudget, cap: usize, rng: RandomSource) -> Result<Self> {
        Self::with_sensitivity(budget, cap, 1.0, rng)
    }

    pub fn with_sensitivity(
        budget: &PrivacyBudget,
        cap: usize,
        sensitivity: f64,
        mut rng: RandomSource,
    ) -> Result<Self> {
        budget.validate()?;
        if cap == 0 {
            return Err(param("SVT cap c must be at least 1"));
        }
        if !(sensitivity > 0.0 && sensitivity.is_finite()) {
            return Err(param(format!("sensitivity must be positive, got {sensitivity}")));
        }
        let sigma = svt_sigma(budget, cap, sensitivity);
        check_scale(sigma)?;
        let rho = rng.laplace_unchecked(sigma, budget.noise_mode);
        Ok(Self { budget: *budget, cap, sensitivity, sigma, rho, positives: 0, queries: 0, rng })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn sensitivity(&self) -> f64 {
        self.sensitivity
    }

    pub fn positives(&self) -> usize {
        self.positives
    }

    pub fn queries(&self) -> usize {
        self.queries
    }

    pub fn is_halted(&self) -> bool {
        self.positives >= self.cap
    }

    pub fn query(&mut self, q_value: f64, threshold: f64) -> Result<SvtAnswer> {
        if self.is_halted() {
            return Err(state(format!("SVT halted after {} positive answers", self.cap)));
        }
        self.queries += 1;
        let nu = self.rng.laplace_unchecked(2.0 * self.sigma, self.budget.noise_mode);
        if q_value + nu >= threshold + self.rho {
            self.positives += 1;
            self.rho = self.rng.laplace_unchecked(self.sigma, self.budget.noise_mode);
            Ok(SvtAnswer::Positive)
        } else {
            Ok(SvtAnswer::Negative)
        }
    }
}

/// Free-function form of [`SvtInstance::query`].
pub fn svt_query(s: &mut SvtInstance, q_value: f64, threshold: f64) -> Result<SvtAnswer> {
    s.query(q_value, threshold)
}

/// Noise scale `sigma`: `2c/eps` for pure DP, `sqrt(32 c ln(1/delta))/eps`
/// otherwise, times the query sensitivity.
pub fn svt_sigma(budget: &PrivacyBudget, cap: usize, sensitivity: f64) -> f64 {
    let c = cap as f64;
    let base = if budget.delta == 0.0 {
        2.0 * c / budget.epsilon
    } else {
        (32.0 * c * (1.0 / budget.delta).ln()).sqrt() / budget.epsilon
    };
    base * sensitivity
}

/// Accuracy radius `alpha` for `queries` queries and cap `cap` at failure
/// probability `budget.beta`, scaled by the query sensitivity.
pub fn svt_alpha(budget: &PrivacyBudget, queries: usize, cap: usize, sensitivity: f64) -> f64 {
    let c = cap as f64;
    let logs = (queries.max(1) as f64).ln() + (2.0 * c / budget.beta).ln();
    let base = if budget.delta == 0.0 {
        8.0 * c * logs / budget.epsilon
    } else {
        logs * (512.0 * c * (1.0 / budget.delta).ln()).sqrt() / budget.epsilon
    };
    base * sensitivity
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::privacy::NoiseMode;

    fn off() -> PrivacyBudget {
        PrivacyBudget::pure(1.0, 0.1).unwrap().with_noise(NoiseMode::Off)
    }

    #[test]
    fn noise_off_is_exact_comparison() {
        let mut s = SvtInstance::new(&off(), 3, RandomSource::new(0)).unwrap();
        assert_eq!(s.query(5.0, 3.0).unwrap(), SvtAnswer::Positive);
        assert_eq!(s.query(2.0, 3.0).unwrap(), SvtAnswer::Negative);
        assert_eq!(s.query(3.0, 3.0).unwrap(), SvtAnswer::Positive);
    }

    #[test]
    fn halts_after_cap() {
        let mut s = SvtInstance::new(&off(), 2, RandomSource::new(0)).unwrap();
        s.query(1.0, 0.0).unwrap();
        assert!(!s.is_halted());
        s.query(1.0, 0.0).unwrap();
        assert!(s.is_halted());
        assert!(matches!(s.query(1.0, 0.0), Err(crate::Error::State(_))));
    }

    #[test]
    fn sigma_calibration() {
        let pure = PrivacyBudget::pure(2.0, 0.1).unwrap();
        assert!((svt_sigma(&pure, 5, 1.0) - 5.0).abs() < 1e-12);
        assert!((svt_sigma(&pure, 5, 3.0) - 15.0).abs() < 1e-12);
        let approx = PrivacyBudget::new(1.0, (-2.0f64).exp(), 0.1, NoiseMode::Standard).unwrap();
        assert!((svt_sigma(&approx, 2, 1.0) - 128f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn alpha_formula() {
        let b = PrivacyBudget::pure(1.0, 0.1).unwrap();
        let expect = 40.0 * ((200f64).ln() + (100f64).ln());
        assert!((svt_alpha(&b, 200, 5, 1.0) - expect).abs() < 1e-9);
    }

    #[test]
    fn raising_query_never_flips_positive() {
        let budget = PrivacyBudget::pure(1.0, 0.1).unwrap();
        for seed in 0..200 {
            let mut lo = SvtInstance::new(&budget, 1, RandomSource::new(seed)).unwrap();
            let mut hi = SvtInstance::new(&budget, 1, RandomSource::new(seed)).unwrap();
            let a = lo.query(0.0, 0.0).unwrap();
            let b = hi.query(4.0, 0.0).unwrap();
            assert!(!(a.is_positive() && !b.is_positive()));
        }
    }
}
