use super::norm::sorted_magnitudes;
use crate::counting::{calibrated_bound, BoundRequest, TreeCounter};
use crate::error::{param, Result};
use crate::privacy::{PrivacyBudget, RandomSource};

/// Private estimates of every Top-k norm of a static frequency vector.
///
/// Magnitudes are sorted descending and fed to a tree counter as a stream
/// of length `n`; the `k`-th noisy prefix sum estimates `||f||_topk`.
/// Sorting couples neighboring inputs so each prefix sum changes by at most 1.
pub fn static_topk(frequencies: &[i64], budget: &PrivacyBudget, rng: RandomSource) -> Result<Vec<f64>> {
    if frequencies.is_empty() {
        return Err(param("static Top-k needs a nonempty frequency vector"));
    }
    let as_f64: Vec<f64> = frequencies.iter().map(|&f| f as f64).collect();
    let mut counter = TreeCounter::new(frequencies.len(), budget, rng)?;
    sorted_magnitudes(&as_f64)
        .into_iter()
        .map(|x| counter.step_weighted(x as i64))
        .collect()
}

/// Calibrated simultaneous error bound of [`static_topk`] over all `k`.
pub fn static_topk_bound(n: usize, budget: &PrivacyBudget) -> Result<f64> {
    budget.validate()?;
    calibrated_bound(&BoundRequest::new(1, budget, n))
}
