//! Monte Carlo calibration of the histogram error bound `E(n)`.
//!
//! `E` is the smallest value such that the max over all steps `t <= T` and
//! all `n` columns of the absolute counter noise exceeds it with empirical
//! frequency at most `beta`. Columns carry independent noise, so the
//! max-over-columns CDF is the single-column CDF raised to the `n`-th power;
//! we simulate single-column noise paths at unit node scale and read off the
//! `(1 - beta)^(1/n)` empirical quantile, then multiply by the node scale.
//! Noise scales linearly in `1/epsilon`, so one sample set per horizon serves
//! every `(n, epsilon, beta, sensitivity)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::tree::{node_noise_scale, tree_height};
use crate::error::{param, Result};
use crate::privacy::{laplace_from_uniform, PrivacyBudget, RandomSource};

/// Fixed seed for the shipped calibration; changing it changes the golden file.
pub const CALIBRATION_SEED: u64 = 0x00C0_FFEE_D00D_2025;
/// Number of simulated single-column noise paths.
pub const CALIBRATION_PATHS: usize = 100_000;

/// Which closed form of `E` to report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BoundModel {
    /// Monte Carlo quantile of the pure-DP tree mechanism.
    Pure,
    /// `c' * sqrt(ln(nT/beta)) * ln T * sqrt(ln(1/delta)) / epsilon`, with `c'`
    /// fit so the formula dominates the Monte Carlo bound on a reference grid.
    Approx { delta: f64 },
}

/// One calibration request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRequest {
    pub columns: usize,
    pub horizon: usize,
    pub epsilon: f64,
    pub beta: f64,
    pub sensitivity: f64,
}

impl BoundRequest {
    pub fn new(columns: usize, budget: &PrivacyBudget, horizon: usize) -> Self {
        Self { columns, horizon, epsilon: budget.epsilon, beta: budget.beta, sensitivity: 1.0 }
    }

    pub fn with_sensitivity(mut self, sensitivity: f64) -> Self {
        self.sensitivity = sensitivity;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.columns == 0 || self.horizon == 0 {
            return Err(param("bound needs at least one column and one step"));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(param(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(param(format!("beta must lie in (0, 1), got {}", self.beta)));
        }
        if !(self.sensitivity > 0.0 && self.sensitivity.is_finite()) {
            return Err(param(format!("sensitivity must be positive, got {}", self.sensitivity)));
        }
        Ok(())
    }
}

type SampleKey = (usize, usize, u64);

fn sample_cache() -> &'static Mutex<HashMap<SampleKey, Arc<Vec<f64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<SampleKey, Arc<Vec<f64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Sorted per-path maxima `max_{t <= T} |noise_t|` at unit node scale.
pub fn unit_noise_maxima(horizon: usize, paths: usize, seed: u64) -> Arc<Vec<f64>> {
    let key = (horizon, paths, seed);
    if let Some(hit) = sample_cache().lock().expect("calibration cache poisoned").get(&key) {
        return Arc::clone(hit);
    }
    let mut maxima: Vec<f64> = (0..paths)
        .map(|p| simulate_unit_path(horizon, path_seed(seed, p as u64)))
        .collect();
    maxima.sort_by(f64::total_cmp);
    let maxima = Arc::new(maxima);
    sample_cache()
        .lock()
        .expect("calibration cache poisoned")
        .entry(key)
        .or_insert_with(|| Arc::clone(&maxima))
        .clone()
}

fn path_seed(seed: u64, path: u64) -> u64 {
    // splitmix64 finalizer over (seed, path)
    let mut z = seed ^ path.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Max absolute noise of one tree counter path with `Lap(1)` node noise.
fn simulate_unit_path(horizon: usize, seed: u64) -> f64 {
    let height = tree_height(horizon);
    let mut rng = RandomSource::new(seed);
    let mut released = vec![0.0f64; height + 1];
    let mut total = 0.0f64;
    let mut worst = 0.0f64;
    for t in 1..=horizon {
        let top = t.trailing_zeros() as usize;
        for slot in &mut released[..top] {
            total -= *slot;
            *slot = 0.0;
        }
        let x = laplace_from_uniform(1.0, rng.open_unit());
        released[top] = x;
        total += x;
        worst = worst.max(total.abs());
    }
    worst
}

/// Smallest sample value `e` such that at most `floor(tail * N)` samples exceed it.
fn upper_quantile(sorted: &[f64], tail: f64) -> f64 {
    let n = sorted.len();
    let allowed = ((tail * n as f64).floor() as usize).min(n - 1);
    sorted[n - 1 - allowed]
}

/// Calibrated bound with the shipped seed and path count.
pub fn calibrated_bound(req: &BoundRequest) -> Result<f64> {
    calibrated_bound_with(req, CALIBRATION_PATHS, CALIBRATION_SEED)
}

pub fn calibrated_bound_with(req: &BoundRequest, paths: usize, seed: u64) -> Result<f64> {
    req.validate()?;
    if paths == 0 {
        return Err(param("calibration needs at least one path"));
    }
    let maxima = unit_noise_maxima(req.horizon, paths, seed);
    // Per-column tail mass so that 1 - (1 - tail)^n = beta.
    let tail = -((-req.beta).ln_1p() / req.columns as f64).exp_m1();
    let unit = upper_quantile(&maxima, tail);
    let scale = node_noise_scale(tree_height(req.horizon), req.epsilon, req.sensitivity);
    Ok(unit * scale)
}

fn approx_shape(columns: usize, horizon: usize, beta: f64, delta: f64) -> f64 {
    let log_t = (horizon.max(2) as f64).ln();
    ((columns * horizon) as f64 / beta).ln().sqrt() * log_t * (1.0 / delta).ln().sqrt()
}

/// Constant `c'` of the approximate-DP formula: the largest ratio of the
/// Monte Carlo bound to the formula shape over a small reference grid.
pub fn approx_constant() -> Result<f64> {
    let reference_delta = (-1.0f64).exp();
    let mut c = 0.0f64;
    for &columns in &[1usize, 4, 16] {
        for &horizon in &[256usize, 1024] {
            let req = BoundRequest { columns, horizon, epsilon: 1.0, beta: 0.01, sensitivity: 1.0 };
            let mc = calibrated_bound(&req)?;
            c = c.max(mc / approx_shape(columns, horizon, 0.01, reference_delta));
        }
    }
    Ok(c)
}

/// The histogram error bound `E(n)` for `columns` counters over `horizon`.
///
/// Depends only on the noise model, never on realized noise, so it is the
/// same in `NoiseMode::Off`.
pub fn compute_error_bound(columns: usize, budget: &PrivacyBudget, horizon: usize) -> Result<f64> {
    budget.validate()?;
    calibrated_bound(&BoundRequest::new(columns, budget, horizon))
}

pub fn compute_error_bound_model(
    req: &BoundRequest,
    model: BoundModel,
) -> Result<f64> {
    req.validate()?;
    match model {
        BoundModel::Pure => calibrated_bound(req),
        BoundModel::Approx { delta } => {
            if !(delta > 0.0 && delta < 1.0) {
                return Err(param(format!("approximate bound needs delta in (0, 1), got {delta}")));
            }
            let shape = approx_shape(req.columns, req.horizon, req.beta, delta);
            Ok(approx_constant()? * shape * req.sensitivity / req.epsilon)
        }
    }
}
