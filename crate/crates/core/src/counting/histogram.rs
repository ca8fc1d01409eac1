use super::calibrate::{calibrated_bound, BoundRequest};
use super::tree::TreeCounter;
use crate::error::{param, Result};
use crate::privacy::{PrivacyBudget, RandomSource};

/// Continual `n`-column histogram: one independent tree counter per column,
/// each at the full budget (each input step touches a single column).
///
/// With `shifted`, every output is lowered by the calibrated bound `E`, so
/// whenever the realized noise stays within `E` the release satisfies
/// `true - 2E <= y <= true`.
#[derive(Debug, Clone)]
pub struct HistogramMechanism {
    counters: Vec<TreeCounter>,
    bound: f64,
    shifted: bool,
    outputs: Vec<f64>,
}

impl HistogramMechanism {
    pub fn new(
        columns: usize,
        horizon: usize,
        budget: &PrivacyBudget,
        shifted: bool,
        rng: RandomSource,
    ) -> Result<Self> {
        Self::with_sensitivity(columns, horizon, budget, 1.0, shifted, rng)
    }

    /// Histogram whose per-column input streams may differ by `sensitivity`
    /// in l1 between neighbors; noise and bound both scale with it.
    pub fn with_sensitivity(
        columns: usize,
        horizon: usize,
        budget: &PrivacyBudget,
        sensitivity: f64,
        shifted: bool,
        mut rng: RandomSource,
    ) -> Result<Self> {
        if columns == 0 {
            return Err(param("histogram needs at least one column"));
        }
        let counters = (0..columns)
            .map(|_| TreeCounter::with_sensitivity(horizon, budget, sensitivity, rng.fork()))
            .collect::<Result<Vec<_>>>()?;
        let bound = calibrated_bound(
            &BoundRequest::new(columns, budget, horizon).with_sensitivity(sensitivity),
        )?;
        Ok(Self { counters, bound, shifted, outputs: vec![0.0; columns] })
    }

    /// Replaces the calibrated bound (and therefore the shift).
    pub fn with_bound(mut self, bound: f64) -> Result<Self> {
        if !(bound >= 0.0 && bound.is_finite()) {
            return Err(param(format!("error bound must be nonnegative, got {bound}")));
        }
        self.bound = bound;
        Ok(self)
    }

    pub fn columns(&self) -> usize {
        self.counters.len()
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn is_shifted(&self) -> bool {
        self.shifted
    }

    pub fn time(&self) -> usize {
        self.counters[0].time()
    }

    /// Routes `v` in `{-1, 0, 1}` to `column` and 0 to every other column.
    pub fn step(&mut self, column: usize, v: i64) -> Result<&[f64]> {
        if column >= self.columns() {
            return Err(param(format!("column {column} outside 0..{}", self.columns())));
        }
        if !(-1..=1).contains(&v) {
            return Err(param(format!("histogram input must be in {{-1, 0, 1}}, got {v}")));
        }
        self.step_sparse(&[(column, v)])
    }

    /// A step that leaves every column unchanged.
    pub fn step_idle(&mut self) -> Result<&[f64]> {
        self.step_sparse(&[])
    }

    /// Routes several integer deltas in one step; repeated columns add up.
    pub fn step_sparse(&mut self, deltas: &[(usize, i64)]) -> Result<&[f64]> {
        if let Some(&(column, _)) = deltas.iter().find(|(c, _)| *c >= self.columns()) {
            return Err(param(format!("column {column} outside 0..{}", self.columns())));
        }
        let shift = if self.shifted { self.bound } else { 0.0 };
        for (j, counter) in self.counters.iter_mut().enumerate() {
            let v: i64 = deltas.iter().filter(|(c, _)| *c == j).map(|(_, d)| d).sum();
            self.outputs[j] = counter.step_weighted(v)? - shift;
        }
        Ok(&self.outputs)
    }

    pub fn outputs(&self) -> &[f64] {
        &self.outputs
    }
}

/// Free-function form of [`HistogramMechanism::step`].
pub fn histogram_step(hm: &mut HistogramMechanism, column: usize, v: i64) -> Result<Vec<f64>> {
    hm.step(column, v).map(<[f64]>::to_vec)
}
