use crate::error::{param, state, Result};
use crate::privacy::{check_scale, NoiseMode, PrivacyBudget, RandomSource};

/// Binary-tree continual counter over a fixed horizon.
///
/// The horizon is padded to the next power of two `P = 2^h`. Node `(l, k)`
/// covers steps `k*2^l + 1 ..= (k+1)*2^l`; every input contributes to the
/// `h + 1` nodes on its root-to-leaf path. The prefix at step `t` is the sum
/// of the nodes picked out by the set bits of `t`, each released once with
/// its own `Lap(sensitivity * (h + 1) / epsilon)` noise and reused afterwards.
#[derive(Debug, Clone)]
pub struct TreeCounter {
    horizon: usize,
    height: usize,
    scale: f64,
    mode: NoiseMode,
    rng: RandomSource,
    t: usize,
    /// Running sum of the still-open node at each level.
    open: Vec<i64>,
    /// Noisy value of the node used at each level by the current prefix.
    released: Vec<f64>,
}

impl TreeCounter {
    pub fn new(horizon: usize, budget: &PrivacyBudget, rng: RandomSource) -> Result<Self> {
        Self::with_sensitivity(horizon, budget, 1.0, rng)
    }

    /// Counter whose per-step inputs may change by up to `sensitivity` in
    /// l1 between neighboring streams; noise scales linearly with it.
    pub fn with_sensitivity(
        horizon: usize,
        budget: &PrivacyBudget,
        sensitivity: f64,
        rng: RandomSource,
    ) -> Result<Self> {
        budget.validate()?;
        if horizon == 0 {
            return Err(param("counter horizon must be positive"));
        }
        if !(sensitivity > 0.0 && sensitivity.is_finite()) {
            return Err(param(format!("sensitivity must be positive, got {sensitivity}")));
        }
        let height = tree_height(horizon);
        let scale = node_noise_scale(height, budget.epsilon, sensitivity);
        check_scale(scale)?;
        Ok(Self {
            horizon,
            height,
            scale,
            mode: budget.noise_mode,
            rng,
            t: 0,
            open: vec![0; height + 1],
            released: vec![0.0; height + 1],
        })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// `ceil(log2 T)`; the tree has `height + 1` levels.
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn noise_scale(&self) -> f64 {
        self.scale
    }

    /// Number of steps consumed so far.
    pub fn time(&self) -> usize {
        self.t
    }

    /// Feeds `v` in `{-1, 0, 1}` and returns the noisy prefix sum.
    pub fn step(&mut self, v: i64) -> Result<f64> {
        if !(-1..=1).contains(&v) {
            return Err(param(format!("counter input must be in {{-1, 0, 1}}, got {v}")));
        }
        self.step_weighted(v)
    }

    /// Feeds an arbitrary integer; the caller accounts for the larger
    /// sensitivity when constructing the counter.
    pub fn step_weighted(&mut self, v: i64) -> Result<f64> {
        if self.t >= self.horizon {
            return Err(state(format!("counter horizon {} exhausted", self.horizon)));
        }
        self.t += 1;
        for sum in &mut self.open {
            *sum += v;
        }
        let top = self.t.trailing_zeros() as usize;
        // Nodes at levels 0..=top close at this step. Only the one at `top`
        // enters the prefix decomposition of t; the lower ones are right
        // children and never released.
        for level in 0..top {
            self.released[level] = 0.0;
            self.open[level] = 0;
        }
        let noise = self.rng.laplace_unchecked(self.scale, self.mode);
        self.released[top] = self.open[top] as f64 + noise;
        self.open[top] = 0;
        Ok(self.current())
    }

    /// The noisy prefix sum at the current step (0 before the first step).
    pub fn current(&self) -> f64 {
        self.released.iter().sum()
    }
}

/// Free-function form of [`TreeCounter::step`].
pub fn counter_step(counter: &mut TreeCounter, v: i64) -> Result<f64> {
    counter.step(v)
}

pub(crate) fn tree_height(horizon: usize) -> usize {
    horizon.next_power_of_two().trailing_zeros() as usize
}

pub(crate) fn node_noise_scale(height: usize, epsilon: f64, sensitivity: f64) -> f64 {
    sensitivity * (height + 1) as f64 / epsilon
}

/// Exact partial sums of every node in the dyadic tree over `inputs`,
/// ordered level by level (leaves first). Used to audit which nodes an input
/// change can reach.
pub fn node_partial_sums(inputs: &[i64]) -> Vec<Vec<i64>> {
    let padded = inputs.len().max(1).next_power_of_two();
    let mut level: Vec<i64> = inputs.to_vec();
    level.resize(padded, 0);
    let mut levels = vec![level];
    while levels.last().map_or(0, Vec::len) > 1 {
        let prev = levels.last().unwrap();
        let next = prev.chunks(2).map(|c| c[0] + c[1]).collect();
        levels.push(next);
    }
    levels
}
