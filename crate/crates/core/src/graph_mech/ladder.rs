use super::statistic::{LadderTarget, StatisticTracker};
use crate::error::{param, Result};
use crate::privacy::{PrivacyBudget, RandomSource};
use crate::stream::Update;
use crate::svt::{svt_alpha, SvtInstance};

/// Releases a monotone graph statistic as the highest threshold rung
/// `L + j k` that the sparse vector technique has certified as crossed.
///
/// Decreasing statistics are handled by negation, so internally the tracked
/// value always rises from `L` toward `R`.
#[derive(Debug, Clone)]
pub struct LadderMechanism {
    tracker: StatisticTracker,
    svt: SvtInstance,
    lo: i64,
    step: i64,
    cap: usize,
    rungs: usize,
    horizon: usize,
    t: usize,
    saturated: bool,
}

impl LadderMechanism {
    pub fn new(
        target: LadderTarget,
        n: usize,
        horizon: usize,
        budget: &PrivacyBudget,
        rng: RandomSource,
    ) -> Result<Self> {
        let (l, r) = target.range(n, horizon);
        let k = default_step(r - l, budget.delta);
        Self::with_step(target, n, horizon, budget, k, rng)
    }

    /// Ladder with an explicit rung spacing `k`.
    pub fn with_step(
        target: LadderTarget,
        n: usize,
        horizon: usize,
        budget: &PrivacyBudget,
        k: i64,
        rng: RandomSource,
    ) -> Result<Self> {
        if horizon == 0 {
            return Err(param("ladder horizon must be positive"));
        }
        if k < 1 {
            return Err(param(format!("rung spacing must be at least 1, got {k}")));
        }
        let tracker = StatisticTracker::new(target, n)?;
        let (l, r) = target.range(n, horizon);
        let (lo, hi) = if target.is_increasing() { (l, r) } else { (-r, -l) };
        let cap = rung_cap(hi - lo, k);
        let svt = SvtInstance::with_sensitivity(budget, cap, target.sensitivity(), rng)?;
        Ok(Self { tracker, svt, lo, step: k, cap, rungs: 0, horizon, t: 0, saturated: false })
    }

    pub fn target(&self) -> LadderTarget {
        self.tracker.target()
    }

    /// `[L, R]` in the statistic's own orientation.
    pub fn range(&self) -> (i64, i64) {
        self.target().range(self.tracker.graph().vertex_count(), self.horizon)
    }

    pub fn step_size(&self) -> i64 {
        self.step
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn is_saturated(&self) -> bool {
        self.saturated
    }

    pub fn jumps(&self) -> usize {
        self.rungs
    }

    pub fn svt_queries(&self) -> usize {
        self.svt.queries()
    }

    /// Exact statistic on the current graph.
    pub fn true_value(&self) -> i64 {
        self.tracker.value()
    }

    pub fn released(&self) -> f64 {
        self.orient(self.lo + self.rungs as i64 * self.step) as f64
    }

    /// SVT accuracy radius for this ladder's query budget (`T + c` queries).
    pub fn svt_alpha(&self, budget: &PrivacyBudget) -> f64 {
        svt_alpha(budget, self.horizon + self.cap, self.cap, self.target().sensitivity())
    }

    /// Error allowance: SVT accuracy radius plus rung granularity.
    pub fn error_allowance(&self, budget: &PrivacyBudget) -> f64 {
        self.svt_alpha(budget) + self.step as f64
    }

    fn orient(&self, x: i64) -> i64 {
        if self.target().is_increasing() {
            x
        } else {
            -x
        }
    }

    pub fn step(&mut self, update: &Update) -> Result<f64> {
        if self.t >= self.horizon {
            return Err(crate::error::state(format!("ladder horizon {} exhausted", self.horizon)));
        }
        let value = self.tracker.apply(update)?;
        self.t += 1;
        let q = self.orient(value) as f64;
        while !self.saturated {
            let threshold = (self.lo + (self.rungs as i64 + 1) * self.step) as f64;
            if !self.svt.query(q, threshold)?.is_positive() {
                break;
            }
            self.rungs += 1;
            if self.svt.is_halted() {
                self.saturated = true;
            }
        }
        Ok(self.released())
    }
}

/// Free-function form of [`LadderMechanism::step`].
pub fn ladder_step(m: &mut LadderMechanism, update: &Update) -> Result<f64> {
    m.step(update)
}

/// `ceil(sqrt(l))` for pure DP, `ceil(l^(1/3))` otherwise; at least 1.
pub fn default_step(length: i64, delta: f64) -> i64 {
    let l = length.max(0) as f64;
    let k = if delta == 0.0 { l.sqrt() } else { l.cbrt() };
    // Guard against floating error on perfect powers.
    let mut k = (k - 1e-9).ceil().max(1.0) as i64;
    while delta == 0.0 && k > 1 && (k - 1) * (k - 1) >= length {
        k -= 1;
    }
    k
}

fn rung_cap(length: i64, k: i64) -> usize {
    (((length.max(0) + k - 1) / k).max(1)) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::privacy::NoiseMode;

    fn off() -> PrivacyBudget {
        PrivacyBudget::pure(1.0, 0.1).unwrap().with_noise(NoiseMode::Off)
    }

    #[test]
    fn perfect_matching_releases_crossed_rungs() {
        let mut m =
            LadderMechanism::with_step(LadderTarget::Matching, 10, 5, &off(), 2, RandomSource::new(0))
                .unwrap();
        let out: Vec<f64> =
            (0..5).map(|i| m.step(&Update::insert_edge(2 * i, 2 * i + 1)).unwrap()).collect();
        assert_eq!(out, vec![0.0, 2.0, 2.0, 4.0, 4.0]);
    }

    #[test]
    fn empty_stream_stays_at_lower_end() {
        let mut m = LadderMechanism::new(LadderTarget::Matching, 10, 6, &off(), RandomSource::new(0)).unwrap();
        for _ in 0..6 {
            assert_eq!(m.step(&Update::Noop).unwrap(), 0.0);
        }
    }

    #[test]
    fn components_ladder_descends() {
        let mut m = LadderMechanism::with_step(
            LadderTarget::ConnectedComponents,
            6,
            10,
            &off(),
            1,
            RandomSource::new(0),
        )
        .unwrap();
        assert_eq!(m.released(), 6.0);
        assert_eq!(m.step(&Update::insert_edge(0, 1)).unwrap(), 5.0);
        assert_eq!(m.step(&Update::insert_edge(2, 3)).unwrap(), 4.0);
        assert_eq!(m.step(&Update::insert_edge(0, 2)).unwrap(), 3.0);
    }

    #[test]
    fn deletions_rejected() {
        let mut m = LadderMechanism::new(LadderTarget::Matching, 4, 4, &off(), RandomSource::new(0)).unwrap();
        assert!(matches!(m.step(&Update::delete_edge(0, 1)), Err(crate::Error::Input(_))));
    }

    #[test]
    fn default_steps() {
        assert_eq!(default_step(30, 0.0), 6);
        assert_eq!(default_step(25, 0.0), 5);
        assert_eq!(default_step(27, 1e-6), 3);
        assert_eq!(default_step(28, 1e-6), 4);
        assert_eq!(default_step(0, 0.0), 1);
        assert_eq!(rung_cap(30, 6), 5);
        assert_eq!(rung_cap(31, 6), 6);
        assert_eq!(rung_cap(0, 1), 1);
    }

    #[test]
    fn freezes_when_svt_halts() {
        let mut m =
            LadderMechanism::with_step(LadderTarget::Matching, 6, 6, &off(), 1, RandomSource::new(0))
                .unwrap();
        assert_eq!(m.cap(), 3);
        for i in 0..3 {
            m.step(&Update::insert_edge(2 * i, 2 * i + 1)).unwrap();
        }
        assert!(m.is_saturated());
        assert_eq!(m.step(&Update::Noop).unwrap(), 3.0);
    }
}
