use super::composition::advanced_composition_epsilon;
use crate::counting::HistogramMechanism;
use crate::error::{input, param, Result};
use crate::graph::DynamicGraph;
use crate::privacy::{PrivacyBudget, RandomSource};
use crate::stream::Update;

/// Per-counter input sensitivity assumed when calibrating noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DegreeSensitivity {
    /// Both endpoints may each enter and leave the same degree: l1 change up to 8.
    #[default]
    Conservative,
    /// Two units per endpoint, four in total.
    Claimed,
}

impl DegreeSensitivity {
    pub fn value(self) -> f64 {
        match self {
            DegreeSensitivity::Conservative => 8.0,
            DegreeSensitivity::Claimed => 4.0,
        }
    }
}

/// Continual degree histogram from one counter per degree `0..n`, each run
/// at `eps' = eps / (2 sqrt(2 n ln(1/delta)))`.
#[derive(Debug, Clone)]
pub struct DegreeHistogramMechanism {
    graph: DynamicGraph,
    counters: HistogramMechanism,
    counter_epsilon: f64,
    released: Vec<f64>,
}

impl DegreeHistogramMechanism {
    pub fn new(n: usize, horizon: usize, budget: &PrivacyBudget, rng: RandomSource) -> Result<Self> {
        Self::with_sensitivity(n, horizon, budget, DegreeSensitivity::default(), rng)
    }

    pub fn with_sensitivity(
        n: usize,
        horizon: usize,
        budget: &PrivacyBudget,
        sensitivity: DegreeSensitivity,
        rng: RandomSource,
    ) -> Result<Self> {
        budget.validate()?;
        if n < 2 {
            return Err(param("degree histogram needs at least two vertices"));
        }
        if budget.delta == 0.0 {
            return Err(param("degree histogram composition needs delta > 0"));
        }
        let counter_epsilon = advanced_composition_epsilon(n, budget.epsilon, budget.delta)?;
        let counter_budget = PrivacyBudget { epsilon: counter_epsilon, ..*budget };
        let counters = HistogramMechanism::with_sensitivity(
            n,
            horizon,
            &counter_budget,
            sensitivity.value(),
            false,
            rng,
        )?;
        let mut released = vec![0.0; n];
        released[0] = n as f64;
        Ok(Self { graph: DynamicGraph::new(n), counters, counter_epsilon, released })
    }

    pub fn counter_epsilon(&self) -> f64 {
        self.counter_epsilon
    }

    /// Calibrated simultaneous error bound of the counters.
    pub fn bound(&self) -> f64 {
        self.counters.bound()
    }

    /// Most recent output (exact before the first step).
    pub fn released(&self) -> &[f64] {
        &self.released
    }

    pub fn graph(&self) -> &DynamicGraph {
        &self.graph
    }

    /// Counter inputs `(degree, delta)` that an insertion of `(u, v)` produces.
    pub fn counter_deltas(graph: &DynamicGraph, u: usize, v: usize) -> Vec<(usize, i64)> {
        if graph.has_edge(u, v) {
            return Vec::new();
        }
        let mut out = Vec::with_capacity(4);
        for x in [u, v] {
            let d = graph.degree(x);
            out.push((d, -1));
            out.push((d + 1, 1));
        }
        out
    }

    /// Consumes one update and returns noisy counts for degrees `0..n`.
    pub fn step(&mut self, update: &Update) -> Result<Vec<f64>> {
        let deltas = match *update {
            Update::Noop => Vec::new(),
            Update::InsertEdge(u, v) => {
                let n = self.graph.vertex_count();
                if u >= n || v >= n || u == v {
                    return Err(input(format!("edge ({u}, {v}) invalid for {n} vertices")));
                }
                let deltas = Self::counter_deltas(&self.graph, u, v);
                self.graph.insert_edge(u, v)?;
                deltas
            }
            Update::DeleteEdge(..) => {
                return Err(input("insertions-only mechanism received a deletion"));
            }
            other => return Err(input(format!("graph mechanism received element update {other}"))),
        };
        let n = self.graph.vertex_count() as f64;
        let mut out = self.counters.step_sparse(&deltas)?.to_vec();
        // Every vertex starts at degree 0; the counter tracks the change.
        out[0] += n;
        self.released.clone_from(&out);
        Ok(out)
    }
}

/// Free-function form of [`DegreeHistogramMechanism::step`].
pub fn private_degree_histogram_step(
    m: &mut DegreeHistogramMechanism,
    update: &Update,
) -> Result<Vec<f64>> {
    m.step(update)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::privacy::NoiseMode;

    fn off() -> PrivacyBudget {
        PrivacyBudget::new(1.0, 1e-6, 0.1, NoiseMode::Off).unwrap()
    }

    #[test]
    fn exact_counts_with_noise_off() {
        let mut m = DegreeHistogramMechanism::new(4, 4, &off(), RandomSource::new(0)).unwrap();
        m.step(&Update::insert_edge(0, 1)).unwrap();
        let out = m.step(&Update::insert_edge(0, 2)).unwrap();
        assert_eq!(out, vec![1.0, 2.0, 1.0, 0.0]);
    }

    #[test]
    fn idle_steps_leave_zero_counts() {
        let mut m = DegreeHistogramMechanism::new(5, 3, &off(), RandomSource::new(0)).unwrap();
        for _ in 0..3 {
            assert_eq!(m.step(&Update::Noop).unwrap(), vec![5.0, 0.0, 0.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn counter_epsilon_from_composition() {
        let m = DegreeHistogramMechanism::new(32, 10, &off(), RandomSource::new(0)).unwrap();
        let expect = 1.0 / (2.0 * (64.0 * (1e6f64).ln()).sqrt());
        assert!((m.counter_epsilon() - expect).abs() < 1e-15);
    }

    #[test]
    fn duplicate_insert_is_idle() {
        let mut m = DegreeHistogramMechanism::new(3, 3, &off(), RandomSource::new(0)).unwrap();
        m.step(&Update::insert_edge(0, 1)).unwrap();
        let out = m.step(&Update::insert_edge(1, 0)).unwrap();
        assert_eq!(out, vec![1.0, 2.0, 0.0]);
    }

    #[test]
    fn rejects_deletions_and_pure_budget() {
        let mut m = DegreeHistogramMechanism::new(3, 3, &off(), RandomSource::new(0)).unwrap();
        assert!(m.step(&Update::delete_edge(0, 1)).is_err());
        let pure = PrivacyBudget::pure(1.0, 0.1).unwrap();
        assert!(DegreeHistogramMechanism::new(3, 3, &pure, RandomSource::new(0)).is_err());
    }
}
