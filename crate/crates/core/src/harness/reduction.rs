//! Mechanism interface for reduction drivers, exact oracles and the driver.

use serde::{Deserialize, Serialize};

use super::gadgets::GadgetInstance;
use crate::error::{input, state, Error, Result};
use crate::graph::{
    connected_components, core_number, count_degree_at_least, mincut, st_mincut, triangle_count,
    DynamicGraph, IncrementalMatching,
};
use crate::graph_mech::{DegreeHistogramMechanism, LadderMechanism};
use crate::sne::{topk_prefix_sums, SneMechanism};
use crate::stream::{StreamKind, Update};

/// One continual-release output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Release {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl Release {
    pub fn scalar(&self) -> Result<f64> {
        match self {
            Release::Scalar(x) => Ok(*x),
            Release::Vector(_) => Err(state("expected a scalar release, got a vector")),
        }
    }

    pub fn vector(&self) -> Result<&[f64]> {
        match self {
            Release::Vector(v) => Ok(v),
            Release::Scalar(_) => Err(state("expected a vector release, got a scalar")),
        }
    }

    fn shifted(self, bias: f64) -> Self {
        match self {
            Release::Scalar(x) => Release::Scalar(x + bias),
            Release::Vector(v) => Release::Vector(v.into_iter().map(|x| x + bias).collect()),
        }
    }
}

/// A continual-release mechanism as seen by the reduction driver.
pub trait Mechanism {
    fn observe(&mut self, update: &Update) -> Result<()>;
    /// Output after the most recent update.
    fn output(&mut self) -> Result<Release>;
}

impl Mechanism for LadderMechanism {
    fn observe(&mut self, update: &Update) -> Result<()> {
        self.step(update).map(|_| ())
    }

    fn output(&mut self) -> Result<Release> {
        Ok(Release::Scalar(self.released()))
    }
}

impl Mechanism for DegreeHistogramMechanism {
    fn observe(&mut self, update: &Update) -> Result<()> {
        self.step(update).map(|_| ())
    }

    fn output(&mut self) -> Result<Release> {
        Ok(Release::Vector(self.released().to_vec()))
    }
}

/// Releases the top-k sums (`k = 1..n`) of the proxy vector.
impl Mechanism for SneMechanism {
    fn observe(&mut self, update: &Update) -> Result<()> {
        self.step(update).map(|_| ())
    }

    fn output(&mut self) -> Result<Release> {
        Ok(Release::Vector(topk_prefix_sums(self.estimate())))
    }
}

/// Exact statistics an oracle can evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Statistic {
    Matching,
    CoreNumber(usize),
    /// Vertex counts for degrees `0..n`.
    DegreeHistogram,
    /// Top-k sums of the element frequency vector, `k = 1..n`.
    TopKPrefix,
    StMincut,
    Mincut,
    DegreeAtLeast(usize),
    EdgeCount,
    Triangles,
    Components,
}

impl Statistic {
    pub fn kind(&self) -> StreamKind {
        match self {
            Statistic::TopKPrefix => StreamKind::Elements,
            _ => StreamKind::Graph,
        }
    }

    pub fn evaluate(&self, g: &DynamicGraph) -> Result<Release> {
        let scalar = |x: usize| Ok(Release::Scalar(x as f64));
        match *self {
            Statistic::Matching => scalar(crate::graph::max_matching_size(g)),
            Statistic::CoreNumber(v) => scalar(core_number(g, v)),
            Statistic::DegreeHistogram => {
                let mut h = vec![0.0; g.vertex_count()];
                for v in 0..g.vertex_count() {
                    h[g.degree(v)] += 1.0;
                }
                Ok(Release::Vector(h))
            }
            Statistic::StMincut => scalar(st_mincut(g)?),
            Statistic::Mincut => scalar(mincut(g)),
            Statistic::DegreeAtLeast(t) => scalar(count_degree_at_least(g, t)),
            Statistic::EdgeCount => scalar(g.edge_count()),
            Statistic::Triangles => scalar(triangle_count(g)),
            Statistic::Components => scalar(connected_components(g)),
            Statistic::TopKPrefix => Err(state("top-k sums are defined on element streams")),
        }
    }
}

enum OracleState {
    Graph(DynamicGraph),
    /// Insert-only matching maintained incrementally.
    Matching(DynamicGraph, IncrementalMatching),
    Elements(Vec<i64>),
}

/// Noise-free mechanism that evaluates a statistic exactly on demand.
pub struct ExactOracle {
    statistic: Statistic,
    state: OracleState,
}

impl ExactOracle {
    pub fn new(statistic: Statistic, universe: usize) -> Self {
        let state = match statistic {
            Statistic::TopKPrefix => OracleState::Elements(vec![0; universe]),
            Statistic::Matching => {
                OracleState::Matching(DynamicGraph::new(universe), IncrementalMatching::new(universe))
            }
            _ => OracleState::Graph(DynamicGraph::new(universe)),
        };
        Self { statistic, state }
    }

    pub fn for_instance(g: &GadgetInstance) -> Result<Self> {
        if g.statistic.kind() != g.stream.kind() {
            return Err(input("oracle statistic does not match the gadget stream kind"));
        }
        Ok(Self::new(g.statistic, g.stream.universe()))
    }
}

impl Mechanism for ExactOracle {
    fn observe(&mut self, update: &Update) -> Result<()> {
        match &mut self.state {
            OracleState::Graph(g) => g.apply(update).map(|_| ()),
            OracleState::Matching(g, inc) => {
                if update.is_delete() {
                    // Fall back to recomputation once deletions appear.
                    g.apply(update)?;
                    self.state = OracleState::Graph(std::mem::take(g));
                    return Ok(());
                }
                if g.apply(update)? {
                    let (u, v) = update.edge().expect("membership changed on an edge update");
                    inc.insert_edge(u, v);
                }
                Ok(())
            }
            OracleState::Elements(f) => {
                match *update {
                    Update::InsertElement(i) | Update::DeleteElement(i) if i < f.len() => f[i] += update.sign(),
                    Update::Noop => {}
                    other => return Err(input(format!("oracle cannot apply {other}"))),
                }
                Ok(())
            }
        }
    }

    fn output(&mut self) -> Result<Release> {
        match &self.state {
            OracleState::Graph(g) => self.statistic.evaluate(g),
            OracleState::Matching(_, inc) => Ok(Release::Scalar(inc.size() as f64)),
            OracleState::Elements(f) => {
                Ok(Release::Vector(topk_prefix_sums(&f.iter().map(|&x| x as f64).collect::<Vec<_>>())))
            }
        }
    }
}

/// Adds a fixed offset to every output of the wrapped mechanism.
pub struct Biased<M> {
    pub inner: M,
    pub bias: f64,
}

impl<M: Mechanism> Mechanism for Biased<M> {
    fn observe(&mut self, update: &Update) -> Result<()> {
        self.inner.observe(update)
    }

    fn output(&mut self) -> Result<Release> {
        Ok(self.inner.output()?.shifted(self.bias))
    }
}

/// Decoded result for one query.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueryOutcome {
    pub query: usize,
    pub truth: usize,
    pub decoded: f64,
    /// `|decoded - truth|`.
    pub error: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub outcomes: Vec<QueryOutcome>,
    pub max_error: f64,
    pub mean_error: f64,
}

impl ReductionReport {
    fn from_outcomes(outcomes: Vec<QueryOutcome>) -> Self {
        let max_error = outcomes.iter().map(|o| o.error).fold(0.0, f64::max);
        let mean_error = if outcomes.is_empty() {
            0.0
        } else {
            outcomes.iter().map(|o| o.error).sum::<f64>() / outcomes.len() as f64
        };
        Self { outcomes, max_error, mean_error }
    }
}

/// Drives `mechanism` through the gadget stream, reads it on the timetable
/// and decodes every query. `alpha_hint` is the slack used by the TopK
/// decoder and ignored elsewhere.
pub fn run_inc_reduction(
    instance: &GadgetInstance,
    mechanism: &mut dyn Mechanism,
    alpha_hint: f64,
) -> Result<ReductionReport> {
    let mut reads: Vec<(usize, usize, bool)> = Vec::new();
    for (idx, r) in instance.timetable.iter().enumerate() {
        if let Some(b) = r.before {
            reads.push((b, idx, true));
        }
        reads.push((r.after, idx, false));
    }
    reads.sort_by_key(|&(step, _, is_before)| (step, !is_before));
    let mut before = vec![None; instance.timetable.len()];
    let mut after = vec![None; instance.timetable.len()];
    let mut next = 0;
    let wrap = |step: usize| move |e: Error| Error::Harness { step, source: Box::new(e) };
    for (idx, update) in instance.stream.updates().iter().enumerate() {
        let step = idx + 1;
        mechanism.observe(update).map_err(wrap(step))?;
        let mut current: Option<Release> = None;
        while next < reads.len() && reads[next].0 == step {
            if current.is_none() {
                current = Some(mechanism.output().map_err(wrap(step))?);
            }
            let (_, q, is_before) = reads[next];
            let slot = if is_before { &mut before[q] } else { &mut after[q] };
            *slot = current.clone();
            next += 1;
        }
    }
    let mut outcomes = Vec::with_capacity(instance.timetable.len());
    for (idx, r) in instance.timetable.iter().enumerate() {
        let a = after[idx].as_ref().ok_or_else(|| state(format!("query {} was never read", r.query)))?;
        let out = instance.decoder.decode(r.query, before[idx].as_ref(), a, alpha_hint)?;
        outcomes.push(QueryOutcome {
            query: r.query,
            truth: r.truth,
            decoded: out.value,
            error: (out.value - r.truth as f64).abs(),
            flagged: out.flagged,
        });
    }
    Ok(ReductionReport::from_outcomes(outcomes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::gadgets::{build_matching_gadget, GadgetProblem};
    use crate::harness::instances::InnerProductInstance;
    use crate::harness::topk::build_topk_reduction;
    use crate::privacy::RandomSource;

    fn instance(d: usize, seed: u64) -> InnerProductInstance {
        InnerProductInstance::random(d, 1.0, &mut RandomSource::new(seed)).unwrap()
    }

    #[test]
    fn exact_matching_round_trip() {
        let g = build_matching_gadget(&instance(5, 1)).unwrap();
        let mut oracle = ExactOracle::for_instance(&g).unwrap();
        let report = run_inc_reduction(&g, &mut oracle, 0.0).unwrap();
        assert_eq!(report.max_error, 0.0);
        assert_eq!(g.problem, GadgetProblem::Matching);
    }

    #[test]
    fn constant_bias_cancels_in_difference() {
        let g = build_matching_gadget(&instance(4, 2)).unwrap();
        let mut biased = Biased { inner: ExactOracle::for_instance(&g).unwrap(), bias: 3.0 };
        assert_eq!(run_inc_reduction(&g, &mut biased, 0.0).unwrap().max_error, 0.0);
    }

    #[test]
    fn topk_exact_is_off_by_one() {
        let g = build_topk_reduction(&instance(5, 3)).unwrap();
        let mut oracle = ExactOracle::for_instance(&g).unwrap();
        let report = run_inc_reduction(&g, &mut oracle, 0.0).unwrap();
        assert!(report.outcomes.iter().all(|o| o.decoded == (o.truth + 1) as f64));
    }

    struct Refuser;

    impl Mechanism for Refuser {
        fn observe(&mut self, update: &Update) -> Result<()> {
            if update.is_noop() {
                Err(input("no-ops not accepted"))
            } else {
                Ok(())
            }
        }

        fn output(&mut self) -> Result<Release> {
            Ok(Release::Scalar(0.0))
        }
    }

    #[test]
    fn refusal_reports_step() {
        let inst = InnerProductInstance::new(vec![true, false], vec![vec![true, true]]).unwrap();
        let g = build_matching_gadget(&inst).unwrap();
        match run_inc_reduction(&g, &mut Refuser, 0.0) {
            // Two H_init edges, e_1, then the no-op for x_2 = 0.
            Err(Error::Harness { step, .. }) => assert_eq!(step, 4),
            other => panic!("unexpected {other:?}"),
        }
    }
}
