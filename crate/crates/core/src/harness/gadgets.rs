//! Incremental inner-product gadgets for matching, k-core and degree histograms.

use serde::{Deserialize, Serialize};

use super::instances::InnerProductInstance;
use super::msf::MsfProblem;
use super::reduction::{ExactOracle, Mechanism, Release, Statistic};
use crate::error::{param, state, Result};
use crate::stream::{Update, UpdateStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GadgetProblem {
    Matching,
    KCore,
    DegHist,
    TopK,
    Msf(MsfProblem),
}

impl GadgetProblem {
    pub fn name(&self) -> String {
        match self {
            GadgetProblem::Matching => "matching".into(),
            GadgetProblem::KCore => "kcore".into(),
            GadgetProblem::DegHist => "deghist".into(),
            GadgetProblem::TopK => "topk".into(),
            GadgetProblem::Msf(p) => format!("msf-{}", p.name()),
        }
    }
}

/// Maps mechanism outputs at a query's read steps to a recovered value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "decoder", rename_all = "snake_case")]
pub enum Decoder {
    /// `after - before`.
    Difference,
    /// `after - 2 j d`.
    CoreOffset { d: usize },
    /// Entry `j + 1` of a degree histogram.
    Projection,
    /// Smallest `k` with `A(k) < (j + 1) k - alpha`, or `n + 1` if none.
    TopKSlope { n: usize },
    /// `after / weight`.
    Scaled { weight: f64 },
}

/// Value recovered for one query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decoded {
    pub value: f64,
    /// Set when the TopK search found no qualifying `k`.
    pub flagged: bool,
}

impl Decoder {
    /// Decodes query `j` (1-based) from the releases at its read steps.
    pub fn decode(&self, j: usize, before: Option<&Release>, after: &Release, alpha: f64) -> Result<Decoded> {
        let plain = |value| Ok(Decoded { value, flagged: false });
        match *self {
            Decoder::Difference => {
                let b = before.ok_or_else(|| state("difference decoder needs a prior reading"))?;
                plain(after.scalar()? - b.scalar()?)
            }
            Decoder::CoreOffset { d } => plain(after.scalar()? - (2 * j * d) as f64),
            Decoder::Projection => {
                let v = after.vector()?;
                v.get(j + 1)
                    .map(|&x| Decoded { value: x, flagged: false })
                    .ok_or_else(|| state(format!("histogram has no degree {}", j + 1)))
            }
            Decoder::TopKSlope { n } => {
                let prefix = after.vector()?;
                if prefix.len() < n {
                    return Err(state(format!("expected {n} top-k values, got {}", prefix.len())));
                }
                let slope = (j + 1) as f64;
                match (1..=n).find(|&k| prefix[k - 1] < slope * k as f64 - alpha) {
                    Some(k) => plain(k as f64),
                    None => Ok(Decoded { value: (n + 1) as f64, flagged: true }),
                }
            }
            Decoder::Scaled { weight } => plain(after.scalar()? / weight),
        }
    }
}

/// Read steps of one query; steps count updates consumed (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reading {
    /// 1-based query or column index.
    pub query: usize,
    pub before: Option<usize>,
    pub after: usize,
    /// Exact quantity the decoder targets: `<x, q^j>` or the column sum.
    pub truth: usize,
}

/// A generated reduction stream with its read schedule and decoder.
#[derive(Debug, Clone)]
pub struct GadgetInstance {
    pub problem: GadgetProblem,
    pub stream: UpdateStream,
    pub timetable: Vec<Reading>,
    pub decoder: Decoder,
    /// What an exact oracle for this gadget evaluates.
    pub statistic: Statistic,
    /// Declared vertex (or element) budget `v(d)` or `nu(n)`.
    pub vertex_budget: usize,
    /// Declared length budget `t(d)` or `xi(n) + 2 n d`.
    pub step_budget: usize,
    pub weight: f64,
}

impl GadgetInstance {
    /// Offset between an exact decode and the truth (1 for TopK, else 0).
    pub fn exact_offset(&self) -> usize {
        usize::from(self.problem == GadgetProblem::TopK)
    }

    /// Readings of an exact oracle at every read step, as `(before, after)`.
    pub fn exact_readings(&self) -> Result<Vec<(Option<Release>, Release)>> {
        let mut oracle = ExactOracle::for_instance(self)?;
        let mut wanted: Vec<usize> =
            self.timetable.iter().flat_map(|r| r.before.into_iter().chain([r.after])).collect();
        wanted.sort_unstable();
        wanted.dedup();
        let mut at = std::collections::HashMap::new();
        let mut next = 0;
        for (idx, u) in self.stream.updates().iter().enumerate() {
            oracle.observe(u)?;
            if next < wanted.len() && wanted[next] == idx + 1 {
                at.insert(idx + 1, oracle.output()?);
                next += 1;
            }
        }
        Ok(self
            .timetable
            .iter()
            .map(|r| (r.before.map(|b| at[&b].clone()), at[&r.after].clone()))
            .collect())
    }
}

/// Accumulates a gadget stream and its read steps.
pub(crate) struct StreamBuilder {
    pub updates: Vec<Update>,
    pub timetable: Vec<Reading>,
}

impl StreamBuilder {
    pub fn new() -> Self {
        Self { updates: Vec::new(), timetable: Vec::new() }
    }

    pub fn insert(&mut self, u: usize, v: usize) {
        self.updates.push(Update::insert_edge(u, v));
    }

    pub fn push(&mut self, u: Update) {
        self.updates.push(u);
    }

    pub fn now(&self) -> usize {
        self.updates.len()
    }
}

fn check_dimension(inst: &InnerProductInstance) -> Result<(usize, usize)> {
    let d = inst.dimension();
    if d == 0 {
        return Err(param("gadget dimension d must be at least 1"));
    }
    Ok((d, inst.query_count()))
}

/// Matching gadget on `U^0..U^{m+1}` and `V^0..V^m`, each of size `d`.
///
/// The matching number is `j d` before query `j` and `j d + <x, q^j>` after
/// its `S^j` edges are in.
pub fn build_matching_gadget(inst: &InnerProductInstance) -> Result<GadgetInstance> {
    let (d, m) = check_dimension(inst)?;
    let u = |j: usize, i: usize| j * d + i;
    let v = |j: usize, i: usize| (m + 2) * d + j * d + i;
    let vertices = d * (2 * (m + 1) + 1);
    let mut b = StreamBuilder::new();
    for i in 0..d {
        b.insert(v(0, i), u(1, i));
    }
    for i in 0..d {
        if inst.x[i] {
            b.insert(u(0, i), v(0, i));
        } else {
            b.push(Update::Noop);
        }
    }
    for j in 1..=m {
        let q = &inst.queries[j - 1];
        let before = b.now();
        for i in (0..d).filter(|&i| q[i]) {
            b.insert(u(j, i), v(j, i));
        }
        b.timetable.push(Reading { query: j, before: Some(before), after: b.now(), truth: inst.answer(j) });
        for i in 0..d {
            b.insert(v(j, i), u(j + 1, i));
        }
        for i in (0..d).filter(|&i| !q[i]) {
            b.insert(u(j, i), v(j, i));
        }
    }
    Ok(GadgetInstance {
        problem: GadgetProblem::Matching,
        stream: UpdateStream::graph(vertices, b.updates)?,
        timetable: b.timetable,
        decoder: Decoder::Difference,
        statistic: Statistic::Matching,
        vertex_budget: vertices,
        step_budget: 2 * d + 2 * m * d,
        weight: 1.0,
    })
}

/// K-core gadget around a target vertex `v = 0`, with `U` of size `d` and
/// layers `V^j, W^j` (size `d` each) for `j = 0..m` inside one clique.
///
/// Core number of `v` is `2 j d` before query `j` and `2 j d + <x, q^j>` after
/// its `S^j` edges. For `d = 1` the usual degree certificate does not apply
/// and the construction is checked by direct peeling instead.
pub fn build_kcore_gadget(inst: &InnerProductInstance) -> Result<GadgetInstance> {
    let (d, m) = check_dimension(inst)?;
    let target = 0;
    let u = |i: usize| 1 + i;
    let layer_v = |j: usize, i: usize| 1 + d + 2 * j * d + i;
    let layer_w = |j: usize, i: usize| 1 + d + 2 * j * d + d + i;
    let vertices = 1 + d + 2 * d * (m + 1);
    let clique_lo = 1 + d;
    let mut b = StreamBuilder::new();
    for a in clique_lo..vertices {
        for c in a + 1..vertices {
            b.insert(a, c);
        }
    }
    for i in 0..d {
        b.insert(target, layer_v(0, i));
        b.insert(target, layer_w(0, i));
    }
    for i in 0..d {
        for k in 0..d {
            b.insert(u(i), layer_v(0, k));
        }
    }
    for i in 0..d {
        if inst.x[i] {
            b.insert(target, u(i));
        } else {
            b.push(Update::Noop);
        }
    }
    for j in 1..=m {
        let q = &inst.queries[j - 1];
        let attach = |b: &mut StreamBuilder, i: usize| {
            for k in 0..d {
                b.insert(u(i), layer_w(j - 1, k));
                b.insert(u(i), layer_v(j, k));
            }
        };
        let before = b.now();
        for i in (0..d).filter(|&i| q[i]) {
            attach(&mut b, i);
        }
        b.timetable.push(Reading { query: j, before: Some(before), after: b.now(), truth: inst.answer(j) });
        for i in (0..d).filter(|&i| !q[i]) {
            attach(&mut b, i);
        }
        for k in 0..d {
            b.insert(target, layer_v(j, k));
            b.insert(target, layer_w(j, k));
        }
    }
    let clique = 2 * d * (m + 1);
    let gadget = GadgetInstance {
        problem: GadgetProblem::KCore,
        stream: UpdateStream::graph(vertices, b.updates)?,
        timetable: b.timetable,
        decoder: Decoder::CoreOffset { d },
        statistic: Statistic::CoreNumber(target),
        vertex_budget: vertices,
        step_budget: clique * (clique - 1) / 2 + 2 * d + d * d + d + m * (2 * d * d + 2 * d),
        weight: 1.0,
    };
    if d < 2 {
        certify_kcore(&gadget)?;
    }
    Ok(gadget)
}

fn certify_kcore(g: &GadgetInstance) -> Result<()> {
    let Decoder::CoreOffset { d } = g.decoder else { unreachable!() };
    for (r, (before, after)) in g.timetable.iter().zip(g.exact_readings()?) {
        let base = (2 * r.query * d) as f64;
        let ok = before.is_some_and(|b| b.scalar().ok() == Some(base))
            && after.scalar().ok() == Some(base + r.truth as f64);
        if !ok {
            return Err(param(format!("k-core gadget certificate fails for d = {d} at query {}", r.query)));
        }
    }
    Ok(())
}

/// Degree-histogram gadget: cliques on `U u V` and `X u Y` (`m + 3` vertices
/// each), `|U| = m - d + 3`, `|V| = |W| = d`, `|X| = m`, `|Y| = 3`.
///
/// After `S^j`, exactly `<x, q^j>` vertices (in `W`) have degree `j + 1`.
pub fn build_deghist_gadget(inst: &InnerProductInstance) -> Result<GadgetInstance> {
    let (d, m) = check_dimension(inst)?;
    if m + 3 < d {
        return Err(param(format!("degree-histogram gadget needs m >= d - 3, got m = {m}, d = {d}")));
    }
    let u_size = m + 3 - d;
    let v = |i: usize| u_size + i;
    let w = |i: usize| u_size + d + i;
    let x_vertex = |j: usize| u_size + 2 * d + (j - 1);
    let xy_lo = u_size + 2 * d;
    let vertices = u_size + 2 * d + m + 3;
    let mut b = StreamBuilder::new();
    for lo in [0, xy_lo] {
        for a in lo..lo + m + 3 {
            for c in a + 1..lo + m + 3 {
                b.insert(a, c);
            }
        }
    }
    for i in 0..d {
        if inst.x[i] {
            b.insert(v(i), w(i));
        } else {
            b.push(Update::Noop);
        }
    }
    for j in 1..=m {
        let q = &inst.queries[j - 1];
        let before = b.now();
        for i in (0..d).filter(|&i| q[i]) {
            b.insert(w(i), x_vertex(j));
        }
        b.timetable.push(Reading { query: j, before: Some(before), after: b.now(), truth: inst.answer(j) });
        for i in (0..d).filter(|&i| !q[i]) {
            b.insert(w(i), x_vertex(j));
        }
    }
    Ok(GadgetInstance {
        problem: GadgetProblem::DegHist,
        stream: UpdateStream::graph(vertices, b.updates)?,
        timetable: b.timetable,
        decoder: Decoder::Projection,
        statistic: Statistic::DegreeHistogram,
        vertex_budget: vertices,
        step_budget: (m + 3) * (m + 2) + d + m * d,
        weight: 1.0,
    })
}
