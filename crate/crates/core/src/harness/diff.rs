//! Neighboring-stream checks at the stream level and at the level of the
//! counter inputs that mechanisms derive from a stream.

use std::collections::BTreeSet;

use serde::Serialize;

use super::gadgets::{build_deghist_gadget, build_kcore_gadget, build_matching_gadget, GadgetProblem};
use super::instances::{InnerProductInstance, MarginalsInstance};
use super::msf::build_msf_stream;
use super::topk::build_topk_reduction;
use crate::error::{input, param, Result};
use crate::graph::DynamicGraph;
use crate::graph_mech::DegreeHistogramMechanism;
use crate::privacy::RandomSource;
use crate::sne::{level_stream, SneParameters};
use crate::stream::{StreamKind, Update, UpdateStream};

/// Differences in one derived counter column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ColumnDiff {
    pub column: usize,
    /// Steps at which the two input sequences differ.
    pub entries: usize,
    /// l1 distance between the two input sequences.
    pub l1: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct NeighborReport {
    /// Index of the flipped secret bit or row, when generated here.
    pub flipped: Option<usize>,
    /// 1-based stream positions where the two streams differ.
    pub positions: Vec<usize>,
    pub touched_edges: BTreeSet<(usize, usize)>,
    pub touched_elements: BTreeSet<usize>,
    /// Columns with at least one differing entry.
    pub columns: Vec<ColumnDiff>,
}

impl NeighborReport {
    pub fn total_entries(&self) -> usize {
        self.columns.iter().map(|c| c.entries).sum()
    }

    pub fn total_l1(&self) -> i64 {
        self.columns.iter().map(|c| c.l1).sum()
    }

    pub fn max_column_l1(&self) -> i64 {
        self.columns.iter().map(|c| c.l1).max().unwrap_or(0)
    }
}

/// Position-wise comparison of two equally long streams.
pub fn diff_streams(a: &UpdateStream, b: &UpdateStream) -> Result<NeighborReport> {
    if a.horizon() != b.horizon() || a.kind() != b.kind() {
        return Err(input("neighboring streams must share kind and length"));
    }
    let mut report = NeighborReport::default();
    for (idx, (x, y)) in a.updates().iter().zip(b.updates()).enumerate() {
        if x == y {
            continue;
        }
        report.positions.push(idx + 1);
        for u in [x, y] {
            report.touched_edges.extend(u.edge());
            report.touched_elements.extend(u.element());
        }
    }
    Ok(report)
}

/// Per-column comparison of two derived input streams (`column -> step -> value`).
pub fn column_diffs(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<ColumnDiff> {
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(column, (x, y))| ColumnDiff {
            column,
            entries: x.iter().zip(y).filter(|(p, q)| p != q).count(),
            l1: x.iter().zip(y).map(|(p, q)| (p - q).abs()).sum(),
        })
        .filter(|c| c.entries > 0)
        .collect()
}

/// Inputs of the per-degree counters for an insertion-only graph stream.
pub fn deghist_counter_streams(stream: &UpdateStream) -> Result<Vec<Vec<i64>>> {
    if stream.kind() != StreamKind::Graph {
        return Err(input("degree counters need a graph stream"));
    }
    let n = stream.universe();
    let mut cols = vec![vec![0i64; stream.horizon()]; n];
    let mut g = DynamicGraph::new(n);
    for (t, u) in stream.updates().iter().enumerate() {
        match *u {
            Update::Noop => {}
            Update::InsertEdge(a, b) => {
                for (deg, delta) in DegreeHistogramMechanism::counter_deltas(&g, a, b) {
                    cols[deg][t] += delta;
                }
                g.insert_edge(a, b)?;
            }
            other => return Err(input(format!("degree counters need insertions, got {other}"))),
        }
    }
    Ok(cols)
}

/// Inputs of the level histogram for an insertion-only element stream.
pub fn sne_level_streams(params: &SneParameters, stream: &UpdateStream) -> Result<Vec<Vec<i64>>> {
    let per_step = level_stream(params, stream.universe(), stream.updates())?;
    let mut cols = vec![vec![0i64; stream.horizon()]; params.levels];
    for (t, deltas) in per_step.into_iter().enumerate() {
        for (level, delta) in deltas {
            cols[level][t] += delta;
        }
    }
    Ok(cols)
}

/// Builds a random secret for `problem` at size `size` (dimension `d`, or
/// row count `n` for marginals families), flips one bit (or one row) and
/// compares the two generated streams. Degree-histogram gadgets also get a
/// per-counter comparison.
pub fn neighbor_diff_check(problem: GadgetProblem, size: usize, seed: u64) -> Result<NeighborReport> {
    if size == 0 {
        return Err(param("size must be at least 1"));
    }
    let mut rng = RandomSource::new(seed);
    let flip = rng.below(size);
    let (a, b) = match problem {
        GadgetProblem::Msf(p) => {
            let y = MarginalsInstance::random(size, size.min(4), &mut rng)?;
            (build_msf_stream(p, &y)?, build_msf_stream(p, &y.with_row_flipped(flip))?)
        }
        _ => {
            let inst = InnerProductInstance::random(size, 1.0, &mut rng)?;
            let build = match problem {
                GadgetProblem::Matching => build_matching_gadget,
                GadgetProblem::KCore => build_kcore_gadget,
                GadgetProblem::DegHist => build_deghist_gadget,
                _ => build_topk_reduction,
            };
            (build(&inst)?, build(&inst.flipped(flip))?)
        }
    };
    let mut report = diff_streams(&a.stream, &b.stream)?;
    report.flipped = Some(flip);
    if problem == GadgetProblem::DegHist {
        report.columns =
            column_diffs(&deghist_counter_streams(&a.stream)?, &deghist_counter_streams(&b.stream)?);
    }
    Ok(report)
}

/// Random insertion stream of length `horizon` over `n` elements against the
/// copy with one random position replaced by a no-op, compared on the level
/// histogram inputs.
pub fn sne_level_diff_check(params: &SneParameters, n: usize, horizon: usize, seed: u64) -> Result<NeighborReport> {
    if n == 0 || horizon == 0 {
        return Err(param("need n >= 1 and horizon >= 1"));
    }
    let mut rng = RandomSource::new(seed);
    let updates: Vec<Update> = (0..horizon).map(|_| Update::InsertElement(rng.below(n))).collect();
    let pos = rng.below(horizon);
    let mut neighbor = updates.clone();
    neighbor[pos] = Update::Noop;
    let a = UpdateStream::elements(n, updates)?;
    let b = UpdateStream::elements(n, neighbor)?;
    let mut report = diff_streams(&a, &b)?;
    report.flipped = Some(pos);
    report.columns = column_diffs(&sne_level_streams(params, &a)?, &sne_level_streams(params, &b)?);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::msf::MsfProblem;
    use crate::sne::level_count;

    #[test]
    fn event_level_gadgets_differ_in_one_position() {
        for problem in [GadgetProblem::Matching, GadgetProblem::KCore, GadgetProblem::DegHist] {
            for seed in 0..10 {
                let r = neighbor_diff_check(problem, 4, seed).unwrap();
                assert_eq!(r.positions.len(), 1, "{problem:?}");
            }
        }
    }

    #[test]
    fn item_level_families_touch_one_edge() {
        for p in MsfProblem::all(2) {
            for seed in 0..10 {
                let r = neighbor_diff_check(GadgetProblem::Msf(p), 5, seed).unwrap();
                assert_eq!(r.touched_edges.len(), 1, "{}", p.name());
                assert!(!r.positions.is_empty());
            }
        }
    }

    #[test]
    fn st_mincut_differences_touch_the_source_edge() {
        let r = neighbor_diff_check(GadgetProblem::Msf(MsfProblem::StMincut), 4, 3).unwrap();
        let flipped = r.flipped.unwrap();
        assert_eq!(r.touched_edges.iter().next(), Some(&(0, 2 + flipped)));
    }

    #[test]
    fn level_stream_diff_is_bounded() {
        let zeta = 0.25;
        let tau_f = 40.0;
        let levels = level_count(tau_f, zeta);
        let params = SneParameters { zeta, element_bound: 0.0, tau_f, levels, level_bound: 0.0, tau_b: 0.0 };
        for seed in 0..50 {
            let r = sne_level_diff_check(&params, 8, 300, seed).unwrap();
            assert!(r.total_entries() <= 4 * levels);
        }
    }
}
