use serde::{Deserialize, Serialize};

use crate::error::{input, param, Result};
use crate::graph::{connected_components, core_number, max_matching_size, DynamicGraph, IncrementalMatching};
use crate::stream::Update;

/// Monotone graph statistics the ladder mechanism can release.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LadderTarget {
    Matching,
    CoreNumber(usize),
    /// Number of connected components; non-increasing under insertions.
    ConnectedComponents,
}

impl LadderTarget {
    /// Range `[L, R]` of the statistic over insertion-only streams of
    /// length `horizon` on `n` vertices.
    pub fn range(&self, n: usize, horizon: usize) -> (i64, i64) {
        match self {
            LadderTarget::Matching => (0, (n / 2).min(horizon) as i64),
            LadderTarget::CoreNumber(_) => (0, n.min(largest_clique_order(horizon)) as i64),
            LadderTarget::ConnectedComponents => {
                ((n.saturating_sub(horizon)).max(1) as i64, n as i64)
            }
        }
    }

    pub fn is_increasing(&self) -> bool {
        !matches!(self, LadderTarget::ConnectedComponents)
    }

    /// Largest change one edge insertion can cause.
    pub fn sensitivity(&self) -> f64 {
        1.0
    }

    /// Exact value on a graph snapshot.
    pub fn evaluate(&self, g: &DynamicGraph) -> i64 {
        match *self {
            LadderTarget::Matching => max_matching_size(g) as i64,
            LadderTarget::CoreNumber(v) => core_number(g, v) as i64,
            LadderTarget::ConnectedComponents => connected_components(g) as i64,
        }
    }

    pub fn name(&self) -> String {
        match self {
            LadderTarget::Matching => "matching".into(),
            LadderTarget::CoreNumber(v) => format!("core_number({v})"),
            LadderTarget::ConnectedComponents => "components".into(),
        }
    }
}

/// Largest `k` with `k (k - 1) / 2 <= horizon`.
pub fn largest_clique_order(horizon: usize) -> usize {
    let mut k = ((2.0 * horizon as f64).sqrt() as usize).max(1);
    while k * (k + 1) / 2 <= horizon {
        k += 1;
    }
    while k * (k - 1) / 2 > horizon {
        k -= 1;
    }
    k
}

/// Exact statistic maintained under edge insertions.
#[derive(Debug, Clone)]
pub struct StatisticTracker {
    target: LadderTarget,
    graph: DynamicGraph,
    matching: IncrementalMatching,
    parent: Vec<usize>,
    value: i64,
}

impl StatisticTracker {
    pub fn new(target: LadderTarget, n: usize) -> Result<Self> {
        if let LadderTarget::CoreNumber(v) = target {
            if v >= n {
                return Err(param(format!("core vertex {v} outside 0..{n}")));
            }
        }
        let graph = DynamicGraph::new(n);
        let value = target.evaluate(&graph);
        Ok(Self {
            target,
            graph,
            matching: IncrementalMatching::new(n),
            parent: (0..n).collect(),
            value,
        })
    }

    pub fn target(&self) -> LadderTarget {
        self.target
    }

    pub fn graph(&self) -> &DynamicGraph {
        &self.graph
    }

    pub fn value(&self) -> i64 {
        self.value
    }

    /// Applies an insertion or no-op and returns the new value.
    pub fn apply(&mut self, update: &Update) -> Result<i64> {
        let (u, v) = match *update {
            Update::Noop => return Ok(self.value),
            Update::InsertEdge(u, v) => (u, v),
            Update::DeleteEdge(..) => return Err(input("insertions-only mechanism received a deletion")),
            other => return Err(input(format!("graph mechanism received element update {other}"))),
        };
        if !self.graph.insert_edge(u, v)? {
            return Ok(self.value);
        }
        self.value = match self.target {
            LadderTarget::Matching => self.matching.insert_edge(u, v) as i64,
            LadderTarget::CoreNumber(x) => core_number(&self.graph, x) as i64,
            LadderTarget::ConnectedComponents => {
                let (a, b) = (self.find(u), self.find(v));
                if a != b {
                    self.parent[a] = b;
                    self.value - 1
                } else {
                    self.value
                }
            }
        };
        Ok(self.value)
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
}
