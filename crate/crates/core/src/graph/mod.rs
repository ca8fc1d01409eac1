//! Dynamic simple graphs and exact evaluators for the statistics the
//! mechanisms and reductions track.

mod cores;
mod cuts;
mod matching;

use std::collections::{BTreeSet, HashMap};

use crate::error::{input, param, Result};
use crate::stream::{StreamKind, Update, UpdateStream};

pub use cores::{core_number, core_numbers, core_numbers_naive};
pub use cuts::{mincut, mincut_brute_force, st_mincut, st_mincut_between, st_mincut_brute_force};
pub use matching::{max_matching, max_matching_brute_force, max_matching_size, IncrementalMatching};

/// Undirected simple graph on `0..n` driven by edge insert/delete updates.
///
/// Each edge carries a signed frequency; it is present iff that frequency is
/// positive, so repeated inserts are idempotent for membership.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DynamicGraph {
    adj: Vec<BTreeSet<usize>>,
    freq: HashMap<(usize, usize), i64>,
    edges: usize,
}

impl DynamicGraph {
    pub fn new(n: usize) -> Self {
        Self { adj: vec![BTreeSet::new(); n], freq: HashMap::new(), edges: 0 }
    }

    /// Graph containing exactly the given edges (duplicates are harmless).
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::new(n);
        for &(u, v) in edges {
            g.insert_edge(u, v)?;
        }
        Ok(g)
    }

    /// Replays the first `t` updates of a graph stream.
    pub fn from_stream_prefix(stream: &UpdateStream, t: usize) -> Result<Self> {
        if stream.kind() != StreamKind::Graph {
            return Err(input("expected a graph stream"));
        }
        if t > stream.horizon() {
            return Err(param(format!("prefix {t} exceeds horizon {}", stream.horizon())));
        }
        let mut g = Self::new(stream.universe());
        for u in &stream.updates()[..t] {
            g.apply(u)?;
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.adj.len() && self.adj[u].contains(&v)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().copied()
    }

    /// Present edges as `(min, max)` pairs in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edges);
        for (u, nbrs) in self.adj.iter().enumerate() {
            out.extend(nbrs.range(u + 1..).map(|&v| (u, v)));
        }
        out
    }

    /// Adjacency lists snapshot, sorted.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        self.adj.iter().map(|s| s.iter().copied().collect()).collect()
    }

    pub fn edge_frequency(&self, u: usize, v: usize) -> i64 {
        self.freq.get(&key(u, v)).copied().unwrap_or(0)
    }

    /// Applies one update; returns whether edge membership changed.
    pub fn apply(&mut self, update: &Update) -> Result<bool> {
        match *update {
            Update::InsertEdge(u, v) => self.insert_edge(u, v),
            Update::DeleteEdge(u, v) => self.delete_edge(u, v),
            Update::Noop => Ok(false),
            other => Err(input(format!("graph cannot apply element update {other}"))),
        }
    }

    pub fn insert_edge(&mut self, u: usize, v: usize) -> Result<bool> {
        self.bump(u, v, 1)
    }

    pub fn delete_edge(&mut self, u: usize, v: usize) -> Result<bool> {
        self.bump(u, v, -1)
    }

    fn bump(&mut self, u: usize, v: usize, delta: i64) -> Result<bool> {
        let n = self.adj.len();
        if u == v {
            return Err(input(format!("self-loop at vertex {u}")));
        }
        if u >= n || v >= n {
            return Err(input(format!("edge ({u}, {v}) outside 0..{n}")));
        }
        let f = self.freq.entry(key(u, v)).or_insert(0);
        let before = *f > 0;
        *f += delta;
        let after = *f > 0;
        if *f == 0 {
            self.freq.remove(&key(u, v));
        }
        if before != after {
            if after {
                self.adj[u].insert(v);
                self.adj[v].insert(u);
                self.edges += 1;
            } else {
                self.adj[u].remove(&v);
                self.adj[v].remove(&u);
                self.edges -= 1;
            }
        }
        Ok(before != after)
    }
}

fn key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

/// Counts of vertices per degree; entry `i` holds degree `i + 1`, for
/// degrees `1..=n-1`.
pub fn degree_histogram(g: &DynamicGraph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut hist = vec![0; n.saturating_sub(1)];
    for v in 0..n {
        let d = g.degree(v);
        if d >= 1 {
            hist[d - 1] += 1;
        }
    }
    hist
}

pub fn count_degree_at_least(g: &DynamicGraph, tau: usize) -> usize {
    (0..g.vertex_count()).filter(|&v| g.degree(v) >= tau).count()
}

pub fn edge_count(g: &DynamicGraph) -> usize {
    g.edge_count()
}

pub fn connected_components(g: &DynamicGraph) -> usize {
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    let mut count = 0;
    let mut stack = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        stack.push(s);
        while let Some(x) = stack.pop() {
            for y in g.neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    count
}

pub fn triangle_count(g: &DynamicGraph) -> usize {
    let mut count = 0;
    for (u, v) in g.edges() {
        count += g.adj[u].range(v + 1..).filter(|w| g.adj[v].contains(w)).count();
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_follows_positive_frequency() {
        let mut g = DynamicGraph::new(3);
        assert!(g.insert_edge(0, 1).unwrap());
        assert!(!g.insert_edge(1, 0).unwrap());
        assert_eq!(g.edge_frequency(0, 1), 2);
        assert!(!g.delete_edge(0, 1).unwrap());
        assert!(g.has_edge(0, 1));
        assert!(g.delete_edge(0, 1).unwrap());
        assert!(!g.has_edge(0, 1));
        assert!(!g.delete_edge(0, 1).unwrap());
        assert!(!g.insert_edge(0, 1).unwrap());
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn rejects_self_loops_and_range() {
        let mut g = DynamicGraph::new(3);
        assert!(g.insert_edge(1, 1).is_err());
        assert!(g.insert_edge(0, 3).is_err());
        assert!(g.apply(&Update::InsertElement(0)).is_err());
        assert!(!g.apply(&Update::Noop).unwrap());
    }

    #[test]
    fn degree_histogram_path_and_empty() {
        let g = DynamicGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(degree_histogram(&g), vec![2, 1]);
        assert_eq!(degree_histogram(&DynamicGraph::new(4)), vec![0, 0, 0]);
    }

    #[test]
    fn simple_counts() {
        let g = DynamicGraph::from_edges(5, &[(0, 1), (1, 2), (0, 2), (3, 4)]).unwrap();
        assert_eq!(triangle_count(&g), 1);
        assert_eq!(connected_components(&g), 2);
        assert_eq!(count_degree_at_least(&g, 2), 3);
        assert_eq!(edge_count(&g), 4);
    }
}
