//! Marginals-solving families and the item-level reduction stream.

use serde::{Deserialize, Serialize};

use super::gadgets::{Decoder, GadgetInstance, GadgetProblem, Reading};
use super::instances::MarginalsInstance;
use super::reduction::Statistic;
use crate::error::{param, Result};
use crate::stream::{Update, UpdateStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZeroBasedGadget {
    /// Two isolated vertices; `e` joins them. Size `(2, 0)`.
    MatchingPair,
    /// A path on three vertices; `e` closes the triangle. Size `(3, 2)`.
    Triangle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MsfProblem {
    StMincut,
    Mincut,
    /// Number of vertices of degree at least `tau`.
    DegAtLeast(usize),
    /// Core number of vertex 0.
    KCore,
    EdgeCount,
    ZeroBased(ZeroBasedGadget),
}

impl MsfProblem {
    pub fn name(&self) -> String {
        match self {
            MsfProblem::StMincut => "st-mincut".into(),
            MsfProblem::Mincut => "mincut".into(),
            MsfProblem::DegAtLeast(t) => format!("deg-at-least-{t}"),
            MsfProblem::KCore => "kcore".into(),
            MsfProblem::EdgeCount => "edge-count".into(),
            MsfProblem::ZeroBased(ZeroBasedGadget::MatchingPair) => "matching-pair".into(),
            MsfProblem::ZeroBased(ZeroBasedGadget::Triangle) => "triangle".into(),
        }
    }

    /// All shipped families, with `tau` for the degree-threshold family.
    pub fn all(tau: usize) -> Vec<MsfProblem> {
        vec![
            MsfProblem::StMincut,
            MsfProblem::Mincut,
            MsfProblem::DegAtLeast(tau),
            MsfProblem::KCore,
            MsfProblem::EdgeCount,
            MsfProblem::ZeroBased(ZeroBasedGadget::MatchingPair),
            MsfProblem::ZeroBased(ZeroBasedGadget::Triangle),
        ]
    }

    pub fn statistic(&self) -> Statistic {
        match *self {
            MsfProblem::StMincut => Statistic::StMincut,
            MsfProblem::Mincut => Statistic::Mincut,
            MsfProblem::DegAtLeast(t) => Statistic::DegreeAtLeast(t),
            MsfProblem::KCore => Statistic::CoreNumber(0),
            MsfProblem::EdgeCount => Statistic::EdgeCount,
            MsfProblem::ZeroBased(ZeroBasedGadget::MatchingPair) => Statistic::Matching,
            MsfProblem::ZeroBased(ZeroBasedGadget::Triangle) => Statistic::Triangles,
        }
    }

    /// `(nu(n), xi(n))`: vertex count and base edge count of `H_n`.
    pub fn size(&self, n: usize) -> (usize, usize) {
        match *self {
            MsfProblem::StMincut => (n + 2, n),
            MsfProblem::Mincut | MsfProblem::KCore => (n + 1, n * n.saturating_sub(1) / 2),
            MsfProblem::DegAtLeast(tau) => {
                let half = tau.saturating_sub(1) / 2;
                (3 * n, n * half + if tau % 2 == 0 { n } else { 0 })
            }
            MsfProblem::EdgeCount => (edge_count_vertices(n), 0),
            MsfProblem::ZeroBased(ZeroBasedGadget::MatchingPair) => (2 * n, 0),
            MsfProblem::ZeroBased(ZeroBasedGadget::Triangle) => (3 * n, 2 * n),
        }
    }
}

fn edge_count_vertices(n: usize) -> usize {
    let r = (2.0 * (n as f64).sqrt()).ceil() as usize;
    // Guard against the square root landing just below an integer.
    (r.saturating_sub(1)..=r + 1).find(|&k| k * k >= 4 * n).unwrap_or(r).max(2)
}

/// `H_n = (V_n, E_n)` with the marked edges `e_1..e_n`, all absent from `E_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct MsfFamily {
    pub problem: MsfProblem,
    pub vertices: usize,
    pub base_edges: Vec<(usize, usize)>,
    pub marked: Vec<(usize, usize)>,
    pub weight: f64,
}

pub fn msf_family(problem: MsfProblem, n: usize) -> Result<MsfFamily> {
    if n == 0 {
        return Err(param("marginals-solving family needs n >= 1"));
    }
    let (vertices, base_edges, marked, weight) = match problem {
        // s = 0, t = 1, middle vertices 2..n+2.
        MsfProblem::StMincut => {
            let base = (0..n).map(|i| (1, 2 + i)).collect();
            let marked = (0..n).map(|i| (0, 2 + i)).collect();
            (n + 2, base, marked, 1.0)
        }
        // Vertex 0 outside a clique on 1..=n.
        MsfProblem::Mincut | MsfProblem::KCore => {
            let base = (1..=n).flat_map(|a| (a + 1..=n).map(move |b| (a, b))).collect();
            let marked = (1..=n).map(|i| (0, i)).collect();
            (n + 1, base, marked, 1.0)
        }
        MsfProblem::DegAtLeast(tau) => {
            if tau == 0 {
                return Err(param("degree threshold tau must be at least 1"));
            }
            let half = (tau - 1) / 2;
            if 2 * half >= n {
                return Err(param(format!("cyclic construction for tau = {tau} needs n > {}", 2 * half)));
            }
            // v_i = i, u_i = n + i, z_i = 2n + i.
            let mut base = Vec::new();
            for i in 0..n {
                for s in 1..=half {
                    let j = (i + s) % n;
                    base.push((i.min(j), i.max(j)));
                }
                if tau % 2 == 0 {
                    base.push((i, n + i));
                }
            }
            let marked = (0..n).map(|i| (i, 2 * n + i)).collect();
            (3 * n, base, marked, if tau == 1 { 2.0 } else { 1.0 })
        }
        MsfProblem::EdgeCount => {
            let k = edge_count_vertices(n);
            let marked = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).take(n).collect();
            (k, Vec::new(), marked, 1.0)
        }
        MsfProblem::ZeroBased(ZeroBasedGadget::MatchingPair) => {
            (2 * n, Vec::new(), (0..n).map(|i| (2 * i, 2 * i + 1)).collect(), 1.0)
        }
        MsfProblem::ZeroBased(ZeroBasedGadget::Triangle) => {
            let base = (0..n).flat_map(|i| [(3 * i, 3 * i + 1), (3 * i + 1, 3 * i + 2)]).collect();
            (3 * n, base, (0..n).map(|i| (3 * i, 3 * i + 2)).collect(), 1.0)
        }
    };
    Ok(MsfFamily { problem, vertices, base_edges, marked, weight })
}

/// Item-level reduction stream: `E_n`, then per column `j` the marked edges
/// of rows with `Y_ij = 1` (no-op otherwise), a read, and their deletions.
///
/// Row `i` only ever touches `e_i`, and the reading for column `j` is taken
/// at `t_j - n` where `t_j = xi(n) + 2 j n`.
pub fn build_msf_stream(problem: MsfProblem, y: &MarginalsInstance) -> Result<GadgetInstance> {
    let n = y.n();
    let fam = msf_family(problem, n)?;
    let mut updates: Vec<Update> = fam.base_edges.iter().map(|&(a, b)| Update::insert_edge(a, b)).collect();
    let mut timetable = Vec::with_capacity(y.d());
    for j in 0..y.d() {
        let pick = |i: usize, ins: bool| {
            if !y.get(i, j) {
                Update::Noop
            } else if ins {
                Update::insert_edge(fam.marked[i].0, fam.marked[i].1)
            } else {
                Update::delete_edge(fam.marked[i].0, fam.marked[i].1)
            }
        };
        updates.extend((0..n).map(|i| pick(i, true)));
        timetable.push(Reading { query: j + 1, before: None, after: updates.len(), truth: y.column_sum(j) });
        updates.extend((0..n).map(|i| pick(i, false)));
    }
    let xi = fam.base_edges.len();
    Ok(GadgetInstance {
        problem: GadgetProblem::Msf(problem),
        stream: UpdateStream::graph(fam.vertices, updates)?,
        timetable,
        decoder: Decoder::Scaled { weight: fam.weight },
        statistic: problem.statistic(),
        vertex_budget: problem.size(n).0,
        step_budget: xi + 2 * n * y.d(),
        weight: fam.weight,
    })
}
