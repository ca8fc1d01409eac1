use std::collections::VecDeque;

use super::DynamicGraph;
use crate::error::{param, Result};

/// Edge connectivity between the designated terminals `s = 0` and `t = 1`.
pub fn st_mincut(g: &DynamicGraph) -> Result<usize> {
    st_mincut_between(g, 0, 1.min(g.vertex_count().saturating_sub(1)))
}

/// Minimum number of edges whose removal separates `s` from `t`
/// (unit-capacity max flow, Edmonds-Karp).
pub fn st_mincut_between(g: &DynamicGraph, s: usize, t: usize) -> Result<usize> {
    let n = g.vertex_count();
    if s >= n || t >= n {
        return Err(param(format!("terminals ({s}, {t}) outside 0..{n}")));
    }
    if s == t {
        return Err(param("s-t cut needs distinct terminals"));
    }
    // Residual capacities on both orientations of every undirected edge.
    let mut head = Vec::new();
    let mut cap = Vec::new();
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (u, v) in g.edges() {
        out[u].push(head.len());
        head.push(v);
        cap.push(1i32);
        out[v].push(head.len());
        head.push(u);
        cap.push(1i32);
    }
    let mut flow = 0;
    loop {
        let mut via = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            if x == t {
                break;
            }
            for &a in &out[x] {
                let y = head[a];
                if cap[a] > 0 && !seen[y] {
                    seen[y] = true;
                    via[y] = a;
                    queue.push_back(y);
                }
            }
        }
        if !seen[t] {
            return Ok(flow);
        }
        let mut x = t;
        while x != s {
            let a = via[x];
            cap[a] -= 1;
            cap[a ^ 1] += 1;
            x = head[a ^ 1];
        }
        flow += 1;
    }
}

/// Global minimum cut (Stoer-Wagner); 0 for graphs with fewer than two vertices.
pub fn mincut(g: &DynamicGraph) -> usize {
    let n = g.vertex_count();
    if n < 2 {
        return 0;
    }
    let mut w = vec![vec![0usize; n]; n];
    for (u, v) in g.edges() {
        w[u][v] += 1;
        w[v][u] += 1;
    }
    let mut active: Vec<usize> = (0..n).collect();
    let mut best = usize::MAX;
    while active.len() > 1 {
        let mut weight = vec![0usize; n];
        let mut added = vec![false; n];
        let mut prev = active[0];
        let mut last = active[0];
        for _ in 0..active.len() {
            let next = *active
                .iter()
                .filter(|&&v| !added[v])
                .max_by_key(|&&v| weight[v])
                .expect("an unadded vertex remains");
            added[next] = true;
            prev = last;
            last = next;
            for &v in &active {
                if !added[v] {
                    weight[v] += w[next][v];
                }
            }
        }
        best = best.min(weight[last]);
        // Merge `last` into `prev`.
        for &v in &active {
            w[prev][v] += w[last][v];
            w[v][prev] = w[prev][v];
        }
        w[prev][prev] = 0;
        active.retain(|&v| v != last);
    }
    best
}

fn cut_size(g: &DynamicGraph, side: u32) -> usize {
    g.edges()
        .into_iter()
        .filter(|&(u, v)| ((side >> u) & 1) != ((side >> v) & 1))
        .count()
}

/// Exhaustive s-t cut over all vertex bipartitions; at most 16 vertices.
pub fn st_mincut_brute_force(g: &DynamicGraph, s: usize, t: usize) -> usize {
    let n = g.vertex_count();
    assert!(n <= 16, "brute-force cut limited to 16 vertices");
    (0u32..(1 << n))
        .filter(|m| (m >> s) & 1 == 1 && (m >> t) & 1 == 0)
        .map(|m| cut_size(g, m))
        .min()
        .unwrap_or(0)
}

/// Exhaustive global minimum cut; at most 16 vertices.
pub fn mincut_brute_force(g: &DynamicGraph) -> usize {
    let n = g.vertex_count();
    assert!(n <= 16, "brute-force cut limited to 16 vertices");
    if n < 2 {
        return 0;
    }
    // Fix vertex 0 on one side; the other side must be nonempty.
    (1u32..(1 << n)).step_by(2).filter(|&m| m != (1 << n) - 1).map(|m| cut_size(g, m)).min().unwrap()
}
