use std::collections::HashMap;

use super::DynamicGraph;

const NONE: usize = usize::MAX;

/// Single-root augmenting path search with blossom contraction (Edmonds).
struct Blossom<'a> {
    adj: &'a [Vec<usize>],
    mate: &'a mut [usize],
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
    queue: Vec<usize>,
}

impl<'a> Blossom<'a> {
    fn new(adj: &'a [Vec<usize>], mate: &'a mut [usize]) -> Self {
        let n = adj.len();
        Self {
            adj,
            mate,
            parent: vec![NONE; n],
            base: (0..n).collect(),
            used: vec![false; n],
            in_blossom: vec![false; n],
            queue: Vec::with_capacity(n),
        }
    }

    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        let mut seen = vec![false; self.adj.len()];
        loop {
            a = self.base[a];
            seen[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    /// Returns the free endpoint of an augmenting path from `root`, with the
    /// path recorded in `parent`.
    fn find_path(&mut self, root: usize) -> Option<usize> {
        let n = self.adj.len();
        self.used.iter_mut().for_each(|x| *x = false);
        self.parent.iter_mut().for_each(|x| *x = NONE);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.queue.clear();
        self.used[root] = true;
        self.queue.push(root);
        let mut head = 0;
        while head < self.queue.len() {
            let v = self.queue[head];
            head += 1;
            for idx in 0..self.adj[v].len() {
                let to = self.adj[v][idx];
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    let cur = self.lca(v, to);
                    self.in_blossom.iter_mut().for_each(|x| *x = false);
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return Some(to);
                    }
                    let next = self.mate[to];
                    self.used[next] = true;
                    self.queue.push(next);
                }
            }
        }
        None
    }

    fn augment_from(&mut self, root: usize) -> bool {
        let Some(mut v) = self.find_path(root) else {
            return false;
        };
        while v != NONE {
            let pv = self.parent[v];
            let ppv = self.mate[pv];
            self.mate[v] = pv;
            self.mate[pv] = v;
            v = ppv;
        }
        true
    }
}

/// Maximum matching as a mate array (`None` for unmatched vertices).
pub fn max_matching(g: &DynamicGraph) -> Vec<Option<usize>> {
    let adj = g.adjacency();
    let n = adj.len();
    let mut mate = vec![NONE; n];
    for u in 0..n {
        if mate[u] == NONE {
            if let Some(&v) = adj[u].iter().find(|&&v| mate[v] == NONE) {
                mate[u] = v;
                mate[v] = u;
            }
        }
    }
    {
        let mut search = Blossom::new(&adj, &mut mate);
        for root in 0..n {
            if search.mate[root] == NONE {
                search.augment_from(root);
            }
        }
    }
    mate.into_iter().map(|m| (m != NONE).then_some(m)).collect()
}

pub fn max_matching_size(g: &DynamicGraph) -> usize {
    max_matching(g).iter().filter(|m| m.is_some()).count() / 2
}

/// Exhaustive maximum matching for graphs with at most 12 vertices.
pub fn max_matching_brute_force(g: &DynamicGraph) -> usize {
    assert!(g.vertex_count() <= 12, "brute-force matching limited to 12 vertices");
    fn best(edges: &[(usize, usize)], from: usize, used: u32) -> usize {
        let mut top = 0;
        for (i, &(u, v)) in edges.iter().enumerate().skip(from) {
            if used & (1 << u) == 0 && used & (1 << v) == 0 {
                top = top.max(1 + best(edges, i + 1, used | (1 << u) | (1 << v)));
            }
        }
        top
    }
    best(&g.edges(), 0, 0)
}

/// Maximum matching maintained under edge insertions.
///
/// Adding one edge raises the optimum by at most one, and any new
/// augmenting path runs through the added edge, so only the component of
/// that edge is searched.
#[derive(Debug, Clone)]
pub struct IncrementalMatching {
    adj: Vec<Vec<usize>>,
    mate: Vec<usize>,
    size: usize,
}

impl IncrementalMatching {
    pub fn new(n: usize) -> Self {
        Self { adj: vec![Vec::new(); n], mate: vec![NONE; n], size: 0 }
    }

    pub fn from_graph(g: &DynamicGraph) -> Self {
        let mate: Vec<usize> = max_matching(g).into_iter().map(|m| m.unwrap_or(NONE)).collect();
        let size = mate.iter().filter(|&&m| m != NONE).count() / 2;
        Self { adj: g.adjacency(), mate, size }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Records a new edge; the caller must not add an edge twice.
    pub fn insert_edge(&mut self, u: usize, v: usize) -> usize {
        self.adj[u].push(v);
        self.adj[v].push(u);
        if self.mate[u] == NONE && self.mate[v] == NONE {
            self.mate[u] = v;
            self.mate[v] = u;
            self.size += 1;
            return self.size;
        }
        let component = self.component_of(u);
        let local: HashMap<usize, usize> =
            component.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let local_adj: Vec<Vec<usize>> =
            component.iter().map(|&x| self.adj[x].iter().map(|y| local[y]).collect()).collect();
        let mut local_mate: Vec<usize> = component
            .iter()
            .map(|&x| if self.mate[x] == NONE { NONE } else { local[&self.mate[x]] })
            .collect();
        // A free endpoint of the new edge must terminate any augmenting path.
        let roots: Vec<usize> = if self.mate[u] == NONE {
            vec![local[&u]]
        } else if self.mate[v] == NONE {
            vec![local[&v]]
        } else {
            (0..component.len()).filter(|&i| local_mate[i] == NONE).collect()
        };
        let mut grown = false;
        {
            let mut search = Blossom::new(&local_adj, &mut local_mate);
            for r in roots {
                if search.augment_from(r) {
                    grown = true;
                    break;
                }
            }
        }
        if grown {
            for (i, &x) in component.iter().enumerate() {
                self.mate[x] = if local_mate[i] == NONE { NONE } else { component[local_mate[i]] };
            }
            self.size += 1;
        }
        self.size
    }

    fn component_of(&self, s: usize) -> Vec<usize> {
        let mut seen = HashMap::new();
        let mut order = vec![s];
        seen.insert(s, ());
        let mut head = 0;
        while head < order.len() {
            let x = order[head];
            head += 1;
            for &y in &self.adj[x] {
                if seen.insert(y, ()).is_none() {
                    order.push(y);
                }
            }
        }
        order
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> DynamicGraph {
        let mut g = DynamicGraph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    g.insert_edge(u, v).unwrap();
                }
            }
        }
        g
    }

    #[test]
    fn small_cases() {
        assert_eq!(max_matching_size(&DynamicGraph::new(5)), 0);
        let k3 = DynamicGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(max_matching_size(&k3), 1);
        // Two triangles joined by an edge need blossom handling from a bad greedy start.
        let g = DynamicGraph::from_edges(
            6,
            &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5)],
        )
        .unwrap();
        assert_eq!(max_matching_size(&g), 3);
    }

    #[test]
    fn matches_brute_force_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..300 {
            let n = 1 + trial % 12;
            let p = rng.gen_range(0.1..0.7);
            let g = random_graph(&mut rng, n, p);
            assert_eq!(max_matching_size(&g), max_matching_brute_force(&g), "{:?}", g.edges());
        }
    }

    #[test]
    fn matching_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_graph(&mut rng, 40, 0.1);
        let mate = max_matching(&g);
        for (u, m) in mate.iter().enumerate() {
            if let Some(v) = *m {
                assert_eq!(mate[v], Some(u));
                assert!(g.has_edge(u, v));
            }
        }
    }

    #[test]
    fn incremental_tracks_recomputation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let n = 14;
            let mut g = DynamicGraph::new(n);
            let mut inc = IncrementalMatching::new(n);
            for _ in 0..40 {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                if u == v || g.has_edge(u, v) {
                    continue;
                }
                g.insert_edge(u, v).unwrap();
                assert_eq!(inc.insert_edge(u, v), max_matching_size(&g));
            }
        }
    }
}
