use super::DynamicGraph;

/// Core number of every vertex by bucket-queue minimum-degree peeling.
pub fn core_numbers(g: &DynamicGraph) -> Vec<usize> {
    let n = g.vertex_count();
    let adj = g.adjacency();
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let max_deg = degree.iter().copied().max().unwrap_or(0);

    // Vertices sorted by degree, with bucket start offsets and positions.
    let mut bin = vec![0usize; max_deg + 2];
    for &d in &degree {
        bin[d + 1] += 1;
    }
    for d in 1..bin.len() {
        bin[d] += bin[d - 1];
    }
    let mut pos = vec![0usize; n];
    let mut order = vec![0usize; n];
    let mut fill = bin.clone();
    for v in 0..n {
        pos[v] = fill[degree[v]];
        order[pos[v]] = v;
        fill[degree[v]] += 1;
    }

    for i in 0..n {
        let v = order[i];
        for &u in &adj[v] {
            if degree[u] > degree[v] {
                // Move u to the front of its bucket, then shrink its degree.
                let du = degree[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = order[pw];
                if u != w {
                    order.swap(pu, pw);
                    pos[u] = pw;
                    pos[w] = pu;
                }
                bin[du] += 1;
                degree[u] -= 1;
            }
        }
    }
    degree
}

pub fn core_number(g: &DynamicGraph, v: usize) -> usize {
    core_numbers(g)[v]
}

/// Reference oracle: for each `k`, repeatedly delete vertices of degree
/// below `k`; a vertex's core number is the largest `k` it survives.
pub fn core_numbers_naive(g: &DynamicGraph) -> Vec<usize> {
    let n = g.vertex_count();
    let adj = g.adjacency();
    let mut core = vec![0; n];
    for k in 1..n {
        let mut alive = vec![true; n];
        loop {
            let doomed: Vec<usize> = (0..n)
                .filter(|&v| alive[v] && adj[v].iter().filter(|&&u| alive[u]).count() < k)
                .collect();
            if doomed.is_empty() {
                break;
            }
            for v in doomed {
                alive[v] = false;
            }
        }
        if !alive.iter().any(|&a| a) {
            break;
        }
        for v in 0..n {
            if alive[v] {
                core[v] = k;
            }
        }
    }
    core
}
