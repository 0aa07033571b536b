//! Deterministic synthetic graphs used by the bundled benchmark suite and
//! the tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::WeightedGraph;

fn unit(n: usize, edges: Vec<(usize, usize)>) -> WeightedGraph {
    WeightedGraph::from_edges(n, edges.into_iter().map(|(u, v)| (u, v, 1.0)))
        .expect("generator produced an invalid edge")
}

pub fn path(n: usize) -> WeightedGraph {
    unit(n, (1..n).map(|i| (i - 1, i)).collect())
}

pub fn cycle(n: usize) -> WeightedGraph {
    unit(n, (0..n).map(|i| (i, (i + 1) % n)).collect())
}

pub fn complete(n: usize) -> WeightedGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    unit(n, edges)
}

pub fn star(leaves: usize) -> WeightedGraph {
    unit(leaves + 1, (1..=leaves).map(|i| (0, i)).collect())
}

/// Two `K_k` joined by a path with `bridge` interior vertices
/// (`bridge = 0` joins them with a single edge).
pub fn barbell(k: usize, bridge: usize) -> WeightedGraph {
    let n = 2 * k + bridge;
    let mut edges = Vec::new();
    for u in 0..k {
        for v in u + 1..k {
            edges.push((u, v));
            edges.push((k + bridge + u, k + bridge + v));
        }
    }
    let chain: Vec<usize> = std::iter::once(k - 1)
        .chain(k..k + bridge)
        .chain(std::iter::once(k + bridge))
        .collect();
    for w in chain.windows(2) {
        edges.push((w[0], w[1]));
    }
    unit(n, edges)
}

/// `count` cliques of size `k` arranged in a ring, consecutive cliques joined
/// by one edge.
pub fn ring_of_cliques(count: usize, k: usize) -> WeightedGraph {
    let mut edges = Vec::new();
    for c in 0..count {
        let base = c * k;
        for u in 0..k {
            for v in u + 1..k {
                edges.push((base + u, base + v));
            }
        }
        if count > 1 {
            let next = ((c + 1) % count) * k;
            edges.push((base + k - 1, next));
        }
    }
    unit(count * k, edges)
}

/// `rows × cols` lattice (4-neighbour).
pub fn grid(rows: usize, cols: usize) -> WeightedGraph {
    let id = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    unit(rows * cols, edges)
}

/// Lattice with one diagonal per square: a planar triangle mesh.
pub fn triangulated_grid(rows: usize, cols: usize) -> WeightedGraph {
    let id = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c)));
            }
            if r + 1 < rows && c + 1 < cols {
                edges.push((id(r, c), id(r + 1, c + 1)));
            }
        }
    }
    unit(rows * cols, edges)
}

/// Preferential attachment: each new vertex links to `m` distinct existing
/// vertices chosen proportionally to degree. Connected and scale-free.
pub fn barabasi_albert(n: usize, m: usize, seed: u64) -> WeightedGraph {
    assert!(m >= 1 && n > m, "need n > m >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    // Endpoint multiset: sampling uniformly from it is degree-proportional.
    let mut endpoints: Vec<usize> = Vec::new();
    for u in 0..=m {
        for v in u + 1..=m {
            edges.push((u, v));
            endpoints.extend([u, v]);
        }
    }
    for v in m + 1..n {
        let mut chosen: Vec<usize> = Vec::with_capacity(m);
        while chosen.len() < m {
            let t = endpoints[rng.random_range(0..endpoints.len())];
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for t in chosen {
            edges.push((t, v));
            endpoints.extend([t, v]);
        }
    }
    unit(n, edges)
}

/// Stochastic block model with `blocks` equal blocks.
pub fn planted_partition(
    blocks: usize,
    block_size: usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = blocks * block_size;
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if u / block_size == v / block_size {
                p_in
            } else {
                p_out
            };
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    unit(n, edges)
}

/// Random geometric graph on the unit square, restricted to its largest
/// connected component.
pub fn random_geometric(n: usize, radius: f64, seed: u64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.random(), rng.random())).collect();
    let mut edges = Vec::new();
    let r2 = radius * radius;
    for u in 0..n {
        for v in u + 1..n {
            let dx = pts[u].0 - pts[v].0;
            let dy = pts[u].1 - pts[v].1;
            if dx * dx + dy * dy <= r2 {
                edges.push((u, v));
            }
        }
    }
    largest_component(&unit(n, edges))
}

/// Induced subgraph on the largest connected component, relabelled densely.
pub fn largest_component(g: &WeightedGraph) -> WeightedGraph {
    let (comp, count) = g.components();
    let mut sizes = vec![0usize; count];
    for &c in &comp {
        sizes[c] += 1;
    }
    let best = (0..count)
        .max_by_key(|&c| (sizes[c], usize::MAX - c))
        .unwrap_or(0);
    let members: Vec<usize> = (0..g.n()).filter(|&v| comp[v] == best).collect();
    let sub = g.induced_subgraph(&members);
    let n = sub.n();
    sub.with_labels((0..n as u64).collect())
        .expect("label count matches")
}
