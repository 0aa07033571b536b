//! Shared inputs for the benchmarks.

use infolayout::multilevel::initial_layout;
use infolayout::{generators, Layout, WeightedGraph};

/// Square triangle mesh with about `n` vertices.
pub fn mesh(n: usize) -> WeightedGraph {
    let side = (n as f64).sqrt().round() as usize;
    generators::triangulated_grid(side, side)
}

pub fn scale_free(n: usize) -> WeightedGraph {
    generators::barabasi_albert(n, 2, 1)
}

/// Seeded random start for `g` with unit edge length.
pub fn start(g: &WeightedGraph) -> Layout {
    initial_layout(g.n(), 1.0, 1)
}
