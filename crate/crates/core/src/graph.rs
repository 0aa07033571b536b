//! Weighted undirected graphs with dense vertex ids.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense vertex index; a graph with `n` vertices uses ids `0..n`.
pub type VertexId = usize;

/// An undirected edge stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub weight: f64,
}

/// Size summary in the `|V|`, `|E|`, `D = |E|/|V|` convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub n: usize,
    pub m: usize,
    pub density: f64,
}

/// Undirected graph with positive vertex and edge weights.
///
/// Adjacency is stored in compressed sparse row form. Self-loops are dropped
/// and parallel edges merged (weights summed) at construction, so every
/// unordered pair appears at most once in [`WeightedGraph::edges`].
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    vertex_weight: Vec<f64>,
    labels: Vec<u64>,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
    weights: Vec<f64>,
    total_edge_weight: f64,
}

impl WeightedGraph {
    /// Builds a graph on vertices `0..n` with unit vertex weights.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (VertexId, VertexId, f64)>,
    {
        Self::with_vertex_weights(vec![1.0; n], edges)
    }

    /// Builds a graph on vertices `0..vertex_weights.len()`.
    pub fn with_vertex_weights<I>(vertex_weights: Vec<f64>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (VertexId, VertexId, f64)>,
    {
        let n = vertex_weights.len();
        for (vertex, &weight) in vertex_weights.iter().enumerate() {
            if !(weight.is_finite() && weight > 0.0) {
                return Err(Error::InvalidVertexWeight { vertex, weight });
            }
        }
        let mut merged: BTreeMap<(VertexId, VertexId), f64> = BTreeMap::new();
        for (u, v, w) in edges {
            if u >= n {
                return Err(Error::InvalidVertex(u));
            }
            if v >= n {
                return Err(Error::InvalidVertex(v));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidWeight {
                    u: u as u64,
                    v: v as u64,
                    weight: w,
                });
            }
            if u == v {
                continue;
            }
            *merged.entry((u.min(v), u.max(v))).or_insert(0.0) += w;
        }
        let edges: Vec<Edge> = merged
            .into_iter()
            .map(|((u, v), weight)| Edge { u, v, weight })
            .collect();
        Ok(Self::from_sorted_edges(
            vertex_weights,
            (0..n as u64).collect(),
            edges,
        ))
    }

    fn from_sorted_edges(vertex_weight: Vec<f64>, labels: Vec<u64>, edges: Vec<Edge>) -> Self {
        let n = vertex_weight.len();
        let mut degree = vec![0usize; n + 1];
        for e in &edges {
            degree[e.u + 1] += 1;
            degree[e.v + 1] += 1;
        }
        for i in 0..n {
            degree[i + 1] += degree[i];
        }
        let offsets = degree;
        let mut cursor = offsets.clone();
        let mut targets = vec![0; 2 * edges.len()];
        let mut weights = vec![0.0; 2 * edges.len()];
        // Edges are sorted by (u, v), so each adjacency list ends up sorted.
        for e in &edges {
            targets[cursor[e.u]] = e.v;
            weights[cursor[e.u]] = e.weight;
            cursor[e.u] += 1;
        }
        for e in &edges {
            targets[cursor[e.v]] = e.u;
            weights[cursor[e.v]] = e.weight;
            cursor[e.v] += 1;
        }
        for v in 0..n {
            let range = offsets[v]..offsets[v + 1];
            let mut pairs: Vec<(usize, f64)> = targets[range.clone()]
                .iter()
                .copied()
                .zip(weights[range.clone()].iter().copied())
                .collect();
            pairs.sort_by_key(|p| p.0);
            for (slot, (t, w)) in range.zip(pairs) {
                targets[slot] = t;
                weights[slot] = w;
            }
        }
        let total_edge_weight = edges.iter().map(|e| e.weight).sum();
        WeightedGraph {
            vertex_weight,
            labels,
            edges,
            offsets,
            targets,
            weights,
            total_edge_weight,
        }
    }

    /// Replaces the label table. Labels are only used for I/O.
    pub fn with_labels(mut self, labels: Vec<u64>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::SizeMismatch {
                expected: self.n(),
                got: labels.len(),
            });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.vertex_weight.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n() == 0
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn total_edge_weight(&self) -> f64 {
        self.total_edge_weight
    }

    pub fn vertex_weight(&self, v: VertexId) -> f64 {
        self.vertex_weight[v]
    }

    pub fn vertex_weights(&self) -> &[f64] {
        &self.vertex_weight
    }

    pub fn total_vertex_weight(&self) -> f64 {
        self.vertex_weight.iter().sum()
    }

    /// Original label of a vertex (input id for parsed graphs, dense id otherwise).
    pub fn label(&self, v: VertexId) -> u64 {
        self.labels[v]
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    /// Neighbors of `v` with the connecting edge weight, sorted by neighbor id.
    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = (VertexId, f64)> + '_ {
        let range = self.offsets[v]..self.offsets[v + 1];
        self.targets[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    pub fn neighbor_ids(&self, v: VertexId) -> &[VertexId] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Sum of incident edge weights; panics on an out-of-range id.
    pub fn strength(&self, v: VertexId) -> f64 {
        self.weights[self.offsets[v]..self.offsets[v + 1]]
            .iter()
            .sum()
    }

    pub fn weighted_degree(&self, v: VertexId) -> Result<f64> {
        if v >= self.n() {
            return Err(Error::InvalidVertex(v));
        }
        Ok(self.strength(v))
    }

    pub fn stats(&self) -> GraphStats {
        let n = self.n();
        let m = self.m();
        GraphStats {
            n,
            m,
            density: if n == 0 { 0.0 } else { m as f64 / n as f64 },
        }
    }

    /// Connected component id per vertex (ids in order of lowest member) and
    /// the component count.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let n = self.n();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = count;
            stack.push(start);
            while let Some(v) = stack.pop() {
                for &u in self.neighbor_ids(v) {
                    if comp[u] == usize::MAX {
                        comp[u] = count;
                        stack.push(u);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    pub fn is_connected(&self) -> bool {
        self.components().1 <= 1
    }

    /// Subgraph induced by `vertices`; vertex `i` of the result is
    /// `vertices[i]` of `self`.
    pub fn induced_subgraph(&self, vertices: &[VertexId]) -> WeightedGraph {
        let mut local = HashMap::with_capacity(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            local.insert(v, i);
        }
        let mut edges = Vec::new();
        for (i, &v) in vertices.iter().enumerate() {
            for (u, w) in self.neighbors(v) {
                if let Some(&j) = local.get(&u) {
                    if i < j {
                        edges.push(Edge {
                            u: i,
                            v: j,
                            weight: w,
                        });
                    }
                }
            }
        }
        edges.sort_by_key(|e| (e.u, e.v));
        Self::from_sorted_edges(
            vertices.iter().map(|&v| self.vertex_weight[v]).collect(),
            vertices.iter().map(|&v| self.labels[v]).collect(),
            edges,
        )
    }

    /// Edge list in original labels, suitable for [`build_graph`].
    pub fn labeled_edge_list(&self) -> Vec<(u64, u64, f64)> {
        self.edges
            .iter()
            .map(|e| (self.labels[e.u], self.labels[e.v], e.weight))
            .collect()
    }
}

/// Builds a graph from an edge list over arbitrary (possibly sparse) integer
/// labels. Labels are re-indexed densely in ascending order.
pub fn build_graph(edge_list: &[(u64, u64, f64)]) -> Result<WeightedGraph> {
    if edge_list.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let mut labels: Vec<u64> = edge_list.iter().flat_map(|&(u, v, _)| [u, v]).collect();
    labels.sort_unstable();
    labels.dedup();
    let index: HashMap<u64, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    for &(u, v, weight) in edge_list {
        if !(weight.is_finite() && weight > 0.0) {
            return Err(Error::InvalidWeight { u, v, weight });
        }
    }
    let graph = WeightedGraph::from_edges(
        labels.len(),
        edge_list.iter().map(|&(u, v, w)| (index[&u], index[&v], w)),
    )?;
    graph.with_labels(labels)
}
