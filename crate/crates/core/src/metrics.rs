//! Drawing quality: shape-based metric, stress and edge crossings.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spade::{DelaunayTriangulation, HasPosition, Point2, Triangulation};

use crate::error::{Error, Result};
use crate::graph::{VertexId, WeightedGraph};
use crate::layout::{Layout, Point};

/// Relative tolerance of the diametral-disk test.
const DISK_TOLERANCE: f64 = 1e-12;
/// Relative tolerance on orientation cross products.
const ORIENT_TOLERANCE: f64 = 1e-12;
/// Above this many vertices stress is estimated from sampled BFS sources.
pub const STRESS_EXACT_LIMIT: usize = 20_000;
const STRESS_SAMPLE_SOURCES: usize = 200;
const STRESS_SAMPLE_SEED: u64 = 0x5EED;

/// Scores of one drawing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub shape_q: f64,
    pub stress: f64,
    /// True when stress was estimated from sampled pairs.
    pub stress_sampled: bool,
    pub crossings: u64,
    /// `Q_variant / Q_baseline − 1`, when a baseline is known.
    pub improvement: Option<f64>,
}

/// Proximity graph of a drawing, as sorted `(u, v)` pairs with `u < v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProximityGraph {
    pub n: usize,
    pub edges: Vec<(VertexId, VertexId)>,
}

impl ProximityGraph {
    /// Sorted neighbour lists.
    pub fn adjacency(&self) -> Vec<Vec<VertexId>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }
}

struct Site {
    position: Point2<f64>,
    id: usize,
}

impl HasPosition for Site {
    type Scalar = f64;

    fn position(&self) -> Point2<f64> {
        self.position
    }
}

fn check_distinct(layout: &Layout) -> Result<()> {
    layout.validate()?;
    let mut order: Vec<usize> = (0..layout.len()).collect();
    let p = &layout.points;
    order.sort_by(|&a, &b| {
        p[a].x
            .total_cmp(&p[b].x)
            .then(p[a].y.total_cmp(&p[b].y))
            .then(a.cmp(&b))
    });
    for w in order.windows(2) {
        if p[w[0]] == p[w[1]] {
            return Err(Error::CoincidentPoints(w[0].min(w[1]), w[0].max(w[1])));
        }
    }
    Ok(())
}

/// True if `c` lies in the closed disk with diameter `ab`.
#[inline]
pub fn in_diametral_disk(a: Point, b: Point, c: Point) -> bool {
    let mid = (a + b) * 0.5;
    let r2 = a.dist_sq(b) * 0.25;
    c.dist_sq(mid) <= r2 * (1.0 + DISK_TOLERANCE)
}

/// Exact Gabriel graph of the drawing.
///
/// Every Gabriel edge is a Delaunay edge, and a Delaunay edge is Gabriel iff
/// neither apex of its adjacent triangles lies in its diametral disk.
pub fn gabriel_graph(layout: &Layout) -> Result<ProximityGraph> {
    let n = layout.len();
    if n < 2 {
        return Ok(ProximityGraph {
            n,
            edges: Vec::new(),
        });
    }
    check_distinct(layout)?;
    let sites: Vec<Site> = layout
        .points
        .iter()
        .enumerate()
        .map(|(id, p)| Site {
            position: Point2::new(p.x, p.y),
            id,
        })
        .collect();
    let dt = DelaunayTriangulation::<Site>::bulk_load(sites)
        .map_err(|e| Error::InvalidParameter(format!("triangulation failed: {e:?}")))?;

    let pos = &layout.points;
    let mut edges = Vec::new();
    for edge in dt.undirected_edges() {
        let [a, b] = edge.vertices();
        let (u, v) = (a.data().id, b.data().id);
        let directed = edge.as_directed();
        let blocked = [directed.opposite_vertex(), directed.rev().opposite_vertex()]
            .into_iter()
            .flatten()
            .any(|apex| in_diametral_disk(pos[u], pos[v], pos[apex.data().id]));
        if !blocked {
            edges.push((u.min(v), u.max(v)));
        }
    }
    edges.sort_unstable();
    Ok(ProximityGraph { n, edges })
}

fn jaccard(a: &[VertexId], b: &[VertexId]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let (mut i, mut j, mut common) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    common as f64 / (a.len() + b.len() - common) as f64
}

/// Mean Jaccard similarity between graph neighbourhoods and Gabriel-graph
/// neighbourhoods of the drawing. In `[0, 1]`; `1` iff the two graphs are
/// equal.
pub fn shape_metric(g: &WeightedGraph, layout: &Layout) -> Result<f64> {
    check_cover(g, layout)?;
    if g.n() == 0 {
        return Ok(1.0);
    }
    let prox = gabriel_graph(layout)?.adjacency();
    let total: f64 = (0..g.n())
        .map(|v| jaccard(g.neighbor_ids(v), &prox[v]))
        .sum();
    Ok(total / g.n() as f64)
}

fn check_cover(g: &WeightedGraph, layout: &Layout) -> Result<()> {
    if layout.len() != g.n() {
        return Err(Error::SizeMismatch {
            expected: g.n(),
            got: layout.len(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StressReport {
    pub value: f64,
    /// Optimal uniform scale applied to the drawing before scoring.
    pub scale: f64,
    pub sampled: bool,
    /// Vertex pairs that entered the sum.
    pub pairs: u64,
    /// Pairs skipped because their endpoints lie in different components.
    pub cross_component_pairs: u64,
}

fn bfs(g: &WeightedGraph, source: usize, dist: &mut [u32], queue: &mut Vec<usize>) {
    dist.fill(u32::MAX);
    queue.clear();
    dist[source] = 0;
    queue.push(source);
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        for &u in g.neighbor_ids(v) {
            if dist[u] == u32::MAX {
                dist[u] = dist[v] + 1;
                queue.push(u);
            }
        }
    }
}

/// Sum over source rows of `f(euclidean, graph_distance)` for reachable
/// pairs, plus pair and unreachable counts. Rows are reduced in source order.
fn pair_sums<F>(
    g: &WeightedGraph,
    layout: &Layout,
    sources: &[usize],
    exact: bool,
    f: F,
) -> (f64, f64, u64, u64)
where
    F: Fn(f64, f64) -> (f64, f64) + Sync,
{
    let n = g.n();
    let rows: Vec<(f64, f64, u64, u64)> = sources
        .par_iter()
        .map_init(
            || (vec![0u32; n], Vec::with_capacity(n)),
            |(dist, queue), &s| {
                bfs(g, s, dist, queue);
                let mut acc = (0.0, 0.0, 0u64, 0u64);
                let start = if exact { s + 1 } else { 0 };
                for (t, &d) in dist.iter().enumerate().skip(start) {
                    if t == s {
                        continue;
                    }
                    if d == u32::MAX {
                        acc.3 += 1;
                        continue;
                    }
                    let e = layout.points[s].dist(layout.points[t]);
                    let (x, y) = f(e, d as f64);
                    acc.0 += x;
                    acc.1 += y;
                    acc.2 += 1;
                }
                acc
            },
        )
        .collect();
    rows.into_iter().fold((0.0, 0.0, 0, 0), |a, r| {
        (a.0 + r.0, a.1 + r.1, a.2 + r.2, a.3 + r.3)
    })
}

/// Weighted stress `Σ d⁻²(s·‖x_i − x_j‖ − d)²` over connected pairs, with
/// `d` the hop distance and `s` the scale minimising the sum.
pub fn stress(g: &WeightedGraph, layout: &Layout) -> Result<StressReport> {
    stress_with_limit(g, layout, STRESS_EXACT_LIMIT)
}

/// [`stress`] with a custom threshold for switching to sampled sources.
pub fn stress_with_limit(
    g: &WeightedGraph,
    layout: &Layout,
    exact_limit: usize,
) -> Result<StressReport> {
    check_cover(g, layout)?;
    layout.validate()?;
    let n = g.n();
    let sampled = n > exact_limit;
    let sources: Vec<usize> = if sampled {
        let mut rng = ChaCha8Rng::seed_from_u64(STRESS_SAMPLE_SEED);
        let mut s = sample(&mut rng, n, STRESS_SAMPLE_SOURCES.min(n)).into_vec();
        s.sort_unstable();
        s
    } else {
        (0..n).collect()
    };
    let exact = !sampled;

    let (a, b, pairs, unreachable) =
        pair_sums(g, layout, &sources, exact, |e, d| (e / d, e * e / (d * d)));
    let scale = if b > 0.0 { a / b } else { 1.0 };
    let (value, _, _, _) = pair_sums(g, layout, &sources, exact, |e, d| {
        let r = scale * e - d;
        (r * r / (d * d), 0.0)
    });
    Ok(StressReport {
        value,
        scale,
        sampled,
        pairs,
        cross_component_pairs: unreachable,
    })
}

#[inline]
fn orientation(p: Point, q: Point, r: Point) -> i8 {
    let a = q - p;
    let b = r - p;
    let cross = a.x * b.y - a.y * b.x;
    let tol = ORIENT_TOLERANCE * a.norm() * b.norm();
    if cross > tol {
        1
    } else if cross < -tol {
        -1
    } else {
        0
    }
}

#[inline]
fn within_box(p: Point, q: Point, r: Point) -> bool {
    q.x <= p.x.max(r.x) && q.x >= p.x.min(r.x) && q.y <= p.y.max(r.y) && q.y >= p.y.min(r.y)
}

/// Whether closed segments `ab` and `cd` meet: proper crossings, an endpoint
/// touching the other segment, and collinear overlaps all count.
pub fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = orientation(a, b, c);
    let o2 = orientation(a, b, d);
    let o3 = orientation(c, d, a);
    let o4 = orientation(c, d, b);
    if o1 != o2 && o3 != o4 {
        return true;
    }
    (o1 == 0 && within_box(a, c, b))
        || (o2 == 0 && within_box(a, d, b))
        || (o3 == 0 && within_box(c, a, d))
        || (o4 == 0 && within_box(c, b, d))
}

/// Number of unordered pairs of edges without a shared endpoint whose
/// segments meet.
pub fn count_crossings(g: &WeightedGraph, layout: &Layout) -> u64 {
    let p = &layout.points;
    let edges = g.edges();
    let boxes: Vec<(Point, Point)> = edges
        .iter()
        .map(|e| {
            let (a, b) = (p[e.u], p[e.v]);
            (
                Point::new(a.x.min(b.x), a.y.min(b.y)),
                Point::new(a.x.max(b.x), a.y.max(b.y)),
            )
        })
        .collect();
    (0..edges.len())
        .into_par_iter()
        .map(|i| {
            let e = edges[i];
            let (lo, hi) = boxes[i];
            let mut count = 0u64;
            for j in i + 1..edges.len() {
                let f = edges[j];
                if e.u == f.u || e.u == f.v || e.v == f.u || e.v == f.v {
                    continue;
                }
                let (lo2, hi2) = boxes[j];
                if lo2.x > hi.x || hi2.x < lo.x || lo2.y > hi.y || hi2.y < lo.y {
                    continue;
                }
                if segments_intersect(p[e.u], p[e.v], p[f.u], p[f.v]) {
                    count += 1;
                }
            }
            count
        })
        .sum()
}

/// Relative shape-metric gain `q_variant / q_baseline − 1`.
pub fn improvement(q_variant: f64, q_baseline: f64) -> Result<f64> {
    if q_baseline == 0.0 {
        return Err(Error::UndefinedImprovement);
    }
    Ok(q_variant / q_baseline - 1.0)
}

/// Computes all three scores for one drawing.
pub fn evaluate(g: &WeightedGraph, layout: &Layout) -> Result<MetricsReport> {
    let shape_q = shape_metric(g, layout)?;
    let s = stress(g, layout)?;
    Ok(MetricsReport {
        shape_q,
        stress: s.value,
        stress_sampled: s.sampled,
        crossings: count_crossings(g, layout),
        improvement: None,
    })
}
