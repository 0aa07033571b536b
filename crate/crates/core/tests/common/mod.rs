//! Independent reference implementations used as test oracles. Nothing here
//! calls into the library's algorithms; only its data types are shared.
#![allow(dead_code)]

use infolayout::{Layout, Point, WeightedGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// All set partitions of `0..n` as restricted growth strings.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn grow(prefix: &mut Vec<usize>, max: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let limit = if prefix.is_empty() { 0 } else { max + 1 };
        for b in 0..=limit {
            prefix.push(b);
            grow(prefix, max.max(b), n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        grow(&mut Vec::with_capacity(n), 0, n, &mut out);
    }
    out
}

fn entropy(probs: &[f64]) -> f64 {
    let total: f64 = probs.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| {
            let x = p / total;
            -x * x.log2()
        })
        .sum()
}

/// Two-level map equation straight from its definition
/// `q·H(Q) + Σ_i (q_i + p_i)·H(P_i)` for an undirected graph.
pub fn codelength_naive(g: &WeightedGraph, assignment: &[usize]) -> f64 {
    let two_w: f64 = 2.0 * g.edges().iter().map(|e| e.weight).sum::<f64>();
    let modules = assignment.iter().max().map_or(0, |m| m + 1);
    let mut visit = vec![0.0; g.n()];
    let mut exit = vec![0.0; modules];
    for e in g.edges() {
        visit[e.u] += e.weight / two_w;
        visit[e.v] += e.weight / two_w;
        if assignment[e.u] != assignment[e.v] {
            exit[assignment[e.u]] += e.weight / two_w;
            exit[assignment[e.v]] += e.weight / two_w;
        }
    }
    let q: f64 = exit.iter().sum();
    let mut total = if q > 0.0 { q * entropy(&exit) } else { 0.0 };
    for i in 0..modules {
        let mut codebook = vec![exit[i]];
        codebook.extend((0..g.n()).filter(|&v| assignment[v] == i).map(|v| visit[v]));
        let weight: f64 = codebook.iter().sum();
        total += weight * entropy(&codebook);
    }
    total
}

/// Minimum codelength over every partition, with a minimiser.
pub fn brute_force_min(g: &WeightedGraph) -> (f64, Vec<usize>) {
    let mut best = (f64::INFINITY, Vec::new());
    for p in set_partitions(g.n()) {
        let l = codelength_naive(g, &p);
        if l < best.0 {
            best = (l, p);
        }
    }
    best
}

fn connected(n: usize, edges: &[(usize, usize, f64)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(a, b, _) in edges {
            let other = if a == v {
                b
            } else if b == v {
                a
            } else {
                continue;
            };
            if !seen[other] {
                seen[other] = true;
                stack.push(other);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

fn graph(n: usize, edges: Vec<(usize, usize, f64)>) -> WeightedGraph {
    WeightedGraph::from_edges(n, edges).unwrap()
}

/// Fixed suite of small connected graphs (n ≤ 8) with a name each.
pub fn small_graph_suite() -> Vec<(String, WeightedGraph)> {
    let mut out = Vec::new();
    for n in 3..=8 {
        out.push((
            format!("path{n}"),
            graph(n, (1..n).map(|i| (i - 1, i, 1.0)).collect()),
        ));
        out.push((
            format!("cycle{n}"),
            graph(n, (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect()),
        ));
    }
    for n in 4..=6 {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j, 1.0));
            }
        }
        out.push((format!("complete{n}"), graph(n, e)));
        out.push((
            format!("star{n}"),
            graph(n, (1..n).map(|i| (0, i, 1.0)).collect()),
        ));
    }
    let two_triangles = vec![
        (0, 1, 1.0),
        (0, 2, 1.0),
        (1, 2, 1.0),
        (3, 4, 1.0),
        (3, 5, 1.0),
        (4, 5, 1.0),
    ];
    let mut barbell = two_triangles.clone();
    barbell.push((2, 3, 1.0));
    out.push(("barbell3".into(), graph(6, barbell)));
    let mut bridged = two_triangles.clone();
    bridged.extend([(2, 6, 1.0), (6, 3, 1.0)]);
    out.push(("barbell3-bridge".into(), graph(7, bridged)));
    let two_squares = vec![
        (0, 1, 1.0),
        (1, 2, 1.0),
        (2, 3, 1.0),
        (3, 0, 1.0),
        (0, 2, 1.0),
        (4, 5, 1.0),
        (5, 6, 1.0),
        (6, 7, 1.0),
        (7, 4, 1.0),
        (4, 6, 1.0),
        (3, 4, 1.0),
    ];
    out.push(("two-squares".into(), graph(8, two_squares)));
    let mut heavy = two_triangles;
    heavy.push((2, 3, 0.25));
    for e in heavy.iter_mut().take(3) {
        e.2 = 3.0;
    }
    out.push(("weighted-barbell".into(), graph(6, heavy)));

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut made = 0;
    while made < 12 {
        let n = rng.random_range(4..=8);
        let p = rng.random_range(0.25..0.7);
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.random::<f64>() < p {
                    let w = if made % 3 == 0 {
                        rng.random_range(0.5..4.0)
                    } else {
                        1.0
                    };
                    e.push((i, j, w));
                }
            }
        }
        if !e.is_empty() && connected(n, &e) {
            out.push((format!("random{made}"), graph(n, e)));
            made += 1;
        }
    }
    out
}

pub fn random_points(n: usize, side: f64, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Point::new(rng.random::<f64>() * side, rng.random::<f64>() * side))
        .collect()
}

/// Exact pairwise repulsion `w_i·w_j·k²/d` along `x_i − x_j`.
pub fn repulsion_naive(points: &[Point], masses: &[f64], k: f64) -> Vec<Point> {
    (0..points.len())
        .map(|i| {
            let (mut fx, mut fy) = (0.0, 0.0);
            for j in 0..points.len() {
                if i == j {
                    continue;
                }
                let dx = points[i].x - points[j].x;
                let dy = points[i].y - points[j].y;
                let d = (dx * dx + dy * dy).sqrt();
                let mag = masses[i] * masses[j] * k * k / d;
                fx += mag * dx / d;
                fy += mag * dy / d;
            }
            Point::new(fx, fy)
        })
        .collect()
}

/// Repulsion summed only over pairs whose grid cells (side `cell`, anchored
/// at the bounding-box minimum) differ by at most one in each axis.
///
/// Terms are evaluated as `delta · (w_i·w_j·k² / |delta|²)` in ascending `j`,
/// the same floating-point expression and order as the grid engine, so
/// results are comparable bit for bit.
pub fn grid_repulsion_naive(points: &[Point], masses: &[f64], k: f64, cell: f64) -> Vec<Point> {
    let min_x = points.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
    let min_y = points.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
    let cell_of = |p: Point| {
        (
            ((p.x - min_x) / cell).floor() as i64,
            ((p.y - min_y) / cell).floor() as i64,
        )
    };
    (0..points.len())
        .map(|i| {
            let ci = cell_of(points[i]);
            let mut f = Point::new(0.0, 0.0);
            for j in 0..points.len() {
                let cj = cell_of(points[j]);
                if j == i || (ci.0 - cj.0).abs() > 1 || (ci.1 - cj.1).abs() > 1 {
                    continue;
                }
                let delta = points[i] - points[j];
                let d2 = delta.x * delta.x + delta.y * delta.y;
                if d2 > 0.0 {
                    f += delta * (masses[i] * masses[j] * (k * k) / d2);
                }
            }
            f
        })
        .collect()
}

/// Gabriel graph by definition: `uv` is an edge iff no third point lies in
/// the closed disk with diameter `uv` (angle at the point ≥ 90°).
pub fn gabriel_naive(points: &[Point]) -> Vec<(usize, usize)> {
    let n = points.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let blocked = (0..n).any(|k| {
                k != i
                    && k != j
                    && (points[i].x - points[k].x) * (points[j].x - points[k].x)
                        + (points[i].y - points[k].y) * (points[j].y - points[k].y)
                        <= 0.0
            });
            if !blocked {
                out.push((i, j));
            }
        }
    }
    out
}

/// Closed-segment intersection from the parametric form `a + t(b−a) =
/// c + u(d−c)`, with an explicit collinear-overlap branch. Exact for
/// integer coordinates of moderate size.
pub fn segments_meet_parametric(a: Point, b: Point, c: Point, d: Point) -> bool {
    let r = b - a;
    let s = d - c;
    let denom = r.x * s.y - r.y * s.x;
    let ac = c - a;
    let t_num = ac.x * s.y - ac.y * s.x;
    let u_num = ac.x * r.y - ac.y * r.x;
    if denom != 0.0 {
        let (t, u) = (t_num / denom, u_num / denom);
        return (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u);
    }
    if t_num != 0.0 || u_num != 0.0 {
        return false; // parallel, not collinear
    }
    if r == Point::ZERO && s == Point::ZERO {
        return a == c;
    }
    // Collinear: project onto the dominant axis and test interval overlap.
    let key = |p: Point| {
        if r.x.abs() + s.x.abs() >= r.y.abs() + s.y.abs() {
            p.x
        } else {
            p.y
        }
    };
    let (lo1, hi1) = (key(a).min(key(b)), key(a).max(key(b)));
    let (lo2, hi2) = (key(c).min(key(d)), key(c).max(key(d)));
    lo1 <= hi2 && lo2 <= hi1
}

/// All `O(m²)` edge pairs without a shared endpoint; no pruning.
pub fn crossings_naive(g: &WeightedGraph, layout: &Layout) -> u64 {
    let p = &layout.points;
    let e = g.edges();
    let mut count = 0;
    for i in 0..e.len() {
        for j in i + 1..e.len() {
            let shared =
                e[i].u == e[j].u || e[i].u == e[j].v || e[i].v == e[j].u || e[i].v == e[j].v;
            if !shared && segments_meet_parametric(p[e[i].u], p[e[i].v], p[e[j].u], p[e[j].v]) {
                count += 1;
            }
        }
    }
    count
}

/// Hop distances by Floyd-Warshall; `None` for unreachable pairs.
pub fn hop_matrix(g: &WeightedGraph) -> Vec<Vec<Option<u32>>> {
    let n = g.n();
    let inf = u32::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0;
    }
    for e in g.edges() {
        d[e.u][e.v] = 1;
        d[e.v][e.u] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d.into_iter()
        .map(|row| row.into_iter().map(|x| (x < inf).then_some(x)).collect())
        .collect()
}

/// Stress with the closed-form optimal scale, from a Floyd-Warshall matrix.
pub fn stress_naive(g: &WeightedGraph, layout: &Layout) -> f64 {
    let d = hop_matrix(g);
    let n = g.n();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if let Some(h) = d[i][j] {
                pairs.push((layout.points[i].dist(layout.points[j]), h as f64));
            }
        }
    }
    let num: f64 = pairs.iter().map(|(e, h)| e / h).sum();
    let den: f64 = pairs.iter().map(|(e, h)| e * e / (h * h)).sum();
    let s = if den > 0.0 { num / den } else { 1.0 };
    pairs.iter().map(|(e, h)| ((s * e - h) / h).powi(2)).sum()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
