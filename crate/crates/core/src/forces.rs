//! Force-directed refinement engines.
//!
//! All three engines share the Fruchterman-Reingold force model: pairwise
//! repulsion `w_u·w_v·k²/d` and attraction `d²/k` along every edge, with
//! each vertex moved along its net force by at most the current temperature.
//! They differ only in how the repulsion sum is evaluated:
//!
//! * [`Engine::Fr`]: exact `O(n²)` sum.
//! * [`Engine::Frg`]: only pairs in the 3×3 block of grid cells around a
//!   vertex contribute.
//! * [`Engine::Fme`]: Barnes-Hut quadtree with monopole far-field cells.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::layout::{Layout, Point};
use crate::quadtree::build_quadtree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Fr,
    Frg,
    Fme,
}

impl Engine {
    pub const ALL: [Engine; 3] = [Engine::Fr, Engine::Frg, Engine::Fme];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Fr => "fr",
            Engine::Frg => "frg",
            Engine::Fme => "fme",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fr" => Ok(Engine::Fr),
            "frg" => Ok(Engine::Frg),
            "fme" => Ok(Engine::Fme),
            other => Err(Error::InvalidParameter(format!("unknown engine {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceParams {
    /// `k`: distance at which attraction and repulsion of a unit edge balance.
    pub ideal_edge_length: f64,
    pub iterations: usize,
    /// Starting step cap; `None` means `0.1·√n·k`.
    pub initial_temperature: Option<f64>,
    /// Multiplicative temperature decay per iteration, in `(0, 1)`.
    pub cooling: f64,
    /// Barnes-Hut opening angle (FME only).
    pub theta: f64,
    /// Grid cell side (FRG only); `None` means `2k`.
    pub grid_cell: Option<f64>,
}

impl Default for ForceParams {
    fn default() -> Self {
        ForceParams {
            ideal_edge_length: 1.0,
            iterations: 300,
            initial_temperature: None,
            cooling: 0.95,
            theta: 0.5,
            grid_cell: None,
        }
    }
}

impl ForceParams {
    /// Classical choice `k = C·√(area/n)`.
    pub fn from_area(c: f64, area: f64, n: usize) -> Self {
        ForceParams {
            ideal_edge_length: c * (area / n.max(1) as f64).sqrt(),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.ideal_edge_length;
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ideal edge length must be positive, got {k}"
            )));
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "cooling must lie in (0, 1), got {}",
                self.cooling
            )));
        }
        if !(self.theta >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "theta must be non-negative, got {}",
                self.theta
            )));
        }
        if let Some(t) = self.initial_temperature {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "initial temperature must be non-negative, got {t}"
                )));
            }
        }
        if let Some(c) = self.grid_cell {
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "grid cell must be positive, got {c}"
                )));
            }
        }
        Ok(())
    }

    pub fn start_temperature(&self, n: usize) -> f64 {
        self.initial_temperature
            .unwrap_or(0.1 * (n as f64).sqrt() * self.ideal_edge_length)
    }

    pub fn cell_side(&self) -> f64 {
        self.grid_cell.unwrap_or(2.0 * self.ideal_edge_length)
    }
}

#[inline]
fn repel(at: Point, from: Point, scale: f64) -> Point {
    let delta = at - from;
    let d2 = delta.norm_sq();
    if d2 > 0.0 {
        delta * (scale / d2)
    } else {
        Point::ZERO
    }
}

/// Exact pairwise repulsion on every vertex.
pub fn repulsion_exact(points: &[Point], masses: &[f64], k: f64) -> Vec<Point> {
    let k2 = k * k;
    (0..points.len())
        .into_par_iter()
        .map(|i| {
            let mut f = Point::ZERO;
            for j in 0..points.len() {
                if j != i {
                    f += repel(points[i], points[j], masses[i] * masses[j] * k2);
                }
            }
            f
        })
        .collect()
}

/// Grid cell of every point, anchored at the lower-left corner of the
/// bounding box.
pub fn grid_cells(points: &[Point], cell: f64) -> Vec<(i64, i64)> {
    let lo = Layout::new(points.to_vec())
        .bounds()
        .map_or(Point::ZERO, |b| b.0);
    points
        .iter()
        .map(|p| {
            (
                ((p.x - lo.x) / cell).floor() as i64,
                ((p.y - lo.y) / cell).floor() as i64,
            )
        })
        .collect()
}

/// Repulsion restricted to vertices in the 3×3 neighbourhood of each vertex's
/// grid cell. Contributions are summed in vertex order, so the result is
/// bitwise equal to [`repulsion_exact`] when no pair is cut off.
pub fn repulsion_grid(points: &[Point], masses: &[f64], k: f64, cell: f64) -> Vec<Point> {
    let k2 = k * k;
    let cells = grid_cells(points, cell);
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, &c) in cells.iter().enumerate() {
        buckets.entry(c).or_default().push(i);
    }
    (0..points.len())
        .into_par_iter()
        .map(|i| {
            let (cx, cy) = cells[i];
            let mut near = Vec::new();
            for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(list) = buckets.get(&(cx + dx, cy + dy)) {
                        near.extend_from_slice(list);
                    }
                }
            }
            near.sort_unstable();
            let mut f = Point::ZERO;
            for j in near {
                if j != i {
                    f += repel(points[i], points[j], masses[i] * masses[j] * k2);
                }
            }
            f
        })
        .collect()
}

/// Barnes-Hut approximation of [`repulsion_exact`].
pub fn repulsion_barnes_hut(points: &[Point], masses: &[f64], k: f64, theta: f64) -> Vec<Point> {
    let layout = Layout::new(points.to_vec());
    let tree = build_quadtree(&layout, masses);
    (0..points.len())
        .into_par_iter()
        .map(|i| tree.repulsion(points, masses, points[i], i, masses[i], k, theta))
        .collect()
}

/// Spring attraction `d²/k` toward every neighbour.
pub fn attraction(points: &[Point], g: &WeightedGraph, k: f64) -> Vec<Point> {
    (0..points.len())
        .into_par_iter()
        .map(|v| {
            let mut f = Point::ZERO;
            for &u in g.neighbor_ids(v) {
                let delta = points[u] - points[v];
                f += delta * (delta.norm() / k);
            }
            f
        })
        .collect()
}

/// Moves every vertex that shares its exact position with a lower-indexed
/// vertex by a random offset of length `1e-4·k`.
pub fn separate_coincident<R: Rng + ?Sized>(points: &mut [Point], k: f64, rng: &mut R) {
    let mut order: Vec<usize> = (0..points.len()).collect();
    let key = |p: Point| (p.x.to_bits(), p.y.to_bits());
    order.sort_by_key(|&i| (key(points[i]), i));
    let mut dup = Vec::new();
    for w in order.windows(2) {
        if points[w[0]] == points[w[1]] {
            dup.push(w[1]);
        }
    }
    dup.sort_unstable();
    for i in dup {
        let angle = rng.random::<f64>() * std::f64::consts::TAU;
        points[i] += Point::new(angle.cos(), angle.sin()) * (1e-4 * k);
    }
}

fn step_with<F>(
    layout: &Layout,
    g: &WeightedGraph,
    params: &ForceParams,
    temperature: f64,
    rng: &mut ChaCha8Rng,
    repulsion: F,
) -> Layout
where
    F: FnOnce(&[Point], &[f64], f64) -> Vec<Point>,
{
    let k = params.ideal_edge_length;
    let mut points = layout.points.clone();
    separate_coincident(&mut points, k, rng);
    let rep = repulsion(&points, g.vertex_weights(), k);
    let att = attraction(&points, g, k);
    let moved = points
        .iter()
        .zip(rep.iter().zip(&att))
        .map(|(&p, (&r, &a))| {
            let f = r + a;
            let len = f.norm();
            if len > 0.0 && len.is_finite() {
                p + f * (len.min(temperature) / len)
            } else {
                p
            }
        })
        .collect();
    Layout::new(moved)
}

pub fn fr_step(
    layout: &Layout,
    g: &WeightedGraph,
    params: &ForceParams,
    temperature: f64,
    rng: &mut ChaCha8Rng,
) -> Layout {
    step_with(layout, g, params, temperature, rng, repulsion_exact)
}

pub fn frg_step(
    layout: &Layout,
    g: &WeightedGraph,
    params: &ForceParams,
    temperature: f64,
    rng: &mut ChaCha8Rng,
) -> Layout {
    let cell = params.cell_side();
    step_with(layout, g, params, temperature, rng, |p, m, k| {
        repulsion_grid(p, m, k, cell)
    })
}

pub fn fme_step(
    layout: &Layout,
    g: &WeightedGraph,
    params: &ForceParams,
    temperature: f64,
    rng: &mut ChaCha8Rng,
) -> Layout {
    let theta = params.theta;
    step_with(layout, g, params, temperature, rng, |p, m, k| {
        repulsion_barnes_hut(p, m, k, theta)
    })
}

pub fn step(
    engine: Engine,
    layout: &Layout,
    g: &WeightedGraph,
    params: &ForceParams,
    temperature: f64,
    rng: &mut ChaCha8Rng,
) -> Layout {
    match engine {
        Engine::Fr => fr_step(layout, g, params, temperature, rng),
        Engine::Frg => frg_step(layout, g, params, temperature, rng),
        Engine::Fme => fme_step(layout, g, params, temperature, rng),
    }
}

/// Runs `params.iterations` steps with geometric cooling
/// `t_i = t_0 · cooling^i`.
pub fn run_engine(
    engine: Engine,
    initial: &Layout,
    g: &WeightedGraph,
    params: &ForceParams,
    seed: u64,
) -> Result<Layout> {
    params.validate()?;
    if initial.len() != g.n() {
        return Err(Error::SizeMismatch {
            expected: g.n(),
            got: initial.len(),
        });
    }
    initial.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut temperature = params.start_temperature(g.n());
    let mut layout = initial.clone();
    for _ in 0..params.iterations {
        layout = step(engine, &layout, g, params, temperature, &mut rng);
        temperature *= params.cooling;
    }
    Ok(layout)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(5)
    }

    #[test]
    fn kernels_match_formulas() {
        let k = 1.7;
        let pts = [Point::new(0.3, -0.2), Point::new(2.1, 0.9)];
        let d = pts[0].dist(pts[1]);
        let rep = repulsion_exact(&pts, &[1.0, 1.0], k);
        assert!((rep[0].norm() - k * k / d).abs() < 1e-12);
        let g = WeightedGraph::from_edges(2, [(0, 1, 1.0)]).unwrap();
        let att = attraction(&pts, &g, k);
        assert!((att[0].norm() - d * d / k).abs() < 1e-12);
        // Opposite directions: repulsion pushes 0 away from 1.
        let toward = pts[1] - pts[0];
        assert!(rep[0].x * toward.x + rep[0].y * toward.y < 0.0);
        assert!(att[0].x * toward.x + att[0].y * toward.y > 0.0);
    }

    #[test]
    fn isolated_pair_at_distance_k() {
        let k = 2.0;
        let pts = [Point::new(0.0, 0.0), Point::new(k, 0.0)];
        let rep = repulsion_exact(&pts, &[1.0, 1.0], k);
        assert_eq!(rep[0], Point::new(-k, 0.0));
        assert_eq!(rep[1], Point::new(k, 0.0));
    }

    #[test]
    fn edge_at_distance_k_is_in_equilibrium() {
        let params = ForceParams {
            ideal_edge_length: 1.5,
            ..Default::default()
        };
        let g = WeightedGraph::from_edges(2, [(0, 1, 1.0)]).unwrap();
        let l: Layout = vec![(0.0, 0.0), (1.5, 0.0)].into();
        let next = fr_step(&l, &g, &params, 1.0, &mut rng());
        assert_eq!(next, l);
    }

    #[test]
    fn weighted_repulsion_scales_with_mass_product() {
        let pts = [Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
        let unit = repulsion_exact(&pts, &[1.0, 1.0], 1.0);
        let heavy = repulsion_exact(&pts, &[2.0, 3.0], 1.0);
        assert_eq!(heavy[0], unit[0] * 6.0);
    }

    #[test]
    fn coincident_points_are_separated() {
        let mut pts = vec![Point::new(1.0, 1.0); 3];
        separate_coincident(&mut pts, 1.0, &mut rng());
        assert_eq!(pts[0], Point::new(1.0, 1.0));
        assert_ne!(pts[1], pts[0]);
        assert_ne!(pts[2], pts[0]);
        assert!((pts[1].dist(pts[0]) - 1e-4).abs() < 1e-12);
    }

    #[test]
    fn frg_cuts_off_distant_pairs() {
        let pts = [Point::new(0.0, 0.0), Point::new(5.0, 0.0)];
        let f = repulsion_grid(&pts, &[1.0, 1.0], 1.0, 2.0);
        assert_eq!(f, vec![Point::ZERO, Point::ZERO]);
    }

    #[test]
    fn zero_iterations_is_identity() {
        let g = crate::generators::cycle(5);
        let l = Layout::random(5, 3.0, &mut rng());
        let params = ForceParams {
            iterations: 0,
            ..Default::default()
        };
        for e in Engine::ALL {
            assert_eq!(run_engine(e, &l, &g, &params, 1).unwrap(), l);
        }
    }

    #[test]
    fn invalid_params_rejected() {
        let bad = ForceParams {
            cooling: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = ForceParams {
            ideal_edge_length: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        assert_eq!("FME".parse::<Engine>().unwrap(), Engine::Fme);
        assert!("xyz".parse::<Engine>().is_err());
    }

    #[test]
    fn from_area_sets_k() {
        let p = ForceParams::from_area(1.0, 400.0, 4);
        assert_eq!(p.ideal_edge_length, 10.0);
    }
}
