//! Coarsen / place / refine orchestration.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forces::{run_engine, Engine, ForceParams};
use crate::graph::{Edge, WeightedGraph};
use crate::infomap::{infomap, InfomapConfig, Partition};
use crate::layout::{Layout, Point};
use crate::seed::derive_seed;

// Seed streams for the independent random choices of one pipeline run.
const STREAM_INFOMAP: u64 = 1;
const STREAM_INITIAL: u64 = 2;
const STREAM_ENGINE: u64 = 3;
const STREAM_PLACE: u64 = 4;

/// Coarse graph hierarchy `G_0 … G_L`.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    levels: Vec<WeightedGraph>,
    /// `parents[i][v]` is the vertex of `G_{i+1}` that contains `v ∈ G_i`.
    parents: Vec<Vec<usize>>,
    level_seconds: Vec<f64>,
    coarsen_seconds: f64,
}

impl Hierarchy {
    /// Hierarchy with no coarsening: `[g]`, `L = 0`.
    pub fn single(g: WeightedGraph) -> Self {
        Hierarchy {
            levels: vec![g],
            parents: Vec::new(),
            level_seconds: Vec::new(),
            coarsen_seconds: 0.0,
        }
    }

    pub fn levels(&self) -> &[WeightedGraph] {
        &self.levels
    }

    pub fn level(&self, i: usize) -> &WeightedGraph {
        &self.levels[i]
    }

    /// `L`, the number of coarsening steps.
    pub fn level_count(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn finest(&self) -> &WeightedGraph {
        &self.levels[0]
    }

    pub fn coarsest(&self) -> &WeightedGraph {
        self.levels
            .last()
            .expect("hierarchy has at least one level")
    }

    /// Parent map from `G_i` to `G_{i+1}`.
    pub fn parent_map(&self, i: usize) -> &[usize] {
        &self.parents[i]
    }

    /// `(|V_i|, |E_i|)` for every level.
    pub fn level_sizes(&self) -> Vec<(usize, usize)> {
        self.levels.iter().map(|g| (g.n(), g.m())).collect()
    }

    /// Wall-clock seconds spent producing each coarse level.
    pub fn level_seconds(&self) -> &[f64] {
        &self.level_seconds
    }

    /// Total wall-clock coarsening time, including a discarded final attempt.
    pub fn coarsen_seconds(&self) -> f64 {
        self.coarsen_seconds
    }
}

/// Merges every module of `part` into one vertex. Vertex weights and
/// inter-module edge weights are summed; intra-module edges are dropped.
pub fn collapse(g: &WeightedGraph, part: &Partition) -> WeightedGraph {
    let count = part.module_count();
    let mut weights = vec![0.0; count];
    for v in 0..g.n() {
        weights[part.module_of(v)] += g.vertex_weight(v);
    }
    let edges = g.edges().iter().filter_map(|&Edge { u, v, weight }| {
        let (a, b) = (part.module_of(u), part.module_of(v));
        (a != b).then_some((a, b, weight))
    });
    WeightedGraph::with_vertex_weights(weights, edges)
        .expect("collapsed graph inherits valid weights")
}

/// Builds the hierarchy by repeated Infomap clustering.
///
/// Stops once a level has at most `stop_size` vertices, or when clustering
/// fails to shrink the graph (one module per vertex) or lumps everything into
/// one module; the non-reducing level is discarded.
pub fn coarsen(g: &WeightedGraph, stop_size: usize, config: &InfomapConfig) -> Hierarchy {
    let start = Instant::now();
    let mut hierarchy = Hierarchy::single(g.clone());
    let stop_size = stop_size.max(1);
    loop {
        let current = hierarchy.coarsest();
        if current.n() <= stop_size {
            break;
        }
        let level_start = Instant::now();
        let level_config = InfomapConfig {
            seed: derive_seed(config.seed, hierarchy.levels.len() as u64),
            ..*config
        };
        let part = infomap(current, &level_config);
        let count = part.module_count();
        if count >= current.n() || count <= 1 {
            break;
        }
        let coarse = collapse(current, &part);
        hierarchy.parents.push(part.assignment().to_vec());
        hierarchy.levels.push(coarse);
        hierarchy
            .level_seconds
            .push(level_start.elapsed().as_secs_f64());
    }
    hierarchy.coarsen_seconds = start.elapsed().as_secs_f64();
    hierarchy
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Placement {
    Circle,
    Barycenter,
    Zero,
}

impl Placement {
    pub fn name(self) -> &'static str {
        match self {
            Placement::Circle => "circle",
            Placement::Barycenter => "barycenter",
            Placement::Zero => "zero",
        }
    }
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Placement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "circle" => Ok(Placement::Circle),
            "barycenter" => Ok(Placement::Barycenter),
            "zero" => Ok(Placement::Zero),
            other => Err(Error::InvalidParameter(format!(
                "unknown placement {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlacementParams {
    /// Circle radius around the parent position.
    pub radius: f64,
    /// Half-width `ε` of the uniform perturbation box for zero placement.
    pub perturbation: f64,
    /// Averaging sweeps for barycenter placement.
    pub barycenter_sweeps: usize,
}

impl PlacementParams {
    /// Radius `k/2`, perturbation `k/100`, three barycenter sweeps.
    pub fn for_edge_length(k: f64) -> Self {
        PlacementParams {
            radius: 0.5 * k,
            perturbation: 0.01 * k,
            barycenter_sweeps: 3,
        }
    }
}

/// Initial layout of a finer level from the layout of its parent level.
///
/// * Circle: the `j`-th of `c` children sits at angle `2πj/c` on a circle of
///   the given radius around its parent.
/// * Zero: each child sits at its parent plus a uniform offset in `[-ε, ε]²`.
/// * Barycenter: the lowest-indexed child of each parent is pinned at the
///   parent position, the others start from zero placement and are then
///   moved to the mean of their neighbours, sweeping in vertex order.
pub fn place(
    child: &WeightedGraph,
    parent_layout: &Layout,
    parent_map: &[usize],
    strategy: Placement,
    params: &PlacementParams,
    seed: u64,
) -> Result<Layout> {
    let n = child.n();
    if parent_map.len() != n {
        return Err(Error::UnmappedVertex(parent_map.len().min(n)));
    }
    if let Some(v) = parent_map.iter().position(|&p| p >= parent_layout.len()) {
        return Err(Error::UnmappedVertex(v));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let parent_pos = |v: usize| parent_layout.points[parent_map[v]];
    let zero = |rng: &mut ChaCha8Rng, v: usize| {
        let eps = params.perturbation;
        let dx = (2.0 * rng.random::<f64>() - 1.0) * eps;
        let dy = (2.0 * rng.random::<f64>() - 1.0) * eps;
        parent_pos(v) + Point::new(dx, dy)
    };

    let points = match strategy {
        Placement::Zero => (0..n).map(|v| zero(&mut rng, v)).collect(),
        Placement::Circle => {
            let mut count = vec![0usize; parent_layout.len()];
            for &p in parent_map {
                count[p] += 1;
            }
            let mut seen = vec![0usize; parent_layout.len()];
            (0..n)
                .map(|v| {
                    let p = parent_map[v];
                    let angle = std::f64::consts::TAU * seen[p] as f64 / count[p] as f64;
                    seen[p] += 1;
                    parent_pos(v) + Point::new(angle.cos(), angle.sin()) * params.radius
                })
                .collect()
        }
        Placement::Barycenter => {
            let mut pinned = vec![false; n];
            let mut has_anchor = vec![false; parent_layout.len()];
            for v in 0..n {
                let p = parent_map[v];
                if !has_anchor[p] {
                    has_anchor[p] = true;
                    pinned[v] = true;
                }
            }
            let mut points: Vec<Point> = (0..n)
                .map(|v| {
                    if pinned[v] {
                        parent_pos(v)
                    } else {
                        zero(&mut rng, v)
                    }
                })
                .collect();
            for _ in 0..params.barycenter_sweeps {
                for v in 0..n {
                    if pinned[v] || child.degree(v) == 0 {
                        continue;
                    }
                    let mut sum = Point::ZERO;
                    for &u in child.neighbor_ids(v) {
                        sum += points[u];
                    }
                    points[v] = sum * (1.0 / child.degree(v) as f64);
                }
            }
            points
        }
    };
    Ok(Layout::new(points))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "flat")]
    Flat,
    #[serde(rename = "infomap-multilevel")]
    InfomapMultilevel,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::Flat, Variant::InfomapMultilevel];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Flat => "flat",
            Variant::InfomapMultilevel => "infomap-multilevel",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "flat" => Ok(Variant::Flat),
            "infomap-multilevel" | "infomap" | "multilevel" => Ok(Variant::InfomapMultilevel),
            other => Err(Error::InvalidParameter(format!(
                "unknown variant {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineOptions {
    pub variant: Variant,
    pub engine: Engine,
    pub placement: Placement,
    pub stop_size: usize,
    pub seed: u64,
    /// Clustering parameters; the seed is derived from [`Self::seed`].
    pub infomap: InfomapConfig,
    /// Engine parameters; `iterations` is replaced per level by the two
    /// fields below.
    pub forces: ForceParams,
    pub coarse_iterations: usize,
    pub refine_iterations: usize,
    /// `None` derives placement scales from the ideal edge length.
    pub placement_params: Option<PlacementParams>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            variant: Variant::InfomapMultilevel,
            engine: Engine::Fr,
            placement: Placement::Barycenter,
            stop_size: 50,
            seed: 1,
            infomap: InfomapConfig::default(),
            forces: ForceParams::default(),
            coarse_iterations: 300,
            refine_iterations: 100,
            placement_params: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub coarsen_seconds: f64,
    pub layout_seconds: f64,
    pub metrics_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub layout: Layout,
    pub hierarchy: Hierarchy,
    pub timings: PhaseTimings,
}

/// Seeded random start for the coarsest level: uniform in a square of side
/// `√n·k`.
pub fn initial_layout(n: usize, ideal_edge_length: f64, seed: u64) -> Layout {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, STREAM_INITIAL));
    Layout::random(n, (n as f64).sqrt() * ideal_edge_length, &mut rng)
}

/// Runs the whole multi-level pipeline (or a single flat engine run).
pub fn run_pipeline(g: &WeightedGraph, options: &PipelineOptions) -> Result<PipelineResult> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    options.forces.validate()?;
    let k = options.forces.ideal_edge_length;

    let hierarchy = match options.variant {
        Variant::Flat => Hierarchy::single(g.clone()),
        Variant::InfomapMultilevel => {
            let config = InfomapConfig {
                seed: derive_seed(options.seed, STREAM_INFOMAP),
                ..options.infomap
            };
            coarsen(g, options.stop_size, &config)
        }
    };

    let layout_start = Instant::now();
    let top = hierarchy.level_count();
    let coarse_params = ForceParams {
        iterations: options.coarse_iterations,
        ..options.forces
    };
    let refine_params = ForceParams {
        iterations: options.refine_iterations,
        ..options.forces
    };
    let placement_params = options
        .placement_params
        .unwrap_or_else(|| PlacementParams::for_edge_length(k));

    let start = initial_layout(hierarchy.coarsest().n(), k, options.seed);
    let mut layout = run_engine(
        options.engine,
        &start,
        hierarchy.coarsest(),
        &coarse_params,
        derive_seed(options.seed, STREAM_ENGINE * 1000 + top as u64),
    )?;
    for level in (0..top).rev() {
        let fine = hierarchy.level(level);
        let placed = place(
            fine,
            &layout,
            hierarchy.parent_map(level),
            options.placement,
            &placement_params,
            derive_seed(options.seed, STREAM_PLACE * 1000 + level as u64),
        )?;
        layout = run_engine(
            options.engine,
            &placed,
            fine,
            &refine_params,
            derive_seed(options.seed, STREAM_ENGINE * 1000 + level as u64),
        )?;
    }

    let timings = PhaseTimings {
        coarsen_seconds: hierarchy.coarsen_seconds(),
        layout_seconds: layout_start.elapsed().as_secs_f64(),
        metrics_seconds: 0.0,
    };
    Ok(PipelineResult {
        layout,
        hierarchy,
        timings,
    })
}
