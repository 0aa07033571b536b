//! Multi-level force-directed graph drawing with map-equation (Infomap)
//! coarsening, plus the drawing-quality metrics used to evaluate it.
//!
//! The pipeline is:
//!
//! 1. [`multilevel::coarsen`] repeatedly clusters the graph with
//!    [`infomap::infomap`] and collapses every cluster into a weighted vertex.
//! 2. The coarsest graph is laid out from random positions by one of the
//!    force engines in [`forces`].
//! 3. Each finer level is initialised with [`multilevel::place`] and refined
//!    with the same engine.
//!
//! [`metrics`] scores the result with the shape-based metric, stress and
//! edge crossings.

pub mod error;
pub mod forces;
pub mod generators;
pub mod graph;
pub mod infomap;
pub mod io;
pub mod layout;
pub mod metrics;
pub mod multilevel;
pub mod quadtree;
mod seed;

pub use error::{Error, Result};
pub use forces::{run_engine, Engine, ForceParams};
pub use graph::{build_graph, Edge, GraphStats, VertexId, WeightedGraph};
pub use infomap::{
    codelength, compute_flow, infomap, move_gain, Codelength, FlowDistribution, InfomapConfig,
    Partition,
};
pub use io::{
    parse_chaco, parse_edge_list, read_graph, write_layout_json, write_svg, GraphFormat,
    LayoutDocument, SvgOptions,
};
pub use layout::{Layout, Point};
pub use metrics::{
    count_crossings, evaluate, gabriel_graph, improvement, shape_metric, stress, MetricsReport,
    ProximityGraph, StressReport,
};
pub use multilevel::{
    coarsen, place, run_pipeline, Hierarchy, PhaseTimings, PipelineOptions, PipelineResult,
    Placement, PlacementParams, Variant,
};
pub use quadtree::{build_quadtree, QuadTree};
pub use seed::derive_seed;
