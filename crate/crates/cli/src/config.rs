use std::path::{Path, PathBuf};

use clap::Args;
use infolayout::io::RunMetadata;
use infolayout::{
    Engine, ForceParams, GraphFormat, InfomapConfig, PipelineOptions, Placement, Variant,
    WeightedGraph,
};

use crate::InputError;

#[derive(Args, Debug, Clone)]
pub struct GraphInput {
    /// Graph file (edge list, or Chaco/METIS for .graph/.chaco/.metis).
    #[arg(long, short)]
    pub input: PathBuf,
    /// Override format detection: `edgelist` or `chaco`.
    #[arg(long)]
    pub format: Option<GraphFormat>,
}

impl GraphInput {
    pub fn read(&self) -> anyhow::Result<WeightedGraph> {
        read_graph(&self.input, self.format)
    }

    pub fn name(&self) -> String {
        graph_name(&self.input)
    }
}

pub fn read_graph(path: &Path, format: Option<GraphFormat>) -> anyhow::Result<WeightedGraph> {
    infolayout::read_graph(path, format)
        .map_err(|e| anyhow::Error::new(e).context(format!("reading {}", path.display())))
}

/// File stem used as the graph's name in reports.
pub fn graph_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Settings shared by every pipeline run.
#[derive(Args, Debug, Clone)]
pub struct PipelineArgs {
    #[arg(long, default_value = "barycenter")]
    pub placement: Placement,
    /// Coarsening stops once a level has at most this many vertices.
    #[arg(long, default_value_t = 50)]
    pub stop_size: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Independent clustering runs per level; the best is kept.
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    /// Engine iterations on the coarsest level (the only level when flat).
    #[arg(long, default_value_t = 300)]
    pub iterations: usize,
    /// Engine iterations on each finer level.
    #[arg(long, default_value_t = 100)]
    pub refine_iterations: usize,
    /// Ideal edge length.
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    /// Barnes-Hut opening angle (fme).
    #[arg(long, default_value_t = 0.5)]
    pub theta: f64,
    #[arg(long, default_value_t = 0.95)]
    pub cooling: f64,
    /// Starting temperature; default 0.1·√n·k.
    #[arg(long)]
    pub temperature: Option<f64>,
    /// Grid cell side (frg); default 2k.
    #[arg(long)]
    pub grid_cell: Option<f64>,
}

impl PipelineArgs {
    pub fn options(&self, engine: Engine, variant: Variant) -> anyhow::Result<PipelineOptions> {
        if self.stop_size == 0 {
            return Err(InputError::new("--stop-size must be at least 1").into());
        }
        if self.trials == 0 {
            return Err(InputError::new("--trials must be at least 1").into());
        }
        let forces = ForceParams {
            ideal_edge_length: self.k,
            iterations: self.iterations,
            initial_temperature: self.temperature,
            cooling: self.cooling,
            theta: self.theta,
            grid_cell: self.grid_cell,
        };
        forces.validate()?;
        Ok(PipelineOptions {
            variant,
            engine,
            placement: self.placement,
            stop_size: self.stop_size,
            seed: self.seed,
            infomap: InfomapConfig {
                trials: self.trials,
                ..Default::default()
            },
            forces,
            coarse_iterations: self.iterations,
            refine_iterations: self.refine_iterations,
            placement_params: None,
        })
    }

    pub fn metadata(&self, graph: &str, engine: Engine, variant: Variant) -> RunMetadata {
        RunMetadata {
            graph: graph.to_string(),
            engine: engine.name().to_string(),
            variant: variant.name().to_string(),
            placement: self.placement.name().to_string(),
            stop_size: self.stop_size,
            seed: self.seed,
            trials: self.trials,
        }
    }
}

#[derive(Args, Debug, Clone, Default)]
pub struct OutputArgs {
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Include wall-clock runtimes in JSON and CSV (makes them
    /// run-dependent).
    #[arg(long)]
    pub timings: bool,
}

/// Everything one `layout` run needs.
#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    #[command(flatten)]
    pub input: GraphInput,
    #[arg(long, default_value = "fr")]
    pub engine: Engine,
    #[arg(long, default_value = "infomap-multilevel")]
    pub variant: Variant,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}
