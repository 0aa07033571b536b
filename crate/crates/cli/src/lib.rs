//! Command-line front end for `infolayout`: single layouts, the benchmark
//! grid, scoring of external layouts, and bundled test data.
//!
//! Exit codes: 0 on success, 1 for bad input or arguments, 2 for internal
//! failures.

pub mod bench;
pub mod config;
pub mod report;
pub mod suite;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use infolayout::io::{
    layout_from_records, parse_layout_records, round_sig, write_clusters, LayoutDocument,
    SvgOptions,
};
use infolayout::{
    codelength, compute_flow, evaluate, improvement, infomap, run_pipeline, write_svg, Engine,
    InfomapConfig, Layout, MetricsReport, PhaseTimings, Variant,
};

use crate::config::{GraphInput, PipelineArgs, RunConfig};
use crate::report::{table1_line, write_csv, CsvRow};

/// Marks an error as caused by the user's input (exit code 1).
#[derive(Debug)]
pub struct InputError(pub String);

impl InputError {
    pub fn new(msg: impl Into<String>) -> Self {
        InputError(msg.into())
    }
}

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

#[derive(Parser, Debug)]
#[command(
    name = "infolayout",
    version,
    about = "Multi-level graph layout with Infomap coarsening"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Lay out one graph and score the drawing.
    Layout(RunConfig),
    /// Run every engine × variant combination over a manifest of graphs.
    Bench(BenchArgs),
    /// Score an externally produced layout.
    Score(ScoreArgs),
    /// Print the Infomap partition as `label module` lines.
    Cluster(ClusterArgs),
    /// Print `name n m density components`.
    Stats(GraphInput),
    /// Write the bundled generated graphs and their manifests.
    Generate(GenerateArgs),
}

#[derive(Args, Debug, Clone)]
pub struct BenchArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, default_value = "bench-out")]
    pub out_dir: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "fr,frg,fme")]
    pub engines: Vec<Engine>,
    #[arg(long, value_delimiter = ',', default_value = "flat,infomap-multilevel")]
    pub variants: Vec<Variant>,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Also write bar-chart SVGs of the aggregates.
    #[arg(long)]
    pub charts: bool,
    /// Fill the runtime column (makes the CSV run-dependent).
    #[arg(long)]
    pub timings: bool,
}

#[derive(Args, Debug, Clone)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub input: GraphInput,
    /// Layout JSON document, or `label x y` lines.
    #[arg(long)]
    pub layout: PathBuf,
    /// Shape metric of a baseline drawing, to report the improvement ratio.
    #[arg(long)]
    pub baseline_q: Option<f64>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub input: GraphInput,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct GenerateArgs {
    #[arg(long, default_value = "data")]
    pub out_dir: PathBuf,
}

/// Exit code for an error: 1 for input problems, 2 otherwise.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.is::<InputError>() || cause.is::<std::io::Error>() || cause.is::<csv::Error>() {
            return 1;
        }
        if let Some(e) = cause.downcast_ref::<infolayout::Error>() {
            return if e.is_input_error() { 1 } else { 2 };
        }
    }
    2
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Layout(cfg) => cmd_layout(&cfg).map(|line| println!("{line}")),
        Command::Bench(args) => cmd_bench(&args),
        Command::Score(args) => cmd_score(&args),
        Command::Cluster(args) => cmd_cluster(&args),
        Command::Stats(input) => {
            let g = input.read()?;
            let s = g.stats();
            let (_, components) = g.components();
            println!(
                "{} {} {} {:.4} {}",
                input.name(),
                s.n,
                s.m,
                s.density,
                components
            );
            Ok(())
        }
        Command::Generate(args) => suite::write_suites(&args.out_dir),
    }
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents)
        .map_err(|e| anyhow::Error::new(e).context(format!("writing {}", path.display())))
}

/// Runs one layout, writes the requested artefacts and returns the Table-1
/// style summary line.
pub fn cmd_layout(cfg: &RunConfig) -> anyhow::Result<String> {
    let g = cfg.input.read()?;
    let name = cfg.input.name();
    let opts = cfg.pipeline.options(cfg.engine, cfg.variant)?;
    let result = run_pipeline(&g, &opts)?;
    let start = Instant::now();
    let metrics = evaluate(&g, &result.layout)?;
    let timings = PhaseTimings {
        metrics_seconds: start.elapsed().as_secs_f64(),
        ..result.timings
    };

    let out = &cfg.output;
    if let Some(path) = &out.json {
        let mut doc = LayoutDocument::new(&result.layout, &result.hierarchy)?;
        doc.run = Some(cfg.pipeline.metadata(&name, cfg.engine, cfg.variant));
        doc.metrics = Some(metrics);
        doc.runtime = out.timings.then_some(timings);
        write_file(path, &doc.to_json()?)?;
    }
    if let Some(path) = &out.csv {
        let row = CsvRow::new(
            &name,
            cfg.engine,
            cfg.variant,
            &metrics,
            result.hierarchy.level_count(),
            out.timings
                .then_some(timings.coarsen_seconds + timings.layout_seconds),
        );
        write_file(path, &write_csv(&[row])?)?;
    }
    if let Some(path) = &out.svg {
        write_file(
            path,
            &write_svg(&result.layout, &g, &SvgOptions::default())?,
        )?;
    }
    Ok(table1_line(
        &name,
        &result.hierarchy,
        timings.coarsen_seconds,
    ))
}

pub fn cmd_bench(args: &BenchArgs) -> anyhow::Result<()> {
    let inputs = bench::read_manifest(&args.manifest)?;
    if args.engines.is_empty() || args.variants.is_empty() {
        return Err(InputError::new("no engines or variants selected").into());
    }
    // Validate shared settings once, before spawning work.
    args.pipeline.options(args.engines[0], args.variants[0])?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()?;
    let report = pool.install(|| {
        bench::run_bench(
            &inputs,
            &args.engines,
            &args.variants,
            &args.pipeline,
            args.timings,
        )
    });
    bench::write_report(&report, &args.out_dir, args.charts)?;
    for line in &report.table1 {
        println!("{line}");
    }
    for a in &report.aggregate {
        println!(
            "mean {} {}: Q={} stress={} crossings={} (n={})",
            a.engine,
            a.variant,
            round_sig(a.q),
            round_sig(a.stress),
            round_sig(a.crossings),
            a.graphs
        );
    }
    for f in &report.failures {
        eprintln!(
            "failed: {} {} {}: {}",
            f.graph, f.engine, f.variant, f.error
        );
    }
    Ok(())
}

/// Reads a layout from a JSON document or `label x y` records and matches it
/// to the graph by vertex label.
pub fn read_external_layout(g: &infolayout::WeightedGraph, path: &Path) -> anyhow::Result<Layout> {
    let text = fs::read_to_string(path)
        .map_err(|e| anyhow::Error::new(e).context(format!("reading {}", path.display())))?;
    let records = if path.extension().is_some_and(|e| e == "json") {
        LayoutDocument::from_json(&text)?.coordinates
    } else {
        parse_layout_records(&text)?
    };
    Ok(layout_from_records(g, &records)?)
}

pub fn cmd_score(args: &ScoreArgs) -> anyhow::Result<()> {
    let g = args.input.read()?;
    let layout = read_external_layout(&g, &args.layout)?;
    let mut m: MetricsReport = evaluate(&g, &layout)?;
    if let Some(base) = args.baseline_q {
        m.improvement = Some(improvement(m.shape_q, base)?);
    }
    m.shape_q = round_sig(m.shape_q);
    m.stress = round_sig(m.stress);
    m.improvement = m.improvement.map(round_sig);
    let json = serde_json::to_string_pretty(&m)? + "\n";
    match &args.json {
        Some(path) => write_file(path, &json)?,
        None => print!("{json}"),
    }
    Ok(())
}

pub fn cmd_cluster(args: &ClusterArgs) -> anyhow::Result<()> {
    if args.trials == 0 {
        return Err(InputError::new("--trials must be at least 1").into());
    }
    let g = args.input.read()?;
    let config = InfomapConfig {
        seed: args.seed,
        trials: args.trials,
        ..Default::default()
    };
    let part = infomap(&g, &config);
    let text = write_clusters(&g, &part);
    match &args.output {
        Some(path) => {
            write_file(path, &text)?;
            if g.m() > 0 {
                let flow = compute_flow(&g)?;
                let l = codelength(&g, &flow, &part)?;
                println!(
                    "{} modules, codelength {} bits",
                    part.module_count(),
                    round_sig(l.value)
                );
            }
        }
        None => print!("{text}"),
    }
    Ok(())
}
