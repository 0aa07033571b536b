//! The engine × variant benchmark grid over a manifest of graphs.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use infolayout::{evaluate, improvement, run_pipeline, Engine, Hierarchy, Variant, WeightedGraph};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{graph_name, read_graph, PipelineArgs};
use crate::report::{bar_chart_svg, table1_line, write_csv, CsvRow};
use crate::InputError;

/// Graph paths listed one per line, relative to the manifest's directory.
/// Blank lines and `#` comments are ignored.
pub fn read_manifest(path: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let text = fs::read_to_string(path)
        .map_err(|e| anyhow::Error::new(e).context(format!("reading {}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let entries: Vec<PathBuf> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| base.join(l))
        .collect();
    if entries.is_empty() {
        return Err(InputError::new("no inputs").into());
    }
    Ok(entries)
}

#[derive(Debug, Clone)]
pub struct Cell {
    pub graph: String,
    pub engine: Engine,
    pub variant: Variant,
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub graph: String,
    pub engine: String,
    pub variant: String,
    pub error: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct AggregateRow {
    pub engine: Engine,
    pub variant: Variant,
    pub graphs: usize,
    #[serde(rename = "Q")]
    pub q: f64,
    pub stress: f64,
    pub crossings: f64,
    #[serde(rename = "L")]
    pub levels: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ImprovementRow {
    pub graph: String,
    pub engine: Engine,
    pub q_flat: f64,
    pub q_multilevel: f64,
    /// `Q_multilevel / Q_flat − 1`; empty when `Q_flat = 0`.
    pub improvement: Option<f64>,
}

#[derive(Debug, Default)]
pub struct BenchReport {
    pub rows: Vec<CsvRow>,
    pub failures: Vec<Failure>,
    pub aggregate: Vec<AggregateRow>,
    pub improvements: Vec<ImprovementRow>,
    /// Table-1 line per graph that coarsened successfully.
    pub table1: Vec<String>,
}

struct CellOutcome {
    row: Result<CsvRow, String>,
    hierarchy: Option<(Hierarchy, f64)>,
}

fn run_cell(
    g: &WeightedGraph,
    name: &str,
    engine: Engine,
    variant: Variant,
    args: &PipelineArgs,
    timings: bool,
) -> CellOutcome {
    let run = || -> anyhow::Result<(CsvRow, Hierarchy, f64)> {
        let opts = args.options(engine, variant)?;
        let start = Instant::now();
        let result = run_pipeline(g, &opts)?;
        let elapsed = start.elapsed().as_secs_f64();
        let metrics = evaluate(g, &result.layout)?;
        let row = CsvRow::new(
            name,
            engine,
            variant,
            &metrics,
            result.hierarchy.level_count(),
            timings.then_some(elapsed),
        );
        Ok((row, result.hierarchy, result.timings.coarsen_seconds))
    };
    match run() {
        Ok((row, h, t)) => CellOutcome {
            row: Ok(row),
            hierarchy: Some((h, t)),
        },
        Err(e) => CellOutcome {
            row: Err(format!("{e:#}")),
            hierarchy: None,
        },
    }
}

/// Runs every (graph, engine, variant) cell. Cells run in parallel; results
/// keep manifest order, then engine order, then variant order.
pub fn run_bench(
    inputs: &[PathBuf],
    engines: &[Engine],
    variants: &[Variant],
    args: &PipelineArgs,
    timings: bool,
) -> BenchReport {
    let graphs: Vec<(String, Result<WeightedGraph, String>)> = inputs
        .par_iter()
        .map(|p| {
            (
                graph_name(p),
                read_graph(p, None).map_err(|e| format!("{e:#}")),
            )
        })
        .collect();
    let cells: Vec<(usize, Engine, Variant)> = (0..graphs.len())
        .flat_map(|g| {
            engines
                .iter()
                .flat_map(move |&e| variants.iter().map(move |&v| (g, e, v)))
        })
        .collect();
    let outcomes: Vec<CellOutcome> = cells
        .par_iter()
        .map(|&(gi, engine, variant)| match &graphs[gi].1 {
            Ok(g) => run_cell(g, &graphs[gi].0, engine, variant, args, timings),
            Err(e) => CellOutcome {
                row: Err(e.clone()),
                hierarchy: None,
            },
        })
        .collect();

    let mut report = BenchReport::default();
    let mut table_done = vec![false; graphs.len()];
    for (&(gi, engine, variant), out) in cells.iter().zip(outcomes) {
        match out.row {
            Ok(row) => report.rows.push(row),
            Err(error) => report.failures.push(Failure {
                graph: graphs[gi].0.clone(),
                engine: engine.name().into(),
                variant: variant.name().into(),
                error,
            }),
        }
        if let (Some((h, t)), Variant::InfomapMultilevel) = (out.hierarchy, variant) {
            if !table_done[gi] {
                table_done[gi] = true;
                report.table1.push(table1_line(&graphs[gi].0, &h, t));
            }
        }
    }
    report.aggregate = aggregate(&report.rows, engines, variants);
    report.improvements = improvements(&report.rows, engines);
    report
}

fn aggregate(rows: &[CsvRow], engines: &[Engine], variants: &[Variant]) -> Vec<AggregateRow> {
    let mut out = Vec::new();
    for &engine in engines {
        for &variant in variants {
            let sel: Vec<&CsvRow> = rows
                .iter()
                .filter(|r| r.engine == engine && r.variant == variant)
                .collect();
            if sel.is_empty() {
                continue;
            }
            let mean = |f: &dyn Fn(&CsvRow) -> f64| {
                sel.iter().map(|r| f(r)).sum::<f64>() / sel.len() as f64
            };
            out.push(AggregateRow {
                engine,
                variant,
                graphs: sel.len(),
                q: mean(&|r| r.q),
                stress: mean(&|r| r.stress),
                crossings: mean(&|r| r.crossings as f64),
                levels: mean(&|r| r.levels as f64),
            });
        }
    }
    out
}

fn improvements(rows: &[CsvRow], engines: &[Engine]) -> Vec<ImprovementRow> {
    let mut out = Vec::new();
    let mut names: Vec<&str> = Vec::new();
    for r in rows {
        if !names.contains(&r.graph.as_str()) {
            names.push(&r.graph);
        }
    }
    for name in names {
        for &engine in engines {
            let find = |v: Variant| {
                rows.iter()
                    .find(|r| r.graph == name && r.engine == engine && r.variant == v)
            };
            if let (Some(flat), Some(ml)) = (find(Variant::Flat), find(Variant::InfomapMultilevel))
            {
                out.push(ImprovementRow {
                    graph: name.to_string(),
                    engine,
                    q_flat: flat.q,
                    q_multilevel: ml.q,
                    improvement: improvement(ml.q, flat.q).ok(),
                });
            }
        }
    }
    out
}

fn to_csv<T: Serialize>(rows: &[T], header: &str) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(header.split(','))?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn round_floats(rows: &mut [AggregateRow]) {
    use infolayout::io::round_sig;
    for r in rows {
        r.q = round_sig(r.q);
        r.stress = round_sig(r.stress);
        r.crossings = round_sig(r.crossings);
        r.levels = round_sig(r.levels);
    }
}

/// Writes `results.csv`, `aggregate.csv`, `improvement.csv` and
/// `failures.csv` (plus chart SVGs when asked) into `dir`.
pub fn write_report(report: &BenchReport, dir: &Path, charts: bool) -> anyhow::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("results.csv"), write_csv(&report.rows)?)?;
    let mut agg = report.aggregate.clone();
    round_floats(&mut agg);
    fs::write(
        dir.join("aggregate.csv"),
        to_csv(&agg, "engine,variant,graphs,Q,stress,crossings,L")?,
    )?;
    let imp: Vec<ImprovementRow> = report
        .improvements
        .iter()
        .cloned()
        .map(|mut r| {
            r.improvement = r.improvement.map(infolayout::io::round_sig);
            r
        })
        .collect();
    fs::write(
        dir.join("improvement.csv"),
        to_csv(&imp, "graph,engine,q_flat,q_multilevel,improvement")?,
    )?;
    fs::write(
        dir.join("failures.csv"),
        to_csv(&report.failures, "graph,engine,variant,error")?,
    )?;
    if charts {
        write_charts(report, dir)?;
    }
    Ok(())
}

fn write_charts(report: &BenchReport, dir: &Path) -> anyhow::Result<()> {
    let mut engines: Vec<Engine> = Vec::new();
    for r in &report.aggregate {
        if !engines.contains(&r.engine) {
            engines.push(r.engine);
        }
    }
    let labels: Vec<String> = engines.iter().map(|e| e.name().to_uppercase()).collect();
    let value = |e: Engine, v: Variant, f: &dyn Fn(&AggregateRow) -> f64| {
        report
            .aggregate
            .iter()
            .find(|r| r.engine == e && r.variant == v)
            .map_or(f64::NAN, f)
    };
    let metrics: [(&str, &str, &dyn Fn(&AggregateRow) -> f64); 3] = [
        ("Q", "Mean shape-based metric Q", &|r| r.q),
        ("stress", "Mean stress", &|r| r.stress),
        ("crossings", "Mean edge crossings", &|r| r.crossings),
    ];
    for (file, title, f) in metrics {
        let series: Vec<(String, Vec<f64>)> = Variant::ALL
            .iter()
            .map(|&v| {
                (
                    v.name().to_string(),
                    engines.iter().map(|&e| value(e, v, f)).collect(),
                )
            })
            .collect();
        fs::write(
            dir.join(format!("chart_{file}.svg")),
            bar_chart_svg(title, &labels, &series),
        )?;
    }
    let mean_improvement: Vec<f64> = engines
        .iter()
        .map(|&e| {
            let v: Vec<f64> = report
                .improvements
                .iter()
                .filter(|r| r.engine == e)
                .filter_map(|r| r.improvement)
                .collect();
            if v.is_empty() {
                f64::NAN
            } else {
                v.iter().sum::<f64>() / v.len() as f64
            }
        })
        .collect();
    fs::write(
        dir.join("chart_improvement.svg"),
        bar_chart_svg(
            "Mean Q improvement (multilevel / flat - 1)",
            &labels,
            &[("improvement".to_string(), mean_improvement)],
        ),
    )?;
    Ok(())
}
