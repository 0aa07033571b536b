//! Graph readers and layout / report writers.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{build_graph, WeightedGraph};
use crate::infomap::Partition;
use crate::layout::{Layout, Point};
use crate::metrics::MetricsReport;
use crate::multilevel::{Hierarchy, PhaseTimings};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    /// `u v [w]` per line.
    EdgeList,
    /// Chaco / METIS adjacency lists.
    Chaco,
}

impl GraphFormat {
    /// `.graph`, `.chaco` and `.metis` files are adjacency lists; anything
    /// else is read as an edge list.
    pub fn detect(path: &Path) -> GraphFormat {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref()
        {
            Some("graph" | "chaco" | "metis") => GraphFormat::Chaco,
            _ => GraphFormat::EdgeList,
        }
    }
}

impl FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "edgelist" | "edge-list" | "edges" => Ok(GraphFormat::EdgeList),
            "chaco" | "metis" | "graph" => Ok(GraphFormat::Chaco),
            other => Err(Error::InvalidParameter(format!("unknown format {other:?}"))),
        }
    }
}

pub fn read_graph(path: &Path, format: Option<GraphFormat>) -> Result<WeightedGraph> {
    let text = std::fs::read_to_string(path)?;
    match format.unwrap_or_else(|| GraphFormat::detect(path)) {
        GraphFormat::EdgeList => parse_edge_list(&text),
        GraphFormat::Chaco => parse_chaco(&text),
    }
}

fn is_comment(line: &str) -> bool {
    let t = line.trim_start();
    t.starts_with('#') || t.starts_with('%')
}

fn parse_weight(token: &str, line: usize) -> Result<f64> {
    let w: f64 = token
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid weight {token:?}")))?;
    if !(w.is_finite() && w > 0.0) {
        return Err(Error::parse(
            line,
            format!("weight must be positive, got {token}"),
        ));
    }
    Ok(w)
}

/// Whitespace-separated `u v [w]` lines; `#` and `%` start comments.
pub fn parse_edge_list(text: &str) -> Result<WeightedGraph> {
    let mut edges = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() || is_comment(line) {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() < 2 || tokens.len() > 3 {
            return Err(Error::parse(
                line_no,
                format!("expected `u v [w]`, got {} fields", tokens.len()),
            ));
        }
        let id = |t: &str| {
            t.parse::<u64>()
                .map_err(|_| Error::parse(line_no, format!("invalid vertex id {t:?}")))
        };
        let u = id(tokens[0])?;
        let v = id(tokens[1])?;
        let w = match tokens.get(2) {
            Some(t) => parse_weight(t, line_no)?,
            None => 1.0,
        };
        edges.push((u, v, w));
    }
    build_graph(&edges)
}

/// Chaco / METIS adjacency format: header `n m [fmt]`, then one line per
/// vertex listing its 1-based neighbours. Supported `fmt` codes are 0, 1
/// (edge weights), 10 (vertex weights) and 11 (both). Vertex labels are the
/// 1-based ids.
pub fn parse_chaco(text: &str) -> Result<WeightedGraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !is_comment(l));
    let (header_no, header) = lines
        .by_ref()
        .find(|(_, l)| !l.trim().is_empty())
        .ok_or(Error::EmptyGraph)?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() < 2 {
        return Err(Error::parse(header_no, "header must be `n m [fmt [ncon]]`"));
    }
    let count = |t: &str| {
        t.parse::<usize>()
            .map_err(|_| Error::parse(header_no, format!("invalid count {t:?}")))
    };
    let n = count(head[0])?;
    let m = count(head[1])?;
    let fmt = head.get(2).copied().unwrap_or("0");
    let (vertex_weights, edge_weights) = match fmt.parse::<u32>() {
        Ok(0) => (false, false),
        Ok(1) => (false, true),
        Ok(10) => (true, false),
        Ok(11) => (true, true),
        _ => return Err(Error::UnsupportedFormat(format!("fmt code {fmt:?}"))),
    };
    if let Some(ncon) = head.get(3) {
        if *ncon != "1" {
            return Err(Error::UnsupportedFormat(format!(
                "{ncon} vertex constraints"
            )));
        }
    }
    if head.len() > 4 {
        return Err(Error::parse(header_no, "too many header fields"));
    }
    if n == 0 {
        return Err(Error::EmptyGraph);
    }

    let mut weights = vec![1.0; n];
    // (min, max) -> (times listed, weight seen from the lower endpoint)
    let mut listed: BTreeMap<(usize, usize), (u32, f64)> = BTreeMap::new();
    let mut entries = 0usize;
    let mut last_line = header_no;
    for v in 0..n {
        let (line_no, line) = lines.next().ok_or_else(|| {
            Error::parse(
                last_line,
                format!("expected {n} adjacency lines, found {v}"),
            )
        })?;
        last_line = line_no;
        let mut tokens = line.split_whitespace();
        if vertex_weights {
            let t = tokens
                .next()
                .ok_or_else(|| Error::parse(line_no, "missing vertex weight"))?;
            weights[v] = parse_weight(t, line_no)?;
        }
        while let Some(t) = tokens.next() {
            let u: usize = t
                .parse()
                .map_err(|_| Error::parse(line_no, format!("invalid neighbour {t:?}")))?;
            if u == 0 || u > n {
                return Err(Error::parse(
                    line_no,
                    format!("neighbour {u} outside 1..={n}"),
                ));
            }
            let w = if edge_weights {
                let t = tokens
                    .next()
                    .ok_or_else(|| Error::parse(line_no, "missing edge weight"))?;
                parse_weight(t, line_no)?
            } else {
                1.0
            };
            entries += 1;
            let u = u - 1;
            if u == v {
                continue;
            }
            let entry = listed.entry((u.min(v), u.max(v))).or_insert((0, w));
            entry.0 += 1;
            if v < u {
                entry.1 = w;
            }
        }
    }
    if let Some((line_no, extra)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(Error::parse(
            line_no,
            format!("unexpected content after {n} adjacency lines: {extra:?}"),
        ));
    }
    if entries != 2 * m {
        return Err(Error::parse(
            header_no,
            format!("header declares {m} edges but adjacency lists hold {entries} entries"),
        ));
    }
    if let Some(((a, b), _)) = listed.iter().find(|(_, (times, _))| *times != 2) {
        return Err(Error::parse(
            header_no,
            format!(
                "edge ({}, {}) is not listed by both endpoints",
                a + 1,
                b + 1
            ),
        ));
    }
    let graph = WeightedGraph::with_vertex_weights(
        weights,
        listed.into_iter().map(|((a, b), (_, w))| (a, b, w)),
    )?;
    graph.with_labels((1..=n as u64).collect())
}

/// `u v` per edge using vertex labels, with the weight appended when it is
/// not 1. Isolated vertices are not representable and are lost.
pub fn write_edge_list(g: &WeightedGraph) -> String {
    let mut out = String::new();
    for (u, v, w) in g.labeled_edge_list() {
        if w == 1.0 {
            let _ = writeln!(out, "{u} {v}");
        } else {
            let _ = writeln!(out, "{u} {v} {w}");
        }
    }
    out
}

/// Rounds to nine significant digits, the precision of every float written.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

/// One vertex position in a layout file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutFileRecord {
    pub label: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSize {
    pub n: usize,
    pub m: usize,
}

/// Settings that produced a layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub graph: String,
    pub engine: String,
    pub variant: String,
    pub placement: String,
    pub stop_size: usize,
    pub seed: u64,
    pub trials: usize,
}

/// Machine-readable record of one run: coordinates, level sizes, timings and
/// scores. All floats are rounded to nine significant digits when written,
/// so `from_json(to_json(d))` is a fixed point of `to_json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutDocument {
    pub run: Option<RunMetadata>,
    pub level_count: usize,
    pub levels: Vec<LevelSize>,
    pub runtime: Option<PhaseTimings>,
    pub metrics: Option<MetricsReport>,
    pub coordinates: Vec<LayoutFileRecord>,
}

impl LayoutDocument {
    pub fn new(layout: &Layout, hierarchy: &Hierarchy) -> Result<Self> {
        let g = hierarchy.finest();
        if layout.len() != g.n() {
            return Err(Error::SizeMismatch {
                expected: g.n(),
                got: layout.len(),
            });
        }
        layout.validate()?;
        let mut doc = LayoutDocument {
            run: None,
            level_count: hierarchy.level_count(),
            levels: hierarchy
                .level_sizes()
                .into_iter()
                .map(|(n, m)| LevelSize { n, m })
                .collect(),
            runtime: None,
            metrics: None,
            coordinates: layout_records(g, layout),
        };
        doc.round();
        Ok(doc)
    }

    fn round(&mut self) {
        for r in &mut self.coordinates {
            r.x = round_sig(r.x);
            r.y = round_sig(r.y);
        }
        if let Some(t) = &mut self.runtime {
            t.coarsen_seconds = round_sig(t.coarsen_seconds);
            t.layout_seconds = round_sig(t.layout_seconds);
            t.metrics_seconds = round_sig(t.metrics_seconds);
        }
        if let Some(m) = &mut self.metrics {
            m.shape_q = round_sig(m.shape_q);
            m.stress = round_sig(m.stress);
            m.improvement = m.improvement.map(round_sig);
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut doc = self.clone();
        doc.round();
        let mut s = serde_json::to_string_pretty(&doc)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Coordinates in record order.
    pub fn layout(&self) -> Layout {
        Layout::new(
            self.coordinates
                .iter()
                .map(|r| Point::new(r.x, r.y))
                .collect(),
        )
    }
}

/// JSON document with coordinates, level sizes and (optionally) scores.
pub fn write_layout_json(
    layout: &Layout,
    hierarchy: &Hierarchy,
    report: Option<&MetricsReport>,
) -> Result<String> {
    let mut doc = LayoutDocument::new(layout, hierarchy)?;
    doc.metrics = report.copied();
    doc.to_json()
}

pub fn layout_records(g: &WeightedGraph, layout: &Layout) -> Vec<LayoutFileRecord> {
    layout
        .points
        .iter()
        .enumerate()
        .map(|(v, p)| LayoutFileRecord {
            label: g.label(v).to_string(),
            x: p.x,
            y: p.y,
        })
        .collect()
}

/// Plain `label x y` lines.
pub fn write_layout_records(records: &[LayoutFileRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let _ = writeln!(out, "{} {} {}", r.label, round_sig(r.x), round_sig(r.y));
    }
    out
}

pub fn parse_layout_records(text: &str) -> Result<Vec<LayoutFileRecord>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || is_comment(line) {
            continue;
        }
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 3 {
            return Err(Error::parse(i + 1, "expected `label x y`"));
        }
        let coord = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse(i + 1, format!("invalid coordinate {s:?}")))
        };
        out.push(LayoutFileRecord {
            label: t[0].to_string(),
            x: coord(t[1])?,
            y: coord(t[2])?,
        });
    }
    Ok(out)
}

/// Matches records to graph vertices by label. Every vertex needs exactly
/// one record.
pub fn layout_from_records(g: &WeightedGraph, records: &[LayoutFileRecord]) -> Result<Layout> {
    let mut by_label: HashMap<&str, Point> = HashMap::new();
    for r in records {
        if by_label
            .insert(r.label.as_str(), Point::new(r.x, r.y))
            .is_some()
        {
            return Err(Error::InvalidParameter(format!(
                "duplicate layout record for {}",
                r.label
            )));
        }
    }
    let mut points = Vec::with_capacity(g.n());
    for v in 0..g.n() {
        let label = g.label(v).to_string();
        let p = by_label.get(label.as_str()).ok_or_else(|| {
            Error::InvalidParameter(format!("no layout record for vertex {label}"))
        })?;
        points.push(*p);
    }
    let layout = Layout::new(points);
    layout.validate()?;
    Ok(layout)
}

/// `label module_id` per vertex, sorted by label.
pub fn write_clusters(g: &WeightedGraph, partition: &Partition) -> String {
    let mut rows: Vec<(u64, usize)> = (0..g.n())
        .map(|v| (g.label(v), partition.module_of(v)))
        .collect();
    rows.sort_unstable();
    let mut out = String::new();
    for (label, module) in rows {
        let _ = writeln!(out, "{label} {module}");
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvgOptions {
    pub width: f64,
    pub height: f64,
    pub margin: f64,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            width: 800.0,
            height: 800.0,
            margin: 20.0,
        }
    }
}

/// Straight-line drawing: edges as thin translucent lines, vertices as dots
/// of radius `∝ 1/√n`. Output depends only on the inputs.
pub fn write_svg(layout: &Layout, g: &WeightedGraph, options: &SvgOptions) -> Result<String> {
    if layout.len() != g.n() {
        return Err(Error::SizeMismatch {
            expected: g.n(),
            got: layout.len(),
        });
    }
    layout.validate()?;
    let SvgOptions {
        width,
        height,
        margin,
    } = *options;
    let (lo, hi) = layout
        .bounds()
        .unwrap_or((Point::ZERO, Point::new(1.0, 1.0)));
    let span_x = hi.x - lo.x;
    let span_y = hi.y - lo.y;
    let inner_w = (width - 2.0 * margin).max(1.0);
    let inner_h = (height - 2.0 * margin).max(1.0);
    let scale = match (span_x > 0.0, span_y > 0.0) {
        (true, true) => (inner_w / span_x).min(inner_h / span_y),
        (true, false) => inner_w / span_x,
        (false, true) => inner_h / span_y,
        (false, false) => 1.0,
    };
    let off_x = margin + (inner_w - span_x * scale) / 2.0;
    let off_y = margin + (inner_h - span_y * scale) / 2.0;
    // SVG y grows downwards.
    let map = |p: Point| {
        (
            off_x + (p.x - lo.x) * scale,
            height - off_y - (p.y - lo.y) * scale,
        )
    };
    let radius = (0.05 * width.min(height) / (g.n().max(1) as f64).sqrt()).min(4.0);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(
        out,
        r##"<rect width="100%" height="100%" fill="#ffffff"/>"##
    );
    let _ = writeln!(
        out,
        r##"<g stroke="#404040" stroke-width="0.5" stroke-opacity="0.4">"##
    );
    for e in g.edges() {
        let (x1, y1) = map(layout.points[e.u]);
        let (x2, y2) = map(layout.points[e.v]);
        let _ = writeln!(
            out,
            r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}"/>"#
        );
    }
    out.push_str("</g>\n");
    let _ = writeln!(out, r##"<g fill="#1f4e9c">"##);
    for &p in &layout.points {
        let (cx, cy) = map(p);
        let _ = writeln!(
            out,
            r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="{radius:.3}"/>"#
        );
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}
