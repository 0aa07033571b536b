//! CSV rows, Table-1 style summary lines and bar charts.

use std::fmt::Write as _;

use infolayout::io::round_sig;
use infolayout::{Engine, Hierarchy, MetricsReport, Variant};
use serde::{Deserialize, Serialize};

pub const CSV_HEADER: &str = "graph,engine,variant,Q,stress,crossings,L,runtime";

/// One scored run. `L` is the number of coarsening levels (0 for flat);
/// `runtime` is coarsening plus layout wall time in seconds and is left
/// empty unless timings were requested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub graph: String,
    pub engine: Engine,
    pub variant: Variant,
    #[serde(rename = "Q")]
    pub q: f64,
    pub stress: f64,
    pub crossings: u64,
    #[serde(rename = "L")]
    pub levels: usize,
    pub runtime: Option<f64>,
}

impl CsvRow {
    pub fn new(
        graph: &str,
        engine: Engine,
        variant: Variant,
        metrics: &MetricsReport,
        levels: usize,
        runtime: Option<f64>,
    ) -> Self {
        CsvRow {
            graph: graph.to_string(),
            engine,
            variant,
            q: round_sig(metrics.shape_q),
            stress: round_sig(metrics.stress),
            crossings: metrics.crossings,
            levels,
            runtime: runtime.map(round_sig),
        }
    }

    pub fn metrics(&self) -> MetricsReport {
        MetricsReport {
            shape_q: self.q,
            stress: self.stress,
            stress_sampled: false,
            crossings: self.crossings,
            improvement: None,
        }
    }
}

pub fn write_csv(rows: &[CsvRow]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn parse_csv(text: &str) -> anyhow::Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    anyhow::ensure!(
        header.join(",") == CSV_HEADER,
        "unexpected CSV header {:?}",
        header.join(",")
    );
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

/// `graph |V0| |E0| D L time |V1| |E1| ...` with `time` the coarsening time.
pub fn table1_line(graph: &str, hierarchy: &Hierarchy, coarsen_seconds: f64) -> String {
    let stats = hierarchy.finest().stats();
    let mut line = format!(
        "{graph} {} {} {:.2} {} {:.3}",
        stats.n,
        stats.m,
        stats.density,
        hierarchy.level_count(),
        coarsen_seconds
    );
    for (n, m) in hierarchy.level_sizes().into_iter().skip(1) {
        let _ = write!(line, " {n} {m}");
    }
    line
}

/// Grouped bar chart: one group per label, one bar per series.
pub fn bar_chart_svg(title: &str, labels: &[String], series: &[(String, Vec<f64>)]) -> String {
    const W: f64 = 720.0;
    const H: f64 = 360.0;
    const LEFT: f64 = 70.0;
    const BOTTOM: f64 = 60.0;
    const TOP: f64 = 40.0;
    const COLORS: [&str; 6] = [
        "#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860",
    ];
    let max = series
        .iter()
        .flat_map(|(_, v)| v.iter().copied())
        .filter(|v| v.is_finite())
        .fold(0.0f64, |a, v| a.max(v.abs()));
    let max = if max > 0.0 { max } else { 1.0 };
    let plot_h = H - TOP - BOTTOM;
    let group_w = (W - LEFT - 20.0) / labels.len().max(1) as f64;
    let bar_w = group_w * 0.8 / series.len().max(1) as f64;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        out,
        r##"<rect width="100%" height="100%" fill="#ffffff"/>"##
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    let base = H - BOTTOM;
    let _ = writeln!(
        out,
        r##"<line x1="{LEFT}" y1="{base}" x2="{}" y2="{base}" stroke="#000000"/>"##,
        W - 20.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
        LEFT - 5.0,
        TOP + 4.0,
        round_sig(max)
    );
    for (g, label) in labels.iter().enumerate() {
        let x0 = LEFT + g as f64 * group_w + group_w * 0.1;
        for (s, (_, values)) in series.iter().enumerate() {
            let v = values.get(g).copied().unwrap_or(f64::NAN);
            if !v.is_finite() {
                continue;
            }
            let h = v.abs() / max * plot_h;
            let y = if v >= 0.0 { base - h } else { base };
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                x0 + s as f64 * bar_w,
                y,
                bar_w,
                h,
                COLORS[s % COLORS.len()]
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
            x0 + group_w * 0.4,
            base + 16.0,
            escape(label)
        );
    }
    for (s, (name, _)) in series.iter().enumerate() {
        let x = LEFT + s as f64 * 110.0;
        let y = H - 18.0;
        let _ = writeln!(
            out,
            r#"<rect x="{x}" y="{}" width="10" height="10" fill="{}"/><text x="{}" y="{y}">{}</text>"#,
            y - 9.0,
            COLORS[s % COLORS.len()],
            x + 14.0,
            escape(name)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let m = MetricsReport {
            shape_q: 0.123456789123,
            stress: 42.5,
            stress_sampled: false,
            crossings: 7,
            improvement: None,
        };
        let rows = vec![
            CsvRow::new("g", Engine::Fr, Variant::Flat, &m, 0, None),
            CsvRow::new(
                "g",
                Engine::Fme,
                Variant::InfomapMultilevel,
                &m,
                2,
                Some(0.25),
            ),
        ];
        let text = write_csv(&rows).unwrap();
        assert!(text.starts_with(CSV_HEADER));
        assert!(text.contains("g,fr,flat,0.123456789,42.5,7,0,\n"));
        let back = parse_csv(&text).unwrap();
        assert_eq!(back, rows);
        assert_eq!(write_csv(&back).unwrap(), text);
        assert_eq!(back[0].metrics().crossings, 7);
    }

    #[test]
    fn empty_csv_has_header() {
        assert_eq!(write_csv(&[]).unwrap(), format!("{CSV_HEADER}\n"));
        assert!(parse_csv(&write_csv(&[]).unwrap()).unwrap().is_empty());
    }
}
