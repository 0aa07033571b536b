//! Generated benchmark graphs shipped under `data/`.

use std::fs;
use std::path::Path;

use infolayout::generators;
use infolayout::io::write_edge_list;
use infolayout::WeightedGraph;

pub struct SuiteGraph {
    pub name: &'static str,
    pub graph: WeightedGraph,
}

/// Quality suite: a triangle mesh, a scale-free graph, clustered and
/// geometric graphs, and a lattice.
pub fn quality_suite() -> Vec<SuiteGraph> {
    vec![
        SuiteGraph {
            name: "mesh",
            graph: generators::triangulated_grid(24, 24),
        },
        SuiteGraph {
            name: "scale-free",
            graph: generators::barabasi_albert(500, 2, 7),
        },
        SuiteGraph {
            name: "ring-of-cliques",
            graph: generators::ring_of_cliques(24, 8),
        },
        SuiteGraph {
            name: "geometric",
            graph: generators::random_geometric(500, 0.08, 3),
        },
        SuiteGraph {
            name: "grid",
            graph: generators::grid(20, 25),
        },
    ]
}

/// Two cliques joined by a path, from the two-triangle barbell upwards.
pub fn barbell_suite() -> Vec<SuiteGraph> {
    vec![
        SuiteGraph {
            name: "barbell-3-0",
            graph: generators::barbell(3, 0),
        },
        SuiteGraph {
            name: "barbell-10-0",
            graph: generators::barbell(10, 0),
        },
        SuiteGraph {
            name: "barbell-20-5",
            graph: generators::barbell(20, 5),
        },
        SuiteGraph {
            name: "barbell-40-20",
            graph: generators::barbell(40, 20),
        },
    ]
}

/// Cycles `C_n`.
pub fn cycle_suite() -> Vec<SuiteGraph> {
    [
        ("c4", 4),
        ("c6", 6),
        ("c10", 10),
        ("c20", 20),
        ("c50", 50),
        ("c100", 100),
    ]
    .into_iter()
    .map(|(name, n)| SuiteGraph {
        name,
        graph: generators::cycle(n),
    })
    .collect()
}

pub fn all_suites() -> Vec<(&'static str, Vec<SuiteGraph>)> {
    vec![
        ("suite", quality_suite()),
        ("barbell", barbell_suite()),
        ("c-series", cycle_suite()),
    ]
}

/// Writes every suite as `<dir>/<suite>/<name>.edges` plus a
/// `manifest.txt` listing the files in order.
pub fn write_suites(dir: &Path) -> anyhow::Result<()> {
    for (suite, graphs) in all_suites() {
        let sub = dir.join(suite);
        fs::create_dir_all(&sub)?;
        let mut manifest = String::new();
        for g in graphs {
            let file = format!("{}.edges", g.name);
            fs::write(sub.join(&file), write_edge_list(&g.graph))?;
            manifest.push_str(&file);
            manifest.push('\n');
        }
        fs::write(sub.join("manifest.txt"), manifest)?;
    }
    Ok(())
}
