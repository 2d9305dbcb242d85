//! Corpus manifests: one `[[graph]]` record per edge-list file.
//!
//! ```toml
//! [[graph]]
//! name = "social-waxman-n256-k4-r0"
//! path = "graphs/social-waxman-n256-k4-r0.edges"
//! domain = "social"
//! n = 256
//!
//! [graph.spec]          # present for generated graphs
//! model = "waxman"
//! ...
//!
//! [graph.stats]
//! m = 512
//! ...
//! ```
//!
//! `path` is relative to the manifest's directory. `n` keeps trailing isolated
//! nodes that an edge list cannot express.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use gembench_core::generators::{generate, plan_corpus, DomainPlan, GeneratorSpec};
use gembench_core::graph::{compute_stats, load_edge_list, write_edge_list};
use gembench_core::{DomainLabel, Graph, GraphStats};
use serde::{Deserialize, Serialize};

use crate::error::{read_to_string, write_file, HarnessError, Result};

pub const MANIFEST_FILE: &str = "manifest.toml";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub name: String,
    pub path: PathBuf,
    pub domain: DomainLabel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<GeneratorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<GraphStats>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default, rename = "graph")]
    pub graphs: Vec<ManifestEntry>,
}

/// A corpus graph held in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusGraph {
    pub name: String,
    pub domain: DomainLabel,
    pub graph: Graph,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = read_to_string(path)?;
        let manifest: Manifest = toml::from_str(&text).map_err(|e| HarnessError::toml(path, e))?;
        manifest.check_names()?;
        Ok(manifest)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = toml::to_string(self).map_err(|e| HarnessError::toml(path, e))?;
        write_file(path, text)
    }

    fn check_names(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for g in &self.graphs {
            if g.name.is_empty() || g.name.contains(',') || g.name.contains(char::is_whitespace) {
                return Err(HarnessError::Config(format!("bad graph name `{}`", g.name)));
            }
            if !seen.insert(g.name.as_str()) {
                return Err(HarnessError::Config(format!("duplicate graph name `{}`", g.name)));
            }
        }
        Ok(())
    }

    /// Reads every listed edge list, resolving paths against `base`.
    pub fn load_graphs(&self, base: &Path) -> Result<Vec<CorpusGraph>> {
        self.graphs
            .iter()
            .map(|entry| {
                let path = base.join(&entry.path);
                let loaded = load_edge_list(&path, entry.n)?;
                Ok(CorpusGraph {
                    name: entry.name.clone(),
                    domain: entry.domain.clone(),
                    graph: loaded.graph,
                })
            })
            .collect()
    }
}

/// Loads the manifest at `path` and every graph it lists.
pub fn load_corpus(path: &Path) -> Result<Vec<CorpusGraph>> {
    let manifest = Manifest::load(path)?;
    manifest.load_graphs(path.parent().unwrap_or(Path::new("")))
}

/// Generates a synthetic corpus in memory.
pub fn synthesize_corpus(plan: &DomainPlan, seed: u64) -> Result<Vec<CorpusGraph>> {
    let planned = plan_corpus(plan, seed)?;
    let graphs: Vec<Graph> = {
        use rayon::prelude::*;
        planned.par_iter().map(|p| generate(&p.spec)).collect::<gembench_core::Result<_>>()?
    };
    Ok(planned
        .into_iter()
        .zip(graphs)
        .map(|(p, graph)| CorpusGraph {
            name: p.name,
            domain: p.domain,
            graph,
        })
        .collect())
}

/// `generate`: writes `out/graphs/<name>.edges` and `out/manifest.toml`.
pub fn generate_corpus(plan: &DomainPlan, out: &Path, seed: u64) -> Result<Manifest> {
    let planned = plan_corpus(plan, seed)?;
    let mut manifest = Manifest::default();
    for p in planned {
        let graph = generate(&p.spec)?;
        let rel = PathBuf::from("graphs").join(format!("{}.edges", p.name));
        write_graph(&graph, &out.join(&rel))?;
        manifest.graphs.push(ManifestEntry {
            name: p.name,
            path: rel,
            domain: p.domain,
            n: Some(graph.n()),
            spec: Some(p.spec),
            stats: Some(compute_stats(&graph)),
        });
    }
    manifest.save(&out.join(MANIFEST_FILE))?;
    Ok(manifest)
}

fn write_graph(graph: &Graph, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_edge_list(graph, &mut buf).map_err(|e| HarnessError::io(path, e))?;
    write_file(path, buf)
}

/// Summary of an `ingest` scan.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IngestReport {
    pub manifest: Manifest,
    /// Graphs that had self-loops removed, with the count.
    pub self_loops: Vec<(String, usize)>,
}

/// `ingest`: scans `dir` for `*.edges`/`*.txt` files. A file's domain is the
/// name of its immediate subdirectory when that parses as a domain label,
/// otherwise `other:unlabeled`. Paths in the manifest are relative to the
/// manifest's own directory when possible.
pub fn ingest_directory(dir: &Path, manifest_path: &Path) -> Result<IngestReport> {
    let mut files = Vec::new();
    collect_edge_files(dir, &mut files)?;
    files.sort();
    let base = manifest_path.parent().unwrap_or(Path::new(""));
    let base_abs = absolute(base)?;
    let mut report = IngestReport::default();
    let mut names = BTreeSet::new();
    for file in files {
        let rel = file.strip_prefix(dir).unwrap_or(&file);
        let domain = rel
            .parent()
            .and_then(|p| p.components().next())
            .and_then(|c| c.as_os_str().to_str())
            .and_then(|s| s.parse::<DomainLabel>().ok())
            .unwrap_or_else(|| DomainLabel::Other("unlabeled".into()));
        let stem: String = rel
            .with_extension("")
            .to_string_lossy()
            .chars()
            .map(|c| if c.is_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '-' })
            .collect();
        let mut name = stem.clone();
        let mut suffix = 1;
        while !names.insert(name.clone()) {
            name = format!("{stem}-{suffix}");
            suffix += 1;
        }
        let loaded = load_edge_list(&file, None)?;
        if loaded.self_loops_dropped > 0 {
            report.self_loops.push((name.clone(), loaded.self_loops_dropped));
        }
        let file_abs = absolute(&file)?;
        let path = file_abs
            .strip_prefix(&base_abs)
            .map(Path::to_path_buf)
            .unwrap_or(file_abs);
        report.manifest.graphs.push(ManifestEntry {
            name,
            path,
            domain,
            n: Some(loaded.graph.n()),
            spec: None,
            stats: Some(compute_stats(&loaded.graph)),
        });
    }
    report.manifest.save(manifest_path)?;
    Ok(report)
}

fn absolute(path: &Path) -> Result<PathBuf> {
    std::path::absolute(path).map_err(|e| HarnessError::io(path, e))
}

fn collect_edge_files(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let entries = std::fs::read_dir(dir).map_err(|e| HarnessError::io(dir, e))?;
    for entry in entries {
        let path = entry.map_err(|e| HarnessError::io(dir, e))?.path();
        if path.is_dir() {
            collect_edge_files(&path, out)?;
        } else if matches!(path.extension().and_then(|e| e.to_str()), Some("edges" | "txt")) {
            out.push(path);
        }
    }
    Ok(())
}
