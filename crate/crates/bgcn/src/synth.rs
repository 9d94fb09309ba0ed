//! Synthetic citation-style datasets.
//!
//! Small planted-community graphs with class-correlated bag-of-words
//! features. These make the full pipeline runnable end to end without any
//! external data: examples, smoke tests and scaling benchmarks all draw
//! from here. They are *not* stand-ins for the real citation networks when
//! validating published accuracy figures.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::data::NodeData;
use crate::error::Result;
use crate::graph::Graph;
use crate::rng::{derive, SplitMix64};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SynthConfig {
    pub n_nodes: usize,
    pub n_classes: usize,
    /// Expected within-class edges per node.
    pub in_degree: f64,
    /// Expected cross-class edges per node.
    pub out_degree: f64,
    /// Total vocabulary size; each class owns an equal slice of it.
    pub n_features: usize,
    /// Word draws per node.
    pub words_per_node: usize,
    /// Probability that a word draw comes from the whole vocabulary
    /// instead of the node's class slice.
    pub word_noise: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_nodes: 400,
            n_classes: 4,
            in_degree: 6.0,
            out_degree: 1.0,
            n_features: 64,
            words_per_node: 8,
            word_noise: 0.15,
            seed: 0,
        }
    }
}

/// Generate a planted-community dataset. Node `i` belongs to class
/// `i % n_classes`; edges prefer same-class endpoints and words prefer the
/// class's vocabulary slice. Deterministic given the config.
pub fn generate(cfg: &SynthConfig) -> Result<(Graph, NodeData)> {
    let n = cfg.n_nodes;
    let k = cfg.n_classes;
    assert!(n >= 2 * k, "need at least two nodes per class");
    let labels: Vec<usize> = (0..n).map(|i| i % k).collect();
    let mut members = vec![Vec::new(); k];
    for (i, &c) in labels.iter().enumerate() {
        members[c].push(i);
    }

    let mut edge_rng = SplitMix64::new(derive(cfg.seed, 0x45));
    let mut edges = Vec::new();
    for (i, &label) in labels.iter().enumerate() {
        let m_in = count_draw(cfg.in_degree / 2.0, &mut edge_rng);
        for _ in 0..m_in {
            let peers = &members[label];
            let j = peers[edge_rng.below(peers.len())];
            if j != i {
                edges.push((i, j));
            }
        }
        let m_out = count_draw(cfg.out_degree / 2.0, &mut edge_rng);
        for _ in 0..m_out {
            let j = edge_rng.below(n);
            if labels[j] != label {
                edges.push((i, j));
            }
        }
    }
    let graph = Graph::from_edges(n, &edges)?;

    let slice = cfg.n_features / k;
    assert!(slice >= 1, "need at least one feature per class");
    let mut word_rng = SplitMix64::new(derive(cfg.seed, 0x57));
    let mut counts: std::collections::BTreeMap<(usize, usize), f64> =
        std::collections::BTreeMap::new();
    for (i, &label) in labels.iter().enumerate() {
        for _ in 0..cfg.words_per_node {
            let word = if word_rng.bernoulli(cfg.word_noise) {
                word_rng.below(cfg.n_features)
            } else {
                label * slice + word_rng.below(slice)
            };
            *counts.entry((i, word)).or_insert(0.0) += 1.0;
        }
    }
    let triplets: Vec<(usize, usize, f64)> =
        counts.into_iter().map(|((i, w), c)| (i, w, c)).collect();
    let mut features = CsrMatrix::from_triplets(n, cfg.n_features, triplets)?;
    features.l1_normalize_rows();

    let data = NodeData::new(features, labels, k)?;
    Ok((graph, data))
}

fn count_draw(mean: f64, rng: &mut SplitMix64) -> usize {
    let floor = mean.floor() as usize;
    floor + usize::from(rng.bernoulli(mean - mean.floor()))
}

/// A bare sparse random graph at a given average degree; used for runtime
/// scaling measurements.
pub fn sparse_graph(n_nodes: usize, avg_degree: f64, seed: u64) -> Graph {
    let mut rng = SplitMix64::new(seed);
    let mut edges = Vec::with_capacity((n_nodes as f64 * avg_degree / 2.0) as usize);
    for i in 0..n_nodes {
        let m = count_draw(avg_degree / 2.0, &mut rng);
        for _ in 0..m {
            let j = rng.below(n_nodes);
            if j != i {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n_nodes, &edges).expect("indices are in range by construction")
}

/// Write a dataset in the TSV exchange format (`edges.tsv`, `features.tsv`,
/// `labels.tsv`) plus a canonical `fixed_split.tsv` listing the first
/// `split_per_class` nodes of each class (in node order) as training nodes
/// and every remaining node as a test node.
pub fn write_dataset(
    dir: &Path,
    graph: &Graph,
    data: &NodeData,
    split_per_class: usize,
) -> Result<()> {
    std::fs::create_dir_all(dir)?;

    let mut edges = BufWriter::new(File::create(dir.join("edges.tsv"))?);
    for (u, v) in graph.edges() {
        writeln!(edges, "{u}\t{v}")?;
    }
    edges.flush()?;

    let mut features = BufWriter::new(File::create(dir.join("features.tsv"))?);
    for node in 0..data.n_nodes() {
        let (cols, vals) = data.features().row(node);
        for (&c, &v) in cols.iter().zip(vals) {
            writeln!(features, "{node}\t{c}\t{v}")?;
        }
    }
    features.flush()?;

    let mut labels = BufWriter::new(File::create(dir.join("labels.tsv"))?);
    for (node, &label) in data.labels().iter().enumerate() {
        writeln!(labels, "{node}\t{label}")?;
    }
    labels.flush()?;

    let mut split = BufWriter::new(File::create(dir.join("fixed_split.tsv"))?);
    let members = data.class_members();
    let mut in_train = vec![false; data.n_nodes()];
    for member_list in &members {
        for &node in member_list.iter().take(split_per_class) {
            in_train[node] = true;
        }
    }
    for member_list in &members {
        for &node in member_list.iter().take(split_per_class) {
            writeln!(split, "{node}\ttrain")?;
        }
    }
    for (node, &is_train) in in_train.iter().enumerate() {
        if !is_train {
            writeln!(split, "{node}\ttest")?;
        }
    }
    split.flush()?;
    Ok(())
}
