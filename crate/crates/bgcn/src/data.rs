//! Citation-network dataset ingestion and train/test splits.
//!
//! Datasets are plain UTF-8 TSV files with LF line endings and 0-based
//! indices throughout:
//!
//! - `edges.tsv`: one edge per line, `src<TAB>dst`; `#` comments ignored.
//! - `features.tsv`: one nonzero per line, `node<TAB>feature<TAB>value`.
//! - `labels.tsv`: one node per line, `node<TAB>class`.
//! - `fixed_split.tsv`: lines `node<TAB>train|test`; train lines grouped by
//!   class in the published canonical order, so that "the first k labels of
//!   each class" is well defined.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::SplitMix64;
use crate::sparse::CsrMatrix;

/// Node features and labels for one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeData {
    features: CsrMatrix,
    labels: Vec<usize>,
    n_classes: usize,
}

impl NodeData {
    pub fn new(features: CsrMatrix, labels: Vec<usize>, n_classes: usize) -> Result<Self> {
        if features.rows() != labels.len() {
            return Err(Error::ShapeMismatch {
                context: "node data",
                expected: format!("{} label entries", features.rows()),
                got: format!("{}", labels.len()),
            });
        }
        for (node, &label) in labels.iter().enumerate() {
            if label >= n_classes {
                return Err(Error::LabelOutOfRange {
                    node,
                    label,
                    n_classes,
                });
            }
        }
        Ok(Self {
            features,
            labels,
            n_classes,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn features(&self) -> &CsrMatrix {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Members of each class, ascending within a class.
    pub fn class_members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.n_classes];
        for (node, &label) in self.labels.iter().enumerate() {
            members[label].push(node);
        }
        members
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitMode {
    Fixed,
    Random,
}

impl std::fmt::Display for SplitMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SplitMode::Fixed => write!(f, "fixed"),
            SplitMode::Random => write!(f, "random"),
        }
    }
}

/// A train/test partition. Both node lists are stored in ascending order;
/// `train` holds exactly `labels_per_class` nodes of every class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub mode: SplitMode,
    pub labels_per_class: usize,
    pub seed: u64,
}

/// Load a dataset from its three component files. The graph is symmetrized
/// (an undirected edge exists if either endpoint lists the other), duplicate
/// edges are collapsed, and feature rows are L1-normalized.
pub fn load_dataset(
    edges_path: &Path,
    features_path: &Path,
    labels_path: &Path,
) -> Result<(Graph, NodeData)> {
    let labels = read_labels(labels_path)?;
    let n = labels.len();
    let n_classes = labels.iter().copied().max().map_or(0, |m| m + 1);

    let edges = read_edges(edges_path, n)?;
    let graph = Graph::from_edges(n, &edges)?;

    let mut features = read_features(features_path, n)?;
    features.l1_normalize_rows();

    let data = NodeData::new(features, labels, n_classes)?;
    Ok((graph, data))
}

/// Load `edges.tsv`, `features.tsv` and `labels.tsv` from a directory.
pub fn load_dataset_dir(dir: &Path) -> Result<(Graph, NodeData)> {
    load_dataset(
        &dir.join("edges.tsv"),
        &dir.join("features.tsv"),
        &dir.join("labels.tsv"),
    )
}

/// Path of the canonical split file inside a dataset directory.
pub fn fixed_split_path(dir: &Path) -> PathBuf {
    dir.join("fixed_split.tsv")
}

fn malformed(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Malformed {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

/// Iterate non-comment, non-empty lines with their 1-based line numbers.
fn read_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let file = File::open(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })?;
    let mut lines = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let trimmed = line.trim_end_matches('\r');
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        lines.push((idx + 1, trimmed.to_string()));
    }
    Ok(lines)
}

fn parse_index(path: &Path, line: usize, field: &str, what: &str) -> Result<usize> {
    field
        .parse::<usize>()
        .map_err(|_| malformed(path, line, format!("invalid {what} `{field}`")))
}

fn read_labels(path: &Path) -> Result<Vec<usize>> {
    let lines = read_lines(path)?;
    let n = lines.len();
    let mut labels = vec![usize::MAX; n];
    for (line_no, line) in &lines {
        let mut fields = line.split('\t');
        let (node, label) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => return Err(malformed(path, *line_no, "expected `node<TAB>class`")),
        };
        let node = parse_index(path, *line_no, node, "node index")?;
        let label = parse_index(path, *line_no, label, "class index")?;
        if node >= n {
            return Err(malformed(
                path,
                *line_no,
                format!("node index {node} out of range for {n} labeled nodes"),
            ));
        }
        if labels[node] != usize::MAX {
            return Err(malformed(path, *line_no, format!("duplicate node {node}")));
        }
        labels[node] = label;
    }
    // Every index in [0, n) must be covered exactly once.
    if let Some(missing) = labels.iter().position(|&l| l == usize::MAX) {
        return Err(malformed(path, 0, format!("no label for node {missing}")));
    }
    Ok(labels)
}

fn read_edges(path: &Path, n_nodes: usize) -> Result<Vec<(usize, usize)>> {
    let mut edges = Vec::new();
    for (line_no, line) in read_lines(path)? {
        let mut fields = line.split('\t');
        let (src, dst) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => return Err(malformed(path, line_no, "expected `src<TAB>dst`")),
        };
        let src = parse_index(path, line_no, src, "node index")?;
        let dst = parse_index(path, line_no, dst, "node index")?;
        if src >= n_nodes || dst >= n_nodes {
            return Err(malformed(
                path,
                line_no,
                format!("edge ({src}, {dst}) references a node outside 0..{n_nodes}"),
            ));
        }
        edges.push((src, dst));
    }
    Ok(edges)
}

fn read_features(path: &Path, n_nodes: usize) -> Result<CsrMatrix> {
    let mut triplets = Vec::new();
    let mut n_features = 0usize;
    for (line_no, line) in read_lines(path)? {
        let mut fields = line.split('\t');
        let (node, feat, value) = match (fields.next(), fields.next(), fields.next(), fields.next())
        {
            (Some(a), Some(b), Some(c), None) => (a, b, c),
            _ => {
                return Err(malformed(
                    path,
                    line_no,
                    "expected `node<TAB>feature<TAB>value`",
                ))
            }
        };
        let node = parse_index(path, line_no, node, "node index")?;
        let feat = parse_index(path, line_no, feat, "feature index")?;
        let value: f64 = value
            .parse()
            .map_err(|_| malformed(path, line_no, format!("invalid value `{value}`")))?;
        if node >= n_nodes {
            return Err(malformed(
                path,
                line_no,
                format!("node index {node} out of range for {n_nodes} labeled nodes"),
            ));
        }
        n_features = n_features.max(feat + 1);
        triplets.push((node, feat, value));
    }
    CsrMatrix::from_triplets(n_nodes, n_features, triplets)
}

/// Construct a train/test split.
///
/// Fixed mode reads the canonical partition from `fixed_split_file` and
/// takes the first `labels_per_class` train lines of each class in file
/// order; the test set is taken from the same file. Random mode samples
/// `labels_per_class` nodes per class without replacement using `seed` and
/// assigns every remaining node to the test set.
pub fn make_split(
    data: &NodeData,
    mode: SplitMode,
    labels_per_class: usize,
    seed: u64,
    fixed_split_file: Option<&Path>,
) -> Result<Split> {
    if labels_per_class == 0 {
        return Err(Error::InvalidConfig(
            "labels_per_class must be at least 1".to_string(),
        ));
    }
    match mode {
        SplitMode::Fixed => {
            let path = fixed_split_file.ok_or(Error::MissingSplitFile)?;
            fixed_split(data, labels_per_class, seed, path)
        }
        SplitMode::Random => random_split(data, labels_per_class, seed),
    }
}

fn fixed_split(data: &NodeData, labels_per_class: usize, seed: u64, path: &Path) -> Result<Split> {
    let n = data.n_nodes();
    let mut per_class_train: Vec<Vec<usize>> = vec![Vec::new(); data.n_classes()];
    let mut test = Vec::new();
    let mut seen = vec![false; n];
    for (line_no, line) in read_lines(path)? {
        let mut fields = line.split('\t');
        let (node, role) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => return Err(malformed(path, line_no, "expected `node<TAB>train|test`")),
        };
        let node = parse_index(path, line_no, node, "node index")?;
        if node >= n {
            return Err(malformed(
                path,
                line_no,
                format!("node index {node} out of range for {n} nodes"),
            ));
        }
        if seen[node] {
            return Err(malformed(path, line_no, format!("duplicate node {node}")));
        }
        seen[node] = true;
        match role {
            "train" => per_class_train[data.labels()[node]].push(node),
            "test" => test.push(node),
            other => {
                return Err(malformed(
                    path,
                    line_no,
                    format!("expected `train` or `test`, got `{other}`"),
                ))
            }
        }
    }
    let mut train = Vec::with_capacity(labels_per_class * data.n_classes());
    for (class, listed) in per_class_train.iter().enumerate() {
        if listed.len() < labels_per_class {
            return Err(Error::InsufficientClass {
                class,
                have: listed.len(),
                need: labels_per_class,
            });
        }
        train.extend_from_slice(&listed[..labels_per_class]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(Split {
        train,
        test,
        mode: SplitMode::Fixed,
        labels_per_class,
        seed,
    })
}

fn random_split(data: &NodeData, labels_per_class: usize, seed: u64) -> Result<Split> {
    let mut rng = SplitMix64::new(seed);
    let mut train = Vec::with_capacity(labels_per_class * data.n_classes());
    for (class, mut members) in data.class_members().into_iter().enumerate() {
        if members.len() < labels_per_class {
            return Err(Error::InsufficientClass {
                class,
                have: members.len(),
                need: labels_per_class,
            });
        }
        rng.shuffle(&mut members);
        train.extend_from_slice(&members[..labels_per_class]);
    }
    train.sort_unstable();
    let in_train: std::collections::HashSet<usize> = train.iter().copied().collect();
    let test: Vec<usize> = (0..data.n_nodes())
        .filter(|i| !in_train.contains(i))
        .collect();
    Ok(Split {
        train,
        test,
        mode: SplitMode::Random,
        labels_per_class,
        seed,
    })
}
