//! Shared test support: straight-line dense reference implementations used
//! as independent oracles, plus small instance builders. Everything here is
//! deliberately written with plain nested loops over `Vec<Vec<f64>>` so it
//! shares no code path with the library's sparse implementations.

#![allow(dead_code)]
#![allow(clippy::needless_range_loop)]

use bgcn::data::{NodeData, Split, SplitMode};
use bgcn::gcnn::GcnnParams;
use bgcn::graph::Graph;
use bgcn::rng::SplitMix64;
use bgcn::sparse::CsrMatrix;

pub type Dense = Vec<Vec<f64>>;

pub fn zeros(rows: usize, cols: usize) -> Dense {
    vec![vec![0.0; cols]; rows]
}

pub fn dense_from_csr(m: &CsrMatrix) -> Dense {
    let mut out = zeros(m.rows(), m.cols());
    for r in 0..m.rows() {
        let (cols, vals) = m.row(r);
        for (&c, &v) in cols.iter().zip(vals) {
            out[r][c] = v;
        }
    }
    out
}

pub fn dense_from_ndarray(a: &ndarray::Array2<f64>) -> Dense {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[[i, j]]).collect())
        .collect()
}

pub fn dense_matmul(a: &Dense, b: &Dense) -> Dense {
    let (n, m) = (a.len(), b[0].len());
    let inner = b.len();
    let mut out = zeros(n, m);
    for i in 0..n {
        for k in 0..inner {
            for j in 0..m {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

/// Dense reference for the renormalized operator: build A + I, take the
/// row-sum degrees, and scale both sides by the inverse square roots.
pub fn dense_normalized_adjacency(n: usize, edges: &[(usize, usize)]) -> Dense {
    let mut a = zeros(n, n);
    for &(u, v) in edges {
        if u != v {
            a[u][v] = 1.0;
            a[v][u] = 1.0;
        }
    }
    for i in 0..n {
        a[i][i] = 1.0;
    }
    let degrees: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let mut out = zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if a[i][j] != 0.0 {
                out[i][j] = a[i][j] / (degrees[i] * degrees[j]).sqrt();
            }
        }
    }
    out
}

pub fn dense_relu(m: &Dense) -> Dense {
    m.iter()
        .map(|row| row.iter().map(|&v| if v > 0.0 { v } else { 0.0 }).collect())
        .collect()
}

pub fn dense_softmax_rows(m: &Dense) -> Dense {
    m.iter()
        .map(|row| {
            let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let exps: Vec<f64> = row.iter().map(|&v| (v - max).exp()).collect();
            let sum: f64 = exps.iter().sum();
            exps.into_iter().map(|e| e / sum).collect()
        })
        .collect()
}

/// Materialize the feature matrix with the library's nonzero-aligned input
/// mask applied (kept entries scaled).
pub fn dense_masked_features(x: &CsrMatrix, keep: &[bool], scale: f64) -> Dense {
    let mut out = zeros(x.rows(), x.cols());
    let mut nnz_idx = 0usize;
    for r in 0..x.rows() {
        let (cols, vals) = x.row(r);
        for (&c, &v) in cols.iter().zip(vals) {
            if keep[nnz_idx] {
                out[r][c] = v * scale;
            }
            nnz_idx += 1;
        }
    }
    out
}

pub fn dense_apply_hidden_mask(h: &Dense, keep: &[bool], scale: f64) -> Dense {
    let cols = h[0].len();
    h.iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, &v)| if keep[i * cols + j] { v * scale } else { 0.0 })
                .collect()
        })
        .collect()
}

pub struct DenseMaskSpec<'a> {
    pub input_keep: &'a [bool],
    pub hidden_keep: &'a [bool],
    pub rate: f64,
}

/// Straight-line dense two-layer forward pass returning the class
/// probabilities.
pub fn dense_gcnn_forward(
    ahat: &Dense,
    x: &CsrMatrix,
    w0: &Dense,
    w1: &Dense,
    masks: Option<&DenseMaskSpec>,
) -> Dense {
    let x_dense = match masks {
        None => dense_from_csr(x),
        Some(m) => dense_masked_features(x, m.input_keep, 1.0 / (1.0 - m.rate)),
    };
    let mut h = dense_relu(&dense_matmul(ahat, &dense_matmul(&x_dense, w0)));
    if let Some(m) = masks {
        h = dense_apply_hidden_mask(&h, m.hidden_keep, 1.0 / (1.0 - m.rate));
    }
    dense_softmax_rows(&dense_matmul(ahat, &dense_matmul(&h, w1)))
}

/// Dense reference for the training objective: mean cross-entropy over the
/// given nodes plus the first-layer ridge penalty.
pub fn dense_training_loss(
    ahat: &Dense,
    x: &CsrMatrix,
    w0: &Dense,
    w1: &Dense,
    labels: &[usize],
    nodes: &[usize],
    weight_decay: f64,
) -> f64 {
    let probs = dense_gcnn_forward(ahat, x, w0, w1, None);
    let mut total = 0.0;
    for &i in nodes {
        total -= probs[i][labels[i]].ln();
    }
    let ridge: f64 = w0.iter().flatten().map(|v| v * v).sum();
    total / nodes.len() as f64 + 0.5 * weight_decay * ridge
}

// ---------------------------------------------------------------------------
// Instance builders
// ---------------------------------------------------------------------------

/// A graph sampled edge-by-edge with probability `edge_prob`, plus the edge
/// list it was built from.
pub fn random_graph(
    n: usize,
    edge_prob: f64,
    rng: &mut SplitMix64,
) -> (Graph, Vec<(usize, usize)>) {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.bernoulli(edge_prob) {
                edges.push((u, v));
            }
        }
    }
    (Graph::from_edges(n, &edges).unwrap(), edges)
}

pub fn random_features(n: usize, d: usize, density: f64, rng: &mut SplitMix64) -> CsrMatrix {
    let mut triplets = Vec::new();
    for i in 0..n {
        for j in 0..d {
            if rng.bernoulli(density) {
                triplets.push((i, j, rng.uniform(0.1, 2.0)));
            }
        }
    }
    // Keep at least one nonzero so shapes stay as requested.
    if triplets.is_empty() {
        triplets.push((0, 0, 1.0));
    }
    CsrMatrix::from_triplets(n, d, triplets).unwrap()
}

pub fn random_params(d: usize, h: usize, k: usize, rng: &mut SplitMix64) -> GcnnParams {
    GcnnParams {
        w0: ndarray::Array2::from_shape_fn((d, h), |_| rng.uniform(-1.0, 1.0)),
        w1: ndarray::Array2::from_shape_fn((h, k), |_| rng.uniform(-1.0, 1.0)),
    }
}

/// Two disconnected 4-cliques with one-hot cluster features and one labeled
/// node per clique: linearly separable, trains to 100% accuracy quickly.
pub fn two_cliques() -> (Graph, NodeData, Split) {
    let mut edges = Vec::new();
    for base in [0, 4] {
        for i in 0..4 {
            for j in (i + 1)..4 {
                edges.push((base + i, base + j));
            }
        }
    }
    let graph = Graph::from_edges(8, &edges).unwrap();
    let triplets = (0..8).map(|i| (i, i / 4, 1.0)).collect();
    let features = CsrMatrix::from_triplets(8, 2, triplets).unwrap();
    let data = NodeData::new(features, vec![0, 0, 0, 0, 1, 1, 1, 1], 2).unwrap();
    let split = Split {
        train: vec![0, 4],
        test: vec![1, 2, 3, 5, 6, 7],
        mode: SplitMode::Random,
        labels_per_class: 1,
        seed: 0,
    };
    (graph, data, split)
}

/// Apply a node relabeling to a whole instance: node `i` becomes `perm[i]`.
pub fn permute_instance(
    graph: &Graph,
    features: &CsrMatrix,
    labels: &[usize],
    perm: &[usize],
) -> (Graph, CsrMatrix, Vec<usize>) {
    let n = graph.n_nodes();
    let mut edges = Vec::new();
    for (u, v) in graph.edges() {
        edges.push((perm[u], perm[v]));
    }
    let permuted_graph = Graph::from_edges(n, &edges).unwrap();

    let mut triplets = Vec::new();
    for r in 0..features.rows() {
        let (cols, vals) = features.row(r);
        for (&c, &v) in cols.iter().zip(vals) {
            triplets.push((perm[r], c, v));
        }
    }
    let permuted_features =
        CsrMatrix::from_triplets(features.rows(), features.cols(), triplets).unwrap();

    let mut permuted_labels = vec![0usize; labels.len()];
    for (i, &l) in labels.iter().enumerate() {
        permuted_labels[perm[i]] = l;
    }
    (permuted_graph, permuted_features, permuted_labels)
}

pub fn max_abs_diff_dense(a: &Dense, b: &ndarray::Array2<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..a.len() {
        for j in 0..a[i].len() {
            worst = worst.max((a[i][j] - b[[i, j]]).abs());
        }
    }
    worst
}
