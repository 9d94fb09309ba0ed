//! The node-copying generative graph model.
//!
//! A base classifier assigns every node a predicted class; nodes of the
//! same predicted class are interchangeable "copy sources". The auxiliary
//! vector zeta picks one source per node uniformly within its class, and a
//! graph is sampled by keeping each node's observed neighbor row with
//! probability epsilon or replacing it with its source's row otherwise,
//! then re-symmetrizing by union.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{derive, SplitMix64};

/// Nodes grouped by predicted class label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassPartition {
    sets: Vec<Vec<usize>>,
    predicted: Vec<usize>,
}

impl ClassPartition {
    /// Group nodes by predicted label; `sets()[k]` lists the nodes with
    /// prediction `k` in ascending order.
    pub fn from_predictions(predicted: Vec<usize>, n_classes: usize) -> Result<Self> {
        let mut sets = vec![Vec::new(); n_classes];
        for (node, &label) in predicted.iter().enumerate() {
            if label >= n_classes {
                return Err(Error::LabelOutOfRange {
                    node,
                    label,
                    n_classes,
                });
            }
            sets[label].push(node);
        }
        Ok(Self { sets, predicted })
    }

    pub fn n_nodes(&self) -> usize {
        self.predicted.len()
    }

    pub fn n_classes(&self) -> usize {
        self.sets.len()
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn predicted_labels(&self) -> &[usize] {
        &self.predicted
    }

    /// The copy-source candidates for `node` (its own class set).
    pub fn peers_of(&self, node: usize) -> &[usize] {
        &self.sets[self.predicted[node]]
    }
}

/// Per-node copy-source assignment; entry `j` names the node whose
/// neighbor row may replace node `j`'s row, always from the same
/// predicted class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZetaVector {
    zeta: Vec<usize>,
}

impl ZetaVector {
    pub fn as_slice(&self) -> &[usize] {
        &self.zeta
    }

    pub fn len(&self) -> usize {
        self.zeta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeta.is_empty()
    }
}

/// Draw a zeta vector: entry `j` is uniform over the nodes sharing `j`'s
/// predicted class, entries mutually independent. Entry `j` is drawn from
/// the stream `derive(seed, j)`, so the result does not depend on
/// evaluation order.
pub fn sample_zeta(partition: &ClassPartition, seed: u64) -> ZetaVector {
    let zeta = (0..partition.n_nodes())
        .map(|j| {
            let peers = partition.peers_of(j);
            let mut rng = SplitMix64::new(derive(seed, j as u64));
            peers[rng.below(peers.len())]
        })
        .collect();
    ZetaVector { zeta }
}

/// Row-keep probability for graph sampling. `new` enforces the open
/// interval (0, 1); the `keep_all` and `copy_all` constructors expose the
/// two degenerate endpoints for reduction checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CopyingConfig {
    epsilon: f64,
}

impl CopyingConfig {
    pub const DEFAULT_EPSILON: f64 = 0.01;

    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must lie strictly between 0 and 1, got {epsilon}"
            )));
        }
        Ok(Self { epsilon })
    }

    /// Degenerate configuration that always keeps the observed rows.
    pub fn keep_all() -> Self {
        Self { epsilon: 1.0 }
    }

    /// Degenerate configuration that always copies.
    pub fn copy_all() -> Self {
        Self { epsilon: 0.0 }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

impl Default for CopyingConfig {
    fn default() -> Self {
        Self {
            epsilon: Self::DEFAULT_EPSILON,
        }
    }
}

/// Outcome of one per-node keep-or-copy coin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowChoice {
    /// The node keeps its observed neighbor row.
    Keep,
    /// The node takes the neighbor row of the named source node.
    Copy(usize),
}

/// Flip the per-node coins of the generative model: node `j` keeps its own
/// row with probability epsilon and copies from `zeta[j]` otherwise. Node
/// `j`'s coin comes from the stream `derive(seed, j)`.
pub fn sample_row_choices(zeta: &ZetaVector, cfg: &CopyingConfig, seed: u64) -> Vec<RowChoice> {
    zeta.as_slice()
        .iter()
        .enumerate()
        .map(|(j, &source)| {
            let mut rng = SplitMix64::new(derive(seed, j as u64));
            if rng.bernoulli(cfg.epsilon) {
                RowChoice::Keep
            } else {
                RowChoice::Copy(source)
            }
        })
        .collect()
}

/// Assemble the graph determined by per-node row choices: each node's row
/// is taken verbatim from the observed graph (its own row or its source's
/// row, minus any self-loop), and the row assignment is then symmetrized
/// by union. Runs in time linear in nodes plus edges touched.
pub fn assemble_copied_graph(g_obs: &Graph, choices: &[RowChoice]) -> Result<Graph> {
    let n = g_obs.n_nodes();
    if choices.len() != n {
        return Err(Error::ShapeMismatch {
            context: "copied-graph assembly",
            expected: format!("{n} row choices"),
            got: format!("{}", choices.len()),
        });
    }
    let rows: Vec<&[usize]> = choices
        .iter()
        .enumerate()
        .map(|(j, choice)| match choice {
            RowChoice::Keep => g_obs.neighbors(j),
            RowChoice::Copy(q) => g_obs.neighbors(*q),
        })
        .collect::<Result<_>>()?;
    Ok(Graph::from_rows(n, rows.iter().copied()))
}

/// Draw one graph from the node-copying model. Deterministic given
/// `(g_obs, zeta, cfg, seed)`.
pub fn sample_graph(
    g_obs: &Graph,
    zeta: &ZetaVector,
    cfg: &CopyingConfig,
    seed: u64,
) -> Result<Graph> {
    if zeta.len() != g_obs.n_nodes() {
        return Err(Error::ShapeMismatch {
            context: "graph sampling",
            expected: format!("zeta of length {}", g_obs.n_nodes()),
            got: format!("{}", zeta.len()),
        });
    }
    let choices = sample_row_choices(zeta, cfg, seed);
    assemble_copied_graph(g_obs, &choices)
}
