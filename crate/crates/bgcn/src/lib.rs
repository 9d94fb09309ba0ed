//! Bayesian graph convolutional networks with a node-copying generative
//! graph model, plus a benchmark harness for semi-supervised node
//! classification on citation networks.
//!
//! The observed graph is treated as one sample from a distribution over
//! graphs: a base classifier groups nodes by predicted class, every node is
//! assigned a same-class "copy source", and random graphs are drawn by
//! replacing each node's neighbor row with its source's row with high
//! probability. Networks trained on those sampled graphs, combined with
//! dropout at prediction time, yield a Monte Carlo average over both graph
//! structure and weights — which is markedly more accurate than a single
//! network when only a handful of labels per class are available.
//!
//! ## Examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run --release -p bgcn --example normalized_adjacency
//! cargo run --release -p bgcn --example train_gcnn
//! cargo run --release -p bgcn --example node_copying
//! cargo run --release -p bgcn --example mc_dropout
//! cargo run --release -p bgcn --example bgcn_posterior
//! cargo run --release -p bgcn --example benchmark_run
//! ```
//!
//! - **`normalized_adjacency`** — build a sparse graph and inspect the
//!   degree-normalized propagation operator.
//! - **`train_gcnn`** — train the two-layer network on a toy dataset and
//!   evaluate it.
//! - **`node_copying`** — class partitions, copy-source vectors and sampled
//!   graphs, with edit-distance statistics.
//! - **`mc_dropout`** — predictive uncertainty from dropout at prediction
//!   time.
//! - **`bgcn_posterior`** — the full nested Monte Carlo pipeline, baseline
//!   versus posterior accuracy.
//! - **`benchmark_run`** — the experiment harness end to end on a synthetic
//!   dataset, including the CSV artifacts.
//!
//! The `bench` binary wraps the harness for real datasets; see the README
//! for the dataset file formats.

pub mod bench;
pub mod copying;
pub mod data;
pub mod error;
pub mod gcnn;
pub mod graph;
pub mod posterior;
pub mod rng;
pub mod sparse;
pub mod synth;

pub use copying::{
    assemble_copied_graph, sample_graph, sample_row_choices, sample_zeta, ClassPartition,
    CopyingConfig, RowChoice, ZetaVector,
};
pub use data::{load_dataset, load_dataset_dir, make_split, NodeData, Split, SplitMode};
pub use error::{Error, Result};
pub use gcnn::{
    forward, loss_and_gradients, mc_dropout_predict, train, DropoutMasks, GcnnParams, Hyperparams,
    SoftmaxOutput,
};
pub use graph::{normalized_adjacency, Graph, NormalizedOperator};
pub use posterior::{bgcn_predict, classify, BgcnConfig, PosteriorPrediction};
pub use sparse::CsrMatrix;
