//! Posterior-predictive classification by nested Monte Carlo.
//!
//! The procedure: train a base classifier on the observed graph and group
//! nodes by predicted class; draw `V` zeta vectors; for each, draw `N_G`
//! graphs from the copying model; train one network per sampled graph and
//! draw `S` dropout forward passes from it. The posterior estimate is the
//! flat average of all `V·N_G·S` row-stochastic outputs.
//!
//! Prediction-time forward passes run on the *observed* graph's operator
//! by default — weights come from networks trained on sampled graphs, but
//! the conditional being averaged is the class distribution given the
//! observed topology. Set
//! [`predict_on_sampled_graph`](BgcnConfig::predict_on_sampled_graph) to
//! evaluate each network on its own training graph instead.

use ndarray::Array2;
use rayon::prelude::*;

use crate::copying::{sample_graph, sample_zeta, ClassPartition, CopyingConfig};
use crate::data::{NodeData, Split};
use crate::error::{Error, Result};
use crate::gcnn::{
    argmax_rows, evaluation_loss, forward, mc_dropout_predict, train, Hyperparams, SoftmaxOutput,
};
use crate::graph::{normalized_adjacency, Graph};
use crate::rng::{derive, derive2, stream};

/// Monte Carlo sample counts and per-stage settings for a posterior run.
#[derive(Debug, Clone, PartialEq)]
pub struct BgcnConfig {
    /// Number of zeta draws (V).
    pub v_samples: usize,
    /// Graphs drawn per zeta (N_G).
    pub g_samples: usize,
    /// Dropout weight draws per trained network (S).
    pub w_samples: usize,
    pub copying: CopyingConfig,
    pub gcnn: Hyperparams,
    pub seed: u64,
    /// Evaluate each network on the graph it was trained on instead of the
    /// observed graph.
    pub predict_on_sampled_graph: bool,
    /// Retain every per-sample output matrix in the diagnostics.
    pub keep_sample_outputs: bool,
}

impl BgcnConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            v_samples: 5,
            g_samples: 5,
            w_samples: 5,
            copying: CopyingConfig::default(),
            gcnn: Hyperparams::default(),
            seed,
            predict_on_sampled_graph: false,
            keep_sample_outputs: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.v_samples == 0 || self.g_samples == 0 || self.w_samples == 0 {
            return Err(Error::InvalidConfig(
                "v_samples, g_samples and w_samples must all be at least 1".into(),
            ));
        }
        self.gcnn.validate()
    }
}

/// Diagnostics for one trained network (one `(v, i)` pair).
#[derive(Debug, Clone)]
pub struct SampleDiagnostics {
    pub v: usize,
    pub i: usize,
    /// Evaluation-mode training objective of the trained network on its
    /// sampled graph.
    pub train_loss: f64,
    /// The S per-pass outputs, present when
    /// [`keep_sample_outputs`](BgcnConfig::keep_sample_outputs) is set.
    pub outputs: Option<Vec<SoftmaxOutput>>,
}

#[derive(Debug, Clone)]
pub struct PosteriorMeta {
    pub config: BgcnConfig,
    /// Evaluation-mode training objective of the base classifier.
    pub base_train_loss: f64,
    /// Predicted labels the class partition was built from.
    pub base_predictions: Vec<usize>,
    pub samples: Vec<SampleDiagnostics>,
}

/// The averaged posterior-predictive distribution over classes, one
/// row-stochastic row per node.
#[derive(Debug, Clone)]
pub struct PosteriorPrediction {
    probs: Array2<f64>,
    pub meta: PosteriorMeta,
}

impl PosteriorPrediction {
    pub fn probs(&self) -> &Array2<f64> {
        &self.probs
    }
}

/// Per-row argmax classification, ties to the lowest class index.
pub fn classify(pred: &PosteriorPrediction) -> Vec<usize> {
    argmax_rows(&pred.probs().view())
}

/// Run the full nested Monte Carlo estimate. Deterministic given
/// `cfg.seed` regardless of worker-thread scheduling: the `V·N_G` training
/// jobs run in parallel, each seeded from its own derivation path, and the
/// final average is reduced in fixed `(v, i, s)` order.
pub fn bgcn_predict(
    g_obs: &Graph,
    data: &NodeData,
    split: &Split,
    cfg: &BgcnConfig,
) -> Result<PosteriorPrediction> {
    cfg.validate()?;
    let op_obs = normalized_adjacency(g_obs);

    // Base classifier on the observed graph; its argmax predictions define
    // the class partition (training nodes included).
    let base_seed = derive(cfg.seed, stream::BASE_CLASSIFIER);
    let base_params = train(
        &op_obs,
        data.features(),
        data.labels(),
        data.n_classes(),
        &split.train,
        &cfg.gcnn,
        base_seed,
    )?;
    let base_train_loss = evaluation_loss(
        &base_params,
        &op_obs,
        data.features(),
        data.labels(),
        &split.train,
        cfg.gcnn.weight_decay,
    )?;
    let base_out = forward(&base_params, &op_obs, data.features(), None)?;
    let base_predictions = argmax_rows(&base_out.probs().view());
    let partition = ClassPartition::from_predictions(base_predictions.clone(), data.n_classes())?;

    let zetas: Vec<_> = (0..cfg.v_samples)
        .map(|v| sample_zeta(&partition, derive2(cfg.seed, stream::ZETA, v as u64)))
        .collect();

    let jobs: Vec<(usize, usize)> = (0..cfg.v_samples)
        .flat_map(|v| (0..cfg.g_samples).map(move |i| (v, i)))
        .collect();

    struct JobOutput {
        v: usize,
        i: usize,
        train_loss: f64,
        sum: Array2<f64>,
        outputs: Option<Vec<SoftmaxOutput>>,
    }

    let job_results: Vec<Result<JobOutput>> = jobs
        .par_iter()
        .map(|&(v, i)| {
            let graph_seed = derive2(derive(cfg.seed, stream::GRAPH_SAMPLE), v as u64, i as u64);
            let sampled = sample_graph(g_obs, &zetas[v], &cfg.copying, graph_seed)?;
            let op_sampled = normalized_adjacency(&sampled);

            let train_seed = derive2(
                derive(cfg.seed, stream::WEIGHT_TRAINING),
                v as u64,
                i as u64,
            );
            let params = train(
                &op_sampled,
                data.features(),
                data.labels(),
                data.n_classes(),
                &split.train,
                &cfg.gcnn,
                train_seed,
            )
            .map_err(|e| e.tag_sample(v, i))?;
            let train_loss = evaluation_loss(
                &params,
                &op_sampled,
                data.features(),
                data.labels(),
                &split.train,
                cfg.gcnn.weight_decay,
            )?;

            let op_pred = if cfg.predict_on_sampled_graph {
                &op_sampled
            } else {
                &op_obs
            };
            let mc_seed = derive2(derive(cfg.seed, stream::MC_DROPOUT), v as u64, i as u64);
            let passes = mc_dropout_predict(
                &params,
                op_pred,
                data.features(),
                cfg.gcnn.dropout_rate,
                cfg.w_samples,
                mc_seed,
            )
            .map_err(|e| e.tag_sample(v, i))?;

            let mut sum = Array2::zeros(passes[0].probs().dim());
            for pass in &passes {
                sum += pass.probs();
            }
            Ok(JobOutput {
                v,
                i,
                train_loss,
                sum,
                outputs: cfg.keep_sample_outputs.then_some(passes),
            })
        })
        .collect();

    // Fixed-order reduction: jobs arrive indexed, so the sum below does not
    // depend on which worker finished first.
    let mut total: Array2<f64> = Array2::zeros((data.n_nodes(), data.n_classes()));
    let mut samples = Vec::with_capacity(jobs.len());
    for result in job_results {
        let job = result?;
        total += &job.sum;
        samples.push(SampleDiagnostics {
            v: job.v,
            i: job.i,
            train_loss: job.train_loss,
            outputs: job.outputs,
        });
    }
    let count = (cfg.v_samples * cfg.g_samples * cfg.w_samples) as f64;
    let probs = total / count;

    Ok(PosteriorPrediction {
        probs,
        meta: PosteriorMeta {
            config: cfg.clone(),
            base_train_loss,
            base_predictions,
            samples,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::SplitMode;
    use crate::sparse::CsrMatrix;

    /// Two disconnected 4-cliques with one-hot cluster features and one
    /// labeled node per clique.
    pub(crate) fn clique_instance() -> (Graph, NodeData, Split) {
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

    fn fast_config(seed: u64) -> BgcnConfig {
        let mut cfg = BgcnConfig::new(seed);
        cfg.gcnn.epochs = 40;
        cfg.v_samples = 2;
        cfg.g_samples = 2;
        cfg.w_samples = 2;
        cfg.copying = CopyingConfig::new(0.2).unwrap();
        cfg
    }

    #[test]
    fn config_validation_rejects_zero_counts() {
        let mut cfg = BgcnConfig::new(0);
        cfg.v_samples = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn posterior_rows_are_stochastic() {
        let (graph, data, split) = clique_instance();
        let pred = bgcn_predict(&graph, &data, &split, &fast_config(3)).unwrap();
        for row in pred.probs().rows() {
            assert!((row.sum() - 1.0).abs() < 1e-9);
            assert!(row.iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
    }

    #[test]
    fn posterior_classifies_the_separable_toy_correctly() {
        let (graph, data, split) = clique_instance();
        let pred = bgcn_predict(&graph, &data, &split, &fast_config(5)).unwrap();
        assert_eq!(classify(&pred), data.labels());
    }

    #[test]
    fn posterior_is_the_mean_of_stored_sample_outputs() {
        let (graph, data, split) = clique_instance();
        let mut cfg = fast_config(7);
        cfg.keep_sample_outputs = true;
        let pred = bgcn_predict(&graph, &data, &split, &cfg).unwrap();
        // Recompute the average in the same (v, i, s) order; the result must
        // be bitwise identical.
        let mut total: Array2<f64> = Array2::zeros(pred.probs().dim());
        let mut count = 0usize;
        for diag in &pred.meta.samples {
            let mut job_sum: Array2<f64> = Array2::zeros(pred.probs().dim());
            for out in diag.outputs.as_ref().unwrap() {
                job_sum += out.probs();
            }
            total += &job_sum;
            count += diag.outputs.as_ref().unwrap().len();
        }
        let mean = total / count as f64;
        assert_eq!(mean, *pred.probs());
    }

    #[test]
    fn same_seed_same_posterior_different_seed_different() {
        let (graph, data, split) = clique_instance();
        let a = bgcn_predict(&graph, &data, &split, &fast_config(11)).unwrap();
        let b = bgcn_predict(&graph, &data, &split, &fast_config(11)).unwrap();
        assert_eq!(a.probs(), b.probs());
        let c = bgcn_predict(&graph, &data, &split, &fast_config(12)).unwrap();
        assert_ne!(a.probs(), c.probs());
    }

    #[test]
    fn classify_breaks_ties_toward_lowest_index() {
        let pred = PosteriorPrediction {
            probs: ndarray::array![[0.2, 0.5, 0.3], [0.5, 0.5, 0.0], [0.25, 0.25, 0.25]],
            meta: PosteriorMeta {
                config: BgcnConfig::new(0),
                base_train_loss: 0.0,
                base_predictions: vec![],
                samples: vec![],
            },
        };
        assert_eq!(classify(&pred), vec![1, 0, 0]);
    }

    #[test]
    fn diverging_base_training_propagates() {
        let (graph, _, split) = clique_instance();
        let features = CsrMatrix::from_triplets(8, 2, vec![(0, 0, f64::NAN), (4, 1, 1.0)]).unwrap();
        let data = NodeData::new(features, vec![0, 0, 0, 0, 1, 1, 1, 1], 2).unwrap();
        let mut cfg = fast_config(1);
        cfg.gcnn.dropout_rate = 0.0;
        assert!(bgcn_predict(&graph, &data, &split, &cfg).is_err());
    }
}
