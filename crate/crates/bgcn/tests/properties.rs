//! Property tests: sparse implementations against dense reference oracles,
//! structural invariants, and distributional behaviour of the samplers.

#![allow(clippy::needless_range_loop)]

mod support;

use bgcn::copying::{sample_zeta, ClassPartition, CopyingConfig};
use bgcn::data::{make_split, SplitMode};
use bgcn::gcnn::{
    evaluation_loss, forward, mc_dropout_predict, train, DropoutMasks, GcnnParams, Hyperparams,
};
use bgcn::graph::{normalized_adjacency, Graph};
use bgcn::posterior::{bgcn_predict, BgcnConfig};
use bgcn::rng::SplitMix64;
use bgcn::synth::{self, SynthConfig};
use ndarray::Array2;
use proptest::prelude::*;

use support::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The sparse renormalized operator equals the dense reference
    /// entrywise to 1e-12 for graphs up to 32 nodes.
    #[test]
    fn operator_matches_dense_reference(seed in any::<u64>(), n in 1usize..=32) {
        let mut rng = SplitMix64::new(seed);
        let (graph, edges) = random_graph(n, 0.2, &mut rng);
        let op = normalized_adjacency(&graph);
        let reference = dense_normalized_adjacency(n, &edges);
        for i in 0..n {
            for j in 0..n {
                prop_assert!((op.entry(i, j) - reference[i][j]).abs() <= 1e-12);
            }
        }
    }

    /// Exact symmetry, entries in (0, 1], and the support structure of the
    /// operator: nonzero exactly on the diagonal and on edges.
    #[test]
    fn operator_structure(seed in any::<u64>(), n in 1usize..=24) {
        let mut rng = SplitMix64::new(seed);
        let (graph, _) = random_graph(n, 0.25, &mut rng);
        let op = normalized_adjacency(&graph);
        for i in 0..n {
            prop_assert!(op.entry(i, i) > 0.0);
            for j in 0..n {
                let v = op.entry(i, j);
                prop_assert_eq!(v, op.entry(j, i));
                prop_assert!((0.0..=1.0).contains(&v));
                if i != j {
                    prop_assert_eq!(v != 0.0, graph.has_edge(i, j));
                }
            }
        }
    }

    /// Forward pass equals the dense straight-line reference to 1e-12,
    /// with and without dropout masks.
    #[test]
    fn forward_matches_dense_reference(seed in any::<u64>()) {
        let mut rng = SplitMix64::new(seed);
        let n = 2 + rng.below(7);
        let d = 1 + rng.below(5);
        let h = 1 + rng.below(4);
        let k = 1 + rng.below(3);
        let (graph, edges) = random_graph(n, 0.4, &mut rng);
        let features = random_features(n, d, 0.6, &mut rng);
        let params = random_params(d, h, k, &mut rng);
        let op = normalized_adjacency(&graph);
        let ahat = dense_normalized_adjacency(n, &edges);
        let w0 = dense_from_ndarray(&params.w0);
        let w1 = dense_from_ndarray(&params.w1);

        let plain = forward(&params, &op, &features, None).unwrap();
        let reference = dense_gcnn_forward(&ahat, &features, &w0, &w1, None);
        prop_assert!(max_abs_diff_dense(&reference, plain.probs()) <= 1e-12);

        let rate = 0.3;
        let masks = DropoutMasks::sample(&features, h, rate, &mut rng);
        let masked = forward(&params, &op, &features, Some(&masks)).unwrap();
        let spec = DenseMaskSpec {
            input_keep: &masks.input_keep,
            hidden_keep: &masks.hidden_keep,
            rate,
        };
        let masked_reference = dense_gcnn_forward(&ahat, &features, &w0, &w1, Some(&spec));
        prop_assert!(max_abs_diff_dense(&masked_reference, masked.probs()) <= 1e-12);
    }

    /// Relabeling nodes by a permutation and permuting the inputs
    /// consistently permutes the output rows (1e-12, dropout disabled,
    /// shared weights).
    #[test]
    fn forward_is_permutation_equivariant(seed in any::<u64>()) {
        let mut rng = SplitMix64::new(seed);
        let n = 3 + rng.below(6);
        let d = 1 + rng.below(4);
        let (graph, _) = random_graph(n, 0.35, &mut rng);
        let features = random_features(n, d, 0.7, &mut rng);
        let labels = vec![0usize; n];
        let params = random_params(d, 3, 2, &mut rng);
        let op = normalized_adjacency(&graph);
        let base = forward(&params, &op, &features, None).unwrap();

        let mut perm: Vec<usize> = (0..n).collect();
        rng.shuffle(&mut perm);
        let (pg, pf, _) = permute_instance(&graph, &features, &labels, &perm);
        let pop = normalized_adjacency(&pg);
        let permuted = forward(&params, &pop, &pf, None).unwrap();

        for i in 0..n {
            for c in 0..2 {
                prop_assert!(
                    (base.probs()[[i, c]] - permuted.probs()[[perm[i], c]]).abs() <= 1e-12
                );
            }
        }
    }

    /// Zeta entries never leave their class, for random partitions.
    #[test]
    fn zeta_respects_the_partition(seed in any::<u64>(), n in 1usize..40, k in 1usize..5) {
        let mut rng = SplitMix64::new(seed);
        let predicted: Vec<usize> = (0..n).map(|_| rng.below(k)).collect();
        let partition = ClassPartition::from_predictions(predicted.clone(), k).unwrap();
        let zeta = sample_zeta(&partition, rng.next_u64());
        for (j, &m) in zeta.as_slice().iter().enumerate() {
            prop_assert_eq!(predicted[j], predicted[m]);
        }
    }

    /// Class sets are disjoint and cover every node.
    #[test]
    fn partition_is_disjoint_and_total(seed in any::<u64>(), n in 1usize..60, k in 1usize..6) {
        let mut rng = SplitMix64::new(seed);
        let predicted: Vec<usize> = (0..n).map(|_| rng.below(k)).collect();
        let partition = ClassPartition::from_predictions(predicted, k).unwrap();
        let mut all: Vec<usize> = partition.sets().iter().flatten().copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
    }

    /// Splits are disjoint with exact per-class train counts, and the test
    /// set is the complement in random mode.
    #[test]
    fn split_counts_and_disjointness(seed in any::<u64>(), per_class in 1usize..4) {
        let n = 40;
        let k = 4;
        let mut rng = SplitMix64::new(seed);
        let mut labels: Vec<usize> = (0..n).map(|i| i % k).collect();
        rng.shuffle(&mut labels);
        let features = bgcn::sparse::CsrMatrix::from_triplets(n, 1, vec![(0, 0, 1.0)]).unwrap();
        let data = bgcn::data::NodeData::new(features, labels.clone(), k).unwrap();
        let split = make_split(&data, SplitMode::Random, per_class, rng.next_u64(), None).unwrap();
        prop_assert_eq!(split.train.len(), per_class * k);
        let mut counts = vec![0usize; k];
        for &t in &split.train {
            counts[labels[t]] += 1;
        }
        prop_assert!(counts.iter().all(|&c| c == per_class));
        prop_assert_eq!(split.train.len() + split.test.len(), n);
        for &t in &split.train {
            prop_assert!(!split.test.contains(&t));
        }
    }

    /// Replacing a row and then restoring the stored original row returns
    /// the original graph exactly when the copy introduced no foreign
    /// edges; otherwise the introduced edges persist and restoring changes
    /// nothing further.
    #[test]
    fn replace_neighbors_round_trip(seed in any::<u64>(), n in 3usize..16) {
        let mut rng = SplitMix64::new(seed);
        let (graph, _) = random_graph(n, 0.3, &mut rng);
        let j = rng.below(n);
        let q = rng.below(n);
        prop_assume!(j != q);
        let nj = graph.neighbors(j).unwrap().to_vec();
        let nq = graph.neighbors(q).unwrap().to_vec();
        prop_assume!(!nq.contains(&j));

        let replaced = graph.replace_neighbors(j, q).unwrap();
        let restored = replaced.replace_row(j, &nj).unwrap();
        let conflict_free = nq.iter().all(|k| nj.contains(k));
        if conflict_free {
            prop_assert_eq!(&restored, &graph);
        } else {
            prop_assert_eq!(&restored, &replaced);
        }
    }
}

#[test]
fn exact_equivariance_on_an_instance_with_two_term_row_sums() {
    // Rows of the operator have at most two entries (one edge plus an
    // isolated node), so every row reduction is a single commutative
    // addition and the permuted output must match bitwise.
    let graph = Graph::from_edges(3, &[(0, 1)]).unwrap();
    let mut rng = SplitMix64::new(17);
    let features = random_features(3, 3, 0.8, &mut rng);
    let params = random_params(3, 4, 3, &mut rng);
    let op = normalized_adjacency(&graph);
    let base = forward(&params, &op, &features, None).unwrap();

    let perm = vec![2, 0, 1];
    let (pg, pf, _) = permute_instance(&graph, &features, &[0, 0, 0], &perm);
    let pop = normalized_adjacency(&pg);
    let permuted = forward(&params, &pop, &pf, None).unwrap();
    for i in 0..3 {
        for c in 0..3 {
            assert_eq!(
                base.probs()[[i, c]].to_bits(),
                permuted.probs()[[perm[i], c]].to_bits()
            );
        }
    }
}

#[test]
fn random_splits_differ_across_ten_seeds() {
    let cfg = SynthConfig::default();
    let (_, data) = synth::generate(&cfg).unwrap();
    let mut distinct = std::collections::HashSet::new();
    for seed in 0..10u64 {
        let split = make_split(&data, SplitMode::Random, 5, seed, None).unwrap();
        distinct.insert(split.train);
    }
    assert!(
        distinct.len() >= 9,
        "only {} distinct splits",
        distinct.len()
    );
}

#[test]
fn training_reduces_the_evaluation_loss() {
    for (name, cfg) in [
        ("default", SynthConfig::default()),
        (
            "three-class",
            SynthConfig {
                n_nodes: 240,
                n_classes: 3,
                n_features: 48,
                seed: 9,
                ..SynthConfig::default()
            },
        ),
    ] {
        let (graph, data) = synth::generate(&cfg).unwrap();
        let op = normalized_adjacency(&graph);
        let split = make_split(&data, SplitMode::Random, 5, 3, None).unwrap();
        let hyper = Hyperparams::default();
        let seed = 11;
        let init = GcnnParams::init(
            data.n_features(),
            hyper.hidden_units,
            data.n_classes(),
            seed,
        );
        let trained = train(
            &op,
            data.features(),
            data.labels(),
            data.n_classes(),
            &split.train,
            &hyper,
            seed,
        )
        .unwrap();
        let loss_before = evaluation_loss(
            &init,
            &op,
            data.features(),
            data.labels(),
            &split.train,
            hyper.weight_decay,
        )
        .unwrap();
        let loss_after = evaluation_loss(
            &trained,
            &op,
            data.features(),
            data.labels(),
            &split.train,
            hyper.weight_decay,
        )
        .unwrap();
        assert!(
            loss_after < loss_before,
            "{name}: loss went {loss_before} -> {loss_after}"
        );
    }
}

#[test]
fn prediction_variance_grows_with_dropout_rate() {
    let (graph, data) = synth::generate(&SynthConfig::default()).unwrap();
    let op = normalized_adjacency(&graph);
    let split = make_split(&data, SplitMode::Random, 5, 1, None).unwrap();
    let hyper = Hyperparams {
        epochs: 100,
        ..Hyperparams::default()
    };
    let params = train(
        &op,
        data.features(),
        data.labels(),
        data.n_classes(),
        &split.train,
        &hyper,
        7,
    )
    .unwrap();

    let mean_entry_variance = |rate: f64| {
        let samples = mc_dropout_predict(&params, &op, data.features(), rate, 100, 5).unwrap();
        let dim = samples[0].probs().dim();
        let mut mean = Array2::<f64>::zeros(dim);
        for s in &samples {
            mean += s.probs();
        }
        mean /= samples.len() as f64;
        let mut var = Array2::<f64>::zeros(dim);
        for s in &samples {
            let d = s.probs() - &mean;
            var += &(&d * &d);
        }
        var.sum() / (samples.len() as f64 * (dim.0 * dim.1) as f64)
    };

    let low = mean_entry_variance(0.1);
    let high = mean_entry_variance(0.5);
    assert!(
        high > low,
        "variance did not grow with dropout: {low} vs {high}"
    );
}

#[test]
fn posterior_variance_shrinks_with_more_samples() {
    let cfg = SynthConfig {
        n_nodes: 60,
        n_classes: 2,
        n_features: 16,
        words_per_node: 4,
        seed: 5,
        ..SynthConfig::default()
    };
    let (graph, data) = synth::generate(&cfg).unwrap();
    let split = make_split(&data, SplitMode::Random, 3, 2, None).unwrap();

    let posterior = |master: u64, v: usize, g: usize| {
        let mut cfg = BgcnConfig::new(master);
        cfg.v_samples = v;
        cfg.g_samples = g;
        cfg.w_samples = 1;
        cfg.copying = CopyingConfig::new(0.2).unwrap();
        cfg.gcnn.epochs = 50;
        bgcn_predict(&graph, &data, &split, &cfg).unwrap()
    };

    let mean_variance = |v: usize, g: usize| {
        let runs: Vec<_> = (0..10).map(|m| posterior(1000 + m, v, g)).collect();
        let dim = runs[0].probs().dim();
        let mut mean = Array2::<f64>::zeros(dim);
        for r in &runs {
            mean += r.probs();
        }
        mean /= runs.len() as f64;
        let mut var = Array2::<f64>::zeros(dim);
        for r in &runs {
            let d = r.probs() - &mean;
            var += &(&d * &d);
        }
        var.sum() / (runs.len() as f64 * (dim.0 * dim.1) as f64)
    };

    let few = mean_variance(1, 1);
    let many = mean_variance(2, 2);
    assert!(
        many < few,
        "4x samples did not reduce posterior variance: {few} vs {many}"
    );
}

#[test]
fn posterior_is_identical_across_thread_pool_sizes() {
    let (graph, data, split) = two_cliques();
    let mut cfg = BgcnConfig::new(31);
    cfg.v_samples = 2;
    cfg.g_samples = 3;
    cfg.w_samples = 2;
    cfg.copying = CopyingConfig::new(0.3).unwrap();
    cfg.gcnn.epochs = 30;

    let run_in_pool = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| bgcn_predict(&graph, &data, &split, &cfg).unwrap())
    };
    let serial = run_in_pool(1);
    let parallel = run_in_pool(4);
    assert_eq!(serial.probs(), parallel.probs());

    let mut other = cfg.clone();
    other.seed = 32;
    let different = bgcn_predict(&graph, &data, &split, &other).unwrap();
    assert_ne!(serial.probs(), different.probs());
}
