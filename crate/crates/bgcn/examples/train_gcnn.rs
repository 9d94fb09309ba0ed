//! Train the two-layer graph convolutional network on a synthetic
//! citation-style dataset and report train/test accuracy.

use bgcn::bench::evaluate_on_test;
use bgcn::gcnn::{argmax_rows, evaluation_loss};
use bgcn::synth::{generate, SynthConfig};
use bgcn::{forward, make_split, normalized_adjacency, train, GcnnParams, Hyperparams, SplitMode};

fn main() -> bgcn::Result<()> {
    let (graph, data) = generate(&SynthConfig::default())?;
    let split = make_split(&data, SplitMode::Random, 5, 42, None)?;
    println!(
        "dataset: {} nodes, {} edges, {} classes, {} features; {} train / {} test",
        graph.n_nodes(),
        graph.n_edges(),
        data.n_classes(),
        data.n_features(),
        split.train.len(),
        split.test.len()
    );

    let op = normalized_adjacency(&graph);
    let hyper = Hyperparams::default();
    let seed = 7;

    let init = GcnnParams::init(
        data.n_features(),
        hyper.hidden_units,
        data.n_classes(),
        seed,
    );
    let loss_before = evaluation_loss(
        &init,
        &op,
        data.features(),
        data.labels(),
        &split.train,
        hyper.weight_decay,
    )?;

    let params = train(
        &op,
        data.features(),
        data.labels(),
        data.n_classes(),
        &split.train,
        &hyper,
        seed,
    )?;
    let loss_after = evaluation_loss(
        &params,
        &op,
        data.features(),
        data.labels(),
        &split.train,
        hyper.weight_decay,
    )?;
    println!(
        "training loss: {loss_before:.4} at initialization -> {loss_after:.4} after {} epochs",
        hyper.epochs
    );

    let predictions = argmax_rows(&forward(&params, &op, data.features(), None)?.probs().view());
    let train_correct = split
        .train
        .iter()
        .filter(|&&i| predictions[i] == data.labels()[i])
        .count();
    let (_, test_correct) = evaluate_on_test(&predictions, &data, &split);
    println!(
        "accuracy: train {}/{} ({:.1}%), test {}/{} ({:.1}%)",
        train_correct,
        split.train.len(),
        100.0 * train_correct as f64 / split.train.len() as f64,
        test_correct,
        split.test.len(),
        100.0 * test_correct as f64 / split.test.len() as f64
    );
    Ok(())
}
