//! The node-copying generative model step by step: class partition,
//! copy-source sampling, and random graphs at different keep
//! probabilities.

use bgcn::synth::{generate, SynthConfig};
use bgcn::{sample_graph, sample_zeta, ClassPartition, CopyingConfig, Graph};

/// Number of undirected edges present in exactly one of the two graphs.
fn edge_edit_distance(a: &Graph, b: &Graph) -> usize {
    let ea: std::collections::HashSet<_> = a.edges().collect();
    let eb: std::collections::HashSet<_> = b.edges().collect();
    ea.symmetric_difference(&eb).count()
}

fn main() -> bgcn::Result<()> {
    let (graph, data) = generate(&SynthConfig {
        n_nodes: 120,
        n_classes: 3,
        n_features: 24,
        seed: 4,
        ..SynthConfig::default()
    })?;

    // Here the true labels stand in for a base classifier's predictions.
    let partition = ClassPartition::from_predictions(data.labels().to_vec(), data.n_classes())?;
    println!(
        "partition sizes: {:?}",
        partition.sets().iter().map(Vec::len).collect::<Vec<_>>()
    );

    let zeta = sample_zeta(&partition, 11);
    let self_assigned = zeta
        .as_slice()
        .iter()
        .enumerate()
        .filter(|&(j, &m)| j == m)
        .count();
    println!(
        "zeta drawn: {} of {} nodes picked themselves as copy source",
        self_assigned,
        zeta.len()
    );

    println!(
        "\nedit distance to the observed graph ({} edges):",
        graph.n_edges()
    );
    for epsilon in [0.9, 0.5, 0.1, 0.01] {
        let cfg = CopyingConfig::new(epsilon)?;
        let mut distances = Vec::new();
        for seed in 0..5 {
            let sampled = sample_graph(&graph, &zeta, &cfg, seed)?;
            distances.push(edge_edit_distance(&graph, &sampled));
        }
        println!("  epsilon {epsilon:4}: edits over 5 draws = {distances:?}");
    }
    println!("(small epsilon means most rows are copied, so samples vary more)");
    Ok(())
}
