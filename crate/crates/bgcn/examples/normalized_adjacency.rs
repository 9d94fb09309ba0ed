//! Build a small sparse graph and inspect the degree-normalized
//! propagation operator, then copy one node's neighborhood onto another.

use bgcn::{normalized_adjacency, Graph};

fn main() -> bgcn::Result<()> {
    // A path 0-1-2 plus a star center at 3.
    let graph = Graph::from_edges(6, &[(0, 1), (1, 2), (3, 4), (3, 5), (3, 0)])?;
    println!(
        "graph: {} nodes, {} edges, degrees {:?}",
        graph.n_nodes(),
        graph.n_edges(),
        (0..6).map(|i| graph.degree(i).unwrap()).collect::<Vec<_>>()
    );

    let op = normalized_adjacency(&graph);
    println!("\nnormalized operator (self-loops added, rows scaled by 1/sqrt(deg+1)):");
    for i in 0..graph.n_nodes() {
        let row: Vec<String> = (0..graph.n_nodes())
            .map(|j| format!("{:6.3}", op.entry(i, j)))
            .collect();
        println!("  [{}]", row.join(", "));
    }

    // Node 2 takes over the neighbor set of the star center 3.
    let copied = graph.replace_neighbors(2, 3)?;
    println!(
        "\nafter copying node 3's neighborhood onto node 2: neighbors(2) = {:?}",
        copied.neighbors(2)?
    );
    println!("(the old edge 1-2 survives because node 1's row still lists node 2)");
    Ok(())
}
