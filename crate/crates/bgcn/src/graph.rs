//! Sparse undirected graphs and the renormalized adjacency operator.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Immutable undirected graph over nodes `0..n`, stored as a symmetric
/// CSR adjacency pattern with sorted neighbor lists.
///
/// Invariants: no self-loops, no duplicate edges, every stored arc has its
/// reverse stored as well.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
}

impl Graph {
    /// Build from an edge list. Input arcs may appear in either or both
    /// directions; duplicates are collapsed and self-loops dropped.
    pub fn from_edges(n_nodes: usize, edges: &[(usize, usize)]) -> Result<Self> {
        for &(u, v) in edges {
            Self::check_index(u, n_nodes)?;
            Self::check_index(v, n_nodes)?;
        }
        let arcs = edges
            .iter()
            .filter(|&&(u, v)| u != v)
            .flat_map(|&(u, v)| [(u, v), (v, u)]);
        Ok(Self::assemble(n_nodes, arcs))
    }

    /// Build from per-node neighbor rows, symmetrizing by union: the result
    /// has an edge {u, v} whenever either row lists the other endpoint.
    /// Entries equal to the row's own node are dropped. Two counting
    /// passes plus a per-row sort keep this linear in nodes plus entries.
    pub(crate) fn from_rows<'a, I>(n_nodes: usize, rows: I) -> Self
    where
        I: IntoIterator<Item = &'a [usize]> + Clone,
    {
        let mut counts = vec![0usize; n_nodes + 1];
        for (j, row) in rows.clone().into_iter().enumerate() {
            for &k in row {
                if k != j {
                    counts[j + 1] += 1;
                    counts[k + 1] += 1;
                }
            }
        }
        for i in 0..n_nodes {
            counts[i + 1] += counts[i];
        }
        let row_ptr = counts.clone();
        let mut offsets = counts;
        let mut col_idx = vec![0usize; *row_ptr.last().unwrap()];
        for (j, row) in rows.into_iter().enumerate() {
            for &k in row {
                if k != j {
                    col_idx[offsets[j]] = k;
                    offsets[j] += 1;
                    col_idx[offsets[k]] = j;
                    offsets[k] += 1;
                }
            }
        }
        Self::sort_dedup(n_nodes, row_ptr, col_idx)
    }

    fn assemble<I>(n: usize, arcs: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let arcs: Vec<(usize, usize)> = arcs.into_iter().collect();
        let mut row_ptr = vec![0usize; n + 1];
        for &(u, _) in &arcs {
            row_ptr[u + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let mut col_idx = vec![0usize; arcs.len()];
        let mut offsets = row_ptr.clone();
        for (u, v) in arcs {
            col_idx[offsets[u]] = v;
            offsets[u] += 1;
        }
        Self::sort_dedup(n, row_ptr, col_idx)
    }

    /// Sort each filled row and drop duplicate entries, rebuilding the
    /// pointers.
    fn sort_dedup(n: usize, row_ptr: Vec<usize>, mut col_idx: Vec<usize>) -> Self {
        let mut dedup_cols = Vec::with_capacity(col_idx.len());
        let mut dedup_ptr = vec![0usize; n + 1];
        for i in 0..n {
            let row = &mut col_idx[row_ptr[i]..row_ptr[i + 1]];
            row.sort_unstable();
            let mut prev = usize::MAX;
            for &k in row.iter() {
                if k != prev {
                    dedup_cols.push(k);
                    prev = k;
                }
            }
            dedup_ptr[i + 1] = dedup_cols.len();
        }
        Self {
            n,
            row_ptr: dedup_ptr,
            col_idx: dedup_cols,
        }
    }

    fn check_index(index: usize, n_nodes: usize) -> Result<()> {
        if index >= n_nodes {
            Err(Error::NodeOutOfRange { index, n_nodes })
        } else {
            Ok(())
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    /// Number of undirected edges.
    pub fn n_edges(&self) -> usize {
        self.col_idx.len() / 2
    }

    /// Sorted neighbors of `node`, excluding the node itself.
    pub fn neighbors(&self, node: usize) -> Result<&[usize]> {
        Self::check_index(node, self.n)?;
        Ok(&self.col_idx[self.row_ptr[node]..self.row_ptr[node + 1]])
    }

    /// Number of neighbors of `node`.
    pub fn degree(&self, node: usize) -> Result<usize> {
        Self::check_index(node, self.n)?;
        Ok(self.row_ptr[node + 1] - self.row_ptr[node])
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n
            && v < self.n
            && self.col_idx[self.row_ptr[u]..self.row_ptr[u + 1]]
                .binary_search(&v)
                .is_ok()
    }

    /// Undirected edges as (u, v) pairs with u < v, in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            self.col_idx[self.row_ptr[u]..self.row_ptr[u + 1]]
                .iter()
                .filter(move |&&v| u < v)
                .map(move |&v| (u, v))
        })
    }

    /// Replace the neighbor row of `target` with the neighbor set of
    /// `source`, then re-symmetrize by union. A self-loop arising from the
    /// copy (when `source` is adjacent to `target`) is discarded. Edges of
    /// `target` that other rows still list survive the union, and
    /// `target == source` leaves the graph unchanged.
    pub fn replace_neighbors(&self, target: usize, source: usize) -> Result<Graph> {
        Self::check_index(source, self.n)?;
        if target == source {
            Self::check_index(target, self.n)?;
            return Ok(self.clone());
        }
        let new_row = self.neighbors(source)?.to_vec();
        self.replace_row(target, &new_row)
    }

    /// Replace the neighbor row of `target` with an explicit node list and
    /// re-symmetrize by union (the primitive behind
    /// [`replace_neighbors`](Self::replace_neighbors)). Entries equal to
    /// `target` are dropped.
    pub fn replace_row(&self, target: usize, new_row: &[usize]) -> Result<Graph> {
        Self::check_index(target, self.n)?;
        for &k in new_row {
            Self::check_index(k, self.n)?;
        }
        Ok(Graph::from_rows(
            self.n,
            (0..self.n).map(|j| {
                if j == target {
                    new_row
                } else {
                    &self.col_idx[self.row_ptr[j]..self.row_ptr[j + 1]]
                }
            }),
        ))
    }
}

/// The symmetric operator `D̃^{-1/2} (A + I) D̃^{-1/2}` where `D̃` is the
/// degree matrix of `A + I`. Entry (i, j) is nonzero iff i = j or {i, j}
/// is an edge; every entry lies in (0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedOperator {
    matrix: CsrMatrix,
}

impl NormalizedOperator {
    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    /// `Â · dense`.
    pub fn mul_dense(&self, dense: &Array2<f64>) -> Array2<f64> {
        self.matrix.mul_dense(dense)
    }
}

/// Compute the normalized adjacency operator of a graph. Isolated nodes
/// come out as a 1.0 diagonal entry (their augmented degree is 1).
#[allow(clippy::needless_range_loop)]
pub fn normalized_adjacency(graph: &Graph) -> NormalizedOperator {
    let n = graph.n_nodes();
    let deg_tilde: Vec<u64> = graph
        .row_ptr
        .windows(2)
        .map(|w| (w[1] - w[0] + 1) as u64)
        .collect();
    // 1/sqrt(d̃_i · d̃_j) with the integer product keeps the matrix exactly
    // symmetric and makes perfect-square products (regular graphs, the
    // diagonal) come out exact.
    let entry = |i: usize, j: usize| 1.0 / ((deg_tilde[i] * deg_tilde[j]) as f64).sqrt();

    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::with_capacity(graph.col_idx.len() + n);
    let mut values = Vec::with_capacity(graph.col_idx.len() + n);
    row_ptr.push(0);
    for i in 0..n {
        let row = &graph.col_idx[graph.row_ptr[i]..graph.row_ptr[i + 1]];
        // Splice the diagonal into the sorted neighbor list.
        let diag_at = row.partition_point(|&k| k < i);
        for &k in &row[..diag_at] {
            col_idx.push(k);
            values.push(entry(i, k));
        }
        col_idx.push(i);
        values.push(1.0 / deg_tilde[i] as f64);
        for &k in &row[diag_at..] {
            col_idx.push(k);
            values.push(entry(i, k));
        }
        row_ptr.push(col_idx.len());
    }
    NormalizedOperator {
        matrix: CsrMatrix::from_sorted_rows(n, n, row_ptr, col_idx, values),
    }
}
