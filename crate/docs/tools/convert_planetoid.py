#!/usr/bin/env python3
"""Convert a Planetoid-format citation dataset to the TSV exchange format.

Input: the eight `ind.<name>.{x,y,tx,ty,allx,ally,graph,test.index}` files
from the standard public distribution of Cora / Citeseer / Pubmed.

Output, written to --out:
  edges.tsv        one `src<TAB>dst` line per listed arc (the loader
                   symmetrizes, collapses duplicates, drops self-loops)
  features.tsv     `node<TAB>feature<TAB>value` nonzeros (raw counts; the
                   loader applies L1 row normalization)
  labels.tsv       `node<TAB>class` for every node
  fixed_split.tsv  the canonical partition: the published training nodes
                   grouped by class, preserving their original order within
                   each class (so "the first k labels of each class" is well
                   defined), followed by the test nodes

Usage:
  python3 convert_planetoid.py --input /path/to/planetoid/data \
      --name cora --out data/cora
"""

import argparse
import pickle
import sys
from pathlib import Path

import numpy as np
import scipy.sparse as sp


def load_pickle(path: Path):
    with open(path, "rb") as fh:
        return pickle.load(fh, encoding="latin1")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--input", required=True, type=Path,
                        help="directory containing the ind.<name>.* files")
    parser.add_argument("--name", required=True,
                        help="dataset name, e.g. cora, citeseer, pubmed")
    parser.add_argument("--out", required=True, type=Path,
                        help="output dataset directory")
    args = parser.parse_args()

    def part(suffix: str) -> Path:
        return args.input / f"ind.{args.name}.{suffix}"

    x, y, tx, ty, allx, ally, graph = (
        load_pickle(part(s)) for s in ("x", "y", "tx", "ty", "allx", "ally", "graph")
    )
    with open(part("test.index")) as fh:
        test_idx = [int(line.strip()) for line in fh if line.strip()]
    test_range = np.sort(test_idx)

    features = sp.vstack((sp.csr_matrix(allx), sp.csr_matrix(tx))).tolil()
    labels_onehot = np.vstack((ally, ty))

    if args.name == "citeseer":
        # Some isolated test nodes are absent from test.index; give them
        # zero feature rows and zero label rows at their true positions.
        full = np.arange(min(test_idx), max(test_idx) + 1)
        ext_features = sp.lil_matrix((len(full), features.shape[1]))
        ext_features[test_range - min(test_idx), :] = features[
            allx.shape[0]: allx.shape[0] + len(test_idx), :
        ]
        features = sp.vstack((sp.csr_matrix(allx), sp.csr_matrix(ext_features))).tolil()
        ext_labels = np.zeros((len(full), labels_onehot.shape[1]))
        ext_labels[test_range - min(test_idx), :] = labels_onehot[
            ally.shape[0]: ally.shape[0] + len(test_idx), :
        ]
        labels_onehot = np.vstack((ally, ext_labels))
        test_range = full

    # Undo the shuffling of the test block: row `test_idx[i]` must hold the
    # data of the i-th test instance.
    features[test_idx, :] = features[test_range, :]
    labels_onehot[test_idx, :] = labels_onehot[test_range, :]
    features = features.tocsr()

    n_nodes = labels_onehot.shape[0]
    # Zero one-hot rows (isolated citeseer test nodes) fall back to class 0.
    labels = labels_onehot.argmax(axis=1)

    n_train = y.shape[0]
    n_classes = labels_onehot.shape[1]

    args.out.mkdir(parents=True, exist_ok=True)

    with open(args.out / "edges.tsv", "w") as fh:
        for src in sorted(graph):
            for dst in graph[src]:
                if 0 <= dst < n_nodes and src < n_nodes:
                    fh.write(f"{src}\t{dst}\n")

    coo = features.tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(args.out / "features.tsv", "w") as fh:
        for i in order:
            if coo.data[i] != 0:
                fh.write(f"{coo.row[i]}\t{coo.col[i]}\t{coo.data[i]:.10g}\n")

    with open(args.out / "labels.tsv", "w") as fh:
        for node in range(n_nodes):
            fh.write(f"{node}\t{labels[node]}\n")

    with open(args.out / "fixed_split.tsv", "w") as fh:
        for k in range(n_classes):
            for node in range(n_train):
                if labels[node] == k:
                    fh.write(f"{node}\ttrain\n")
        for node in sorted(test_range.tolist()):
            fh.write(f"{node}\ttest\n")

    per_class = np.bincount(labels[:n_train], minlength=n_classes)
    print(
        f"{args.name}: {n_nodes} nodes, {n_classes} classes, "
        f"{features.nnz} feature nonzeros, {n_train} train nodes "
        f"({'/'.join(map(str, per_class))} per class), {len(test_range)} test nodes"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
