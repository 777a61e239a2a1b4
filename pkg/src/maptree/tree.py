"""Decision trees: prediction, metrics, JSON serialization, the solution-graph
bijection, and a small greedy baseline.

A tree is a recursive structure of ``Internal`` and ``Leaf`` nodes wrapped in a
``DecisionTree`` that remembers the feature count.  The left child of an
internal node is the feature-value-0 branch.  Leaves store training label
counts; predictions are the Beta posterior mean, never a bare vote, so
predicted probabilities stay strictly inside (0, 1).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Union

import numpy as np

from ._bits import count_valid_splits, popcount, popcount_rows

TREE_FORMAT = "maptree-tree-v1"


class SchemaError(ValueError):
    """A tree document violates the maptree-tree-v1 schema; message carries the path."""


@dataclass(frozen=True)
class Leaf:
    c1: int
    c0: int


@dataclass(frozen=True)
class Internal:
    feature: int
    left: "Node"   # feature value 0
    right: "Node"  # feature value 1


Node = Union[Leaf, Internal]


@dataclass(frozen=True)
class DecisionTree:
    root: Node
    n_features: int


def iter_nodes(tree: DecisionTree) -> Iterator[Node]:
    stack = [tree.root]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, Internal):
            stack.append(node.right)
            stack.append(node.left)


def n_nodes(tree: DecisionTree) -> int:
    """Total node count, internal plus leaf."""
    return sum(1 for _ in iter_nodes(tree))


def n_leaves(tree: DecisionTree) -> int:
    return sum(1 for node in iter_nodes(tree) if isinstance(node, Leaf))


def depth(tree: DecisionTree) -> int:
    def rec(node: Node) -> int:
        if isinstance(node, Leaf):
            return 0
        return 1 + max(rec(node.left), rec(node.right))

    return rec(tree.root)


# ---------------------------------------------------------------------------
# Prediction


def _leaf_proba(leaf: Leaf, params) -> float:
    # Beta posterior mean; pseudocounts keep this strictly inside (0, 1).
    return (leaf.c1 + params.rho1) / (leaf.c1 + leaf.c0 + params.rho1 + params.rho0)


def _route(node: Node, sample) -> Leaf:
    while isinstance(node, Internal):
        node = node.right if sample[node.feature] else node.left
    return node


def predict_proba(tree: DecisionTree, sample, params) -> float:
    """Probability of label 1 for one F-length 0/1 feature vector."""
    if len(sample) != tree.n_features:
        raise ValueError(f"sample has {len(sample)} features, tree expects {tree.n_features}")
    return _leaf_proba(_route(tree.root, sample), params)


def predict(tree: DecisionTree, sample, params) -> int:
    # Threshold at 0.5, ties to label 1.
    return 1 if predict_proba(tree, sample, params) >= 0.5 else 0


def predict_proba_batch(tree: DecisionTree, features: np.ndarray, params) -> np.ndarray:
    """Vectorized predict_proba over the rows of an (n, F) 0/1 matrix."""
    features = np.asarray(features)
    if features.ndim != 2 or features.shape[1] != tree.n_features:
        raise ValueError(f"expected an (n, {tree.n_features}) matrix, got {features.shape}")
    out = np.empty(features.shape[0], dtype=np.float64)

    def rec(node: Node, idx: np.ndarray) -> None:
        if idx.size == 0:
            return
        if isinstance(node, Leaf):
            out[idx] = _leaf_proba(node, params)
            return
        go_right = features[idx, node.feature] != 0
        rec(node.left, idx[~go_right])
        rec(node.right, idx[go_right])

    rec(tree.root, np.arange(features.shape[0]))
    return out


def evaluate(tree: DecisionTree, dataset, params) -> dict:
    """Accuracy, per-sample mean log likelihood, and node count on a dataset.

    Works on the packed representation: the dataset is routed through the tree
    once and each leaf contributes its label counts, so nothing is unpacked.
    """
    if tree.n_features != dataset.n_features:
        raise ValueError(
            f"tree has {tree.n_features} features, dataset has {dataset.n_features}"
        )
    correct = 0
    total_ll = 0.0

    def rec(node: Node, words: np.ndarray, size: int, c1: int) -> None:
        nonlocal correct, total_ll
        if isinstance(node, Leaf):
            p = _leaf_proba(node, params)
            c0 = size - c1
            correct_here = c1 if p >= 0.5 else c0
            correct += correct_here
            total_ll += c1 * math.log(p) + c0 * math.log1p(-p)
            return
        ones = words & dataset.cols[node.feature]
        zeros = words ^ ones
        n1 = popcount(ones)
        c1_right = popcount(ones & dataset.labels)
        rec(node.left, zeros, size - n1, c1 - c1_right)
        rec(node.right, ones, n1, c1_right)

    c1_all = popcount(dataset.labels)
    rec(tree.root, dataset.full_words(), dataset.n_samples, c1_all)
    return {
        "accuracy": correct / dataset.n_samples,
        "mean_log_likelihood": total_ll / dataset.n_samples,
        "n_nodes": n_nodes(tree),
    }


# ---------------------------------------------------------------------------
# Serialization (maptree-tree-v1)


def _node_to_obj(node: Node):
    if isinstance(node, Leaf):
        return {"leaf": {"c1": node.c1, "c0": node.c0}}
    return {
        "split": node.feature,
        "left": _node_to_obj(node.left),
        "right": _node_to_obj(node.right),
    }


def to_document(tree: DecisionTree) -> dict:
    return {
        "format": TREE_FORMAT,
        "n_features": tree.n_features,
        "root": _node_to_obj(tree.root),
    }


def serialize(tree: DecisionTree) -> str:
    """JSON text for the tree document; newline-terminated."""
    return json.dumps(to_document(tree), indent=2) + "\n"


def _require(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise SchemaError(f"{path}: {message}")


def _node_from_obj(obj, path: str) -> Node:
    _require(isinstance(obj, dict), path, "node must be an object")
    if "leaf" in obj:
        _require(set(obj) == {"leaf"}, path, "leaf node must have exactly the 'leaf' key")
        leaf = obj["leaf"]
        _require(isinstance(leaf, dict), path + ".leaf", "must be an object")
        _require(set(leaf) == {"c1", "c0"}, path + ".leaf", "must have exactly c1 and c0")
        for key in ("c1", "c0"):
            value = leaf[key]
            _require(
                isinstance(value, int) and not isinstance(value, bool) and value >= 0,
                f"{path}.leaf.{key}",
                "must be a non-negative integer",
            )
        return Leaf(leaf["c1"], leaf["c0"])
    _require(
        set(obj) == {"split", "left", "right"},
        path,
        "internal node must have exactly split, left, right",
    )
    feature = obj["split"]
    _require(
        isinstance(feature, int) and not isinstance(feature, bool) and feature >= 0,
        path + ".split",
        "must be a non-negative integer",
    )
    return Internal(
        feature,
        _node_from_obj(obj["left"], path + ".left"),
        _node_from_obj(obj["right"], path + ".right"),
    )


def from_document(doc) -> DecisionTree:
    _require(isinstance(doc, dict), "$", "document must be an object")
    _require(doc.get("format") == TREE_FORMAT, "$.format", f"must be {TREE_FORMAT!r}")
    n_features = doc.get("n_features")
    _require(
        isinstance(n_features, int) and not isinstance(n_features, bool) and n_features >= 1,
        "$.n_features",
        "must be a positive integer",
    )
    _require("root" in doc, "$.root", "missing")
    root = _node_from_obj(doc["root"], "$.root")
    tree = DecisionTree(root, n_features)
    for node in iter_nodes(tree):
        if isinstance(node, Internal) and node.feature >= n_features:
            raise SchemaError(f"$: split on feature {node.feature} >= n_features {n_features}")
    return tree


def deserialize(data) -> DecisionTree:
    """Parse a tree document from JSON text or bytes."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"$: not valid JSON ({exc})") from None
    return from_document(doc)


# ---------------------------------------------------------------------------
# Solution-graph bijection
#
# A solution graph is the tree-shaped subgraph picked out of the search graph:
# one record per chosen OR node, either stopping (terminal) or splitting on a
# feature with both branches present.  It carries the per-node quantities the
# cost function needs, so costs can be recomputed without the search.


@dataclass(frozen=True)
class SolutionNode:
    depth: int
    c1: int
    c0: int
    num_valid_splits: int
    split: Optional[tuple[int, "SolutionNode", "SolutionNode"]]


@dataclass(frozen=True)
class SolutionGraph:
    root: SolutionNode
    n_features: int


def solution_to_tree(solution: SolutionGraph) -> DecisionTree:
    def rec(node: SolutionNode) -> Node:
        if node.split is None:
            return Leaf(node.c1, node.c0)
        feature, left, right = node.split
        return Internal(feature, rec(left), rec(right))

    return DecisionTree(rec(solution.root), solution.n_features)


def tree_to_solution(tree: DecisionTree, dataset) -> SolutionGraph:
    """Route the dataset through the tree, recording per-node subproblem data.

    Raises InvalidTreeError when a split is trivial on the dataset, mirroring
    the zero-prior condition.
    """
    from .posterior import InvalidTreeError

    if tree.n_features != dataset.n_features:
        raise InvalidTreeError(
            f"tree has {tree.n_features} features, dataset has {dataset.n_features}"
        )

    def rec(node: Node, words: np.ndarray, size: int, c1: int, d: int) -> SolutionNode:
        nvs = count_valid_splits(dataset.cols, words, size)
        if isinstance(node, Leaf):
            return SolutionNode(d, c1, size - c1, nvs, None)
        if node.feature >= dataset.n_features:
            raise InvalidTreeError(f"split on feature {node.feature} out of range")
        ones = words & dataset.cols[node.feature]
        n1 = popcount(ones)
        if n1 == 0 or n1 == size:
            raise InvalidTreeError(
                f"split on feature {node.feature} at depth {d} leaves one branch empty"
            )
        zeros = words ^ ones
        c1_right = popcount(ones & dataset.labels)
        left = rec(node.left, zeros, size - n1, c1 - c1_right, d + 1)
        right = rec(node.right, ones, n1, c1_right, d + 1)
        return SolutionNode(d, c1, size - c1, nvs, (node.feature, left, right))

    c1_all = popcount(dataset.labels)
    root = rec(tree.root, dataset.full_words(), dataset.n_samples, c1_all, 0)
    return SolutionGraph(root, dataset.n_features)


def solution_cost(solution: SolutionGraph, params) -> float:
    """Sum of edge costs of the solution graph: -log P(T, labels | features).

    The summation shape mirrors posterior.log_joint exactly, so the two agree
    bit for bit on corresponding inputs.
    """
    from .posterior import LabelCounts, log_leaf_likelihood, log_p_inner, log_p_leaf

    def rec(node: SolutionNode) -> float:
        if node.split is None:
            return -log_p_leaf(node.depth, node.num_valid_splits, params) - log_leaf_likelihood(
                LabelCounts(node.c1, node.c0), params
            )
        _, left, right = node.split
        return -log_p_inner(node.depth, node.num_valid_splits, params) + (rec(left) + rec(right))

    return rec(solution.root)


# ---------------------------------------------------------------------------
# Greedy baseline


def _entropy(c1: int, c0: int) -> float:
    size = c1 + c0
    if c1 == 0 or c0 == 0:
        return 0.0
    p = c1 / size
    return -(p * math.log(p) + (1.0 - p) * math.log(1.0 - p))


def fit_greedy(dataset, max_depth: int) -> DecisionTree:
    """Recursive best-entropy-gain splitting, the usual top-down baseline.

    Stops at pure nodes, at nodes with no nontrivial split, or at max_depth.
    Zero-gain splits are still taken (XOR-style labels need them); ties go to
    the lowest feature index.
    """
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")

    def rec(words: np.ndarray, size: int, c1: int, d: int) -> Node:
        c0 = size - c1
        if c1 == 0 or c0 == 0 or d == max_depth:
            return Leaf(c1, c0)
        ones = dataset.cols & words
        sizes1 = popcount_rows(ones)
        valid = (sizes1 > 0) & (sizes1 < size)
        if not valid.any():
            return Leaf(c1, c0)
        c1_right = popcount_rows(ones & dataset.labels)
        sizes0 = size - sizes1
        c1_left = c1 - c1_right
        h_parent = _entropy(c1, c0)
        best_f = -1
        best_gain = -math.inf
        for f in np.nonzero(valid)[0]:
            gain = h_parent - (
                sizes0[f] / size * _entropy(int(c1_left[f]), int(sizes0[f] - c1_left[f]))
                + sizes1[f] / size * _entropy(int(c1_right[f]), int(sizes1[f] - c1_right[f]))
            )
            if gain > best_gain:
                best_gain = gain
                best_f = int(f)
        col_ones = words & dataset.cols[best_f]
        left = rec(words ^ col_ones, int(sizes0[best_f]), int(c1_left[best_f]), d + 1)
        right = rec(col_ones, int(sizes1[best_f]), int(c1_right[best_f]), d + 1)
        return Internal(best_f, left, right)

    c1_all = popcount(dataset.labels)
    return DecisionTree(rec(dataset.full_words(), dataset.n_samples, c1_all, 0), dataset.n_features)
