"""Synthetic benchmark generation: random trees and tree-labeled samples.

A random tree shape is grown by recursively handing the remaining
internal-node budget to the left or right subtree uniformly at random; each
internal node then draws its split feature uniformly from the features no
ancestor used, and leaves are labeled 0,1,0,1,... left to right so the tree
cannot be compressed.  Samples draw every feature from Ber(1/2) and take the
label of the leaf they route to; exactly ceil(eps * N) distinct samples then
get their label flipped.

Leaves carry label counts, so a generated leaf with label k is encoded as
counts (c1, c0) = (k, 1 - k); majority routing reproduces k.  The RNG is
numpy's PCG64 (np.random.default_rng), fixed so a seed reproduces files
bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import BinaryDataset
from .tree import DecisionTree, Internal, Leaf, Node


class InfeasibleConfigError(ValueError):
    """The requested tree shape needs a deeper path than there are features."""


@dataclass(frozen=True)
class SynthConfig:
    n_features: int = 40
    n_internal_nodes: int = 10
    n_samples: int = 1000
    noise_eps: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n_features < 1:
            raise ValueError(f"n_features must be >= 1, got {self.n_features}")
        if self.n_internal_nodes < 0:
            raise ValueError(f"n_internal_nodes must be >= 0, got {self.n_internal_nodes}")
        if self.n_samples < 1:
            raise ValueError(f"n_samples must be >= 1, got {self.n_samples}")
        if not 0.0 <= self.noise_eps < 0.5:
            raise ValueError(f"noise_eps must be in [0, 0.5), got {self.noise_eps}")


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def leaf_label(leaf: Leaf) -> int:
    return 1 if leaf.c1 > leaf.c0 else 0


def random_tree(config: SynthConfig, rng: np.random.Generator) -> DecisionTree:
    """Random tree with config.n_internal_nodes splits and alternating leaf labels."""

    def build_shape(budget: int, used: frozenset[int]) -> Node:
        if budget == 0:
            return Leaf(0, 0)  # label assigned afterwards
        available = [f for f in range(config.n_features) if f not in used]
        if not available:
            raise InfeasibleConfigError(
                f"{config.n_internal_nodes} internal nodes need a path deeper than "
                f"{config.n_features} features allow"
            )
        feature = int(available[rng.integers(0, len(available))])
        left_budget = int(rng.integers(0, budget))  # budget - 1 nodes split across subtrees
        right_budget = budget - 1 - left_budget
        used = used | {feature}
        return Internal(feature, build_shape(left_budget, used), build_shape(right_budget, used))

    shape = build_shape(config.n_internal_nodes, frozenset())

    next_label = 0

    def assign_labels(node: Node) -> Node:
        nonlocal next_label
        if isinstance(node, Leaf):
            label = next_label
            next_label ^= 1
            return Leaf(label, 1 - label)
        return Internal(node.feature, assign_labels(node.left), assign_labels(node.right))

    return DecisionTree(assign_labels(shape), config.n_features)


def route_labels(tree: DecisionTree, features: np.ndarray) -> np.ndarray:
    """Label of the leaf each row of an (n, F) 0/1 matrix routes to."""
    out = np.empty(features.shape[0], dtype=np.uint8)

    def rec(node: Node, idx: np.ndarray) -> None:
        if idx.size == 0:
            return
        if isinstance(node, Leaf):
            out[idx] = leaf_label(node)
            return
        go_right = features[idx, node.feature] != 0
        rec(node.left, idx[~go_right])
        rec(node.right, idx[go_right])

    rec(tree.root, np.arange(features.shape[0]))
    return out


def sample_dataset(
    tree: DecisionTree, config: SynthConfig, rng: np.random.Generator
) -> BinaryDataset:
    """Draw config.n_samples Ber(1/2) rows, label them by the tree, add noise.

    Exactly ceil(noise_eps * n_samples) distinct rows get flipped labels.
    """
    features = rng.integers(0, 2, size=(config.n_samples, tree.n_features), dtype=np.uint8)
    labels = route_labels(tree, features)
    n_flips = math.ceil(config.noise_eps * config.n_samples)
    if n_flips:
        flip_idx = rng.choice(config.n_samples, size=n_flips, replace=False)
        labels[flip_idx] ^= 1
    return BinaryDataset.from_arrays(features, labels)
