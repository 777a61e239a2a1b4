"""Brute-force ground truth: exhaustive enumeration of the tree space.

Every tree with positive prior on a (tiny) dataset is yielded exactly once,
with its log prior and log joint composed directly from the posterior
module's closed forms.  This deliberately shares nothing with the search's
graph or bound bookkeeping, so agreement between the two is a real check.
The space explodes combinatorially, so a size guard refuses datasets beyond
F <= 4, N <= 10 unless explicitly overridden, and the enumeration streams.
"""

from __future__ import annotations

import math
from typing import Iterator

import numpy as np

from ._bits import popcount, popcount_rows
from .dataset import BinaryDataset
from .posterior import PosteriorParams, _leaf_loglik, log_p_inner, log_p_leaf
from .tree import DecisionTree, Internal, Leaf, Node


class GuardError(ValueError):
    """Dataset exceeds the enumeration size guard."""


def _check_guard(dataset: BinaryDataset, max_features: int, max_samples: int) -> None:
    if dataset.n_features > max_features or dataset.n_samples > max_samples:
        raise GuardError(
            f"dataset is {dataset.n_samples} x {dataset.n_features}; enumeration is "
            f"guarded to N <= {max_samples}, F <= {max_features} (override the guard "
            "arguments to force it)"
        )


def _enumerate(
    dataset: BinaryDataset,
    params: PosteriorParams,
    words: np.ndarray,
    size: int,
    c1: int,
    depth: int,
) -> Iterator[tuple[Node, float, float]]:
    """Yield (node, log_prior, log_likelihood) for every subtree of this subproblem.

    Order: the leaf first, then features ascending, then left subtrees outer,
    right subtrees inner.  A streaming argmin over this order therefore picks
    the same tree as the search's tie rules (leaf preferred, lowest feature).
    """
    ones_counts = popcount_rows(dataset.cols & words)
    feats = np.nonzero((ones_counts > 0) & (ones_counts < size))[0]
    nvs = int(feats.size)
    c0 = size - c1

    yield Leaf(c1, c0), log_p_leaf(depth, nvs, params), float(_leaf_loglik(c1, c0, params))

    for f in feats.tolist():
        ones = words & dataset.cols[f]
        zeros = words ^ ones
        n1 = int(ones_counts[f])
        c1_right = popcount(ones & dataset.labels)
        lpi = log_p_inner(depth, nvs, params)
        for left, lp_l, ll_l in _enumerate(dataset, params, zeros, size - n1, c1 - c1_right, depth + 1):
            for right, lp_r, ll_r in _enumerate(dataset, params, ones, n1, c1_right, depth + 1):
                yield Internal(f, left, right), lpi + (lp_l + lp_r), ll_l + ll_r


def enumerate_trees(
    dataset: BinaryDataset,
    params: PosteriorParams | None = None,
    max_features: int = 4,
    max_samples: int = 10,
) -> Iterator[tuple[DecisionTree, float, float]]:
    """Stream every positive-prior tree as (tree, log_prior, log_joint)."""
    if params is None:
        params = PosteriorParams()
    _check_guard(dataset, max_features, max_samples)
    c1_all = popcount(dataset.labels)
    for node, log_prior, log_lik in _enumerate(
        dataset, params, dataset.full_words(), dataset.n_samples, c1_all, 0
    ):
        yield DecisionTree(node, dataset.n_features), log_prior, log_prior + log_lik


def brute_force_map(
    dataset: BinaryDataset,
    params: PosteriorParams | None = None,
    max_features: int = 4,
    max_samples: int = 10,
) -> tuple[DecisionTree, float]:
    """Argmin of -log_joint over the full enumeration; first minimum wins.

    The enumeration order makes first-wins equivalent to the search's tie
    rules, so on ties both produce the same tree.
    """
    best_tree = None
    best_cost = math.inf
    for tree, _, log_joint_value in enumerate_trees(dataset, params, max_features, max_samples):
        cost = -log_joint_value
        if cost < best_cost:
            best_cost = cost
            best_tree = tree
    assert best_tree is not None
    return best_tree, best_cost
