"""Closed-form posterior mass computations for trees over binary data.

Everything is done in natural-log space.  Beta-function ratios go through
log-gamma so label counts in the thousands stay finite; evaluating the Beta
function directly underflows long before that.  A single convention is used
throughout the package: probabilities of exactly zero are the ``-inf``
sentinel in log space (``+inf`` as a cost), which absorbs under addition and
loses every min-comparison, and is never exponentiated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from ._bits import count_valid_splits, popcount
from .tree import DecisionTree, Internal, Leaf


class DegeneratePriorError(ValueError):
    """The split prior is exactly 1 at this depth, so a splittable leaf has prior 0."""


class InvalidTreeError(ValueError):
    """A tree split is trivial on the dataset (one branch empty): prior probability 0."""


@dataclass(frozen=True)
class PosteriorParams:
    """The four scalars defining the prior and likelihood.

    alpha in (0, 1] scales the split prior, beta >= 0 decays it with depth,
    and rho1, rho0 > 0 are the Beta pseudocounts for labels 1 and 0.
    """

    alpha: float = 0.95
    beta: float = 0.5
    rho1: float = 1.0
    rho0: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if self.beta < 0.0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if self.rho1 <= 0.0 or self.rho0 <= 0.0:
            raise ValueError(f"rho1 and rho0 must be > 0, got {self.rho1}, {self.rho0}")


@dataclass(frozen=True)
class LabelCounts:
    c1: int
    c0: int

    def __post_init__(self):
        if self.c1 < 0 or self.c0 < 0:
            raise ValueError(f"counts must be non-negative, got ({self.c1}, {self.c0})")

    @property
    def size(self) -> int:
        return self.c1 + self.c0


@lru_cache(maxsize=None)
def _loglik_consts(params: PosteriorParams) -> tuple[float, float, float]:
    return (
        float(gammaln(params.rho1)),
        float(gammaln(params.rho0)),
        float(gammaln(params.rho1 + params.rho0)),
    )


def _leaf_loglik(c1, c0, params: PosteriorParams):
    """log of the Beta-ratio leaf likelihood; accepts scalars or arrays.

    Grouped so that zero counts cancel exactly: each parenthesized difference
    is identically 0.0 when its count is 0.
    """
    r1, r0 = params.rho1, params.rho0
    g1, g0, g10 = _loglik_consts(params)
    return (
        (gammaln(c1 + r1) - g1)
        + (gammaln(c0 + r0) - g0)
        - (gammaln((c1 + c0) + (r1 + r0)) - g10)
    )


def _pure_loglik(c, rho_c, g_c, params: PosteriorParams):
    # _leaf_loglik with the other count fixed at zero; its group cancels to 0.
    g10 = _loglik_consts(params)[2]
    r10 = params.rho1 + params.rho0
    return (gammaln(c + rho_c) - g_c) - (gammaln(c + r10) - g10)


def log_leaf_likelihood(counts: LabelCounts, params: PosteriorParams) -> float:
    """log [ B(c1 + rho1, c0 + rho0) / B(rho1, rho0) ], always <= 0."""
    return float(_leaf_loglik(counts.c1, counts.c0, params))


def _p_split(d: int, params: PosteriorParams) -> float:
    return params.alpha * (1.0 + d) ** (-params.beta)


def log_p_split(d: int, params: PosteriorParams) -> float:
    """log of the depth-decaying split prior: log alpha - beta * log(1 + d)."""
    if d < 0:
        raise ValueError(f"depth must be >= 0, got {d}")
    return math.log(params.alpha) - params.beta * math.log1p(d)


def log_p_leaf(d: int, num_valid_splits: int, params: PosteriorParams) -> float:
    """log prior probability of stopping at depth d.

    Forced leaves (no nontrivial split available) have probability 1.  When
    the split prior is exactly 1 but splits exist, the leaf has probability 0
    and the prior is degenerate, which is raised rather than returned.
    """
    if num_valid_splits == 0:
        return 0.0
    ps = _p_split(d, params)
    if ps == 1.0:
        raise DegeneratePriorError(
            f"p_split({d}) = 1 with {num_valid_splits} valid splits: leaf prior is 0"
        )
    return math.log1p(-ps)


def log_p_inner(d: int, num_valid_splits: int, params: PosteriorParams) -> float:
    """log prior probability of splitting on one specific feature at depth d.

    Zero valid splits means probability 0; that case returns the -inf
    sentinel, which is legal input to cost arithmetic, not an error.
    """
    if num_valid_splits == 0:
        return -math.inf
    return log_p_split(d, params) - math.log(num_valid_splits)


def log_joint(tree: DecisionTree, dataset, params: PosteriorParams) -> float:
    """log P(labels | features, T) + log P(T | features) for a tree.

    Depths and per-node valid-split counts are recomputed by routing the
    dataset through the tree; leaf counts stored on the tree are ignored.
    The recursive summation shape (node term + (left + right)) is shared with
    tree.solution_cost so the two agree exactly.
    """
    if tree.n_features != dataset.n_features:
        raise InvalidTreeError(
            f"tree has {tree.n_features} features, dataset has {dataset.n_features}"
        )

    def rec(node, words: np.ndarray, size: int, c1: int, d: int) -> float:
        nvs = count_valid_splits(dataset.cols, words, size)
        if isinstance(node, Leaf):
            return log_p_leaf(d, nvs, params) + _leaf_loglik(c1, size - c1, params)
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
        return log_p_inner(d, nvs, params) + (left + right)

    assert isinstance(tree.root, (Leaf, Internal))
    c1_all = popcount(dataset.labels)
    return float(rec(tree.root, dataset.full_words(), dataset.n_samples, c1_all, 0))
