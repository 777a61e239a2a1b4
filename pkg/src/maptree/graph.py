"""The explicit AND/OR search graph: node records, bounds, and the
subproblem cache.

OR nodes stand for the subproblem "best subtree for subset I at depth d";
each owns one implicit terminal child (stopping there, cost stored inline)
and, once expanded, one AND child per nontrivial feature split.  AND nodes
require both of their OR children (the f=0 and f=1 sides).  Subproblems
reached along different split paths are merged through a cache keyed on
(128-bit subset hash, depth) only: O(1) memory per subproblem at a
2^-128-scale collision risk, accepted and not verified.

Expansion is vectorized: all child subsets, counts, hashes, valid-split
counts, heuristics, and terminal costs for one node are computed in a few
numpy passes before any records are created.
"""

from __future__ import annotations

import math

import numpy as np

from ._bits import hash_powers, popcount, popcount_rows
from .posterior import (
    PosteriorParams,
    _leaf_loglik,
    _loglik_consts,
    _p_split,
    _pure_loglik,
    log_p_inner,
    log_p_split,
)

INF = math.inf


class ORNode:
    """Subproblem node o_(I, d) with bounds and an inline terminal edge."""

    __slots__ = (
        "h1",
        "h2",
        "depth",
        "c1",
        "c0",
        "num_valid_splits",
        "terminal_cost",
        "h0",
        "lb",
        "ub",
        "expanded",
        "and_children",
        "parents",
    )

    def __init__(self, h1, h2, depth, c1, c0, num_valid_splits, terminal_cost, h0):
        self.h1 = h1
        self.h2 = h2
        self.depth = depth
        self.c1 = c1
        self.c0 = c0
        self.num_valid_splits = num_valid_splits
        self.terminal_cost = terminal_cost
        self.h0 = h0  # heuristic at creation; lb only rises from here
        self.lb = h0
        self.ub = INF
        self.expanded = False
        self.and_children: list[ANDNode] = []
        self.parents: list[ANDNode] = []

    @property
    def size(self) -> int:
        return self.c1 + self.c0

    def __repr__(self):
        return (
            f"ORNode(d={self.depth}, c1={self.c1}, c0={self.c0}, "
            f"lb={self.lb:.6g}, ub={self.ub:.6g}, expanded={self.expanded})"
        )


class ANDNode:
    """Split-on-feature node with exactly two nonempty OR children."""

    __slots__ = ("feature", "edge_cost", "child0", "child1", "lb", "ub", "parent")

    def __init__(self, feature, edge_cost, child0, child1, parent):
        self.feature = feature
        self.edge_cost = edge_cost
        self.child0 = child0
        self.child1 = child1
        self.lb = child0.lb + child1.lb
        self.ub = child0.ub + child1.ub
        self.parent = parent

    def __repr__(self):
        return f"ANDNode(f={self.feature}, lb={self.lb:.6g}, ub={self.ub:.6g})"


class SubproblemCache:
    """Map from (h1, h2, depth) to the unique ORNode for that subproblem."""

    __slots__ = ("table",)

    def __init__(self):
        self.table: dict[tuple[int, int, int], ORNode] = {}

    def __len__(self) -> int:
        return len(self.table)

    def get(self, key):
        return self.table.get(key)

    def put(self, key, node: ORNode) -> None:
        self.table[key] = node


def node_heuristic(c1, c0, depth, params: PosteriorParams):
    """Admissible lower bound on subtree cost: stop now, or one perfect split.

    Accepts scalars or arrays.  The split branch charges the split prior but
    assumes the labels separate perfectly in one additional level.
    """
    return _heuristic_from_loglik(c1, c0, depth, _leaf_loglik(c1, c0, params), params)


def _heuristic_from_loglik(c1, c0, depth, ll_full, params: PosteriorParams):
    g1, g0, _ = _loglik_consts(params)
    split = log_p_split(depth, params) + (
        _pure_loglik(c1, params.rho1, g1, params) + _pure_loglik(c0, params.rho0, g0, params)
    )
    return -np.maximum(ll_full, split)


def _terminal_costs(nvs, depth, ll_full, params: PosteriorParams):
    """Vectorized cost of the terminal edge: -log p_leaf - log leaf-likelihood."""
    ps = _p_split(depth, params)
    nvs = np.asarray(nvs)
    if ps == 1.0:
        if np.any(nvs > 0):
            # Reuse the scalar path's error condition and message.
            from .posterior import log_p_leaf

            log_p_leaf(depth, int(np.max(nvs)), params)
        lp_leaf = np.zeros(nvs.shape)
    else:
        lp_leaf = np.where(nvs == 0, 0.0, math.log1p(-ps))
    return (-lp_leaf) - ll_full


def make_root(dataset, params: PosteriorParams, cache: SubproblemCache | None = None) -> ORNode:
    """OR node for the full sample set at depth 0, registered in the cache."""
    from .dataset import full_subset, subset_hash

    subset = full_subset(dataset)
    h1, h2 = subset_hash(subset)
    words = subset.words
    size = dataset.n_samples
    c1 = popcount(words & dataset.labels)
    ones = popcount_rows(dataset.cols & words)
    nvs = int(np.count_nonzero((ones > 0) & (ones < size)))
    ll_full = _leaf_loglik(c1, size - c1, params)
    term = float(_terminal_costs(nvs, 0, ll_full, params))
    h0 = float(_heuristic_from_loglik(c1, size - c1, 0, ll_full, params))
    root = ORNode(h1, h2, 0, c1, size - c1, nvs, term, h0)
    if cache is not None:
        cache.put((h1, h2, 0), root)
    return root


def expand(o: ORNode, subset, dataset, params: PosteriorParams, cache: SubproblemCache):
    """Expand an OR node: create its AND children and their OR children.

    `subset` must currently materialize o's sample set (the search descends
    with restrict/undo to guarantee this).  New OR children get heuristic
    lower bounds; children found in the cache are reused with their current
    (at least as tight) bounds and gain a parent link.  Returns the list of
    newly created OR nodes.
    """
    if o.expanded:
        raise ValueError("expand() called on an already-expanded node")
    o.expanded = True
    if o.num_valid_splits == 0:
        return []

    words = subset.words
    size = o.size
    width = words.size
    d1 = o.depth + 1

    ones_all = dataset.cols & words
    sizes1_all = popcount_rows(ones_all)
    feats = np.nonzero((sizes1_all > 0) & (sizes1_all < size))[0]
    assert feats.size == o.num_valid_splits, "valid-split count changed since node creation"
    n_valid = feats.size

    ones = ones_all[feats]
    zeros = ones ^ words
    sizes1 = sizes1_all[feats]
    c1_ones = popcount_rows(ones & dataset.labels)

    # Interleave the f=0 / f=1 children of each feature: row 2j is feats[j]=0.
    child_words = np.empty((2 * n_valid, width), dtype=np.uint64)
    child_words[0::2] = zeros
    child_words[1::2] = ones
    sizes = np.empty(2 * n_valid, dtype=np.int64)
    sizes[0::2] = size - sizes1
    sizes[1::2] = sizes1
    c1s = np.empty(2 * n_valid, dtype=np.int64)
    c1s[0::2] = o.c1 - c1_ones
    c1s[1::2] = c1_ones
    c0s = sizes - c1s

    p1, p2 = hash_powers(width)
    h1s = (child_words * p1).sum(axis=1, dtype=np.uint64).tolist()
    h2s = (child_words * p2).sum(axis=1, dtype=np.uint64).tolist()

    # Single-sample children cannot split; skip the expensive pass for them.
    nvs_arr = np.zeros(2 * n_valid, dtype=np.int64)
    splittable = sizes > 1
    if splittable.any():
        sub = child_words[splittable]
        grand = popcount_rows(sub[:, None, :] & dataset.cols[None, :, :])
        nvs_arr[splittable] = ((grand > 0) & (grand < sizes[splittable, None])).sum(axis=1)

    ll_full = _leaf_loglik(c1s, c0s, params)
    heur = _heuristic_from_loglik(c1s, c0s, d1, ll_full, params)
    terms = _terminal_costs(nvs_arr, d1, ll_full, params)

    edge_cost = -log_p_inner(o.depth, o.num_valid_splits, params)
    c1s = c1s.tolist()
    c0s = c0s.tolist()
    nvs_list = nvs_arr.tolist()
    heur = heur.tolist()
    terms = terms.tolist()

    created = []
    table = cache.table
    for j, f in enumerate(feats.tolist()):
        pair = []
        for k in (0, 1):
            i = 2 * j + k
            key = (h1s[i], h2s[i], d1)
            child = table.get(key)
            if child is None:
                child = ORNode(h1s[i], h2s[i], d1, c1s[i], c0s[i], nvs_list[i], terms[i], heur[i])
                table[key] = child
                created.append(child)
            pair.append(child)
        and_node = ANDNode(f, edge_cost, pair[0], pair[1], o)
        pair[0].parents.append(and_node)
        pair[1].parents.append(and_node)
        o.and_children.append(and_node)

    if __debug__:
        _assert_consistent(o, heur)
    return created


def _assert_consistent(o: ORNode, child_heuristics) -> None:
    # Heuristic consistency at the just-expanded node: h(o) must not exceed
    # the terminal edge nor any split edge plus the children's heuristics.
    # 1e-9 slack covers float rounding at exact-equality boundaries.
    assert o.h0 <= o.terminal_cost + 1e-9, "heuristic exceeds terminal cost"
    for j, and_node in enumerate(o.and_children):
        h_a = child_heuristics[2 * j] + child_heuristics[2 * j + 1]
        assert o.h0 <= and_node.edge_cost + h_a + 1e-9, "heuristic inconsistent across a split"
