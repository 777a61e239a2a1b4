"""Best-first search for the maximum a posteriori tree.

The loop: pick an unexpanded OR node by descending from the root (cheapest
AND child by lower bound, then the child with the wider bound gap), expand
it, then propagate lower and upper bounds back up through the shared graph.
It stops when the root's bounds meet (provably optimal, certificate set) or
the budget runs out, in which case the best solution inside the explored
subgraph is returned.

Tie-breaking is total so runs are deterministic: lowest feature index among
equal-cost AND options, the leaf on leaf-vs-split cost ties, and the f=0
child on equal bound gaps.  Costs are compared exactly, never with an
epsilon.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass
from typing import Optional

from .dataset import BinaryDataset, full_subset, restrict, undo
from .graph import ANDNode, INF, ORNode, SubproblemCache, expand, make_root, node_heuristic
from .posterior import LabelCounts, PosteriorParams, log_joint
from .tree import DecisionTree, Internal, Leaf


class SearchMemoryError(RuntimeError):
    """The explicit graph exhausted memory; carries the expansion count."""

    def __init__(self, expansions_used: int):
        super().__init__(f"search ran out of memory after {expansions_used} expansions")
        self.expansions_used = expansions_used


@dataclass(frozen=True)
class SearchBudget:
    """Limits on the search; an absent field means unlimited."""

    max_expansions: Optional[int] = None
    time_limit: Optional[float] = None  # seconds

    def __post_init__(self):
        if self.max_expansions is not None and self.max_expansions < 0:
            raise ValueError(f"max_expansions must be >= 0, got {self.max_expansions}")
        if self.time_limit is not None and self.time_limit < 0:
            raise ValueError(f"time_limit must be >= 0, got {self.time_limit}")


@dataclass(frozen=True)
class SearchResult:
    tree: DecisionTree
    neg_log_joint: float
    optimal: bool
    expansions_used: int
    elapsed: float


def heuristic(counts: LabelCounts, d: int, params: PosteriorParams) -> float:
    """Perfect-split lower bound on the cost of any subtree for these counts."""
    return float(node_heuristic(counts.c1, counts.c0, d, params))


def find_node_to_expand(root: ORNode, subset, dataset: BinaryDataset):
    """Descend from the root to an unexpanded OR node, restricting as we go.

    Returns (node, tokens); the caller undoes the restrict tokens in reverse
    after expanding.  Must only be called while LB[root] < UB[root].
    """
    if root.lb >= root.ub:
        raise ValueError("find_node_to_expand called on a converged root")
    o = root
    tokens = []
    while o.expanded:
        best: ANDNode | None = None
        best_v = INF
        for a in o.and_children:
            v = a.edge_cost + a.lb
            if v < best_v:
                best_v = v
                best = a
        assert best is not None, "expanded node with a bound gap has no AND children"
        c0, c1 = best.child0, best.child1
        # Wider UB-LB gap first; ties take the f=0 child.  LB is always
        # finite, so the gaps never produce inf - inf.
        if c0.ub - c0.lb >= c1.ub - c1.lb:
            o, value = c0, 0
        else:
            o, value = c1, 1
        tokens.append(restrict(subset, dataset, best.feature, value))
    return o, tokens


def update_lower_bounds(from_node: ORNode) -> None:
    """Propagate lower bounds upward from a just-expanded node.

    Worklist of OR nodes, deepest first (FIFO within a depth).  An OR node's
    bound is min(terminal cost, min over AND children of edge + LB); an AND
    node's bound is the sum of its children's, recomputed eagerly when a
    child rises.  Parents are enqueued only on strict increase.
    """
    counter = 0
    heap = [(-from_node.depth, 0, from_node)]
    while heap:
        _, _, o = heapq.heappop(heap)
        v = o.terminal_cost
        for a in o.and_children:
            candidate = a.edge_cost + a.lb
            if candidate < v:
                v = candidate
        if v > o.lb:
            o.lb = v
            for a in o.parents:
                new_lb = a.child0.lb + a.child1.lb
                if new_lb > a.lb:
                    a.lb = new_lb
                    counter += 1
                    heapq.heappush(heap, (-a.parent.depth, counter, a.parent))


def update_upper_bounds(from_node: ORNode) -> None:
    """Mirror image of update_lower_bounds: min-costs and strict decreases.

    The inf sentinel absorbs through AND sums, so a split whose either side
    has no finished solution yet never caps an upper bound.
    """
    counter = 0
    heap = [(-from_node.depth, 0, from_node)]
    while heap:
        _, _, o = heapq.heappop(heap)
        v = o.terminal_cost
        for a in o.and_children:
            candidate = a.edge_cost + a.ub
            if candidate < v:
                v = candidate
        if v < o.ub:
            o.ub = v
            for a in o.parents:
                new_ub = a.child0.ub + a.child1.ub
                if new_ub < a.ub:
                    a.ub = new_ub
                    counter += 1
                    heapq.heappush(heap, (-a.parent.depth, counter, a.parent))


def get_solution(root: ORNode, n_features: int) -> tuple[DecisionTree, float]:
    """Extract the minimal-cost solution in the explored graph, and its cost.

    At each OR node the terminal wins cost ties against the best AND child,
    and the lowest feature index wins among equal AND children.  The returned
    cost reproduces UB[root] exactly because it re-adds the same stored
    values in the same shape the propagation used.
    """
    if root.ub == INF:
        raise ValueError("get_solution called before any solution exists (UB is infinite)")

    def rec(o: ORNode):
        best: ANDNode | None = None
        best_v = INF
        for a in o.and_children:
            v = a.edge_cost + a.ub
            if v < best_v:
                best_v = v
                best = a
        if best is None or o.terminal_cost <= best_v:
            return Leaf(o.c1, o.c0), o.terminal_cost
        left, left_cost = rec(best.child0)
        right, right_cost = rec(best.child1)
        return Internal(best.feature, left, right), best.edge_cost + (left_cost + right_cost)

    node, cost = rec(root)
    return DecisionTree(node, n_features), cost


def maptree_search(
    dataset: BinaryDataset,
    params: PosteriorParams | None = None,
    budget: SearchBudget | None = None,
) -> SearchResult:
    """Run the search to optimality or until the budget expires.

    With no budget the search always terminates, returning the globally
    minimal-cost tree and optimal=True.  Under a budget the best tree inside
    the explored graph is returned; if the budget dies before the first
    expansion, that is the single-leaf tree.  The reported neg_log_joint is
    recomputed independently from the returned tree.
    """
    if params is None:
        params = PosteriorParams()
    if budget is None:
        budget = SearchBudget()
    start = time.perf_counter()

    cache = SubproblemCache()
    root = make_root(dataset, params, cache)
    subset = full_subset(dataset)
    expansions = 0

    try:
        while root.lb < root.ub:
            if budget.max_expansions is not None and expansions >= budget.max_expansions:
                break
            if budget.time_limit is not None and time.perf_counter() - start >= budget.time_limit:
                break
            node, tokens = find_node_to_expand(root, subset, dataset)
            expand(node, subset, dataset, params, cache)
            update_lower_bounds(node)
            update_upper_bounds(node)
            for token in reversed(tokens):
                undo(subset, token)
            expansions += 1
    except MemoryError:
        raise SearchMemoryError(expansions) from None

    optimal = root.lb == root.ub
    if root.ub == INF:
        tree = DecisionTree(Leaf(root.c1, root.c0), dataset.n_features)
    else:
        tree, cost = get_solution(root, dataset.n_features)
        assert cost == root.ub, "solution cost must reproduce UB[root] exactly"
    neg_log_joint = -log_joint(tree, dataset, params)
    return SearchResult(
        tree=tree,
        neg_log_joint=neg_log_joint,
        optimal=optimal,
        expansions_used=expansions,
        elapsed=time.perf_counter() - start,
    )
