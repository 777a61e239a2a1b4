"""Command-line interface: fit, predict, eval, synth, enumerate, bench.

Reports are single-line JSON on stdout so harnesses can parse them; bench
emits CSV.  Dataset files are the text format of the dataset module (0/1
tokens, label in the last column).  Exit codes: 0 success, 1 usage or data
errors, 2 budget-exhausted non-optimal fit under --require-optimal.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .dataset import BinaryDataset, load_dataset, write_dataset
from .oracle import enumerate_trees
from .posterior import PosteriorParams
from .search import SearchBudget, maptree_search
from .synthetic import SynthConfig, make_rng, random_tree, sample_dataset
from .tree import deserialize, evaluate, n_nodes, predict_proba_batch, serialize, to_document

BENCH_LADDER = [10, 30, 100, 300, 1000, 3000, 10000, 30000, 100000]


def _add_param_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha", type=float, default=0.95, help="split-prior scale in (0, 1]")
    parser.add_argument("--beta", type=float, default=0.5, help="split-prior depth decay >= 0")
    parser.add_argument("--rho1", type=float, default=1.0, help="Beta pseudocount for label 1")
    parser.add_argument("--rho0", type=float, default=1.0, help="Beta pseudocount for label 0")


def _params(args) -> PosteriorParams:
    return PosteriorParams(alpha=args.alpha, beta=args.beta, rho1=args.rho1, rho0=args.rho0)


def _budget(args) -> SearchBudget:
    time_limit = None if args.time_limit_ms is None else args.time_limit_ms / 1000.0
    return SearchBudget(max_expansions=args.max_expansions, time_limit=time_limit)


def _print_json(obj) -> None:
    print(json.dumps(obj))


def _fit_report(result) -> dict:
    return {
        "neg_log_joint": result.neg_log_joint,
        "optimal": result.optimal,
        "expansions_used": result.expansions_used,
        "elapsed_ms": result.elapsed * 1000.0,
        "n_nodes": n_nodes(result.tree),
    }


def cmd_fit(args) -> int:
    dataset = load_dataset(args.dataset)
    result = maptree_search(dataset, _params(args), _budget(args))
    if args.out:
        with open(args.out, "w", encoding="ascii") as handle:
            handle.write(serialize(result.tree))
    _print_json(_fit_report(result))
    if args.require_optimal and not result.optimal:
        return 2
    return 0


def cmd_predict(args) -> int:
    tree = deserialize(open(args.tree, "rb").read())
    dataset = load_dataset(args.dataset)
    if tree.n_features != dataset.n_features:
        raise ValueError(
            f"tree expects {tree.n_features} features, dataset has {dataset.n_features}"
        )
    params = _params(args)
    features, _ = dataset.to_arrays()
    probs = predict_proba_batch(tree, features, params)
    for p in probs.tolist():
        print(f"{p!r} {1 if p >= 0.5 else 0}")
    return 0


def _cv_folds(n: int, k: int):
    # Deterministic round-robin assignment: fold j holds indices i with i % k == j.
    idx = np.arange(n)
    for j in range(k):
        test = idx[idx % k == j]
        train = idx[idx % k != j]
        yield train, test


def cmd_eval(args) -> int:
    dataset = load_dataset(args.dataset)
    params = _params(args)
    if args.cv is None:
        if args.tree is None:
            raise ValueError("eval needs --tree TREE or --cv K")
        tree = deserialize(open(args.tree, "rb").read())
        if tree.n_features != dataset.n_features:
            raise ValueError(
                f"tree expects {tree.n_features} features, dataset has {dataset.n_features}"
            )
        _print_json(evaluate(tree, dataset, params))
        return 0
    if args.cv < 2 or args.cv > dataset.n_samples:
        raise ValueError(f"--cv must be in [2, n_samples], got {args.cv}")
    features, labels = dataset.to_arrays()
    budget = _budget(args)
    metrics = []
    for train, test in _cv_folds(dataset.n_samples, args.cv):
        train_ds = BinaryDataset.from_arrays(features[train], labels[train])
        test_ds = BinaryDataset.from_arrays(features[test], labels[test])
        result = maptree_search(train_ds, params, budget)
        metrics.append(evaluate(result.tree, test_ds, params))
    _print_json(
        {
            "cv": args.cv,
            "accuracy": sum(m["accuracy"] for m in metrics) / args.cv,
            "mean_log_likelihood": sum(m["mean_log_likelihood"] for m in metrics) / args.cv,
            "mean_n_nodes": sum(m["n_nodes"] for m in metrics) / args.cv,
        }
    )
    return 0


def cmd_synth(args) -> int:
    config = SynthConfig(
        n_features=args.n_features,
        n_internal_nodes=args.n_internal_nodes,
        n_samples=args.n_samples,
        noise_eps=args.noise_eps,
        seed=args.seed,
    )
    rng = make_rng(config.seed)
    tree = random_tree(config, rng)
    dataset = sample_dataset(tree, config, rng)
    write_dataset(dataset, args.out)
    if args.tree_out:
        with open(args.tree_out, "w", encoding="ascii") as handle:
            handle.write(serialize(tree))
    _print_json(
        {
            "n_samples": config.n_samples,
            "n_features": config.n_features,
            "n_internal_nodes": config.n_internal_nodes,
            "noise_eps": config.noise_eps,
            "seed": config.seed,
            "flipped": math.ceil(config.noise_eps * config.n_samples),
        }
    )
    return 0


def cmd_enumerate(args) -> int:
    dataset = load_dataset(args.dataset)
    params = _params(args)
    for tree, log_prior, log_joint_value in enumerate_trees(
        dataset, params, max_features=args.guard_features, max_samples=args.guard_samples
    ):
        print(
            json.dumps(
                {"tree": to_document(tree), "log_prior": log_prior, "log_joint": log_joint_value}
            )
        )
    return 0


def cmd_bench(args) -> int:
    dataset = load_dataset(args.dataset)
    params = _params(args)
    budgets = BENCH_LADDER if args.budgets is None else [int(b) for b in args.budgets.split(",")]
    print("budget,elapsed_ms,neg_log_joint,optimal")
    for budget in budgets:
        result = maptree_search(dataset, params, SearchBudget(max_expansions=budget))
        optimal = "true" if result.optimal else "false"
        print(f"{budget},{result.elapsed * 1000.0!r},{result.neg_log_joint!r},{optimal}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maptree",
        description="Provably maximum-a-posteriori decision trees on binary datasets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="search for the MAP tree and write it out")
    p_fit.add_argument("dataset", help="text dataset, 0/1 tokens per line, label last")
    _add_param_flags(p_fit)
    p_fit.add_argument("--max-expansions", type=int, default=None)
    p_fit.add_argument("--time-limit-ms", type=float, default=None)
    p_fit.add_argument("--out", default=None, help="path for the tree document (JSON)")
    p_fit.add_argument(
        "--require-optimal",
        action="store_true",
        help="exit 2 when the budget expires before the optimality certificate",
    )
    p_fit.set_defaults(func=cmd_fit)

    p_predict = sub.add_parser("predict", help="per-sample probability and hard label")
    p_predict.add_argument("tree")
    p_predict.add_argument("dataset")
    _add_param_flags(p_predict)
    p_predict.set_defaults(func=cmd_predict)

    p_eval = sub.add_parser("eval", help="accuracy / log-likelihood / size metrics")
    p_eval.add_argument("dataset")
    p_eval.add_argument("--tree", default=None, help="tree document to evaluate")
    p_eval.add_argument("--cv", type=int, default=None, help="k-fold cross-validated fit instead")
    _add_param_flags(p_eval)
    p_eval.add_argument("--max-expansions", type=int, default=None)
    p_eval.add_argument("--time-limit-ms", type=float, default=None)
    p_eval.set_defaults(func=cmd_eval)

    p_synth = sub.add_parser("synth", help="generate a tree-labeled synthetic dataset")
    p_synth.add_argument("--n-features", type=int, default=40)
    p_synth.add_argument("--n-internal-nodes", type=int, default=10)
    p_synth.add_argument("--n-samples", type=int, default=1000)
    p_synth.add_argument("--noise-eps", type=float, default=0.0)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--out", required=True, help="dataset output path")
    p_synth.add_argument("--tree-out", default=None, help="ground-truth tree output path")
    p_synth.set_defaults(func=cmd_synth)

    p_enum = sub.add_parser("enumerate", help="stream every tree with its prior and joint")
    p_enum.add_argument("dataset")
    _add_param_flags(p_enum)
    p_enum.add_argument("--guard-features", type=int, default=4)
    p_enum.add_argument("--guard-samples", type=int, default=10)
    p_enum.set_defaults(func=cmd_enumerate)

    p_bench = sub.add_parser("bench", help="fit across an expansion-budget ladder, CSV out")
    p_bench.add_argument("dataset")
    _add_param_flags(p_bench)
    p_bench.add_argument(
        "--budgets", default=None, help="comma-separated expansion budgets (default ladder)"
    )
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
