"""Provably maximum-a-posteriori decision trees on binary datasets.

The package builds a posterior over trees (depth-decaying split prior,
Beta-Bernoulli leaves), casts MAP inference as minimal-cost solution search
on an AND/OR graph, and solves it best-first with an admissible perfect-split
heuristic and bound propagation.  Runs either prove optimality (certificate)
or return the best tree explored within a budget.
"""

from .dataset import (
    BinaryDataset,
    ParseError,
    SampleSubset,
    UndoDisciplineError,
    full_subset,
    label_counts,
    load_dataset,
    restrict,
    subset_hash,
    undo,
    valid_splits,
    write_dataset,
)
from .graph import ANDNode, ORNode, SubproblemCache, expand, make_root
from .oracle import GuardError, brute_force_map, enumerate_trees
from .posterior import (
    DegeneratePriorError,
    InvalidTreeError,
    LabelCounts,
    PosteriorParams,
    log_joint,
    log_leaf_likelihood,
    log_p_inner,
    log_p_leaf,
    log_p_split,
)
from .search import (
    SearchBudget,
    SearchMemoryError,
    SearchResult,
    find_node_to_expand,
    get_solution,
    heuristic,
    maptree_search,
    update_lower_bounds,
    update_upper_bounds,
)
from .synthetic import InfeasibleConfigError, SynthConfig, make_rng, random_tree, sample_dataset
from .tree import (
    DecisionTree,
    Internal,
    Leaf,
    SchemaError,
    SolutionGraph,
    SolutionNode,
    deserialize,
    evaluate,
    fit_greedy,
    n_leaves,
    n_nodes,
    predict,
    predict_proba,
    predict_proba_batch,
    serialize,
    solution_cost,
    solution_to_tree,
    tree_to_solution,
)

__version__ = "0.1.0"

__all__ = [
    "ANDNode",
    "BinaryDataset",
    "DecisionTree",
    "DegeneratePriorError",
    "GuardError",
    "InfeasibleConfigError",
    "Internal",
    "InvalidTreeError",
    "LabelCounts",
    "Leaf",
    "ORNode",
    "ParseError",
    "PosteriorParams",
    "SampleSubset",
    "SchemaError",
    "SearchBudget",
    "SearchMemoryError",
    "SearchResult",
    "SolutionGraph",
    "SolutionNode",
    "SubproblemCache",
    "SynthConfig",
    "UndoDisciplineError",
    "brute_force_map",
    "deserialize",
    "enumerate_trees",
    "evaluate",
    "expand",
    "find_node_to_expand",
    "fit_greedy",
    "full_subset",
    "get_solution",
    "heuristic",
    "label_counts",
    "load_dataset",
    "log_joint",
    "log_leaf_likelihood",
    "log_p_inner",
    "log_p_leaf",
    "log_p_split",
    "make_rng",
    "make_root",
    "maptree_search",
    "n_leaves",
    "n_nodes",
    "predict",
    "predict_proba",
    "predict_proba_batch",
    "random_tree",
    "restrict",
    "sample_dataset",
    "serialize",
    "solution_cost",
    "solution_to_tree",
    "subset_hash",
    "tree_to_solution",
    "undo",
    "update_lower_bounds",
    "update_upper_bounds",
    "valid_splits",
    "write_dataset",
]
