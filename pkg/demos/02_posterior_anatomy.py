"""Take the tree posterior apart: split prior, leaf likelihood, joint mass.

Every tree's score is a product (sum, in log space) of per-node terms: each
internal node pays the depth-decayed split prior divided among the available
splits, and each leaf collects a stopping term plus a Beta-ratio likelihood
of its label counts.  Summed over ALL trees, the prior is an honest
probability distribution: it adds up to one.
"""

import math

import numpy as np

from maptree import (
    BinaryDataset,
    LabelCounts,
    PosteriorParams,
    enumerate_trees,
    log_leaf_likelihood,
    log_p_inner,
    log_p_leaf,
    log_p_split,
)

params = PosteriorParams()  # alpha=0.95, beta=0.5, rho1=rho0=1
print(f"params: {params}\n")

print("split prior decays with depth: p_split(d) = alpha * (1+d)^-beta")
for d in range(5):
    print(f"  depth {d}: {math.exp(log_p_split(d, params)):.4f}")

print("\nat a node with 3 available splits at depth 1:")
leaf_mass = math.exp(log_p_leaf(1, 3, params))
split_mass = math.exp(log_p_inner(1, 3, params))
print(f"  stop probability:        {leaf_mass:.4f}")
print(f"  each of 3 split choices: {split_mass:.4f}")
print(f"  total mass:              {leaf_mass + 3 * split_mass:.10f}")

print("\nleaf likelihood rewards purity (counts -> log likelihood):")
for counts in [(8, 0), (7, 1), (4, 4), (0, 8)]:
    value = log_leaf_likelihood(LabelCounts(*counts), params)
    print(f"  {counts}: {value:8.4f}")

print("\nprior normalization over the whole tree space of a toy dataset:")
rng = np.random.default_rng(0)
dataset = BinaryDataset.from_arrays(
    rng.integers(0, 2, size=(5, 3), dtype=np.uint8),
    rng.integers(0, 2, size=5, dtype=np.uint8),
)
total = 0.0
count = 0
for _, log_prior, _ in enumerate_trees(dataset, params):
    total += math.exp(log_prior)
    count += 1
print(f"  {count} trees, prior mass sums to {total:.12f}")
