"""Why the graph, not a tree of subproblems: shared work and reversible state.

Different split orders land on the same subset of samples.  The search keys
every subproblem by a 128-bit hash of its member bitset (plus depth), so all
paths converge on one record and its bounds are computed once.  The working
subset itself is a single bitset mutated in place and rolled back exactly,
checkpoint by checkpoint.
"""

import numpy as np

from maptree import (
    BinaryDataset,
    PosteriorParams,
    SubproblemCache,
    expand,
    full_subset,
    label_counts,
    make_root,
    restrict,
    subset_hash,
    undo,
    valid_splits,
)

rng = np.random.default_rng(1)
features = rng.integers(0, 2, size=(200, 6), dtype=np.uint8)
labels = rng.integers(0, 2, size=200, dtype=np.uint8)
dataset = BinaryDataset.from_arrays(features, labels)
params = PosteriorParams()

print("reversible bitset: restrict narrows in place, undo restores bit-exactly")
subset = full_subset(dataset)
print(f"  start:              {len(subset)} samples, hash {subset_hash(subset)}")
t1 = restrict(subset, dataset, 0, 1)
print(f"  after feature0=1:   {len(subset)} samples, counts {label_counts(subset, dataset)}")
t2 = restrict(subset, dataset, 3, 0)
print(f"  then feature3=0:    {len(subset)} samples, valid splits {valid_splits(subset, dataset)}")
undo(subset, t2)
undo(subset, t1)
print(f"  after two undos:    {len(subset)} samples, hash {subset_hash(subset)}\n")

print("order independence: f0=1 then f3=0 reaches the same subset as f3=0 then f0=1")
a = full_subset(dataset)
restrict(a, dataset, 0, 1)
restrict(a, dataset, 3, 0)
b = full_subset(dataset)
restrict(b, dataset, 3, 0)
restrict(b, dataset, 0, 1)
print(f"  hashes: {subset_hash(a)} == {subset_hash(b)}\n")

print("the cache turns that into sharing inside the explicit graph:")
cache = SubproblemCache()
root = make_root(dataset, params, cache)
work = full_subset(dataset)
expand(root, work, dataset, params, cache)
a_f0 = root.and_children[0]
token = restrict(work, dataset, a_f0.feature, 1)
expand(a_f0.child1, work, dataset, params, cache)
undo(work, token)
a_f3 = root.and_children[3]
token = restrict(work, dataset, a_f3.feature, 0)
expand(a_f3.child0, work, dataset, params, cache)
undo(work, token)
# find the depth-2 node for (f0=1, f3=0): both expansions produced it once
shared = [
    node
    for node in cache.table.values()
    if node.depth == 2 and len(node.parents) > 1
]
print(f"  depth-2 records with multiple parents: {len(shared)}")
print(f"  total records in the cache:            {len(cache)}")
