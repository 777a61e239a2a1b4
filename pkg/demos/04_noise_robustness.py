"""Label noise: posterior-weighted trees resist what greedy splitting absorbs.

Flip a quarter of the training labels and a depth-capped greedy fit keeps
splitting to explain them, while the posterior prices those splits as not
worth their prior cost.  Test accuracy (clean labels) tells the story.
"""

import numpy as np

from maptree import (
    BinaryDataset,
    PosteriorParams,
    SearchBudget,
    SynthConfig,
    evaluate,
    fit_greedy,
    make_rng,
    maptree_search,
    n_nodes,
    random_tree,
    sample_dataset,
)
from maptree.synthetic import route_labels

REPEATS = 5
params = PosteriorParams()
print(f"{'eps':>5} {'search acc':>11} {'greedy acc':>11} {'search sz':>10} {'greedy sz':>10}")
for eps in (0.0, 0.1, 0.25):
    acc_s, acc_g, size_s, size_g = [], [], [], []
    for seed in range(REPEATS):
        config = SynthConfig(
            n_features=16, n_internal_nodes=2, n_samples=300, noise_eps=eps, seed=seed
        )
        rng = make_rng(config.seed)
        truth = random_tree(config, rng)
        train = sample_dataset(truth, config, rng)
        test_features = rng.integers(0, 2, size=(1500, 16), dtype=np.uint8)
        test = BinaryDataset.from_arrays(test_features, route_labels(truth, test_features))

        result = maptree_search(train, params, SearchBudget(max_expansions=4000))
        greedy = fit_greedy(train, 4)
        acc_s.append(evaluate(result.tree, test, params)["accuracy"])
        acc_g.append(evaluate(greedy, test, params)["accuracy"])
        size_s.append(n_nodes(result.tree))
        size_g.append(n_nodes(greedy))
    print(f"{eps:>5.2f} {np.mean(acc_s):>11.4f} {np.mean(acc_g):>11.4f} "
          f"{np.mean(size_s):>10.1f} {np.mean(size_g):>10.1f}")

print("\nsmaller trees, equal-or-better accuracy as noise grows")
