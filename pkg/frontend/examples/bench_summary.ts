/**
 * From bench CSV rows to summary tables.
 *
 * Generates a noisy synthetic dataset, walks the expansion-budget ladder with
 * `maptree bench`, and prints the anytime curve; then refits at a few rungs
 * and scores each tree against the uncorrupted labels of the same rows
 * (regenerated with noise 0 under the same seed), summarizing accuracy and
 * per-sample log likelihood by budget.
 *
 * Run from frontend/ with:  npx ts-node --esm examples/bench_summary.ts
 */

import { bench, evaluate, fit, synth } from '../src/index.js';

const GEN = { n_features: 12, n_internal_nodes: 5, n_samples: 300, seed: 2 };
const train = synth({ ...GEN, noise_eps: 0.15 });
const clean = synth({ ...GEN, noise_eps: 0.0 }); // same tree, same rows, true labels

const ladder = [10, 30, 100, 300, 1000, 3000];

console.log('anytime curve (maptree bench):');
console.log('  budget  elapsed_ms  neg_log_joint  optimal');
for (const row of bench(train.features, train.labels, ladder)) {
  console.log(
    `  ${String(row.budget).padStart(6)}  ` +
      `${row.elapsed_ms.toFixed(1).padStart(10)}  ` +
      `${row.neg_log_joint.toFixed(4).padStart(13)}  ${row.optimal}`,
  );
}

console.log('\nrecovery of the uncorrupted labels, by budget:');
console.log('  budget  accuracy  mean_log_likelihood  n_nodes');
for (const budget of ladder) {
  const { tree } = fit(train.features, train.labels, { max_expansions: budget });
  const metrics = evaluate(tree, clean.features, clean.labels);
  console.log(
    `  ${String(budget).padStart(6)}  ` +
      `${metrics.accuracy.toFixed(4).padStart(8)}  ` +
      `${metrics.mean_log_likelihood.toFixed(4).padStart(19)}  ` +
      `${String(metrics.n_nodes).padStart(7)}`,
  );
}
