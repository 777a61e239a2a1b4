/**
 * TypeScript client for the maptree CLI.
 *
 * Everything goes through the installed `maptree` executable and its
 * documented formats (text datasets, maptree-tree-v1 JSON documents,
 * single-line JSON reports, bench CSV). No tree or posterior logic lives
 * here, so a tree document produced through this client is byte-identical
 * to one produced by invoking the CLI directly with the same inputs.
 */

import { spawnSync } from 'node:child_process';
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';

const MAPTREE_BIN = process.env.MAPTREE_BIN ?? 'maptree';

export type BinaryMatrix = ReadonlyArray<ReadonlyArray<number>>;
export type BinaryVector = ReadonlyArray<number>;

export interface FitOptions {
  alpha?: number;
  beta?: number;
  rho1?: number;
  rho0?: number;
  max_expansions?: number;
  time_limit_ms?: number;
}

export interface FitReport {
  neg_log_joint: number;
  optimal: boolean;
  expansions_used: number;
  elapsed_ms: number;
  n_nodes: number;
}

export interface EvalMetrics {
  accuracy: number;
  mean_log_likelihood: number;
  n_nodes: number;
}

export interface SynthOptions {
  n_features?: number;
  n_internal_nodes?: number;
  n_samples?: number;
  noise_eps?: number;
  seed?: number;
}

export interface SynthResult {
  features: number[][];
  labels: number[];
  tree: Tree;
}

interface TreeDocument {
  format: string;
  n_features: number;
  root: unknown;
}

/** Handle over a serialized tree document; preserves the exact bytes. */
export class Tree {
  private constructor(readonly text: string) {}

  static fromText(text: string): Tree {
    const doc = JSON.parse(text) as TreeDocument;
    if (doc.format !== 'maptree-tree-v1') {
      throw new Error(`not a maptree-tree-v1 document (format: ${String(doc.format)})`);
    }
    return new Tree(text);
  }

  static load(path: string): Tree {
    return Tree.fromText(readFileSync(path, 'utf8'));
  }

  get document(): TreeDocument {
    return JSON.parse(this.text) as TreeDocument;
  }

  get nFeatures(): number {
    return this.document.n_features;
  }

  save(path: string): void {
    writeFileSync(path, this.text);
  }
}

function validateMatrix(features: BinaryMatrix): void {
  if (features.length === 0) {
    throw new Error('features matrix is empty');
  }
  const width = features[0].length;
  if (width === 0) {
    throw new Error('features matrix has zero columns');
  }
  for (const row of features) {
    if (row.length !== width) {
      throw new Error(`ragged features matrix: expected ${width} columns, got ${row.length}`);
    }
    for (const value of row) {
      if (value !== 0 && value !== 1) {
        throw new Error(`non-binary feature value: ${value}`);
      }
    }
  }
}

function validateLabels(labels: BinaryVector, n: number): void {
  if (labels.length !== n) {
    throw new Error(`labels length ${labels.length} does not match ${n} samples`);
  }
  for (const value of labels) {
    if (value !== 0 && value !== 1) {
      throw new Error(`non-binary label: ${value}`);
    }
  }
}

function datasetText(features: BinaryMatrix, labels: BinaryVector): string {
  const lines = features.map((row, i) => [...row, labels[i]].join(' '));
  return lines.join('\n') + '\n';
}

function parseDatasetText(text: string): { features: number[][]; labels: number[] } {
  const features: number[][] = [];
  const labels: number[] = [];
  for (const line of text.split('\n')) {
    if (!line.trim() || line.startsWith('#')) continue;
    const tokens = line.trim().split(/\s+/).map(Number);
    features.push(tokens.slice(0, -1));
    labels.push(tokens[tokens.length - 1]);
  }
  return { features, labels };
}

function runCli(args: string[]): string {
  const proc = spawnSync(MAPTREE_BIN, args, { encoding: 'utf8', maxBuffer: 1 << 26 });
  if (proc.error) {
    throw new Error(`failed to run ${MAPTREE_BIN}: ${proc.error.message}`);
  }
  if (proc.status !== 0) {
    throw new Error(`${MAPTREE_BIN} ${args[0]} exited ${proc.status}: ${proc.stderr.trim()}`);
  }
  return proc.stdout;
}

function withTempDir<T>(body: (dir: string) => T): T {
  const dir = mkdtempSync(join(tmpdir(), 'maptree-'));
  try {
    return body(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

function optionFlags(options: FitOptions): string[] {
  const flags: string[] = [];
  if (options.alpha !== undefined) flags.push('--alpha', String(options.alpha));
  if (options.beta !== undefined) flags.push('--beta', String(options.beta));
  if (options.rho1 !== undefined) flags.push('--rho1', String(options.rho1));
  if (options.rho0 !== undefined) flags.push('--rho0', String(options.rho0));
  if (options.max_expansions !== undefined) {
    flags.push('--max-expansions', String(options.max_expansions));
  }
  if (options.time_limit_ms !== undefined) {
    flags.push('--time-limit-ms', String(options.time_limit_ms));
  }
  return flags;
}

/** Search for the MAP tree of a binary dataset. */
export function fit(
  features: BinaryMatrix,
  labels: BinaryVector,
  options: FitOptions = {},
): { tree: Tree; report: FitReport } {
  validateMatrix(features);
  validateLabels(labels, features.length);
  return withTempDir((dir) => {
    const dataPath = join(dir, 'data.txt');
    const treePath = join(dir, 'tree.json');
    writeFileSync(dataPath, datasetText(features, labels));
    const stdout = runCli(['fit', dataPath, '--out', treePath, ...optionFlags(options)]);
    const report = JSON.parse(stdout) as FitReport;
    return { tree: Tree.fromText(readFileSync(treePath, 'utf8')), report };
  });
}

/** Per-sample probability of label 1 under the tree's leaf posteriors. */
export function predict(
  tree: Tree,
  features: BinaryMatrix,
  options: Pick<FitOptions, 'rho1' | 'rho0'> = {},
): number[] {
  validateMatrix(features);
  if (features[0].length !== tree.nFeatures) {
    throw new Error(`tree expects ${tree.nFeatures} features, matrix has ${features[0].length}`);
  }
  return withTempDir((dir) => {
    const dataPath = join(dir, 'data.txt');
    const treePath = join(dir, 'tree.json');
    // the dataset format carries a label column; predictions ignore it
    writeFileSync(dataPath, datasetText(features, features.map(() => 0)));
    tree.save(treePath);
    const stdout = runCli(['predict', treePath, dataPath, ...optionFlags(options)]);
    return stdout
      .trim()
      .split('\n')
      .map((line) => Number(line.split(' ')[0]));
  });
}

/** Accuracy, per-sample mean log likelihood, and size on labeled data. */
export function evaluate(
  tree: Tree,
  features: BinaryMatrix,
  labels: BinaryVector,
  options: Pick<FitOptions, 'rho1' | 'rho0'> = {},
): EvalMetrics {
  validateMatrix(features);
  validateLabels(labels, features.length);
  return withTempDir((dir) => {
    const dataPath = join(dir, 'data.txt');
    const treePath = join(dir, 'tree.json');
    writeFileSync(dataPath, datasetText(features, labels));
    tree.save(treePath);
    const stdout = runCli(['eval', dataPath, '--tree', treePath, ...optionFlags(options)]);
    return JSON.parse(stdout) as EvalMetrics;
  });
}

/** Generate a tree-labeled synthetic dataset with optional label noise. */
export function synth(options: SynthOptions = {}): SynthResult {
  return withTempDir((dir) => {
    const dataPath = join(dir, 'data.txt');
    const treePath = join(dir, 'tree.json');
    const flags: string[] = ['--out', dataPath, '--tree-out', treePath];
    if (options.n_features !== undefined) flags.push('--n-features', String(options.n_features));
    if (options.n_internal_nodes !== undefined) {
      flags.push('--n-internal-nodes', String(options.n_internal_nodes));
    }
    if (options.n_samples !== undefined) flags.push('--n-samples', String(options.n_samples));
    if (options.noise_eps !== undefined) flags.push('--noise-eps', String(options.noise_eps));
    if (options.seed !== undefined) flags.push('--seed', String(options.seed));
    runCli(['synth', ...flags]);
    const { features, labels } = parseDatasetText(readFileSync(dataPath, 'utf8'));
    return { features, labels, tree: Tree.load(treePath) };
  });
}

export interface BenchRow {
  budget: number;
  elapsed_ms: number;
  neg_log_joint: number;
  optimal: boolean;
}

/** Parse the CSV emitted by `maptree bench`. */
export function parseBenchCsv(csv: string): BenchRow[] {
  const lines = csv.trim().split('\n');
  if (lines[0] !== 'budget,elapsed_ms,neg_log_joint,optimal') {
    throw new Error(`unexpected bench CSV header: ${lines[0]}`);
  }
  return lines.slice(1).map((line) => {
    const [budget, elapsed, cost, optimal] = line.split(',');
    return {
      budget: Number(budget),
      elapsed_ms: Number(elapsed),
      neg_log_joint: Number(cost),
      optimal: optimal === 'true',
    };
  });
}

/** Run `maptree bench` on an in-memory dataset and parse the rows. */
export function bench(
  features: BinaryMatrix,
  labels: BinaryVector,
  budgets?: number[],
): BenchRow[] {
  validateMatrix(features);
  validateLabels(labels, features.length);
  return withTempDir((dir) => {
    const dataPath = join(dir, 'data.txt');
    writeFileSync(dataPath, datasetText(features, labels));
    const args = ['bench', dataPath];
    if (budgets) args.push('--budgets', budgets.join(','));
    return parseBenchCsv(runCli(args));
  });
}
