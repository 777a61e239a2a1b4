"""Binary dataset storage and the reversible sparse bitset over sample indices.

Datasets are column-packed: feature f is a bit-vector with sample i at bit
(i mod 64) of word floor(i/64), LSB first.  The working subset of a search is
a SampleSubset: a word array plus the indices of its nonzero words, with a
checkpoint stack so in-place restriction can be undone bit-exactly.

File format: plain text, one sample per line, whitespace-separated 0/1
tokens with the label last.  Leading lines starting with '#' are skipped.
"""

from __future__ import annotations

import io
from pathlib import Path
from typing import Union

import numpy as np

from ._bits import (
    WORD_BITS,
    hash_powers,
    n_words,
    pack_bits,
    popcount,
    popcount_rows,
    unpack_bits,
)
from .posterior import LabelCounts


class ParseError(ValueError):
    """Malformed dataset text; message names the offending line."""


class UndoDisciplineError(RuntimeError):
    """undo() called with a token that is not the most recent checkpoint."""


class BinaryDataset:
    """Immutable column-packed binary dataset with binary labels."""

    __slots__ = ("n_samples", "n_features", "cols", "labels")

    def __init__(self, cols: np.ndarray, labels: np.ndarray, n_samples: int):
        if n_samples < 1 or cols.shape[0] < 1:
            raise ValueError("dataset needs at least one sample and one feature")
        self.n_samples = n_samples
        self.n_features = cols.shape[0]
        self.cols = cols
        self.labels = labels
        self.cols.setflags(write=False)
        self.labels.setflags(write=False)

    @property
    def width(self) -> int:
        return self.cols.shape[1]

    def full_words(self) -> np.ndarray:
        words = np.full(self.width, np.uint64(0xFFFFFFFFFFFFFFFF), dtype=np.uint64)
        tail = self.n_samples % WORD_BITS
        if tail:
            words[-1] = np.uint64((1 << tail) - 1)
        return words

    @classmethod
    def from_arrays(cls, features, labels) -> "BinaryDataset":
        """Build from an (N, F) 0/1 matrix and an N-vector of 0/1 labels."""
        features = np.asarray(features)
        labels = np.asarray(labels)
        if features.ndim != 2:
            raise ValueError(f"features must be 2-D, got shape {features.shape}")
        n, f = features.shape
        if labels.shape != (n,):
            raise ValueError(f"labels must have shape ({n},), got {labels.shape}")
        if not np.isin(features, (0, 1)).all() or not np.isin(labels, (0, 1)).all():
            raise ValueError("features and labels must be 0/1")
        cols = np.stack([pack_bits(features[:, j]) for j in range(f)])
        return cls(cols, pack_bits(labels), n)

    def to_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        features = np.stack(
            [unpack_bits(self.cols[f], self.n_samples) for f in range(self.n_features)],
            axis=1,
        )
        return features, unpack_bits(self.labels, self.n_samples)


def load_dataset(source: Union[str, Path, io.IOBase]) -> BinaryDataset:
    """Parse the text format: 0/1 tokens per line, label in the last column."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="ascii") as handle:
            text = handle.read()
    else:
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("ascii")

    rows = []
    labels = []
    row_len = None
    in_header = True
    for lineno, line in enumerate(text.splitlines(), start=1):
        if in_header and line.startswith("#"):
            continue
        if not line.strip():
            continue
        in_header = False
        tokens = line.split()
        if row_len is None:
            row_len = len(tokens)
            if row_len < 2:
                raise ParseError(f"line {lineno}: need at least one feature and a label")
        elif len(tokens) != row_len:
            raise ParseError(
                f"line {lineno}: ragged row, expected {row_len} tokens, got {len(tokens)}"
            )
        try:
            values = [int(tok) for tok in tokens]
        except ValueError:
            raise ParseError(f"line {lineno}: non-binary token") from None
        if any(v not in (0, 1) for v in values):
            raise ParseError(f"line {lineno}: non-binary token")
        rows.append(values[:-1])
        labels.append(values[-1])
    if not rows:
        raise ParseError("empty input: no data rows")
    return BinaryDataset.from_arrays(np.array(rows, dtype=np.uint8), np.array(labels, dtype=np.uint8))


def write_dataset(dataset: BinaryDataset, dest: Union[str, Path, io.IOBase]) -> None:
    """Write the text format load_dataset reads."""
    features, labels = dataset.to_arrays()
    lines = []
    for i in range(dataset.n_samples):
        lines.append(" ".join(str(int(v)) for v in features[i]) + f" {int(labels[i])}")
    text = "\n".join(lines) + "\n"
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="ascii") as handle:
            handle.write(text)
    else:
        dest.write(text)


class SampleSubset:
    """Reversible sparse bitset over sample indices.

    `words` is the packed membership mask, `active` holds the indices of the
    currently nonzero words (ascending), and each restrict() pushes a
    checkpoint that undo() pops to restore both bit-exactly.
    """

    __slots__ = ("words", "active", "stack")

    def __init__(self, words: np.ndarray, active: np.ndarray):
        self.words = words
        self.active = active
        self.stack: list = []

    def __len__(self) -> int:
        return popcount(self.words[self.active])

    def __contains__(self, i: int) -> bool:
        return bool((self.words[i // WORD_BITS] >> np.uint64(i % WORD_BITS)) & np.uint64(1))

    def indices(self) -> np.ndarray:
        """Member sample indices, ascending (test/debug helper)."""
        return np.nonzero(unpack_bits(self.words, self.words.size * WORD_BITS))[0]


def full_subset(dataset: BinaryDataset) -> SampleSubset:
    """The subset containing all N samples, with an empty checkpoint stack."""
    words = dataset.full_words()
    return SampleSubset(words, np.nonzero(words)[0])


def label_counts(subset: SampleSubset, dataset: BinaryDataset) -> LabelCounts:
    """Counts of label-1 and label-0 members; visits only active words."""
    active = subset.active
    words = subset.words[active]
    c1 = popcount(words & dataset.labels[active])
    return LabelCounts(c1, popcount(words) - c1)


def valid_splits(subset: SampleSubset, dataset: BinaryDataset) -> list[int]:
    """Features that split the subset into two nonempty parts, ascending."""
    active = subset.active
    words = subset.words[active]
    size = popcount(words)
    ones = popcount_rows(dataset.cols[:, active] & words)
    return [int(f) for f in np.nonzero((ones > 0) & (ones < size))[0]]


def restrict(subset: SampleSubset, dataset: BinaryDataset, feature: int, value: int):
    """Intersect the subset in place with {i : feature f of sample i == value}.

    Returns a checkpoint token for undo().  Only changed words are recorded;
    padding bits stay clear because members only ever get removed.
    """
    active = subset.active
    old = subset.words[active]
    col = dataset.cols[feature][active]
    new = old & col if value else old & ~col
    changed = new != old
    token = (active, active[changed], old[changed])
    subset.stack.append(token)
    subset.words[active] = new
    subset.active = active[new != 0]
    return token


def undo(subset: SampleSubset, token) -> None:
    """Pop the most recent checkpoint, restoring the subset bit-exactly."""
    if not subset.stack or subset.stack[-1] is not token:
        raise UndoDisciplineError("undo out of order: token is not the most recent checkpoint")
    subset.stack.pop()
    active, changed_idx, old_values = token
    subset.words[changed_idx] = old_values
    subset.active = active


def subset_hash(subset: SampleSubset) -> tuple[int, int]:
    """128-bit polynomial block hash (h1, h2) of the subset.

    h_k = sum over blocks b of word_b * K_k^b, modulo 2^64; zero blocks
    contribute nothing, so only active words are visited.
    """
    p1, p2 = hash_powers(subset.words.size)
    active = subset.active
    words = subset.words[active]
    h1 = (words * p1[active]).sum(dtype=np.uint64)
    h2 = (words * p2[active]).sum(dtype=np.uint64)
    return int(h1), int(h2)
