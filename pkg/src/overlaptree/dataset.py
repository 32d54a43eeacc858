"""Dataset loading, validation, synthesis, folds and bootstraps.

A Dataset is the covariate matrix X, the binary treatment vector A, and the
ordered feature names; (N0, N1) are the group counts every probability
computation downstream refers back to.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import rng as rngmod
from .errors import (
    EmptyDataset,
    InvalidFoldCount,
    InvalidParameters,
    MissingValue,
    NonBinaryTreatment,
    UnknownColumn,
)


@dataclass(frozen=True)
class Dataset:
    """Immutable covariate/treatment dataset.

    features : (n, d) float64 matrix, finite everywhere
    treatment : (n,) int8 vector with entries in {0, 1}
    feature_names : d unique, non-empty column names
    """

    features: np.ndarray
    treatment: np.ndarray
    feature_names: tuple[str, ...]

    def __post_init__(self):
        X = np.asarray(self.features, dtype=np.float64)
        a = np.asarray(self.treatment, dtype=np.int8)
        if X.ndim != 2:
            raise ValueError("features must be a 2-D matrix")
        if X.shape[0] == 0:
            raise EmptyDataset("dataset has no rows")
        if a.shape != (X.shape[0],):
            raise ValueError("treatment length must match feature rows")
        if not np.isfinite(X).all():
            r, c = np.argwhere(~np.isfinite(X))[0]
            raise MissingValue(int(r), self.feature_names[int(c)], "non-finite")
        bad = (a != 0) & (a != 1)
        if bad.any():
            r = int(np.argmax(bad))
            raise NonBinaryTreatment(r, str(self.treatment[r]))
        names = tuple(str(n) for n in self.feature_names)
        if len(names) != X.shape[1]:
            raise ValueError("feature_names length must match feature columns")
        if any(not n for n in names) or len(set(names)) != len(names):
            raise ValueError("feature names must be unique and non-empty")
        X.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "treatment", a)
        object.__setattr__(self, "feature_names", names)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def group_counts(self) -> tuple[int, int]:
        n1 = int(self.treatment.sum())
        return self.n_samples - n1, n1

    def take(self, indices: np.ndarray) -> "Dataset":
        """Row subset (or resample) as a new Dataset."""
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(self.features[idx], self.treatment[idx], self.feature_names)


@dataclass(frozen=True)
class FoldAssignment:
    """Per-sample fold index in [0, k)."""

    fold_index: np.ndarray
    k: int

    def __post_init__(self):
        f = np.asarray(self.fold_index, dtype=np.int64)
        f.setflags(write=False)
        object.__setattr__(self, "fold_index", f)

    def split(self, fold: int) -> tuple[np.ndarray, np.ndarray]:
        """(train_indices, validation_indices) for one fold."""
        val = self.fold_index == fold
        return np.flatnonzero(~val), np.flatnonzero(val)


def _parse_cell(raw: str, row: int, col: str) -> float:
    text = raw.strip()
    if not text:
        raise MissingValue(row, col, "empty cell")
    try:
        v = float(text)
    except ValueError:
        raise MissingValue(row, col, f"cannot parse {raw!r} as a number") from None
    if not math.isfinite(v):
        raise MissingValue(row, col, "non-finite")
    return v


def load_csv(path, treatment_column: str, categorical_columns=None) -> Dataset:
    """Load an RFC-4180 CSV (header row, UTF-8, '.' decimals) into a Dataset.

    Categorical columns are one-hot encoded in place into ``<col>=<level>``
    0/1 columns, levels in sorted order; every other column must parse as a
    real number. Row indices in errors are 0-based data rows (the header is
    not counted).
    """
    categorical = list(categorical_columns or [])
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyDataset(f"{path}: file is empty") from None
        header = [h.strip() for h in header]
        rows = [r for r in reader if r]

    if treatment_column not in header:
        raise UnknownColumn(treatment_column)
    for col in categorical:
        if col not in header:
            raise UnknownColumn(col)
    if treatment_column in categorical:
        raise InvalidParameters("treatment column cannot be categorical")
    if not rows:
        raise EmptyDataset(f"{path}: no data rows")

    col_index = {name: j for j, name in enumerate(header)}
    treat_j = col_index[treatment_column]
    categorical_set = set(categorical)

    treatment = np.empty(len(rows), dtype=np.int8)
    for i, row in enumerate(rows):
        if len(row) != len(header):
            raise MissingValue(i, header[min(len(row), len(header) - 1)],
                               f"expected {len(header)} cells, got {len(row)}")
        cell = row[treat_j].strip()
        if cell == "0":
            treatment[i] = 0
        elif cell == "1":
            treatment[i] = 1
        else:
            # tolerate float-formatted 0/1 (e.g. "1.0") but nothing else
            try:
                v = float(cell)
            except ValueError:
                raise NonBinaryTreatment(i, row[treat_j]) from None
            if v == 0.0:
                treatment[i] = 0
            elif v == 1.0:
                treatment[i] = 1
            else:
                raise NonBinaryTreatment(i, row[treat_j])

    columns: list[np.ndarray] = []
    names: list[str] = []
    for name in header:
        if name == treatment_column:
            continue
        j = col_index[name]
        if name in categorical_set:
            raw = [row[j].strip() for row in rows]
            for level in sorted(set(raw)):
                columns.append(np.array([1.0 if v == level else 0.0 for v in raw]))
                names.append(f"{name}={level}")
        else:
            columns.append(np.array([_parse_cell(row[j], i, name)
                                     for i, row in enumerate(rows)]))
            names.append(name)

    if not columns:
        raise EmptyDataset(f"{path}: no feature columns besides {treatment_column!r}")
    X = np.column_stack(columns)
    return Dataset(X, treatment, tuple(names))


def write_csv(dataset: Dataset, path, treatment_column: str = "A") -> None:
    """Write a Dataset as a CSV loadable by load_csv."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(dataset.feature_names) + [treatment_column])
        for i in range(dataset.n_samples):
            row = [repr(float(v)) for v in dataset.features[i]]
            row.append(str(int(dataset.treatment[i])))
            writer.writerow(row)


def synth_rotated_square(n_samples: int, seed: int) -> Dataset:
    """Two uniform groups on the diamond |x1|+|x2| <= sqrt(2), except that
    the open first quadrant belongs to group 1 only.

    Base treatment is Bernoulli(0.5); any sample with x1>0 and x2>0 is
    forced to group 1. The diamond is the unit square [-1,1]^2 rotated by
    45 degrees (vertices at (+-sqrt(2), 0), (0, +-sqrt(2))).
    """
    if n_samples < 1:
        raise EmptyDataset("n_samples must be >= 1")
    gen = rngmod.substream(seed, rngmod.SYNTH)
    uv = gen.uniform(-1.0, 1.0, size=(n_samples, 2))
    c = 1.0 / math.sqrt(2.0)
    x1 = (uv[:, 0] - uv[:, 1]) * c
    x2 = (uv[:, 0] + uv[:, 1]) * c
    treatment = gen.integers(0, 2, size=n_samples).astype(np.int8)
    treatment[(x1 > 0.0) & (x2 > 0.0)] = 1
    return Dataset(np.column_stack([x1, x2]), treatment, ("x1", "x2"))


def synth_null_overlap(n_samples: int, n_features: int, seed: int) -> Dataset:
    """Standard-normal covariates with treatment independent of them.

    Both groups share one distribution by construction, so any violation a
    model appears to find in this data is an artifact.
    """
    if n_samples < 2:
        raise EmptyDataset("n_samples must be >= 2")
    if n_features < 1:
        raise InvalidParameters("n_features must be >= 1")
    gen = rngmod.substream(seed, rngmod.SYNTH)
    X = gen.standard_normal(size=(n_samples, n_features))
    treatment = gen.integers(0, 2, size=n_samples).astype(np.int8)
    names = tuple(f"x{j + 1}" for j in range(n_features))
    return Dataset(X, treatment, names)


def make_folds(dataset: Dataset, k: int, seed: int) -> FoldAssignment:
    """Stratified k-fold assignment.

    Per-group counts are spread so each fold's group-1 proportion is within
    one sample of the global proportion, and overall fold sizes differ by
    at most one. Within a group, the +1 remainders go to the folds that are
    currently smallest (ties to the lowest fold index).
    """
    n = dataset.n_samples
    if k < 2:
        raise InvalidFoldCount(f"k must be >= 2, got {k}")
    if k > n:
        raise InvalidFoldCount(f"k={k} exceeds n_samples={n}")
    gen = rngmod.substream(seed, rngmod.FOLDS)
    fold_index = np.empty(n, dtype=np.int64)
    totals = np.zeros(k, dtype=np.int64)
    for group in (0, 1):
        members = np.flatnonzero(dataset.treatment == group)
        gen.shuffle(members)
        base, rem = divmod(len(members), k)
        counts = np.full(k, base, dtype=np.int64)
        for _ in range(rem):
            counts[int(np.argmin(totals + counts))] += 1
        start = 0
        for fold in range(k):
            stop = start + counts[fold]
            fold_index[members[start:stop]] = fold
            start = stop
        totals += counts
    return FoldAssignment(fold_index, k)


def bootstrap_indices(n: int, gen: np.random.Generator) -> np.ndarray:
    """n indices drawn uniformly with replacement from [0, n)."""
    if n < 1:
        raise EmptyDataset("n must be >= 1")
    return gen.integers(0, n, size=n, dtype=np.int64)
