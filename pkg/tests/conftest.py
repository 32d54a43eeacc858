"""Shared test helpers.

Random inputs are always drawn from seeded generators so every run sees
the same cases; oracles are independent brute-force reimplementations,
never calls back into the code under test.
"""

import math

import numpy as np
import pytest

from overlaptree import Dataset


def make_dataset(features, treatment, names=None):
    X = np.asarray(features, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    t = np.asarray(treatment, dtype=np.int8)
    if names is None:
        names = [f"x{j + 1}" for j in range(X.shape[1])]
    return Dataset(features=X, treatment=t, feature_names=tuple(names))


def random_dataset(gen, n_max=60, d_max=4, grid=8):
    """Small dataset with deliberate duplicate values to exercise ties."""
    n = int(gen.integers(4, n_max + 1))
    d = int(gen.integers(1, d_max + 1))
    X = gen.integers(0, grid, size=(n, d)).astype(np.float64)
    t = gen.integers(0, 2, size=n).astype(np.int8)
    if t.min() == t.max():
        t[0] = 1 - t[0]
    return make_dataset(X, t)


def oracle_impurity(criterion, n0, n1):
    """Scalar impurity written independently of the package formulas."""
    total = n0 + n1
    if total == 0:
        raise ZeroDivisionError
    p = n1 / total
    if criterion == "gini":
        return 1.0 - p * p - (1.0 - p) * (1.0 - p)
    if p == 0.0 or p == 1.0:
        return 0.0
    return -(p * math.log2(p) + (1.0 - p) * math.log2(1.0 - p))


@pytest.fixture
def gen():
    return np.random.default_rng(20240817)
