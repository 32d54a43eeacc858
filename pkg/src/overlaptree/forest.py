"""Random forest construction and violation consistency scoring.

The forest exists only to stress the reference tree's findings: each tree
sees a bootstrap resample and a reduced feature set, and a sample's
consistency is the fraction of trees that place it in a flagged leaf.
Consistency is always evaluated on the original dataset, not out-of-bag.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import rng as rngmod
from .cart import DecisionTree, Hyperparameters, apply_batch, fit_tree, forest_variant, impurity, leaves
from .dataset import Dataset, bootstrap_indices
from .diagnostics import ViolationPolicy, flag_leaf
from .errors import DegenerateBootstrap, InvalidParameters

AGGREGATIONS = ("mean", "median")


@dataclass(frozen=True)
class RandomForest:
    """Trees fit on bootstrap resamples with the square-root feature rule.

    bootstrap_seeds records each tree's rng spawn key (stream, tree,
    attempt), enough to regenerate its exact bootstrap draw.
    """

    trees: tuple[DecisionTree, ...]
    hyperparameters: Hyperparameters
    bootstrap_seeds: tuple[tuple[int, ...], ...]

    @property
    def n_trees(self) -> int:
        return len(self.trees)


@dataclass(frozen=True)
class ConsistencyProfile:
    """Per-sample flagged-leaf fractions across a threshold grid.

    per_sample[s, t] is the fraction of trees whose leaf containing sample
    s is flagged at thresholds[t]; every value is a multiple of 1/n_trees.
    """

    thresholds: tuple[float, ...]
    per_sample: np.ndarray
    n_trees: int
    mode: str
    criterion: str
    aggregation: str = "mean"

    def __post_init__(self):
        m = np.asarray(self.per_sample, dtype=np.float64)
        m.setflags(write=False)
        object.__setattr__(self, "per_sample", m)


def fit_forest(
    dataset: Dataset,
    hp: Hyperparameters,
    n_trees: int,
    seed: int,
    threads: int = 1,
    max_bootstrap_retries: int = 10,
) -> RandomForest:
    """Fit n_trees trees, each on its own seeded bootstrap resample.

    A bootstrap draw that captures only one treatment group is redrawn
    from a fresh substream, up to max_bootstrap_retries times, then
    DegenerateBootstrap. Results are identical for any thread count.
    """
    if n_trees < 1:
        raise InvalidParameters(f"n_trees must be >= 1, got {n_trees}")
    forest_hp = forest_variant(hp, dataset.n_features)
    n = dataset.n_samples

    def one(tree_index: int) -> tuple[DecisionTree, tuple[int, ...]]:
        for attempt in range(max_bootstrap_retries):
            gen = rngmod.substream(seed, rngmod.FOREST, tree_index, attempt)
            idx = bootstrap_indices(n, gen)
            boot = dataset.take(idx)
            b0, b1 = boot.group_counts
            if b0 == 0 or b1 == 0:
                continue
            return fit_tree(boot, forest_hp, gen), (rngmod.FOREST, tree_index, attempt)
        raise DegenerateBootstrap(
            f"tree {tree_index}: {max_bootstrap_retries} bootstrap draws in a row "
            "contained a single treatment group"
        )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            fitted = list(pool.map(one, range(n_trees)))
    else:
        fitted = [one(b) for b in range(n_trees)]
    return RandomForest(
        trees=tuple(tree for tree, _ in fitted),
        hyperparameters=forest_hp,
        bootstrap_seeds=tuple(key for _, key in fitted),
    )


def _tree_flag_counts(
    tree: DecisionTree, dataset: Dataset, policies: list[ViolationPolicy]
) -> np.ndarray:
    """(n_samples, grid) 0/1 matrix: is sample s in a flagged leaf at t."""
    leaf_ids = apply_batch(tree, dataset.features)
    tree_leaves = leaves(tree)
    # relative mode compares against this tree's own bootstrap root
    root_h = impurity(policies[0].criterion, *tree.root_counts)
    flags = np.empty((len(tree_leaves), len(policies)), dtype=np.int64)
    for leaf in tree_leaves:
        for gi, pol in enumerate(policies):
            flags[leaf.leaf_id, gi] = flag_leaf(leaf.n0, leaf.n1, root_h, pol)
    return flags[leaf_ids]


def sample_consistency(
    forest: RandomForest,
    dataset: Dataset,
    policy: ViolationPolicy,
    thresholds: tuple[float, ...],
    threads: int = 1,
    aggregation: str = "mean",
) -> ConsistencyProfile:
    """Fraction of trees flagging each sample, per grid threshold.

    The dataset must be the original one the forest's bootstraps were
    drawn from; every tree is applied to all of it.
    """
    if list(thresholds) != sorted(thresholds):
        raise InvalidParameters("thresholds must be ascending")
    if aggregation not in AGGREGATIONS:
        raise InvalidParameters(f"aggregation must be one of {AGGREGATIONS}")
    policies = [replace(policy, threshold=float(t)) for t in thresholds]

    def one(tree: DecisionTree) -> np.ndarray:
        return _tree_flag_counts(tree, dataset, policies)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(one, forest.trees))
    else:
        parts = [one(tree) for tree in forest.trees]
    counts = np.zeros((dataset.n_samples, len(thresholds)), dtype=np.int64)
    for part in parts:
        counts += part
    return ConsistencyProfile(
        thresholds=tuple(float(t) for t in thresholds),
        per_sample=counts / forest.n_trees,
        n_trees=forest.n_trees,
        mode=policy.mode,
        criterion=policy.criterion,
        aggregation=aggregation,
    )


def leaf_consistency(
    tree: DecisionTree,
    dataset: Dataset,
    profile: ConsistencyProfile,
    threshold_index: int,
    aggregation: str = "mean",
) -> np.ndarray:
    """Aggregate members' consistencies per leaf of the reference tree.

    Returns one value per leaf_id. A leaf with no members in this dataset
    (possible only if the dataset differs from the fit data) yields 0.
    """
    if aggregation not in AGGREGATIONS:
        raise InvalidParameters(f"aggregation must be one of {AGGREGATIONS}")
    if not 0 <= threshold_index < len(profile.thresholds):
        raise InvalidParameters(f"threshold_index {threshold_index} out of range")
    if profile.per_sample.shape[0] != dataset.n_samples:
        raise InvalidParameters("profile and dataset disagree on sample count")
    leaf_ids = apply_batch(tree, dataset.features)
    values = profile.per_sample[:, threshold_index]
    out = np.zeros(len(leaves(tree)), dtype=np.float64)
    for leaf in leaves(tree):
        members = values[leaf_ids == leaf.leaf_id]
        if members.size == 0:
            continue
        out[leaf.leaf_id] = float(np.mean(members) if aggregation == "mean" else np.median(members))
    return out
