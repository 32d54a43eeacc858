"""Greedy binary decision trees over treatment labels.

The tree discriminates treatment group 0 from group 1; leaves where one
group dominates are candidate overlap violations. Splits are exact
exhaustive midpoint searches, so fitting is fully deterministic given the
hyperparameters and a generator state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np

from . import kernels
from .dataset import Dataset
from .errors import (
    DegenerateCohort,
    DimensionMismatch,
    EmptyNode,
    InvalidParameters,
    UnknownLeaf,
)

CRITERIA = ("gini", "entropy")


@dataclass(frozen=True)
class Hyperparameters:
    """Regularization knobs for tree growth.

    max_depth counts levels: a tree of max_depth 1 is a lone root leaf, and
    None means unbounded. min_samples_split must be at least twice
    min_samples_leaf or the split could never produce two valid children.
    max_features is the fraction of features drawn (per split) as split
    candidates; the subset has ceil(max_features * d) members.
    """

    criterion: str = "entropy"
    max_depth: Optional[int] = None
    min_samples_leaf: int = 1
    min_samples_split: int = 2
    min_impurity_decrease: float = 0.0
    max_features: float = 1.0

    def __post_init__(self):
        if self.criterion not in CRITERIA:
            raise InvalidParameters(f"criterion must be one of {CRITERIA}, got {self.criterion!r}")
        if self.max_depth is not None and self.max_depth < 1:
            raise InvalidParameters(f"max_depth must be >= 1 or None, got {self.max_depth}")
        if self.min_samples_leaf < 1:
            raise InvalidParameters(f"min_samples_leaf must be >= 1, got {self.min_samples_leaf}")
        if self.min_samples_split < 2:
            raise InvalidParameters(f"min_samples_split must be >= 2, got {self.min_samples_split}")
        if self.min_samples_split < 2 * self.min_samples_leaf:
            raise InvalidParameters("min_samples_split must be >= 2 * min_samples_leaf")
        if self.min_impurity_decrease < 0.0:
            raise InvalidParameters("min_impurity_decrease must be >= 0")
        if not 0.0 < self.max_features <= 1.0:
            raise InvalidParameters(f"max_features must be in (0, 1], got {self.max_features}")

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "max_depth": self.max_depth,
            "min_samples_leaf": self.min_samples_leaf,
            "min_samples_split": self.min_samples_split,
            "min_impurity_decrease": self.min_impurity_decrease,
            "max_features": self.max_features,
        }


@dataclass(frozen=True)
class Leaf:
    leaf_id: int
    n0: int
    n1: int
    depth: int
    impurity: float


@dataclass(frozen=True)
class Internal:
    feature_index: int
    cutoff: float
    left: "TreeNode"
    right: "TreeNode"


TreeNode = Union[Leaf, Internal]


@dataclass(frozen=True)
class DecisionTree:
    root: TreeNode
    hyperparameters: Hyperparameters
    feature_names: tuple[str, ...]
    root_counts: tuple[int, int]
    root_impurity: float

    @property
    def n_features(self) -> int:
        return len(self.feature_names)


def impurity(criterion: str, n0: int, n1: int) -> float:
    """Entropy (base 2, with 0*log0 = 0) or gini of a two-group count pair.

    Entropy ranges over [0, 1] and gini over [0, 0.5]; both are 0 exactly
    when one count is 0, and symmetric in (n0, n1).
    """
    if criterion not in CRITERIA:
        raise InvalidParameters(f"criterion must be one of {CRITERIA}, got {criterion!r}")
    if n0 < 0 or n1 < 0:
        raise InvalidParameters("counts must be non-negative")
    n = n0 + n1
    if n == 0:
        raise EmptyNode("impurity of an empty node is undefined")
    if n0 == 0 or n1 == 0:
        return 0.0
    # each proportion comes from its own count and gini is the product form:
    # both are exactly commutative in floats, so impurity(a,b) == impurity(b,a)
    # bit for bit. Same expression order as the split kernels.
    p0 = n0 / n
    p1 = n1 / n
    if criterion == "gini":
        return 2.0 * p0 * p1
    return float(-(p0 * np.log2(p0) + p1 * np.log2(p1)))


def best_split(rows, dataset: Dataset, hp: Hyperparameters, gen: np.random.Generator):
    """Best admissible (feature_index, cutoff, impurity_decrease) or None.

    Candidate cutoffs are midpoints between consecutive distinct sorted
    values of each considered feature. Ties in impurity decrease resolve to
    the lowest feature index, then the lowest cutoff. The generator is
    consumed only when max_features excludes some features.
    """
    idx = np.asarray(rows, dtype=np.int64)
    labels = dataset.treatment[idx]
    n1 = int(labels.sum())
    parent = impurity(hp.criterion, len(idx) - n1, n1)
    d = dataset.n_features
    m = math.ceil(hp.max_features * d)
    if m >= d:
        considered = range(d)
    else:
        considered = np.sort(gen.choice(d, size=m, replace=False))
    criterion_id = kernels.CRITERION_IDS[hp.criterion]

    best_delta = -math.inf
    best_feature = -1
    best_pos = -1
    for j in considered:
        col = dataset.features[idx, j]
        order = np.argsort(col, kind="stable")
        delta, pos = kernels.scan_split(
            col[order], labels[order], hp.min_samples_leaf, criterion_id, parent
        )
        if delta > best_delta:
            best_delta = delta
            best_feature = int(j)
            best_pos = pos
    if best_feature < 0 or best_delta < hp.min_impurity_decrease:
        return None

    vals = np.sort(dataset.features[idx, best_feature], kind="stable")
    cutoff = (vals[best_pos] + vals[best_pos + 1]) / 2.0
    # the midpoint may round up onto the right value; <= routing needs it
    # strictly below vals[best_pos + 1]
    if cutoff >= vals[best_pos + 1]:
        cutoff = vals[best_pos]
    return best_feature, float(cutoff), float(best_delta)


def fit_tree(dataset: Dataset, hp: Hyperparameters, gen: np.random.Generator) -> DecisionTree:
    """Grow a tree by greedy recursive partitioning.

    A node becomes a leaf when it is pure, has fewer than min_samples_split
    rows, sits at the max_depth level, or admits no split with impurity
    decrease >= min_impurity_decrease. Leaf ids are assigned 0..L-1 in
    left-to-right order. Raises DegenerateCohort when the dataset holds a
    single treatment group; that is a finding, not a fittable problem.
    """
    n0, n1 = dataset.group_counts
    if n0 == 0 or n1 == 0:
        raise DegenerateCohort(f"dataset has a single treatment group (n0={n0}, n1={n1})")

    X = dataset.features
    labels = dataset.treatment
    next_leaf_id = 0

    # explicit two-phase stack, not recursion: trees can be n levels deep.
    # A "visit" job expands one node; its "combine" job waits underneath the
    # children, so leaves are still created in left-to-right order.
    built: list[TreeNode] = []
    jobs: list[tuple] = [("visit", np.arange(dataset.n_samples, dtype=np.int64), 0)]
    while jobs:
        job = jobs.pop()
        if job[0] == "combine":
            right = built.pop()
            left = built.pop()
            built.append(Internal(job[1], job[2], left, right))
            continue
        _, idx, depth = job
        node_n1 = int(labels[idx].sum())
        node_n0 = len(idx) - node_n1
        found = None
        if (
            node_n0 > 0
            and node_n1 > 0
            and len(idx) >= hp.min_samples_split
            and (hp.max_depth is None or depth + 1 < hp.max_depth)
        ):
            found = best_split(idx, dataset, hp, gen)
        if found is None:
            built.append(
                Leaf(next_leaf_id, node_n0, node_n1, depth, impurity(hp.criterion, node_n0, node_n1))
            )
            next_leaf_id += 1
            continue
        feature, cutoff, _ = found
        mask = X[idx, feature] <= cutoff
        jobs.append(("combine", feature, cutoff))
        jobs.append(("visit", idx[~mask], depth + 1))
        jobs.append(("visit", idx[mask], depth + 1))

    root = built[0]
    return DecisionTree(
        root=root,
        hyperparameters=hp,
        feature_names=dataset.feature_names,
        root_counts=(n0, n1),
        root_impurity=impurity(hp.criterion, n0, n1),
    )


def _check_features(tree: DecisionTree, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != tree.n_features:
        raise DimensionMismatch(
            f"sample has {X.shape[1]} features, tree expects {tree.n_features}"
        )
    if not np.isfinite(X).all():
        raise DimensionMismatch("sample values must be finite")
    return X


def apply(tree: DecisionTree, sample) -> int:
    """Leaf id reached by one sample; boundary values route left."""
    X = _check_features(tree, np.asarray(sample, dtype=np.float64))
    node = tree.root
    row = X[0]
    while isinstance(node, Internal):
        node = node.left if row[node.feature_index] <= node.cutoff else node.right
    return node.leaf_id

def apply_batch(tree: DecisionTree, X) -> np.ndarray:
    """Leaf id per row of X."""
    X = _check_features(tree, X)
    out = np.empty(X.shape[0], dtype=np.int64)
    stack = [(tree.root, np.arange(X.shape[0], dtype=np.int64))]
    while stack:
        node, idx = stack.pop()
        if isinstance(node, Leaf):
            out[idx] = node.leaf_id
            continue
        mask = X[idx, node.feature_index] <= node.cutoff
        stack.append((node.left, idx[mask]))
        stack.append((node.right, idx[~mask]))
    return out


def predict_proba(tree: DecisionTree, sample) -> float:
    """Fraction of group-1 samples in the reached leaf."""
    leaf = leaves(tree)[apply(tree, sample)]
    return leaf.n1 / (leaf.n0 + leaf.n1)


def predict_proba_batch(tree: DecisionTree, X) -> np.ndarray:
    probs = np.array([leaf.n1 / (leaf.n0 + leaf.n1) for leaf in leaves(tree)])
    return probs[apply_batch(tree, X)]


def leaves(tree: DecisionTree) -> list[Leaf]:
    """Leaves in left-to-right order; index in the list equals leaf_id."""
    out: list[Leaf] = []
    stack = [tree.root]
    while stack:
        node = stack.pop()
        if isinstance(node, Leaf):
            out.append(node)
        else:
            stack.append(node.right)
            stack.append(node.left)
    return out


def find_leaf(tree: DecisionTree, leaf_id: int) -> Leaf:
    for leaf in leaves(tree):
        if leaf.leaf_id == leaf_id:
            return leaf
    raise UnknownLeaf(leaf_id)


def forest_variant(hp: Hyperparameters, n_features: int) -> Hyperparameters:
    """The shared hyperparameters with the square-root feature rule applied."""
    frac = math.sqrt(n_features) / n_features
    return replace(hp, max_features=frac)
