"""Violation flagging, leaf rarity, and covariate-level leaf queries.

A leaf is a candidate positivity violation when its treatment mix is too
homogeneous, judged either on absolute impurity or relative to the root.
Each flagged leaf is characterized as a conjunction of feature/cutoff rules
so the finding can be acted on as a cohort exclusion criterion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .cart import CRITERIA, DecisionTree, Leaf, apply_batch, impurity, leaves
from .dataset import Dataset
from .errors import InvalidParameters, UnknownLeaf
from .model_selection import SearchResult

MODES = ("absolute", "relative")

DEFAULT_GRID_STEPS = 10
DEFAULT_GRID_MAX = 0.5


@dataclass(frozen=True)
class ViolationPolicy:
    """How leaf homogeneity is judged.

    absolute mode flags a leaf when impurity(leaf) <= threshold; threshold 0
    recovers strict positivity (only pure leaves flagged). relative mode
    flags when H(root) - H(leaf) > max(H(root) - threshold, 0), i.e. the
    leaf is sufficiently purer than its root.
    """

    criterion: str = "entropy"
    threshold: float = 0.0
    mode: str = "absolute"

    def __post_init__(self):
        if self.criterion not in CRITERIA:
            raise InvalidParameters(f"criterion must be one of {CRITERIA}, got {self.criterion!r}")
        if self.threshold < 0.0:
            raise InvalidParameters(f"threshold must be >= 0, got {self.threshold}")
        if self.mode not in MODES:
            raise InvalidParameters(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclass(frozen=True)
class AtomicRule:
    """One comparison on one feature; sign matches the tree routing."""

    feature: str
    sign: str  # "<=" or ">"
    cutoff: float


@dataclass(frozen=True)
class LeafReport:
    """Everything reported (and shown on hover) for one leaf.

    impurity, is_violating, flag_grid, and the consistencies are computed
    under the violation policy's criterion, which may differ from the
    criterion the tree was fit with. consistency and is_violating refer to
    the report's default threshold; the grids cover every threshold.
    """

    leaf_id: int
    depth: int
    n0: int
    n1: int
    impurity: float
    is_violating: bool
    probability: float
    consistency: float
    consistency_grid: tuple[float, ...]
    flag_grid: tuple[bool, ...]
    majority_group: int
    query: tuple[AtomicRule, ...]

    @property
    def n_samples(self) -> int:
        return self.n0 + self.n1


def flag_leaf(n0: int, n1: int, root_impurity: float, policy: ViolationPolicy) -> bool:
    """Apply the violation rule to one leaf's counts."""
    h = impurity(policy.criterion, n0, n1)
    if policy.mode == "absolute":
        return h <= policy.threshold
    t_prime = max(root_impurity - policy.threshold, 0.0)
    return root_impurity - h > t_prime


def threshold_grid(policy: ViolationPolicy) -> tuple[tuple[float, ...], int]:
    """Ascending impurity thresholds {0.00, 0.05, ..., 0.50} plus the
    policy's own threshold; returns (grid, index of the policy threshold).
    """
    values = {i / 20.0 for i in range(DEFAULT_GRID_STEPS + 1)}
    values.add(float(policy.threshold))
    grid = tuple(sorted(values))
    return grid, grid.index(float(policy.threshold))


def _log_binom(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def hypergeometric_pmf(N: int, K: int, n: int, k: int) -> float:
    """P[k successes in n draws without replacement from N with K successes].

    Computed in log space so large cohorts stay finite. Inadmissible k
    returns 0; impossible population parameters raise InvalidParameters.
    """
    if not (0 <= K <= N) or not (0 <= n <= N):
        raise InvalidParameters(
            f"hypergeometric parameters out of bounds: N={N}, K={K}, n={n}"
        )
    if k < max(0, n + K - N) or k > min(n, K):
        return 0.0
    return math.exp(_log_binom(K, k) + _log_binom(N - K, n - k) - _log_binom(N, n))


def leaf_probability(tree: DecisionTree, leaf: Leaf) -> float:
    """Chance of drawing this leaf's group mix from the cohort at random.

    The population is the root (N = N0 + N1 with K = N1 successes), the
    draw is the leaf's n0 + n1 samples, and n1 is the observed successes.
    """
    N0, N1 = tree.root_counts
    return hypergeometric_pmf(N0 + N1, N1, leaf.n0 + leaf.n1, leaf.n1)


def extract_query(tree: DecisionTree, leaf_id: int) -> tuple[AtomicRule, ...]:
    """Pruned root-to-leaf rule conjunction for one leaf.

    Walking down, a left edge contributes (feature <= cutoff) and a right
    edge (feature > cutoff). A single-leaf tree yields the empty query,
    which matches everything.
    """
    stack: list[tuple] = [(tree.root, ())]
    while stack:
        node, path = stack.pop()
        if isinstance(node, Leaf):
            if node.leaf_id == leaf_id:
                rules = tuple(
                    AtomicRule(tree.feature_names[inner.feature_index],
                               "<=" if went_left else ">",
                               inner.cutoff)
                    for inner, went_left in path
                )
                return prune_query(rules)
            continue
        stack.append((node.right, path + ((node, False),)))
        stack.append((node.left, path + ((node, True),)))
    raise UnknownLeaf(leaf_id)


def prune_query(query: tuple[AtomicRule, ...]) -> tuple[AtomicRule, ...]:
    """Keep only the rule closest to the leaf per (feature, sign) pair.

    The survivors stay in root-to-leaf order; rules near the root are the
    more general ones. Never changes the satisfying set, since a later
    rule with the same feature and sign is always the tighter bound.
    """
    last: dict[tuple[str, str], int] = {}
    for i, rule in enumerate(query):
        last[(rule.feature, rule.sign)] = i
    return tuple(query[i] for i in sorted(last.values()))


def query_mask(query: tuple[AtomicRule, ...], X: np.ndarray,
               feature_names: tuple[str, ...]) -> np.ndarray:
    """Boolean satisfaction vector of the conjunction over rows of X."""
    X = np.asarray(X, dtype=np.float64)
    mask = np.ones(X.shape[0], dtype=bool)
    index = {name: j for j, name in enumerate(feature_names)}
    for rule in query:
        if rule.feature not in index:
            raise InvalidParameters(f"query references unknown feature {rule.feature!r}")
        col = X[:, index[rule.feature]]
        mask &= (col <= rule.cutoff) if rule.sign == "<=" else (col > rule.cutoff)
    return mask


def query_text(query: tuple[AtomicRule, ...]) -> str:
    """`feature <= cutoff AND feature > cutoff ...`; cutoffs round-trip.

    The empty query (single-leaf tree) renders as TRUE.
    """
    if not query:
        return "TRUE"
    return " AND ".join(f"{r.feature} {r.sign} {r.cutoff!r}" for r in query)


def build_report(
    tree: DecisionTree,
    profile,
    dataset: Dataset,
    policy: ViolationPolicy,
    search: SearchResult,
    seed: int,
    aggregation: str = "mean",
    emit_samples: bool = False,
):
    """Assemble the full diagnostic report for one pipeline run.

    Per-leaf consistencies aggregate the forest profile (computed on this
    same dataset) over each leaf's members at every grid threshold; flags
    and impurities are recomputed under the policy criterion so the report
    is self-consistent for downstream threshold exploration.
    """
    from . import forest as forest_mod  # deferred: forest imports this module
    from . import render  # deferred: render imports this module

    n0_root, n1_root = tree.root_counts
    if (n0_root + n1_root) != dataset.n_samples:
        raise InvalidParameters("tree and dataset disagree on sample count")
    grid = profile.thresholds
    default_index = grid.index(float(policy.threshold))
    root_h = impurity(policy.criterion, n0_root, n1_root)

    per_leaf_grid = np.column_stack([
        forest_mod.leaf_consistency(tree, dataset, profile, gi, aggregation)
        for gi in range(len(grid))
    ])

    reports = []
    for leaf in leaves(tree):
        flag_grid = tuple(
            flag_leaf(leaf.n0, leaf.n1, root_h, replace(policy, threshold=t))
            for t in grid
        )
        consistency_grid = tuple(float(v) for v in per_leaf_grid[leaf.leaf_id])
        reports.append(LeafReport(
            leaf_id=leaf.leaf_id,
            depth=leaf.depth,
            n0=leaf.n0,
            n1=leaf.n1,
            impurity=impurity(policy.criterion, leaf.n0, leaf.n1),
            is_violating=flag_grid[default_index],
            probability=leaf_probability(tree, leaf),
            consistency=consistency_grid[default_index],
            consistency_grid=consistency_grid,
            flag_grid=flag_grid,
            majority_group=1 if leaf.n1 > leaf.n0 else 0,
            query=extract_query(tree, leaf.leaf_id),
        ))

    flagged = sum(r.n_samples for r in reports if r.is_violating)
    sample_leaf: Optional[np.ndarray] = None
    sample_consistency: Optional[np.ndarray] = None
    if emit_samples:
        sample_leaf = apply_batch(tree, dataset.features)
        sample_consistency = profile.per_sample

    rects = render.layout(tree, reports)
    return render.PositivityReport(
        seed=seed,
        n_samples=dataset.n_samples,
        n_features=dataset.n_features,
        n0=n0_root,
        n1=n1_root,
        feature_names=dataset.feature_names,
        policy=policy,
        aggregation=aggregation,
        n_trees=profile.n_trees,
        search=search,
        tree=tree,
        leaf_reports=tuple(reports),
        thresholds=grid,
        default_threshold_index=default_index,
        layout=rects,
        flagged_fraction=flagged / dataset.n_samples,
        sample_leaf=sample_leaf,
        sample_consistency=sample_consistency,
    )
