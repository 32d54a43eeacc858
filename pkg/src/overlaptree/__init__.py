"""Covariate-overlap violation detection with regularized decision trees.

Train a tree to discriminate the treatment groups; the covariate regions
where it succeeds too well are the positivity violations. A random forest
scores how consistently each finding survives resampling, a hypergeometric
probability scores how surprising it is, and every flagged region is
reported as an actionable feature/cutoff query.
"""

from .cart import (
    DecisionTree,
    Hyperparameters,
    Internal,
    Leaf,
    apply,
    apply_batch,
    best_split,
    fit_tree,
    forest_variant,
    impurity,
    leaves,
    predict_proba,
    predict_proba_batch,
)
from .dataset import (
    Dataset,
    FoldAssignment,
    bootstrap_indices,
    load_csv,
    make_folds,
    synth_null_overlap,
    synth_rotated_square,
    write_csv,
)
from .diagnostics import (
    AtomicRule,
    LeafReport,
    ViolationPolicy,
    build_report,
    extract_query,
    flag_leaf,
    hypergeometric_pmf,
    leaf_probability,
    prune_query,
    query_mask,
    query_text,
    threshold_grid,
)
from .forest import (
    ConsistencyProfile,
    RandomForest,
    fit_forest,
    leaf_consistency,
    sample_consistency,
)
from .model_selection import (
    SearchResult,
    SearchSpace,
    Trial,
    auc,
    random_search,
    sample_hyperparameters,
)
from .render import (
    DEFAULT_PALETTE,
    LeafRectangle,
    PositivityReport,
    layout,
    render_svg,
    report_to_dict,
    write_report_json,
)
from . import errors, kernels

__version__ = "0.1.0"

__all__ = [
    "AtomicRule",
    "ConsistencyProfile",
    "Dataset",
    "DecisionTree",
    "DEFAULT_PALETTE",
    "FoldAssignment",
    "Hyperparameters",
    "Internal",
    "Leaf",
    "LeafRectangle",
    "LeafReport",
    "PositivityReport",
    "RandomForest",
    "SearchResult",
    "SearchSpace",
    "Trial",
    "ViolationPolicy",
    "apply",
    "apply_batch",
    "auc",
    "best_split",
    "bootstrap_indices",
    "build_report",
    "errors",
    "extract_query",
    "fit_forest",
    "fit_tree",
    "flag_leaf",
    "forest_variant",
    "hypergeometric_pmf",
    "impurity",
    "kernels",
    "layout",
    "leaf_consistency",
    "leaf_probability",
    "leaves",
    "load_csv",
    "make_folds",
    "predict_proba",
    "predict_proba_batch",
    "prune_query",
    "query_mask",
    "query_text",
    "random_search",
    "render_svg",
    "report_to_dict",
    "sample_consistency",
    "sample_hyperparameters",
    "synth_null_overlap",
    "synth_rotated_square",
    "threshold_grid",
    "write_csv",
    "write_report_json",
]
