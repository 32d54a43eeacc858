"""Rectangle-plot layout, static SVG output, and the canonical report JSON.

The JSON report is the single source of truth; the SVG is a pure function
of it, so static output and any interactive consumer always agree.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .cart import DecisionTree, Hyperparameters, Leaf, TreeNode
from .diagnostics import LeafReport, ViolationPolicy, query_text
from .errors import InvalidParameters
from .model_selection import SearchResult

CANVAS_WIDTH = 1000.0

# colorblind-safe categorical pair plus a neutral tie gray
DEFAULT_PALETTE = {0: "#e66101", 1: "#0571b0", "tie": "#999999"}

RECT_HEIGHT = 36
ROW_GAP = 10
MARGIN_LEFT = 64
MARGIN_TOP = 24
MARGIN_RIGHT = 24
MARGIN_BOTTOM = 48


@dataclass(frozen=True)
class LeafRectangle:
    """One leaf drawn as a fixed-height rectangle.

    Width is proportional to the leaf's sample count, row is the leaf's
    depth (row 0 drawn at the bottom), and opacity is the leaf's
    aggregated consistency at the report's default threshold.
    """

    leaf_id: int
    x: float
    width: float
    row: int
    fill_group: Union[int, str]  # 0, 1, or "tie"
    opacity: float


@dataclass(frozen=True)
class PositivityReport:
    """Everything one detection run produced, ready to serialize."""

    seed: int
    n_samples: int
    n_features: int
    n0: int
    n1: int
    feature_names: tuple[str, ...]
    policy: ViolationPolicy
    aggregation: str
    n_trees: int
    search: SearchResult
    tree: DecisionTree
    leaf_reports: tuple[LeafReport, ...]
    thresholds: tuple[float, ...]
    default_threshold_index: int
    layout: tuple[LeafRectangle, ...]
    flagged_fraction: float
    sample_leaf: Optional[np.ndarray]
    sample_consistency: Optional[np.ndarray]


def layout(tree: DecisionTree, leaf_reports, canvas_width: float = CANVAS_WIDTH):
    """Tile the x-axis with one rectangle per leaf, in left-to-right order."""
    if canvas_width <= 0:
        raise InvalidParameters(f"canvas_width must be > 0, got {canvas_width}")
    reports = sorted(leaf_reports, key=lambda r: r.leaf_id)
    total = sum(r.n_samples for r in reports)
    rects = []
    x = 0.0
    for r in reports:
        width = canvas_width * (r.n_samples / total)
        fill: Union[int, str] = "tie" if r.n0 == r.n1 else r.majority_group
        rects.append(LeafRectangle(r.leaf_id, x, width, r.depth, fill, r.consistency))
        x += width
    return tuple(rects)


def render_svg(rects, palette, path) -> None:
    """Write the rectangle plot as a standalone SVG 1.1 file.

    Output bytes are a pure function of the inputs. Rectangle stroke
    opacity follows fill opacity, so zero-consistency leaves are fully
    invisible and an overlap-healthy plot looks blank.
    """
    rects = list(rects)
    plot_width = max((r.x + r.width for r in rects), default=CANVAS_WIDTH)
    max_row = max((r.row for r in rects), default=0)
    plot_height = (max_row + 1) * (RECT_HEIGHT + ROW_GAP) - ROW_GAP
    svg_width = MARGIN_LEFT + plot_width + MARGIN_RIGHT
    svg_height = MARGIN_TOP + plot_height + MARGIN_BOTTOM

    def y_for(row: int) -> float:
        return MARGIN_TOP + (max_row - row) * (RECT_HEIGHT + ROW_GAP)

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{svg_width:.0f}" height="{svg_height:.0f}" '
        f'viewBox="0 0 {svg_width:.0f} {svg_height:.0f}">',
        f'<line x1="{MARGIN_LEFT - 8:.0f}" y1="{MARGIN_TOP - 6:.0f}" '
        f'x2="{MARGIN_LEFT - 8:.0f}" y2="{MARGIN_TOP + plot_height + 6:.0f}" '
        'stroke="#333333" stroke-width="1"/>',
        f'<line x1="{MARGIN_LEFT - 8:.0f}" y1="{MARGIN_TOP + plot_height + 6:.0f}" '
        f'x2="{MARGIN_LEFT + plot_width:.0f}" y2="{MARGIN_TOP + plot_height + 6:.0f}" '
        'stroke="#333333" stroke-width="1"/>',
        f'<text x="{MARGIN_LEFT + plot_width / 2:.1f}" y="{svg_height - 14:.0f}" '
        'text-anchor="middle" font-family="sans-serif" font-size="13" fill="#333333">'
        'samples (grouped by leaf)</text>',
    ]
    rows = sorted({r.row for r in rects})
    for row in rows:
        lines.append(
            f'<text x="{MARGIN_LEFT - 14:.0f}" y="{y_for(row) + RECT_HEIGHT / 2 + 4:.1f}" '
            'text-anchor="end" font-family="sans-serif" font-size="12" fill="#333333">'
            f'depth {row}</text>'
        )
    for r in rects:
        lines.append(
            f'<rect x="{MARGIN_LEFT + r.x:.2f}" y="{y_for(r.row):.2f}" '
            f'width="{r.width:.2f}" height="{RECT_HEIGHT}" '
            f'fill="{palette[r.fill_group]}" fill-opacity="{r.opacity:.6g}" '
            f'stroke="#333333" stroke-opacity="{r.opacity:.6g}" stroke-width="0.5"/>'
        )
    lines.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _node_to_dict(node: TreeNode) -> dict:
    if isinstance(node, Leaf):
        return {
            "leaf_id": node.leaf_id,
            "n0": node.n0,
            "n1": node.n1,
            "depth": node.depth,
            "impurity": node.impurity,
        }
    return {
        "feature": node.feature_index,
        "cutoff": node.cutoff,
        "left": _node_to_dict(node.left),
        "right": _node_to_dict(node.right),
    }


def _hp_to_dict(hp: Hyperparameters) -> dict:
    return hp.to_dict()


def report_to_dict(report: PositivityReport) -> dict:
    """The report as JSON-ready plain data, key order fixed."""
    payload = {
        "version": 1,
        "metadata": {
            "seed": report.seed,
            "n_samples": report.n_samples,
            "n_features": report.n_features,
            "n0": report.n0,
            "n1": report.n1,
            "feature_names": list(report.feature_names),
            "policy": {
                "criterion": report.policy.criterion,
                "threshold": report.policy.threshold,
                "mode": report.policy.mode,
            },
            "aggregation": report.aggregation,
            "n_trees": report.n_trees,
            "flagged_fraction": report.flagged_fraction,
        },
        "model_selection": {
            "cv_auc": report.search.cv_auc,
            "best": _hp_to_dict(report.search.best),
            "trials": [
                {
                    "trial": t.index,
                    "hyperparameters": _hp_to_dict(t.hyperparameters),
                    "fold_aucs": list(t.fold_aucs),
                    "mean_auc": t.mean_auc,
                }
                for t in report.search.trials
            ],
        },
        "tree": _node_to_dict(report.tree.root),
        "leaves": [
            {
                "leaf_id": r.leaf_id,
                "depth": r.depth,
                "n0": r.n0,
                "n1": r.n1,
                "impurity": r.impurity,
                "is_violating": r.is_violating,
                "probability": r.probability,
                "consistency": r.consistency,
                "consistency_grid": list(r.consistency_grid),
                "flag_grid": list(r.flag_grid),
                "majority_group": r.majority_group,
                "query": [
                    {"feature": a.feature, "sign": a.sign, "cutoff": a.cutoff}
                    for a in r.query
                ],
                "query_text": query_text(r.query),
            }
            for r in report.leaf_reports
        ],
        "consistency_thresholds": list(report.thresholds),
        "default_threshold_index": report.default_threshold_index,
        "layout": [
            {
                "leaf_id": r.leaf_id,
                "x": r.x,
                "width": r.width,
                "row": r.row,
                "group": r.fill_group,
                "opacity": r.opacity,
            }
            for r in report.layout
        ],
    }
    if report.sample_leaf is not None and report.sample_consistency is not None:
        payload["samples"] = {
            "leaf": [int(v) for v in report.sample_leaf],
            "consistency": [[float(v) for v in row] for row in report.sample_consistency],
        }
    return payload


def write_report_json(report: PositivityReport, path) -> None:
    """Serialize with round-trip float precision and stable key order."""
    text = json.dumps(report_to_dict(report), indent=2, allow_nan=False)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text + "\n")
