"""Command-line entry point: detect violations end to end, or synthesize data.

Exit codes: 0 clean run with no confident violation, 3 violations found,
2 usage errors (bad flags, unknown columns, out-of-range knobs), 1 data or
runtime errors. Identical configs produce byte-identical outputs for any
--threads value.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass

from . import rng as rngmod
from .cart import fit_tree
from .dataset import load_csv, synth_null_overlap, synth_rotated_square, write_csv
from .diagnostics import ViolationPolicy, build_report, query_text, threshold_grid
from .errors import (
    InvalidFoldCount,
    InvalidParameters,
    OverlapTreeError,
    UnknownColumn,
)
from .forest import fit_forest, sample_consistency
from .model_selection import SearchSpace, random_search
from .render import DEFAULT_PALETTE, render_svg, write_report_json

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2
EXIT_VIOLATIONS = 3

CONSISTENCY_GATE = 0.5

DETECT_DEFAULTS = {
    "categorical": (),
    "criterion": "entropy",
    "threshold": 0.0,
    "mode": "absolute",
    "n_trees": 100,
    "n_trials": 50,
    "folds": 5,
    "seed": 42,
    "out": "report.json",
    "svg": "out.svg",
    "emit_samples": False,
    "threads": 1,
}


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved settings of one detect run."""

    data: str
    treatment_col: str
    categorical: tuple[str, ...] = ()
    criterion: str = "entropy"
    threshold: float = 0.0
    mode: str = "absolute"
    n_trees: int = 100
    n_trials: int = 50
    folds: int = 5
    seed: int = 42
    out: str = "report.json"
    svg: str = "out.svg"
    emit_samples: bool = False
    threads: int = 1

    def __post_init__(self):
        if self.threads < 1:
            raise InvalidParameters(f"threads must be >= 1, got {self.threads}")
        if self.n_trees < 1:
            raise InvalidParameters(f"n_trees must be >= 1, got {self.n_trees}")
        if self.n_trials < 1:
            raise InvalidParameters(f"n_trials must be >= 1, got {self.n_trials}")
        if self.folds < 2:
            raise InvalidParameters(f"folds must be >= 2, got {self.folds}")


def cmd_detect(config: RunConfig, stdout=None) -> int:
    """Run the whole pipeline and write the report JSON and SVG."""
    out = stdout if stdout is not None else sys.stdout
    dataset = load_csv(config.data, config.treatment_col, config.categorical)
    policy = ViolationPolicy(config.criterion, config.threshold, config.mode)

    search = random_search(
        dataset, SearchSpace(), config.n_trials, config.folds, config.seed,
        threads=config.threads,
    )
    tree = fit_tree(dataset, search.best, rngmod.substream(config.seed, rngmod.TREE))
    forest = fit_forest(dataset, search.best, config.n_trees, config.seed,
                        threads=config.threads)
    grid, _ = threshold_grid(policy)
    profile = sample_consistency(forest, dataset, policy, grid, threads=config.threads)
    report = build_report(
        tree, profile, dataset, policy, search, config.seed,
        emit_samples=config.emit_samples,
    )
    write_report_json(report, config.out)
    render_svg(report.layout, DEFAULT_PALETTE, config.svg)

    violating = [r for r in report.leaf_reports if r.is_violating]
    confident = [r for r in violating if r.consistency >= CONSISTENCY_GATE]
    top = sorted(confident, key=lambda r: (-r.consistency, -r.n_samples, r.leaf_id))[:3]

    print(f"samples: {dataset.n_samples} (group 0: {report.n0}, group 1: {report.n1}); "
          f"features: {dataset.n_features}", file=out)
    print(f"policy: criterion={policy.criterion} threshold={policy.threshold} "
          f"mode={policy.mode}", file=out)
    print(f"cv_auc: {search.cv_auc:.6f}", file=out)
    print(f"flagged leaves: {len(violating)} of {len(report.leaf_reports)} "
          f"({report.flagged_fraction:.1%} of samples); "
          f"consistency >= {CONSISTENCY_GATE}: {len(confident)}", file=out)
    if top:
        print("top violating queries:", file=out)
        for r in top:
            print(f"  [leaf {r.leaf_id}] {query_text(r.query)}  "
                  f"(n0={r.n0}, n1={r.n1}, consistency={r.consistency:.3f}, "
                  f"probability={r.probability:.3e})", file=out)
    print(f"report: {config.out}", file=out)
    print(f"svg: {config.svg}", file=out)

    return EXIT_VIOLATIONS if confident else EXIT_OK


def cmd_synth(kind: str, n: int, d, seed: int, out_path: str) -> int:
    """Write a synthetic benchmark dataset as CSV with treatment column A."""
    if kind == "rotated-square":
        if d is not None and d != 2:
            raise InvalidParameters("rotated-square data is strictly 2-dimensional")
        dataset = synth_rotated_square(n, seed)
    else:
        dataset = synth_null_overlap(n, 5 if d is None else d, seed)
    write_csv(dataset, out_path, treatment_column="A")
    return EXIT_OK


def _split_csv_list(values) -> tuple[str, ...]:
    cols: list[str] = []
    for value in values or ():
        cols.extend(part.strip() for part in value.split(",") if part.strip())
    return tuple(cols)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="overlaptree",
        description="Detect treatment-group positivity violations with decision trees.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    detect = sub.add_parser("detect", help="run the detection pipeline on a CSV")
    detect.add_argument("--data", required=True, help="input CSV path")
    detect.add_argument("--treatment-col", required=True, help="binary treatment column name")
    detect.add_argument("--categorical", action="append", metavar="COLS",
                        help="comma-separated categorical columns (repeatable)")
    detect.add_argument("--criterion", choices=["gini", "entropy"], default=None,
                        help="impurity criterion of the violation policy")
    detect.add_argument("--threshold", type=float, default=None,
                        help="violation impurity threshold t")
    detect.add_argument("--mode", choices=["absolute", "relative"], default=None)
    detect.add_argument("--n-trees", type=int, default=None)
    detect.add_argument("--n-trials", type=int, default=None)
    detect.add_argument("--folds", type=int, default=None)
    detect.add_argument("--seed", type=int, default=None)
    detect.add_argument("--out", default=None, help="report JSON path")
    detect.add_argument("--svg", default=None, help="SVG output path")
    detect.add_argument("--emit-samples", action="store_true", default=None,
                        help="include per-sample consistencies in the report")
    detect.add_argument("--threads", type=int, default=None,
                        help="worker thread cap; output is identical for any value")
    detect.add_argument("--config", default=None,
                        help="JSON config file; CLI flags take precedence")
    detect.add_argument("--print-config", action="store_true",
                        help="print the resolved configuration and exit")

    synth = sub.add_parser("synth", help="generate a synthetic benchmark CSV")
    synth.add_argument("kind", choices=["rotated-square", "null-overlap"])
    synth.add_argument("--n", type=int, required=True, help="sample count")
    synth.add_argument("--d", type=int, default=None, help="feature count (null-overlap)")
    synth.add_argument("--seed", type=int, required=True)
    synth.add_argument("--out", required=True, help="output CSV path")
    return parser


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge CLI flags over config-file values over defaults."""
    from_file: dict = {}
    if args.config is not None:
        with open(args.config, encoding="utf-8") as fh:
            from_file = json.load(fh)
        unknown = set(from_file) - set(DETECT_DEFAULTS) - {"data", "treatment_col"}
        if unknown:
            raise InvalidParameters(f"unknown config keys: {sorted(unknown)}")

    def pick(name: str, flag_value):
        if flag_value is not None:
            return flag_value
        if name in from_file:
            return from_file[name]
        return DETECT_DEFAULTS.get(name)

    categorical = _split_csv_list(args.categorical) if args.categorical is not None \
        else tuple(from_file.get("categorical", ()))
    return RunConfig(
        data=pick("data", args.data),
        treatment_col=pick("treatment_col", args.treatment_col),
        categorical=categorical,
        criterion=pick("criterion", args.criterion),
        threshold=pick("threshold", args.threshold),
        mode=pick("mode", args.mode),
        n_trees=pick("n_trees", args.n_trees),
        n_trials=pick("n_trials", args.n_trials),
        folds=pick("folds", args.folds),
        seed=pick("seed", args.seed),
        out=pick("out", args.out),
        svg=pick("svg", args.svg),
        emit_samples=bool(pick("emit_samples", args.emit_samples)),
        threads=pick("threads", args.threads),
    )


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "synth":
            return cmd_synth(args.kind, args.n, args.d, args.seed, args.out)
        config = _resolve_config(args)
        if args.print_config:
            print(json.dumps(asdict(config), indent=2))
            return EXIT_OK
        return cmd_detect(config)
    except (UnknownColumn, InvalidParameters, InvalidFoldCount) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (OverlapTreeError, OSError, json.JSONDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
