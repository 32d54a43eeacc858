/**
 * Pure view-model logic: threshold-dependent flags and opacities, tooltip
 * field assembly, and exclusion-query export text.
 *
 * Everything here is a pure function of (report, threshold index,
 * aggregation choice), so the rendered view can be reconstructed from that
 * triple alone. Flags are recomputed client-side with the same arithmetic
 * the analysis core uses, which the test suite cross-checks against the
 * core-emitted flag grids.
 */
import type { LeafReport, Report } from "./schema.js";

export type Aggregation = "mean" | "median";

export interface ViewState {
  thresholdIndex: number;
  aggregation: Aggregation;
  selected: Set<number>;
}

export function initialState(report: Report): ViewState {
  return {
    thresholdIndex: report.default_threshold_index,
    aggregation: report.metadata.aggregation,
    selected: new Set(),
  };
}

/**
 * Binary impurity from group counts.
 *
 * The evaluation order matches the analysis core exactly: each proportion
 * is derived from its own count and gini uses the product form, so the
 * function is exactly symmetric in (n0, n1) and gini values reproduce the
 * core's bit for bit. Entropy delegates log2 to the platform, whose
 * rounding may differ from the core's in the final ulp; the flag
 * comparisons built on top are cross-checked to sit many orders of
 * magnitude away from every grid threshold, so flags always agree.
 */
export function impurity(criterion: "gini" | "entropy", n0: number, n1: number): number {
  if (n0 === 0 || n1 === 0) {
    return 0;
  }
  const n = n0 + n1;
  const p0 = n0 / n;
  const p1 = n1 / n;
  if (criterion === "gini") {
    return 2.0 * p0 * p1;
  }
  return -(p0 * Math.log2(p0) + p1 * Math.log2(p1));
}

/**
 * The violation rule, identical to the core's:
 * absolute mode flags impurity(leaf) <= threshold; relative mode flags
 * H(root) - H(leaf) > max(H(root) - threshold, 0).
 */
export function flagLeaf(
  criterion: "gini" | "entropy",
  mode: "absolute" | "relative",
  threshold: number,
  rootImpurity: number,
  n0: number,
  n1: number,
): boolean {
  const h = impurity(criterion, n0, n1);
  if (mode === "absolute") {
    return h <= threshold;
  }
  const tPrime = Math.max(rootImpurity - threshold, 0.0);
  return rootImpurity - h > tPrime;
}

/** Root impurity under the report's policy criterion. */
export function rootImpurity(report: Report): number {
  return impurity(report.metadata.policy.criterion, report.metadata.n0, report.metadata.n1);
}

/** Recompute every leaf's violation flag at one grid threshold. */
export function flagsAtIndex(report: Report, thresholdIndex: number): boolean[] {
  const threshold = gridThreshold(report, thresholdIndex);
  const rootH = rootImpurity(report);
  const { criterion, mode } = report.metadata.policy;
  return report.leaves.map((leaf) => flagLeaf(criterion, mode, threshold, rootH, leaf.n0, leaf.n1));
}

export function gridThreshold(report: Report, thresholdIndex: number): number {
  const value = report.consistency_thresholds[thresholdIndex];
  if (value === undefined) {
    throw new RangeError(`threshold index ${thresholdIndex} out of range`);
  }
  return value;
}

export function mean(values: readonly number[]): number {
  let total = 0;
  for (const v of values) {
    total += v;
  }
  return total / values.length;
}

/** Median with the even-count convention (a + b) / 2 of the two middle values. */
export function median(values: readonly number[]): number {
  const sorted = [...values].sort((a, b) => a - b);
  const n = sorted.length;
  const mid = Math.floor(n / 2);
  if (n % 2 === 1) {
    return sorted[mid]!;
  }
  return (sorted[mid - 1]! + sorted[mid]!) / 2;
}

export function hasSampleData(report: Report): boolean {
  return report.samples !== undefined;
}

/**
 * A leaf's aggregated consistency at one grid threshold.
 *
 * When the requested aggregation is the one the report was built with, the
 * core-computed value is returned verbatim. The alternative aggregation is
 * recomputed from the per-sample block, which only reports produced with
 * sample emission enabled carry; the view hides the toggle otherwise.
 */
export function consistencyAt(
  report: Report,
  leaf: LeafReport,
  thresholdIndex: number,
  aggregation: Aggregation,
): number {
  gridThreshold(report, thresholdIndex);
  if (aggregation === report.metadata.aggregation) {
    return leaf.consistency_grid[thresholdIndex]!;
  }
  const samples = report.samples;
  if (samples === undefined) {
    throw new Error("report carries no per-sample data; only the built-in aggregation is available");
  }
  const members: number[] = [];
  for (let i = 0; i < samples.leaf.length; i++) {
    if (samples.leaf[i] === leaf.leaf_id) {
      members.push(samples.consistency[i]![thresholdIndex]!);
    }
  }
  if (members.length === 0) {
    return 0;
  }
  return aggregation === "mean" ? mean(members) : median(members);
}

export interface TooltipField {
  label: string;
  value: string;
}

/**
 * The hover field list, in display order: depth, per-group counts,
 * impurity, probability, is_violating, consistency, query.
 *
 * is_violating and consistency reflect the current threshold index and
 * aggregation; the other fields come straight from the leaf record.
 */
export function tooltipFields(report: Report, leaf: LeafReport, state: ViewState): TooltipField[] {
  const flag = flagsAtIndex(report, state.thresholdIndex)[report.leaves.indexOf(leaf)]!;
  const consistency = consistencyAt(report, leaf, state.thresholdIndex, state.aggregation);
  return [
    { label: "depth", value: String(leaf.depth) },
    { label: "group 0", value: String(leaf.n0) },
    { label: "group 1", value: String(leaf.n1) },
    { label: "impurity", value: String(leaf.impurity) },
    { label: "probability", value: String(leaf.probability) },
    { label: "is_violating", value: String(flag) },
    { label: "consistency", value: String(consistency) },
    { label: "query", value: leaf.query_text },
  ];
}

/**
 * Exclusion-criteria text for the selected leaves: one query per line in
 * ascending leaf id order, plus, when more than one leaf is selected, a
 * final combined line `(Q1) OR (Q2) ...`.
 */
export function exportText(report: Report, selected: ReadonlySet<number>): string {
  if (selected.size === 0) {
    throw new Error("nothing selected");
  }
  const chosen = report.leaves
    .filter((leaf) => selected.has(leaf.leaf_id))
    .sort((a, b) => a.leaf_id - b.leaf_id);
  const lines = chosen.map((leaf) => leaf.query_text);
  if (chosen.length > 1) {
    lines.push(chosen.map((leaf) => `(${leaf.query_text})`).join(" OR "));
  }
  return lines.join("\n") + "\n";
}

/** Leaf lookup by id; layout entries reference leaves this way. */
export function leafById(report: Report, leafId: number): LeafReport {
  const leaf = report.leaves.find((l) => l.leaf_id === leafId);
  if (leaf === undefined) {
    throw new Error(`no leaf with id ${leafId}`);
  }
  return leaf;
}
