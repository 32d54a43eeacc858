import { describe, expect, it } from "vitest";

import {
  consistencyAt,
  flagsAtIndex,
  impurity,
  leafById,
  rootImpurity,
} from "../src/model.js";
import { FIXTURES, fixture } from "./helpers.js";

describe("client-side flag recomputation agrees with the core", () => {
  for (const name of FIXTURES) {
    it(`matches every leaf's flag grid at every threshold in ${name}`, () => {
      const report = fixture(name);
      for (let gi = 0; gi < report.consistency_thresholds.length; gi++) {
        const recomputed = flagsAtIndex(report, gi);
        report.leaves.forEach((leaf, li) => {
          expect(recomputed[li], `${name} leaf ${leaf.leaf_id} at grid index ${gi}`).toBe(
            leaf.flag_grid[gi],
          );
        });
      }
    });

    it(`reproduces the leaves block's is_violating at the default index in ${name}`, () => {
      const report = fixture(name);
      const recomputed = flagsAtIndex(report, report.default_threshold_index);
      report.leaves.forEach((leaf, li) => {
        expect(recomputed[li]).toBe(leaf.is_violating);
      });
    });

    it(`recomputes every reported leaf impurity to the last ulp in ${name}`, () => {
      const report = fixture(name);
      const criterion = report.metadata.policy.criterion;
      for (const leaf of report.leaves) {
        const h = impurity(criterion, leaf.n0, leaf.n1);
        if (leaf.n0 === 0 || leaf.n1 === 0) {
          // one-sided counts short-circuit to an exact zero in every language
          expect(h).toBe(0);
          expect(leaf.impurity).toBe(0);
        } else {
          // native log2 implementations may disagree in the final unit of
          // precision, so entropy parity is one-ulp, not bitwise
          expect(Math.abs(h - leaf.impurity)).toBeLessThanOrEqual(
            Number.EPSILON * Math.max(h, leaf.impurity),
          );
        }
      }
    });

    it(`keeps every flag comparison far from its threshold in ${name}`, () => {
      // a one-ulp impurity difference could only flip a flag if some leaf's
      // impurity sat within rounding distance of a grid threshold; assert a
      // margin thirteen orders of magnitude wider than one ulp
      const report = fixture(name);
      const { criterion, mode } = report.metadata.policy;
      const rootH = rootImpurity(report);
      for (const leaf of report.leaves) {
        if (leaf.n0 === 0 || leaf.n1 === 0) {
          continue; // exact zeros compare exactly; no rounding is involved
        }
        const h = impurity(criterion, leaf.n0, leaf.n1);
        for (const t of report.consistency_thresholds) {
          const margin =
            mode === "absolute" ? Math.abs(h - t) : Math.abs(rootH - h - Math.max(rootH - t, 0));
          expect(margin).toBeGreaterThan(1e-4);
        }
      }
    });
  }

  it("flags exactly the rotated-square quadrant leaf at every threshold", () => {
    const report = fixture("rotated_square");
    for (let gi = 0; gi < report.consistency_thresholds.length; gi++) {
      const flagged = report.leaves.filter((_, li) => flagsAtIndex(report, gi)[li]);
      expect(flagged.length).toBe(1);
      expect(flagged[0]!.n0).toBe(0);
    }
  });

  it("flags nothing at threshold zero in relative mode", () => {
    const report = fixture("relative_mode");
    expect(report.metadata.policy.mode).toBe("relative");
    expect(report.consistency_thresholds[0]).toBe(0);
    expect(flagsAtIndex(report, 0).some(Boolean)).toBe(false);
  });

  it("flags both one-sided leaves of the relative-mode fixture at its own threshold", () => {
    const report = fixture("relative_mode");
    const flags = flagsAtIndex(report, report.default_threshold_index);
    const flaggedIds = report.leaves.filter((_, li) => flags[li]).map((l) => l.leaf_id);
    expect(flaggedIds).toEqual([36, 40]);
    for (const id of flaggedIds) {
      const leaf = leafById(report, id);
      expect(Math.min(leaf.n0, leaf.n1)).toBe(0);
    }
  });
});

describe("impurity arithmetic", () => {
  it("is exactly symmetric and zero only for one-sided counts", () => {
    for (const criterion of ["gini", "entropy"] as const) {
      for (let a = 0; a < 40; a++) {
        for (let b = 0; b < 40; b++) {
          if (a === 0 && b === 0) continue;
          const ab = impurity(criterion, a, b);
          expect(ab).toBe(impurity(criterion, b, a));
          if (a === 0 || b === 0) {
            expect(ab).toBe(0);
          } else {
            expect(ab).toBeGreaterThan(0);
          }
        }
      }
    }
  });

  it("peaks at balanced counts with the known values", () => {
    for (const n of [1, 2, 7, 100, 12345]) {
      expect(impurity("entropy", n, n)).toBe(1.0);
      expect(impurity("gini", n, n)).toBe(0.5);
    }
  });

  it("computes the root impurity from the metadata counts", () => {
    const report = fixture("relative_mode");
    const expected = impurity("entropy", report.metadata.n0, report.metadata.n1);
    expect(rootImpurity(report)).toBe(expected);
    expect(expected).toBeGreaterThan(0.9);
    expect(expected).toBeLessThan(1.0);
  });
});

describe("null-overlap reports stay blank", () => {
  it("flags no leaf at any grid threshold", () => {
    const report = fixture("null_overlap");
    for (let gi = 0; gi < report.consistency_thresholds.length; gi++) {
      expect(flagsAtIndex(report, gi).some(Boolean)).toBe(false);
      for (const leaf of report.leaves) {
        expect(leaf.flag_grid[gi]).toBe(false);
      }
    }
  });

  it("keeps every opacity faint at every threshold", () => {
    const report = fixture("null_overlap");
    const agg = report.metadata.aggregation;
    const totalWidth = report.layout.reduce((acc, r) => acc + r.width, 0);
    for (let gi = 0; gi < report.consistency_thresholds.length; gi++) {
      let ink = 0;
      for (const rect of report.layout) {
        const opacity = consistencyAt(report, leafById(report, rect.leaf_id), gi, agg);
        expect(opacity).toBeLessThanOrEqual(0.12);
        ink += rect.width * opacity;
      }
      // opacity-weighted share of the canvas that carries any ink at all
      expect(ink / totalWidth).toBeLessThan(0.08);
    }
    const defaultInk = report.layout.reduce(
      (acc, rect) =>
        acc +
        rect.width *
          consistencyAt(report, leafById(report, rect.leaf_id), report.default_threshold_index, agg),
      0,
    );
    expect(defaultInk / totalWidth).toBeLessThan(0.005);
  });
});

describe("opacity source", () => {
  for (const name of FIXTURES) {
    it(`matches the layout block at the default threshold in ${name}`, () => {
      const report = fixture(name);
      for (const rect of report.layout) {
        const leaf = leafById(report, rect.leaf_id);
        const opacity = consistencyAt(
          report,
          leaf,
          report.default_threshold_index,
          report.metadata.aggregation,
        );
        expect(opacity).toBe(rect.opacity);
        expect(opacity).toBe(leaf.consistency);
      }
    });
  }
});
