// @vitest-environment happy-dom
import { beforeEach, describe, expect, it } from "vitest";

import { consistencyAt, leafById } from "../src/model.js";
import { loadReportText, mountExplorer, PALETTE } from "../src/view.js";
import { fixture, fixtureText, quadrantLeaf, FixtureName } from "./helpers.js";

function mount(name?: FixtureName): HTMLElement {
  const root = document.createElement("div");
  document.body.append(root);
  mountExplorer(root);
  if (name !== undefined) {
    loadReportText(root, fixtureText(name));
  }
  return root;
}

function q<T extends Element>(root: HTMLElement, testid: string): T {
  const node = root.querySelector(`[data-testid="${testid}"]`);
  if (node === null) {
    throw new Error(`missing [data-testid="${testid}"]`);
  }
  return node as T;
}

function rectFor(root: HTMLElement, leafId: number): SVGRectElement {
  const node = root.querySelector(`rect[data-leaf-id="${leafId}"]`);
  if (node === null) {
    throw new Error(`missing rect for leaf ${leafId}`);
  }
  return node as SVGRectElement;
}

function setSlider(root: HTMLElement, index: number): void {
  const slider = q<HTMLInputElement>(root, "threshold-slider");
  slider.value = String(index);
  slider.dispatchEvent(new Event("input"));
}

function hover(rect: SVGRectElement): void {
  rect.dispatchEvent(new Event("mouseenter"));
}

function tooltipValue(root: HTMLElement, field: string): string {
  const line = q<HTMLElement>(root, "tooltip").querySelector(`[data-field="${field}"]`);
  if (line === null) {
    throw new Error(`tooltip has no field ${field}`);
  }
  return line.querySelector(".tooltip-value")!.textContent ?? "";
}

beforeEach(() => {
  document.body.textContent = "";
});

describe("plot rendering", () => {
  it("draws one rectangle per layout entry with the shared palette", () => {
    const root = mount("rotated_square");
    const report = fixture("rotated_square");
    const rects = root.querySelectorAll("rect[data-leaf-id]");
    expect(rects.length).toBe(report.layout.length);
    for (const entry of report.layout) {
      expect(rectFor(root, entry.leaf_id).getAttribute("fill")).toBe(PALETTE[String(entry.group)]);
    }
    expect(q<HTMLElement>(root, "status").textContent).toContain(
      `${report.leaves.length} leaves`,
    );
  });

  it("starts with the layout block's opacities at the default threshold", () => {
    const root = mount("rotated_square");
    const report = fixture("rotated_square");
    for (const entry of report.layout) {
      const rect = rectFor(root, entry.leaf_id);
      expect(Number(rect.getAttribute("fill-opacity"))).toBe(entry.opacity);
    }
  });
});

describe("threshold slider", () => {
  it("recomputes opacity and flags from the grids at every position", () => {
    const root = mount("rotated_square");
    const report = fixture("rotated_square");
    for (let gi = 0; gi < report.consistency_thresholds.length; gi++) {
      setSlider(root, gi);
      expect(q<HTMLElement>(root, "threshold-value").textContent).toBe(
        `t = ${report.consistency_thresholds[gi]}`,
      );
      for (const leaf of report.leaves) {
        const rect = rectFor(root, leaf.leaf_id);
        expect(Number(rect.getAttribute("fill-opacity"))).toBe(leaf.consistency_grid[gi]);
        expect(rect.classList.contains("flagged")).toBe(leaf.flag_grid[gi]);
      }
    }
  });

  it("reproduces the leaves block's flags at grid index 0 with an absolute zero threshold", () => {
    const root = mount("rotated_square");
    const report = fixture("rotated_square");
    expect(report.consistency_thresholds[0]).toBe(0);
    setSlider(root, 0);
    for (const leaf of report.leaves) {
      expect(rectFor(root, leaf.leaf_id).classList.contains("flagged")).toBe(leaf.is_violating);
    }
  });

  it("tracks the relative-mode fixture's flags across the grid", () => {
    const root = mount("relative_mode");
    const report = fixture("relative_mode");
    setSlider(root, 0);
    expect(root.querySelectorAll("rect.flagged").length).toBe(0);
    setSlider(root, report.default_threshold_index);
    const flaggedIds = [...root.querySelectorAll("rect.flagged")]
      .map((rect) => Number(rect.getAttribute("data-leaf-id")))
      .sort((a, b) => a - b);
    expect(flaggedIds).toEqual([36, 40]);
    for (const leaf of report.leaves) {
      expect(rectFor(root, leaf.leaf_id).classList.contains("flagged")).toBe(leaf.is_violating);
    }
  });
});

describe("hover tooltip", () => {
  it("shows the full field list for the quadrant leaf, matching the report exactly", () => {
    const root = mount("rotated_square");
    const report = fixture("rotated_square");
    const leaf = quadrantLeaf(report);
    const tooltip = q<HTMLElement>(root, "tooltip");
    expect(tooltip.hasAttribute("hidden")).toBe(true);

    hover(rectFor(root, leaf.leaf_id));
    expect(tooltip.hasAttribute("hidden")).toBe(false);
    const labels = [...tooltip.querySelectorAll(".tooltip-line")].map((line) =>
      line.getAttribute("data-field"),
    );
    expect(labels).toEqual([
      "depth",
      "group 0",
      "group 1",
      "impurity",
      "probability",
      "is_violating",
      "consistency",
      "query",
    ]);
    expect(Number(tooltipValue(root, "depth"))).toBe(leaf.depth);
    expect(Number(tooltipValue(root, "group 0"))).toBe(leaf.n0);
    expect(leaf.n0).toBe(0);
    expect(Number(tooltipValue(root, "group 1"))).toBe(leaf.n1);
    expect(Number(tooltipValue(root, "impurity"))).toBe(leaf.impurity);
    expect(Number(tooltipValue(root, "probability"))).toBe(leaf.probability);
    expect(tooltipValue(root, "is_violating")).toBe("true");
    expect(Number(tooltipValue(root, "consistency"))).toBe(leaf.consistency);
    expect(tooltipValue(root, "query")).toBe(leaf.query_text);

    rectFor(root, leaf.leaf_id).dispatchEvent(new Event("mouseleave"));
    expect(tooltip.hasAttribute("hidden")).toBe(true);
  });

  it("reflects the current threshold in is_violating and consistency", () => {
    const root = mount("relative_mode");
    const report = fixture("relative_mode");
    const leaf = leafById(report, 36);

    setSlider(root, 0);
    hover(rectFor(root, 36));
    expect(tooltipValue(root, "is_violating")).toBe("false");
    expect(Number(tooltipValue(root, "consistency"))).toBe(leaf.consistency_grid[0]);

    setSlider(root, report.default_threshold_index);
    hover(rectFor(root, 36));
    expect(tooltipValue(root, "is_violating")).toBe("true");
    expect(Number(tooltipValue(root, "consistency"))).toBe(
      leaf.consistency_grid[report.default_threshold_index],
    );
  });
});

describe("selection and export", () => {
  it("exports the quadrant leaf's query text verbatim", () => {
    const root = mount("rotated_square");
    const report = fixture("rotated_square");
    const leaf = quadrantLeaf(report);
    const button = q<HTMLButtonElement>(root, "export-button");
    expect(button.disabled).toBe(true);

    rectFor(root, leaf.leaf_id).dispatchEvent(new Event("click"));
    expect(button.disabled).toBe(false);
    button.dispatchEvent(new Event("click"));
    const output = q<HTMLPreElement>(root, "export-output");
    expect(output.hasAttribute("hidden")).toBe(false);
    expect(output.textContent).toBe(leaf.query_text + "\n");
  });

  it("combines two selections into lines plus a disjunction", () => {
    const root = mount("rotated_square");
    const report = fixture("rotated_square");
    const quadrant = quadrantLeaf(report);
    const other = report.leaves.find((l) => !l.is_violating && l.query.length > 0)!;

    rectFor(root, quadrant.leaf_id).dispatchEvent(new Event("click"));
    rectFor(root, other.leaf_id).dispatchEvent(new Event("click"));
    q<HTMLButtonElement>(root, "export-button").dispatchEvent(new Event("click"));

    const [first, second] = [quadrant, other].sort((a, b) => a.leaf_id - b.leaf_id);
    expect(q<HTMLPreElement>(root, "export-output").textContent).toBe(
      `${first!.query_text}\n${second!.query_text}\n(${first!.query_text}) OR (${second!.query_text})\n`,
    );
  });

  it("disables the button and clears the output when the selection empties", () => {
    const root = mount("rotated_square");
    const leaf = quadrantLeaf(fixture("rotated_square"));
    const rect = rectFor(root, leaf.leaf_id);
    const button = q<HTMLButtonElement>(root, "export-button");

    rect.dispatchEvent(new Event("click"));
    button.dispatchEvent(new Event("click"));
    expect(q<HTMLPreElement>(root, "export-output").hasAttribute("hidden")).toBe(false);

    rect.dispatchEvent(new Event("click"));
    expect(button.disabled).toBe(true);
    expect(q<HTMLPreElement>(root, "export-output").hasAttribute("hidden")).toBe(true);
  });
});

describe("aggregation toggle", () => {
  it("is hidden when the report has no per-sample data", () => {
    const root = mount("null_overlap");
    expect(q<HTMLElement>(root, "aggregation-toggle").hasAttribute("hidden")).toBe(true);
  });

  it("switches the quadrant leaf to its member median when samples exist", () => {
    const root = mount("rotated_square");
    const report = fixture("rotated_square");
    const leaf = quadrantLeaf(report);
    const toggle = q<HTMLElement>(root, "aggregation-toggle");
    expect(toggle.hasAttribute("hidden")).toBe(false);

    const median = toggle.querySelector<HTMLInputElement>('input[value="median"]')!;
    median.checked = true;
    median.dispatchEvent(new Event("change"));

    const rect = rectFor(root, leaf.leaf_id);
    expect(Number(rect.getAttribute("fill-opacity"))).toBe(
      consistencyAt(report, leaf, report.default_threshold_index, "median"),
    );
    expect(Number(rect.getAttribute("fill-opacity"))).toBe(1);

    hover(rect);
    expect(tooltipValue(root, "consistency")).toBe("1");
  });
});

describe("null-overlap blankness", () => {
  it("shows no flags and only faint ink at every slider position", () => {
    const root = mount("null_overlap");
    const report = fixture("null_overlap");
    for (let gi = 0; gi < report.consistency_thresholds.length; gi++) {
      setSlider(root, gi);
      expect(root.querySelectorAll("rect.flagged").length).toBe(0);
      for (const leaf of report.leaves) {
        expect(Number(rectFor(root, leaf.leaf_id).getAttribute("fill-opacity"))).toBeLessThanOrEqual(
          0.12,
        );
      }
    }
    setSlider(root, report.default_threshold_index);
    for (const leaf of report.leaves) {
      expect(Number(rectFor(root, leaf.leaf_id).getAttribute("fill-opacity"))).toBeLessThanOrEqual(
        0.01,
      );
    }
  });
});

describe("error banner", () => {
  it("reports unparseable text without rendering anything", () => {
    const root = mount();
    loadReportText(root, "{ definitely not json");
    const banner = q<HTMLElement>(root, "error-banner");
    expect(banner.hasAttribute("hidden")).toBe(false);
    expect(banner.textContent).toContain("not valid JSON");
    expect(q<HTMLElement>(root, "report-root").children.length).toBe(0);
  });

  it("reports schema violations and clears any previous render", () => {
    const root = mount("rotated_square");
    expect(root.querySelectorAll("rect").length).toBeGreaterThan(0);

    const doc = JSON.parse(fixtureText("rotated_square"));
    delete doc.leaves;
    loadReportText(root, JSON.stringify(doc));

    const banner = q<HTMLElement>(root, "error-banner");
    expect(banner.hasAttribute("hidden")).toBe(false);
    expect(banner.textContent).toContain("report schema");
    expect(root.querySelectorAll("rect").length).toBe(0);
  });

  it("clears the banner once a valid report loads", () => {
    const root = mount();
    loadReportText(root, "nonsense");
    expect(q<HTMLElement>(root, "error-banner").hasAttribute("hidden")).toBe(false);
    loadReportText(root, fixtureText("rotated_square"));
    expect(q<HTMLElement>(root, "error-banner").hasAttribute("hidden")).toBe(true);
    expect(root.querySelectorAll("rect").length).toBeGreaterThan(0);
  });
});
