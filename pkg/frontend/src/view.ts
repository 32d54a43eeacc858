/**
 * DOM rendering and event wiring for the report explorer.
 *
 * All derived state comes from the pure functions in model.ts; this module
 * only projects (report, view state) into elements and maps events back to
 * state changes. Rendering after a state change is synchronous, so tests
 * can dispatch an event and read the DOM immediately afterwards.
 */
import {
  Aggregation,
  ViewState,
  consistencyAt,
  exportText,
  flagsAtIndex,
  gridThreshold,
  initialState,
  hasSampleData,
  leafById,
  tooltipFields,
} from "./model.js";
import type { Report } from "./schema.js";
import { parseReport } from "./schema.js";

/** Same categorical pair and tie gray the static SVG output uses. */
export const PALETTE: Record<string, string> = {
  "0": "#e66101",
  "1": "#0571b0",
  tie: "#999999",
};

const RECT_HEIGHT = 36;
const ROW_GAP = 10;
const MARGIN = 16;

const SVG_NS = "http://www.w3.org/2000/svg";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export function mountExplorer(root: HTMLElement): void {
  root.textContent = "";
  const header = el("header");
  header.append(el("h1", {}, "Overlap report explorer"));

  const picker = el("input", {
    type: "file",
    accept: ".json,application/json",
    "data-testid": "file-input",
  });
  header.append(picker);

  const banner = el("div", { "data-testid": "error-banner", class: "banner", hidden: "" });
  const main = el("main", { "data-testid": "report-root" });
  root.append(header, banner, main);

  picker.addEventListener("change", () => {
    const file = picker.files?.[0];
    if (!file) {
      return;
    }
    file
      .text()
      .then((text) => loadReportText(root, text))
      .catch((err: Error) => showError(root, `could not read file: ${err.message}`));
  });
}

/** Parse raw text and either render the report or show the error banner. */
export function loadReportText(root: HTMLElement, text: string): void {
  const parsed = parseReport(text);
  const main = root.querySelector<HTMLElement>('[data-testid="report-root"]');
  if (main === null) {
    throw new Error("explorer chrome is not mounted");
  }
  if (!parsed.ok) {
    main.textContent = "";
    showError(root, parsed.error);
    return;
  }
  hideError(root);
  renderReport(main, parsed.report);
}

export function showError(root: HTMLElement, message: string): void {
  const banner = root.querySelector<HTMLElement>('[data-testid="error-banner"]');
  if (banner !== null) {
    banner.textContent = message;
    banner.removeAttribute("hidden");
  }
}

function hideError(root: HTMLElement): void {
  const banner = root.querySelector<HTMLElement>('[data-testid="error-banner"]');
  if (banner !== null) {
    banner.textContent = "";
    banner.setAttribute("hidden", "");
  }
}

/** Render one validated report into `main`, replacing whatever was there. */
export function renderReport(main: HTMLElement, report: Report): void {
  const state = initialState(report);
  main.textContent = "";

  const status = el("div", { "data-testid": "status", class: "status" });

  const controls = el("div", { class: "controls" });
  const sliderLabel = el("label", {}, "violation threshold ");
  const slider = el("input", {
    type: "range",
    min: "0",
    max: String(report.consistency_thresholds.length - 1),
    step: "1",
    value: String(state.thresholdIndex),
    "data-testid": "threshold-slider",
  });
  const sliderValue = el("span", { "data-testid": "threshold-value" });
  sliderLabel.append(slider, sliderValue);
  controls.append(sliderLabel);

  const aggregationBox = el("fieldset", { "data-testid": "aggregation-toggle" });
  aggregationBox.append(el("legend", {}, "leaf aggregation"));
  for (const choice of ["mean", "median"] as const) {
    const label = el("label", {}, ` ${choice}`);
    const radio = el("input", { type: "radio", name: "aggregation", value: choice });
    (radio as HTMLInputElement).checked = choice === state.aggregation;
    radio.addEventListener("change", () => {
      state.aggregation = choice;
      refresh();
    });
    label.prepend(radio);
    aggregationBox.append(label);
  }
  if (!hasSampleData(report)) {
    aggregationBox.setAttribute("hidden", "");
  }
  controls.append(aggregationBox);

  const exportButton = el("button", { "data-testid": "export-button" }, "Export selected queries");
  (exportButton as HTMLButtonElement).disabled = true;
  controls.append(exportButton);

  const maxRow = report.layout.reduce((acc, r) => Math.max(acc, r.row), 0);
  const plotWidth = report.layout.reduce((acc, r) => Math.max(acc, r.x + r.width), 0);
  const plotHeight = (maxRow + 1) * (RECT_HEIGHT + ROW_GAP) - ROW_GAP;
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("data-testid", "plot");
  svg.setAttribute("width", String(plotWidth + 2 * MARGIN));
  svg.setAttribute("height", String(plotHeight + 2 * MARGIN));
  svg.setAttribute(
    "viewBox",
    `0 0 ${plotWidth + 2 * MARGIN} ${plotHeight + 2 * MARGIN}`,
  );

  const tooltip = el("div", { "data-testid": "tooltip", class: "tooltip", hidden: "" });
  const exportOutput = el("pre", { "data-testid": "export-output", hidden: "" });

  const rects = new Map<number, SVGRectElement>();
  for (const entry of report.layout) {
    const rect = document.createElementNS(SVG_NS, "rect");
    rect.setAttribute("data-leaf-id", String(entry.leaf_id));
    rect.setAttribute("x", String(MARGIN + entry.x));
    rect.setAttribute("y", String(MARGIN + (maxRow - entry.row) * (RECT_HEIGHT + ROW_GAP)));
    rect.setAttribute("width", String(entry.width));
    rect.setAttribute("height", String(RECT_HEIGHT));
    rect.setAttribute("fill", PALETTE[String(entry.group)] ?? "#999999");
    rect.addEventListener("mouseenter", () => {
      tooltip.textContent = "";
      for (const field of tooltipFields(report, leafById(report, entry.leaf_id), state)) {
        const line = el("div", { class: "tooltip-line", "data-field": field.label });
        line.append(
          el("span", { class: "tooltip-label" }, field.label),
          el("span", { class: "tooltip-value" }, field.value),
        );
        tooltip.append(line);
      }
      tooltip.removeAttribute("hidden");
    });
    rect.addEventListener("mouseleave", () => {
      tooltip.setAttribute("hidden", "");
    });
    rect.addEventListener("click", () => {
      if (state.selected.has(entry.leaf_id)) {
        state.selected.delete(entry.leaf_id);
      } else {
        state.selected.add(entry.leaf_id);
      }
      refresh();
    });
    rects.set(entry.leaf_id, rect);
    svg.append(rect);
  }

  slider.addEventListener("input", () => {
    state.thresholdIndex = Number((slider as HTMLInputElement).value);
    refresh();
  });
  exportButton.addEventListener("click", () => {
    exportOutput.textContent = exportText(report, state.selected);
    exportOutput.removeAttribute("hidden");
  });

  function refresh(): void {
    const flags = flagsAtIndex(report, state.thresholdIndex);
    const flagged = flags.filter(Boolean).length;
    sliderValue.textContent = `t = ${gridThreshold(report, state.thresholdIndex)}`;
    status.textContent =
      `${report.leaves.length} leaves · ${flagged} flagged at the current threshold · ` +
      `cv AUC ${report.model_selection.cv_auc.toFixed(3)} · ` +
      `${report.metadata.n_samples} samples (${report.metadata.n0} / ${report.metadata.n1})`;
    for (const [leafId, rect] of rects) {
      const leaf = leafById(report, leafId);
      const opacity = consistencyAt(report, leaf, state.thresholdIndex, state.aggregation);
      rect.setAttribute("fill-opacity", String(opacity));
      rect.setAttribute("stroke-opacity", String(opacity));
      const index = report.leaves.indexOf(leaf);
      rect.classList.toggle("flagged", flags[index] === true);
      rect.classList.toggle("selected", state.selected.has(leafId));
      rect.setAttribute("stroke", state.selected.has(leafId) ? "#000000" : "#333333");
      rect.setAttribute("stroke-width", state.selected.has(leafId) ? "2" : "0.5");
    }
    (exportButton as HTMLButtonElement).disabled = state.selected.size === 0;
    if (state.selected.size === 0) {
      exportOutput.setAttribute("hidden", "");
      exportOutput.textContent = "";
    }
  }

  refresh();
  main.append(status, controls, svg, tooltip, exportOutput);
}
