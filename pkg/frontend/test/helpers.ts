import { existsSync, readFileSync } from "node:fs";
import { join } from "node:path";

import { parseReport, Report } from "../src/schema.js";

export type FixtureName = "rotated_square" | "null_overlap" | "relative_mode";

export const FIXTURES: FixtureName[] = ["rotated_square", "null_overlap", "relative_mode"];

function fixtureDir(): string {
  // vitest runs with cwd at the package root; tolerate a repo-root cwd too
  for (const candidate of [join(process.cwd(), "test", "fixtures"), join(process.cwd(), "frontend", "test", "fixtures")]) {
    if (existsSync(candidate)) {
      return candidate;
    }
  }
  throw new Error("fixture directory not found; run vitest from the frontend package root");
}

export function fixtureText(name: FixtureName): string {
  return readFileSync(join(fixtureDir(), `${name}.json`), "utf8");
}

export function fixture(name: FixtureName): Report {
  const parsed = parseReport(fixtureText(name));
  if (!parsed.ok) {
    throw new Error(`fixture ${name} failed to parse: ${parsed.error}`);
  }
  return parsed.report;
}

/** The single flagged leaf of the rotated-square fixture (the quadrant). */
export function quadrantLeaf(report: Report) {
  const flagged = report.leaves.filter((leaf) => leaf.is_violating);
  if (flagged.length !== 1) {
    throw new Error(`expected exactly one flagged leaf, got ${flagged.length}`);
  }
  return flagged[0]!;
}
