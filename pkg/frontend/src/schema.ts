/**
 * Runtime validation for overlap violation reports.
 *
 * The shapes here mirror the JSON schema shipped with the analysis package
 * (report_schema.json, version 1). Every document is validated before any
 * rendering happens; a document that fails validation must produce an error
 * banner and nothing else.
 */
import { z } from "zod";

export const policySchema = z
  .object({
    criterion: z.enum(["gini", "entropy"]),
    threshold: z.number().min(0),
    mode: z.enum(["absolute", "relative"]),
  })
  .strict();

export type Policy = z.infer<typeof policySchema>;

export const hyperparametersSchema = z
  .object({
    criterion: z.enum(["gini", "entropy"]),
    max_depth: z.union([z.number().int().min(1), z.null()]),
    min_samples_leaf: z.number().int().min(1),
    min_samples_split: z.number().int().min(2),
    min_impurity_decrease: z.number().min(0),
    max_features: z.number().gt(0).max(1),
  })
  .strict();

export type Hyperparameters = z.infer<typeof hyperparametersSchema>;

export const metadataSchema = z
  .object({
    seed: z.number().int(),
    n_samples: z.number().int().min(1),
    n_features: z.number().int().min(1),
    n0: z.number().int().min(0),
    n1: z.number().int().min(0),
    feature_names: z.array(z.string().min(1)).min(1),
    policy: policySchema,
    aggregation: z.enum(["mean", "median"]),
    n_trees: z.number().int().min(1),
    flagged_fraction: z.number().min(0).max(1),
  })
  .strict();

export type Metadata = z.infer<typeof metadataSchema>;

export const trialSchema = z
  .object({
    trial: z.number().int().min(0),
    hyperparameters: hyperparametersSchema,
    fold_aucs: z.array(z.union([z.number().min(0).max(1), z.null()])),
    mean_auc: z.number().min(0).max(1),
  })
  .strict();

export const modelSelectionSchema = z
  .object({
    cv_auc: z.number().min(0).max(1),
    best: hyperparametersSchema,
    trials: z.array(trialSchema).min(1),
  })
  .strict();

export interface InternalNode {
  feature: number;
  cutoff: number;
  left: TreeNode;
  right: TreeNode;
}

export interface LeafNode {
  leaf_id: number;
  n0: number;
  n1: number;
  depth: number;
  impurity: number;
}

export type TreeNode = InternalNode | LeafNode;

export function isLeafNode(node: TreeNode): node is LeafNode {
  return "leaf_id" in node;
}

const leafNodeSchema: z.ZodType<LeafNode> = z
  .object({
    leaf_id: z.number().int().min(0),
    n0: z.number().int().min(0),
    n1: z.number().int().min(0),
    depth: z.number().int().min(0),
    impurity: z.number().min(0),
  })
  .strict();

const internalNodeSchema: z.ZodType<InternalNode> = z
  .object({
    feature: z.number().int().min(0),
    cutoff: z.number(),
    left: z.lazy(() => treeNodeSchema),
    right: z.lazy(() => treeNodeSchema),
  })
  .strict();

export const treeNodeSchema: z.ZodType<TreeNode> = z.lazy(() =>
  z.union([internalNodeSchema, leafNodeSchema]),
);

export const ruleSchema = z
  .object({
    feature: z.string().min(1),
    sign: z.enum(["<=", ">"]),
    cutoff: z.number(),
  })
  .strict();

export type Rule = z.infer<typeof ruleSchema>;

export const leafReportSchema = z
  .object({
    leaf_id: z.number().int().min(0),
    depth: z.number().int().min(0),
    n0: z.number().int().min(0),
    n1: z.number().int().min(0),
    impurity: z.number().min(0),
    is_violating: z.boolean(),
    probability: z.number().min(0).max(1),
    consistency: z.number().min(0).max(1),
    consistency_grid: z.array(z.number().min(0).max(1)).min(1),
    flag_grid: z.array(z.boolean()).min(1),
    majority_group: z.union([z.literal(0), z.literal(1)]),
    query: z.array(ruleSchema),
    query_text: z.string().min(1),
  })
  .strict();

export type LeafReport = z.infer<typeof leafReportSchema>;

export const rectangleSchema = z
  .object({
    leaf_id: z.number().int().min(0),
    x: z.number().min(0),
    width: z.number().min(0),
    row: z.number().int().min(0),
    group: z.union([z.literal(0), z.literal(1), z.literal("tie")]),
    opacity: z.number().min(0).max(1),
  })
  .strict();

export type Rectangle = z.infer<typeof rectangleSchema>;

export const samplesSchema = z
  .object({
    leaf: z.array(z.number().int().min(0)),
    consistency: z.array(z.array(z.number().min(0).max(1))),
  })
  .strict();

export type Samples = z.infer<typeof samplesSchema>;

const reportObjectSchema = z
  .object({
    version: z.literal(1),
    metadata: metadataSchema,
    model_selection: modelSelectionSchema,
    tree: treeNodeSchema,
    leaves: z.array(leafReportSchema).min(1),
    consistency_thresholds: z.array(z.number().min(0)).min(1),
    default_threshold_index: z.number().int().min(0),
    layout: z.array(rectangleSchema),
    samples: samplesSchema.optional(),
  })
  .strict();

export const reportSchema = reportObjectSchema.superRefine((report, ctx) => {
  const gridLength = report.consistency_thresholds.length;
  if (report.default_threshold_index >= gridLength) {
    ctx.addIssue({
      code: z.ZodIssueCode.custom,
      path: ["default_threshold_index"],
      message: `default_threshold_index ${report.default_threshold_index} is out of range for a grid of ${gridLength} thresholds`,
    });
  }
  report.leaves.forEach((leaf, i) => {
    if (leaf.consistency_grid.length !== gridLength) {
      ctx.addIssue({
        code: z.ZodIssueCode.custom,
        path: ["leaves", i, "consistency_grid"],
        message: `consistency_grid has ${leaf.consistency_grid.length} entries but the threshold grid has ${gridLength}`,
      });
    }
    if (leaf.flag_grid.length !== gridLength) {
      ctx.addIssue({
        code: z.ZodIssueCode.custom,
        path: ["leaves", i, "flag_grid"],
        message: `flag_grid has ${leaf.flag_grid.length} entries but the threshold grid has ${gridLength}`,
      });
    }
  });
  const leafIds = new Set(report.leaves.map((leaf) => leaf.leaf_id));
  report.layout.forEach((rect, i) => {
    if (!leafIds.has(rect.leaf_id)) {
      ctx.addIssue({
        code: z.ZodIssueCode.custom,
        path: ["layout", i, "leaf_id"],
        message: `layout references leaf_id ${rect.leaf_id}, which has no leaf record`,
      });
    }
  });
  if (report.samples !== undefined) {
    if (report.samples.leaf.length !== report.metadata.n_samples) {
      ctx.addIssue({
        code: z.ZodIssueCode.custom,
        path: ["samples", "leaf"],
        message: `samples.leaf has ${report.samples.leaf.length} entries but metadata.n_samples is ${report.metadata.n_samples}`,
      });
    }
    if (report.samples.consistency.length !== report.metadata.n_samples) {
      ctx.addIssue({
        code: z.ZodIssueCode.custom,
        path: ["samples", "consistency"],
        message: `samples.consistency has ${report.samples.consistency.length} rows but metadata.n_samples is ${report.metadata.n_samples}`,
      });
    }
    report.samples.consistency.forEach((row, i) => {
      if (row.length !== gridLength) {
        ctx.addIssue({
          code: z.ZodIssueCode.custom,
          path: ["samples", "consistency", i],
          message: `samples.consistency row ${i} has ${row.length} entries but the threshold grid has ${gridLength}`,
        });
      }
    });
  }
});

export type Report = z.infer<typeof reportSchema>;

export type ParseResult =
  | { ok: true; report: Report }
  | { ok: false; error: string };

/** Parse raw text into a validated report, or a human-readable error. */
export function parseReport(text: string): ParseResult {
  let data: unknown;
  try {
    data = JSON.parse(text);
  } catch (err) {
    return { ok: false, error: `not valid JSON: ${(err as Error).message}` };
  }
  const outcome = reportSchema.safeParse(data);
  if (!outcome.success) {
    const issues = outcome.error.issues
      .slice(0, 5)
      .map((issue) => `${issue.path.join(".") || "(root)"}: ${issue.message}`)
      .join("; ");
    return { ok: false, error: `document does not match report schema: ${issues}` };
  }
  return { ok: true, report: outcome.data };
}
