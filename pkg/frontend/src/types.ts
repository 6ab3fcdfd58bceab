// Typed mirror of the /v1 JSON API payloads.
// Every field here corresponds 1:1 to a server response field; the UI never
// derives numbers of its own (see the fixture snapshot tests).

export type ColumnKind = "categorical" | "numeric";

export type CellValue = string | number | null;

export interface ColumnSchema {
  name: string;
  kind: ColumnKind;
  /** Categorical: allowed values. Numeric: observed [min, max]. */
  domain?: CellValue[];
}

export interface Schema {
  columns: ColumnSchema[];
  label_column: string;
  positive_label: string;
  protected_column: string | null;
  protected_groups: string[];
}

export interface ProjectSummary {
  project_id: string;
  rows: number;
  schema: Schema;
}

// ---- interactions -------------------------------------------------------

export interface HistogramBucket {
  value: string;
  count: number;
  proportions: Record<string, number>;
}

export interface ColumnInteraction {
  column: string;
  kind: ColumnKind;
  association_score: number;
  histogram: HistogramBucket[];
}

export interface InteractionReport {
  protected_column: string;
  protected_groups: string[];
  columns: ColumnInteraction[];
}

// ---- search -------------------------------------------------------------

export interface ArchivePoint {
  model_id: string;
  accuracy: number;
  objective: number;
  is_pareto: boolean;
}

export interface Archive {
  search_id: string;
  config: Record<string, unknown>;
  best_accuracy: number;
  points: ArchivePoint[];
}

export interface TreeNode {
  leaf: boolean;
  n: number;
  pos: number;
  feature?: number;
  threshold?: number;
  left?: TreeNode;
  right?: TreeNode;
}

export interface ModelLogic {
  type: "linear" | "tree" | "forest";
  algorithm: string;
  features: string[];
  // linear models
  weights?: { feature: string; weight: number }[];
  intercept?: number;
  note?: string;
  // tree models
  root?: TreeNode;
  trees?: TreeNode[];
}

export interface GroupStats {
  tp: number;
  fp: number;
  tn: number;
  fn: number;
  size: number;
  tpr: number;
  fpr: number;
  degenerate_tpr: boolean;
}

export interface FairnessReport {
  accuracy: number;
  eod: number;
  aod: number;
  groups: Record<string, GroupStats>;
  model_id: string | null;
  split_id: string | null;
}

// ---- counterfactual testing --------------------------------------------

export type PairCategory =
  | "both_positive"
  | "both_negative"
  | "original_favored"
  | "counterfactual_favored";

export interface TestPair {
  id: string;
  original: CellValue[];
  counterfactual: CellValue[];
  proba_original: number;
  proba_counterfactual: number;
  category: PairCategory;
  is_id: boolean;
  label: string | null;
}

export interface SuiteListing {
  suite_id: string;
  model_id: string;
  total: number;
  category_counts: Record<PairCategory, number>;
  pairs: TestPair[];
}

export interface CounterfactualEdit {
  base_pair_id: string;
  overrides: Record<string, CellValue>;
  instance: CellValue[];
  proba: number;
  changed_feature_count: number;
  proximity: number;
}

export interface AuditSummary {
  counts: Record<string, number>;
  rates: Record<string, number>;
  total: number;
}

export interface AuditResult {
  suite_id: string;
  summary: AuditSummary;
  verdicts: {
    pair_id: string;
    raw_is_id: boolean;
    adjusted_is_id: boolean;
    label: "TP" | "FP" | "TN" | "FN";
    adjusted_counterfactual: CellValue[];
  }[];
}

// ---- explanations -------------------------------------------------------

export interface FeatureContribution {
  feature: string;
  condition: string;
  weight: number;
}

export interface Explanation {
  instance_id: string | null;
  features: FeatureContribution[];
  intercept: number;
  fidelity: number;
  kernel_width: number;
  n_samples: number;
  seed: number;
  story?: { features: { feature: string; proxy_suspect: boolean }[] };
}

// ---- jobs ---------------------------------------------------------------

export type JobStatus = "queued" | "running" | "done" | "failed";

export interface Job {
  id: string;
  kind: string;
  status: JobStatus;
  progress: number;
  result: Record<string, unknown> | null;
  error: string | null;
}

export interface ApiErrorBody {
  detail: { code: string; message: string } | string;
}
