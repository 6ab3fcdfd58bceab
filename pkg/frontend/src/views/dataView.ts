// Data view: association bars for every column against the protected
// attribute, plus a per-value histogram for the column under the cursor.

import type { ColumnInteraction, InteractionReport } from "../types.js";

export interface AssociationBar {
  column: string;
  kind: "categorical" | "numeric";
  /** Association score straight from the API, already in [0, 1]. */
  score: number;
  /** Bar width as a percentage of the widest possible bar. */
  widthPct: number;
}

export interface HistogramRow {
  value: string;
  count: number;
  /** One segment per protected group, proportions summing to ~1. */
  segments: { group: string; proportion: number }[];
}

export interface DataViewModel {
  protectedColumn: string;
  groups: string[];
  bars: AssociationBar[];
  histogram: { column: string; rows: HistogramRow[] } | null;
}

export function buildDataView(
  report: InteractionReport,
  histogram?: ColumnInteraction,
): DataViewModel {
  return {
    protectedColumn: report.protected_column,
    groups: report.protected_groups,
    bars: report.columns.map((c) => ({
      column: c.column,
      kind: c.kind,
      score: c.association_score,
      widthPct: Math.round(c.association_score * 100),
    })),
    histogram: histogram
      ? {
          column: histogram.column,
          rows: histogram.histogram.map((bucket) => ({
            value: bucket.value,
            count: bucket.count,
            segments: report.protected_groups.map((group) => ({
              group,
              proportion: bucket.proportions[group] ?? 0,
            })),
          })),
        }
      : null,
  };
}

export function renderDataView(vm: DataViewModel): string {
  const bars = vm.bars
    .map(
      (b) =>
        `<li class="assoc-bar" data-column="${b.column}">` +
        `<span class="label">${b.column}</span>` +
        `<span class="bar" style="width:${b.widthPct}%"></span>` +
        `<span class="score">${b.score.toFixed(3)}</span></li>`,
    )
    .join("");
  const hist = vm.histogram
    ? `<table class="histogram" data-column="${vm.histogram.column}">` +
      vm.histogram.rows
        .map(
          (row) =>
            `<tr data-value="${row.value}"><td>${row.value}</td>` +
            `<td>${row.count}</td><td>` +
            row.segments
              .map(
                (s) =>
                  `<span class="seg" data-group="${s.group}" ` +
                  `style="width:${(s.proportion * 100).toFixed(1)}%"></span>`,
              )
              .join("") +
            `</td></tr>`,
        )
        .join("") +
      `</table>`
    : "";
  return (
    `<section class="data-view" data-protected="${vm.protectedColumn}">` +
    `<ul class="associations">${bars}</ul>${hist}</section>`
  );
}
