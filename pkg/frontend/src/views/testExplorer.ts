// Test explorer: the counterfactual suite as category-coloured points with a
// legend and per-category counts. Counts come from the API's category_counts
// field, never recomputed client-side.

import type { PairCategory, SuiteListing, TestPair } from "../types.js";

export const CATEGORY_COLORS: Record<PairCategory, string> = {
  both_positive: "green",
  both_negative: "blue",
  original_favored: "orange",
  counterfactual_favored: "purple",
};

export interface ExplorerPoint {
  pairId: string;
  category: PairCategory;
  color: string;
  isId: boolean;
  probaOriginal: number;
  probaCounterfactual: number;
}

export interface TestExplorerViewModel {
  suiteId: string;
  modelId: string;
  total: number;
  counts: Record<PairCategory, number>;
  legend: { category: PairCategory; color: string; count: number }[];
  points: ExplorerPoint[];
}

export function buildTestExplorer(listing: SuiteListing): TestExplorerViewModel {
  const counts = listing.category_counts;
  const legend = (Object.keys(CATEGORY_COLORS) as PairCategory[]).map(
    (category) => ({
      category,
      color: CATEGORY_COLORS[category],
      count: counts[category] ?? 0,
    }),
  );
  return {
    suiteId: listing.suite_id,
    modelId: listing.model_id,
    total: listing.total,
    counts,
    legend,
    points: listing.pairs.map((p: TestPair) => ({
      pairId: p.id,
      category: p.category,
      color: CATEGORY_COLORS[p.category],
      isId: p.is_id,
      probaOriginal: p.proba_original,
      probaCounterfactual: p.proba_counterfactual,
    })),
  };
}

export function renderTestExplorer(vm: TestExplorerViewModel): string {
  const legend = vm.legend
    .map(
      (l) =>
        `<li data-category="${l.category}">` +
        `<span class="swatch" style="background:${l.color}"></span>` +
        `${l.category}: ${l.count}</li>`,
    )
    .join("");
  const points = vm.points
    .map(
      (p) =>
        `<circle class="pair" data-pair="${p.pairId}" ` +
        `data-category="${p.category}" data-id="${p.isId}" ` +
        `fill="${p.color}" cx="${p.probaOriginal}" ` +
        `cy="${p.probaCounterfactual}" r="2"/>`,
    )
    .join("");
  return (
    `<section class="test-explorer" data-suite="${vm.suiteId}" ` +
    `data-total="${vm.total}"><ul class="legend">${legend}</ul>` +
    `<svg viewBox="0 0 1 1">${points}</svg></section>`
  );
}
