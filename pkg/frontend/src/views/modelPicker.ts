// Model picker: accuracy-vs-unfairness scatter of every candidate a search
// evaluated. Pareto-front members are the red dots the user picks from.

import type { Archive } from "../types.js";

export const PARETO_COLOR = "red" as const;
export const DOMINATED_COLOR = "gray" as const;

export interface ScatterDot {
  modelId: string;
  /** x axis: held-out accuracy. */
  x: number;
  /** y axis: |objective| as reported by the API. */
  y: number;
  pareto: boolean;
  color: typeof PARETO_COLOR | typeof DOMINATED_COLOR;
}

export interface ModelPickerViewModel {
  searchId: string;
  bestAccuracy: number;
  dots: ScatterDot[];
  /** Model ids selectable in the picker (red dots only). */
  selectable: string[];
}

export function buildModelPicker(archive: Archive): ModelPickerViewModel {
  const dots = archive.points.map((p) => ({
    modelId: p.model_id,
    x: p.accuracy,
    y: p.objective,
    pareto: p.is_pareto,
    color: p.is_pareto ? PARETO_COLOR : DOMINATED_COLOR,
  }));
  return {
    searchId: archive.search_id,
    bestAccuracy: archive.best_accuracy,
    dots,
    selectable: dots.filter((d) => d.pareto).map((d) => d.modelId),
  };
}

export function renderModelPicker(vm: ModelPickerViewModel): string {
  const dots = vm.dots
    .map(
      (d) =>
        `<circle class="dot" data-model="${d.modelId}" ` +
        `data-pareto="${d.pareto}" fill="${d.color}" ` +
        `cx="${d.x}" cy="${d.y}" r="3"/>`,
    )
    .join("");
  return (
    `<svg class="model-picker" data-search="${vm.searchId}" ` +
    `viewBox="0 0 1 1">${dots}</svg>`
  );
}
