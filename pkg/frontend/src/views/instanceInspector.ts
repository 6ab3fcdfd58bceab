// Instance inspector: one counterfactual pair, its local surrogate
// explanation, and an editable what-if form. Probability and proximity always
// display the values the API returned for the latest edit — the client never
// rescoring anything itself is what makes the numbers trustworthy.

import type {
  CellValue,
  ColumnSchema,
  CounterfactualEdit,
  Explanation,
  TestPair,
} from "../types.js";

export interface InspectorField {
  column: string;
  kind: "categorical" | "numeric";
  original: CellValue;
  /** Current counterfactual value, including any applied edit. */
  value: CellValue;
  edited: boolean;
  /** Allowed values for categorical fields (the edit form's dropdown). */
  domain: string[] | null;
}

function categoricalDomain(col: ColumnSchema): string[] | null {
  if (col.kind !== "categorical" || !col.domain) return null;
  return col.domain.filter((v): v is string => typeof v === "string");
}

export interface WeightBar {
  feature: string;
  condition: string;
  weight: number;
  /** Bar width as a percentage of the largest |weight|. */
  widthPct: number;
  sign: "positive" | "negative";
}

export interface InstanceInspectorViewModel {
  pairId: string;
  probaOriginal: number;
  /** Displayed counterfactual probability: API edit response if present. */
  proba: number;
  /** Gower proximity from the latest edit, null before any edit. */
  proximity: number | null;
  changedFeatureCount: number | null;
  fields: InspectorField[];
  weights: WeightBar[];
  error: { code: string; message: string } | null;
}

export function buildInstanceInspector(
  pair: TestPair,
  columns: ColumnSchema[],
  explanation: Explanation | null,
  lastEdit: CounterfactualEdit | null,
  error: { code: string; message: string } | null = null,
): InstanceInspectorViewModel {
  const current = lastEdit ? lastEdit.instance : pair.counterfactual;
  const fields = columns.map((col, i) => {
    const value = current[i];
    const original = pair.original[i];
    if (value === undefined || original === undefined) {
      throw new Error(`row shorter than schema at column ${col.name}`);
    }
    return {
      column: col.name,
      kind: col.kind,
      original,
      value,
      edited: lastEdit ? col.name in lastEdit.overrides : false,
      domain: categoricalDomain(col),
    };
  });
  const maxAbs = explanation
    ? Math.max(1e-12, ...explanation.features.map((f) => Math.abs(f.weight)))
    : 1;
  const weights: WeightBar[] = (explanation?.features ?? []).map((f) => ({
    feature: f.feature,
    condition: f.condition,
    weight: f.weight,
    widthPct: Math.round((Math.abs(f.weight) / maxAbs) * 100),
    sign: f.weight >= 0 ? "positive" : "negative",
  }));
  return {
    pairId: pair.id,
    probaOriginal: pair.proba_original,
    proba: lastEdit ? lastEdit.proba : pair.proba_counterfactual,
    proximity: lastEdit ? lastEdit.proximity : null,
    changedFeatureCount: lastEdit ? lastEdit.changed_feature_count : null,
    fields,
    weights,
    error,
  };
}

export function renderInstanceInspector(
  vm: InstanceInspectorViewModel,
): string {
  const fields = vm.fields
    .map((f) => {
      const input = f.domain
        ? `<select name="${f.column}">` +
          f.domain
            .map(
              (v) =>
                `<option value="${v}"${v === f.value ? " selected" : ""}>` +
                `${v}</option>`,
            )
            .join("") +
          `</select>`
        : `<input name="${f.column}" type="number" value="${f.value ?? ""}"/>`;
      return (
        `<label data-column="${f.column}" data-edited="${f.edited}">` +
        `${f.column}${input}</label>`
      );
    })
    .join("");
  const weights = vm.weights
    .map(
      (w) =>
        `<li class="weight ${w.sign}" data-feature="${w.feature}">` +
        `<span class="condition">${w.condition}</span>` +
        `<span class="bar" style="width:${w.widthPct}%"></span>` +
        `<span class="value">${w.weight.toFixed(4)}</span></li>`,
    )
    .join("");
  const error = vm.error
    ? `<p class="error" data-code="${vm.error.code}">${vm.error.message}</p>`
    : "";
  return (
    `<section class="instance-inspector" data-pair="${vm.pairId}">` +
    `<dl class="scores">` +
    `<dt>P(+|original)</dt><dd data-field="proba-original">` +
    `${vm.probaOriginal.toFixed(4)}</dd>` +
    `<dt>P(+|counterfactual)</dt><dd data-field="proba">` +
    `${vm.proba.toFixed(4)}</dd>` +
    (vm.proximity !== null
      ? `<dt>proximity</dt><dd data-field="proximity">` +
        `${vm.proximity.toFixed(4)}</dd>`
      : "") +
    `</dl><form class="what-if">${fields}</form>${error}` +
    `<ul class="weights">${weights}</ul></section>`
  );
}
