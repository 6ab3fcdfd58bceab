// UI session state shared by the four views.
//
// Invariants the tests pin down:
//  - pending edit overrides belong to exactly one pair; selecting a different
//    pair clears them
//  - at most one edit request is in flight; a newer edit supersedes an older
//    response that arrives late

import type { ApiClient } from "./client.js";
import type { CellValue, CounterfactualEdit } from "./types.js";

export class SessionState {
  projectId: string | null = null;
  modelId: string | null = null;
  suiteId: string | null = null;
  testFilter: string | null = null;
  selectedPairId: string | null = null;
  overrides: Record<string, CellValue> = {};
  lastEdit: CounterfactualEdit | null = null;
  editError: { code: string; message: string } | null = null;

  private editEpoch = 0;

  selectProject(projectId: string): void {
    this.projectId = projectId;
    this.modelId = null;
    this.suiteId = null;
    this.selectPair(null);
  }

  selectModel(modelId: string | null): void {
    this.modelId = modelId;
    this.suiteId = null;
    this.selectPair(null);
  }

  selectSuite(suiteId: string | null): void {
    this.suiteId = suiteId;
    this.testFilter = null;
    this.selectPair(null);
  }

  selectPair(pairId: string | null): void {
    if (pairId !== this.selectedPairId) {
      this.overrides = {};
      this.lastEdit = null;
      this.editError = null;
      this.editEpoch++;
    }
    this.selectedPairId = pairId;
  }

  setOverride(column: string, value: CellValue): void {
    this.overrides = { ...this.overrides, [column]: value };
  }

  clearOverride(column: string): void {
    const { [column]: _dropped, ...rest } = this.overrides;
    this.overrides = rest;
  }

  /**
   * Submit the pending overrides for the selected pair. The resolved edit is
   * stored on the session unless a newer edit (or a pair change) happened in
   * the meantime, in which case the stale response is dropped.
   */
  async submitEdit(client: ApiClient): Promise<CounterfactualEdit | null> {
    if (!this.projectId || !this.suiteId || !this.selectedPairId) {
      throw new Error("no pair selected");
    }
    const epoch = ++this.editEpoch;
    try {
      const edit = await client.editPair(
        this.projectId,
        this.suiteId,
        this.selectedPairId,
        this.overrides,
      );
      if (epoch !== this.editEpoch) return null;
      this.lastEdit = edit;
      this.editError = null;
      return edit;
    } catch (err) {
      if (epoch !== this.editEpoch) return null;
      if (err instanceof Error && err.name === "ApiError") {
        const api = err as Error & { code: string };
        this.editError = { code: api.code, message: api.message };
        return null;
      }
      throw err;
    }
  }
}
