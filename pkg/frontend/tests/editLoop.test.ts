// The what-if edit loop on the canonical false-positive pair: a favored
// Husband whose raw sex flip drops below the threshold, and whose probability
// comes back once the Wife adjustment is applied. The inspector must display
// exactly the probability and proximity the API returns.

import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/client.js";
import { SessionState } from "../src/session.js";
import {
  buildInstanceInspector,
  renderInstanceInspector,
} from "../src/views/instanceInspector.js";
import { fixture, loadExchanges, MockTransport } from "./mockTransport.js";
import type {
  CounterfactualEdit,
  ProjectSummary,
  TestPair,
} from "../src/types.js";

const PID = "demo";
const exchanges = loadExchanges();
const SUITE_ID = fixture("suite", exchanges).path.split("/").at(-1)!;
const PAIR_ID = fixture("pair", exchanges).path.split("/").at(-1)!;
const pairFixture = fixture("pair", exchanges).response as TestPair;
const autoFixture = fixture("edit_auto", exchanges)
  .response as CounterfactualEdit;
const wifeFixture = fixture("edit_wife", exchanges)
  .response as CounterfactualEdit;
const columns = (fixture("create_project", exchanges).response as ProjectSummary)
  .schema.columns;

describe("edit loop", () => {
  let api: ApiClient;
  let session: SessionState;

  beforeEach(() => {
    api = new ApiClient(new MockTransport(exchanges));
    session = new SessionState();
    session.selectProject(PID);
    session.suiteId = SUITE_ID;
    session.selectPair(PAIR_ID);
  });

  it("starts from a favored original whose raw flip changes the outcome", () => {
    expect(pairFixture.is_id).toBe(true);
    expect(pairFixture.original[0]).toBe("Male");
    expect(pairFixture.original[3]).toBe("Husband");
    expect(pairFixture.proba_original).toBeGreaterThanOrEqual(0.5);
    expect(pairFixture.proba_counterfactual).toBeLessThan(0.5);
  });

  it("round-trips the unadjusted counterfactual through the mock API", async () => {
    const edit = await session.submitEdit(api);
    expect(edit).toEqual(autoFixture);

    const vm = buildInstanceInspector(pairFixture, columns, null, edit);
    expect(vm.proba).toBe(autoFixture.proba);
    expect(vm.proximity).toBe(autoFixture.proximity);
    expect(vm.proba).toBeLessThan(0.5);
  });

  it("updates displayed probability and proximity to the API values after Husband->Wife", async () => {
    session.setOverride("relationship", "Wife");
    const edit = await session.submitEdit(api);
    expect(edit).toEqual(wifeFixture);

    const vm = buildInstanceInspector(
      pairFixture,
      columns,
      null,
      session.lastEdit,
    );
    // exact equality with the API response, no client-side rescoring
    expect(vm.proba).toBe(wifeFixture.proba);
    expect(vm.proximity).toBe(wifeFixture.proximity);
    expect(vm.changedFeatureCount).toBe(wifeFixture.changed_feature_count);
    expect(vm.proba).toBeGreaterThanOrEqual(0.5);

    const rel = vm.fields.find((f) => f.column === "relationship")!;
    expect(rel.value).toBe("Wife");
    expect(rel.edited).toBe(true);

    const html = renderInstanceInspector(vm);
    expect(html).toContain(
      `<dd data-field="proba">${wifeFixture.proba.toFixed(4)}</dd>`,
    );
    expect(html).toContain(
      `<dd data-field="proximity">${wifeFixture.proximity.toFixed(4)}</dd>`,
    );
  });

  it("surfaces a 422 validity error inline and keeps the last good numbers", async () => {
    session.setOverride("relationship", "Wife");
    await session.submitEdit(api);

    session.setOverride("relationship", "Butler");
    const result = await session.submitEdit(api);
    expect(result).toBeNull();
    expect(session.editError).toEqual({
      code: "validity_error",
      message: expect.stringContaining("Butler"),
    });
    expect(session.lastEdit).toEqual(wifeFixture);

    const vm = buildInstanceInspector(
      pairFixture,
      columns,
      null,
      session.lastEdit,
      session.editError,
    );
    expect(vm.proba).toBe(wifeFixture.proba);
    const html = renderInstanceInspector(vm);
    expect(html).toContain('data-code="validity_error"');
  });
});
