// Thin typed client for the /v1 API. All network traffic goes through an
// injectable Transport so tests can replay recorded exchanges offline.

import type {
  Archive,
  ColumnInteraction,
  CounterfactualEdit,
  Explanation,
  FairnessReport,
  InteractionReport,
  Job,
  ModelLogic,
  ProjectSummary,
  Schema,
  SuiteListing,
  TestPair,
  CellValue,
} from "./types.js";

export interface TransportRequest {
  method: "GET" | "POST" | "PUT";
  path: string;
  body?: unknown;
  headers?: Record<string, string>;
}

export interface TransportResponse {
  status: number;
  json: unknown;
}

export interface Transport {
  send(req: TransportRequest): Promise<TransportResponse>;
}

/** Error carrying the server's structured 4xx detail. */
export class ApiError extends Error {
  readonly status: number;
  readonly code: string;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.code = code;
  }
}

function raiseFor(status: number, body: unknown): never {
  let code = "unknown";
  let message = `request failed with status ${status}`;
  if (body && typeof body === "object" && "detail" in body) {
    const detail = (body as { detail: unknown }).detail;
    if (typeof detail === "string") {
      message = detail;
      code = status === 404 ? "not_found" : "unknown";
    } else if (detail && typeof detail === "object") {
      const d = detail as { code?: string; message?: string };
      code = d.code ?? code;
      message = d.message ?? message;
    }
  }
  throw new ApiError(status, code, message);
}

/** Default transport for a live server. */
export class FetchTransport implements Transport {
  constructor(private readonly baseUrl: string) {}

  async send(req: TransportRequest): Promise<TransportResponse> {
    const resp = await fetch(this.baseUrl + req.path, {
      method: req.method,
      headers: {
        ...(req.body !== undefined
          ? { "Content-Type": "application/json" }
          : {}),
        ...req.headers,
      },
      body: req.body !== undefined ? JSON.stringify(req.body) : undefined,
    });
    return { status: resp.status, json: await resp.json() };
  }
}

export interface SearchRequest {
  algorithm: "logreg" | "linsvm" | "dtree" | "rforest";
  objective: "EOD" | "AOD";
  evaluation_budget: number;
  population_size: number;
  accuracy_band?: number;
  seed: number;
  split_seed?: number;
}

export interface ExplainRequest {
  test_id?: string;
  suite_id?: string;
  instance?: CellValue[];
  top_k?: number;
  n_samples?: number;
  seed: number;
  with_story?: boolean;
}

export interface RuleFile {
  rules: {
    trigger: { from: string; to: string };
    adjustments: { column: string; from: string; to: string }[];
  }[];
}

/** Client scoped to a single project once `project` is set. */
export class ApiClient {
  constructor(private readonly transport: Transport) {}

  private async call<T>(req: TransportRequest, expect = 200): Promise<T> {
    const resp = await this.transport.send(req);
    if (resp.status !== expect) raiseFor(resp.status, resp.json);
    return resp.json as T;
  }

  getProject(pid: string): Promise<ProjectSummary> {
    return this.call({ method: "GET", path: `/v1/projects/${pid}` });
  }

  setProtected(
    pid: string,
    column: string,
    groups: string[],
  ): Promise<{ schema: Schema }> {
    return this.call({
      method: "PUT",
      path: `/v1/projects/${pid}/protected`,
      body: { column, groups },
    });
  }

  getInteractions(pid: string): Promise<InteractionReport> {
    return this.call({
      method: "GET",
      path: `/v1/projects/${pid}/interactions`,
    });
  }

  getHistogram(pid: string, column: string): Promise<ColumnInteraction> {
    return this.call({
      method: "GET",
      path: `/v1/projects/${pid}/interactions/${column}`,
    });
  }

  startSearch(
    pid: string,
    req: SearchRequest,
    idempotencyKey?: string,
  ): Promise<{ job_id: string }> {
    return this.call(
      {
        method: "POST",
        path: `/v1/projects/${pid}/search`,
        body: req,
        headers: idempotencyKey
          ? { "Idempotency-Key": idempotencyKey }
          : undefined,
      },
      202,
    );
  }

  getJob(jobId: string): Promise<Job> {
    return this.call({ method: "GET", path: `/v1/jobs/${jobId}` });
  }

  getArchive(pid: string, searchId: string): Promise<Archive> {
    return this.call({
      method: "GET",
      path: `/v1/projects/${pid}/archives/${searchId}`,
    });
  }

  getModelLogic(pid: string, modelId: string): Promise<ModelLogic> {
    return this.call({
      method: "GET",
      path: `/v1/projects/${pid}/models/${modelId}/logic`,
    });
  }

  getModelReport(pid: string, modelId: string): Promise<FairnessReport> {
    return this.call({
      method: "GET",
      path: `/v1/projects/${pid}/models/${modelId}/report`,
    });
  }

  startTests(
    pid: string,
    modelId: string,
    n: number,
    seed: number,
  ): Promise<{ job_id: string }> {
    return this.call(
      {
        method: "POST",
        path: `/v1/projects/${pid}/models/${modelId}/tests`,
        body: { n, seed },
      },
      202,
    );
  }

  getSuite(
    pid: string,
    suiteId: string,
    filter?: string,
  ): Promise<SuiteListing> {
    const query = filter ? `?filter=${encodeURIComponent(filter)}` : "";
    return this.call({
      method: "GET",
      path: `/v1/projects/${pid}/tests/${suiteId}${query}`,
    });
  }

  getPair(pid: string, suiteId: string, pairId: string): Promise<TestPair> {
    return this.call({
      method: "GET",
      path: `/v1/projects/${pid}/tests/${suiteId}/pairs/${pairId}`,
    });
  }

  editPair(
    pid: string,
    suiteId: string,
    pairId: string,
    overrides: Record<string, CellValue>,
  ): Promise<CounterfactualEdit> {
    return this.call({
      method: "POST",
      path: `/v1/projects/${pid}/tests/${suiteId}/pairs/${pairId}/edit`,
      body: { overrides },
    });
  }

  startAudit(
    pid: string,
    suiteId: string,
    rules: RuleFile,
  ): Promise<{ job_id: string }> {
    return this.call(
      {
        method: "POST",
        path: `/v1/projects/${pid}/tests/${suiteId}/audit`,
        body: rules,
      },
      202,
    );
  }

  explain(
    pid: string,
    modelId: string,
    req: ExplainRequest,
  ): Promise<Explanation> {
    return this.call({
      method: "POST",
      path: `/v1/projects/${pid}/models/${modelId}/explain`,
      body: req,
    });
  }
}
