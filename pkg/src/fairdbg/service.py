"""HTTP/JSON API over the whole pipeline (versioned under /v1).

Long-running work (search, test generation, audits) runs as background jobs
with polling; everything else is synchronous. Endpoint schemas are documented
in docs/api.md and mirrored by the web UI's typed client.
"""

from __future__ import annotations

import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from fastapi import FastAPI, Form, Header, HTTPException, UploadFile
from fastapi.responses import JSONResponse

from . import counterfactual as cf
from . import explain as ex
from . import learners, metrics, search as se, tabular

MAX_CSV_BYTES = 64 * 1024 * 1024
MAX_TEST_PAIRS = 100_000


def _error(status: int, code: str, message: str) -> HTTPException:
    return HTTPException(status_code=status,
                         detail={"code": code, "message": message})


@dataclass
class Job:
    id: str
    kind: str                    # search | generate | audit
    status: str = "queued"       # queued | running | done | failed
    progress: float = 0.0
    result: dict | None = None
    error: str | None = None

    def to_dict(self) -> dict:
        return {"id": self.id, "kind": self.kind, "status": self.status,
                "progress": self.progress, "result": self.result,
                "error": self.error}


class JobRegistry:
    def __init__(self, workers: int = 2):
        self._pool = ThreadPoolExecutor(max_workers=workers)
        self._jobs: dict[str, Job] = {}
        self._idempotent: dict[tuple, str] = {}
        self._lock = threading.Lock()

    def submit(self, kind: str, fn, idempotency_key: tuple | None = None) -> Job:
        with self._lock:
            if idempotency_key and idempotency_key in self._idempotent:
                return self._jobs[self._idempotent[idempotency_key]]
            job = Job(uuid.uuid4().hex[:12], kind)
            self._jobs[job.id] = job
            if idempotency_key:
                self._idempotent[idempotency_key] = job.id

        def run():
            job.status = "running"
            try:
                job.result = fn(job)
                job.progress = 1.0
                job.status = "done"
            except Exception as e:  # surfaced to the poller
                job.error = str(e)
                job.status = "failed"

        self._pool.submit(run)
        return job

    def get(self, job_id: str) -> Job:
        job = self._jobs.get(job_id)
        if job is None:
            raise _error(404, "job_not_found", f"no job {job_id!r}")
        return job


@dataclass
class ProjectState:
    id: str
    dataset: tabular.Dataset
    splits: dict = field(default_factory=dict)    # seed -> SplitPair
    searches: dict = field(default_factory=dict)  # search id -> SearchResult
    models: dict = field(default_factory=dict)    # model id -> TrainedModel
    suites: dict = field(default_factory=dict)    # suite id -> suite dict
    lock: threading.Lock = field(default_factory=threading.Lock)

    def split_for(self, seed: int) -> tabular.SplitPair:
        with self.lock:
            if seed not in self.splits:
                self.splits[seed] = tabular.split_80_20(self.dataset, seed)
            return self.splits[seed]


def create_app() -> FastAPI:
    app = FastAPI(title="fairdbg", version="1")
    projects: dict[str, ProjectState] = {}
    jobs = JobRegistry()

    def project(pid: str) -> ProjectState:
        p = projects.get(pid)
        if p is None:
            raise _error(404, "project_not_found", f"no project {pid!r}")
        return p

    def model_of(p: ProjectState, mid: str):
        m = p.models.get(mid)
        if m is None:
            raise _error(404, "model_not_found", f"no model {mid!r}")
        return m

    def suite_of(p: ProjectState, sid: str) -> dict:
        s = p.suites.get(sid)
        if s is None:
            raise _error(404, "suite_not_found", f"no test suite {sid!r}")
        return s

    @app.exception_handler(tabular.SchemaError)
    @app.exception_handler(tabular.UsageError)
    @app.exception_handler(tabular.ParseError)
    @app.exception_handler(tabular.SizeError)
    @app.exception_handler(cf.ConfigError)
    @app.exception_handler(cf.ValidityError)
    @app.exception_handler(learners.HyperParamError)
    async def _domain_error(request, exc):
        codes = {
            tabular.SchemaError: "schema_error",
            tabular.UsageError: "usage_error",
            tabular.ParseError: "parse_error",
            tabular.SizeError: "size_error",
            cf.ConfigError: "config_error",
            cf.ValidityError: "validity_error",
            learners.HyperParamError: "hyperparam_error",
        }
        return JSONResponse(status_code=422, content={
            "detail": {"code": codes[type(exc)], "message": str(exc)}
        })

    @app.post("/v1/projects", status_code=201)
    async def create_project(file: UploadFile, label: str = Form(...),
                             positive_label: str = Form(...)):
        raw = await file.read()
        if len(raw) > MAX_CSV_BYTES:
            raise _error(413, "payload_too_large", "CSV exceeds 64 MB")
        ds = tabular.ingest_csv(raw, label, positive_label)
        pid = uuid.uuid4().hex[:12]
        projects[pid] = ProjectState(pid, ds)
        return {"project_id": pid, "rows": len(ds), "schema": ds.schema.to_dict()}

    @app.get("/v1/projects/{pid}")
    async def get_project(pid: str):
        p = project(pid)
        return {"project_id": p.id, "rows": len(p.dataset),
                "schema": p.dataset.schema.to_dict(),
                "models": sorted(p.models), "suites": sorted(p.suites),
                "searches": sorted(p.searches)}

    @app.put("/v1/projects/{pid}/protected")
    async def set_protected(pid: str, body: dict):
        p = project(pid)
        with p.lock:
            p.dataset = tabular.set_protected(p.dataset, body["column"],
                                              body["groups"])
            p.splits.clear()
        return {"schema": p.dataset.schema.to_dict()}

    @app.get("/v1/projects/{pid}/interactions")
    async def get_interactions(pid: str):
        return tabular.interactions(project(pid).dataset)

    @app.get("/v1/projects/{pid}/interactions/{column}")
    async def get_histogram(pid: str, column: str):
        report = tabular.interactions(project(pid).dataset)
        for entry in report["columns"]:
            if entry["column"] == column:
                return entry
        raise _error(404, "column_not_found", f"no column {column!r}")

    @app.post("/v1/projects/{pid}/mask")
    async def mask_column(pid: str, body: dict):
        p = project(pid)
        with p.lock:
            p.dataset = tabular.mask(p.dataset, body["column"], body.get("values"))
            p.splits.clear()
        return {"schema": p.dataset.schema.to_dict()}

    @app.post("/v1/projects/{pid}/search", status_code=202)
    async def start_search(pid: str, body: dict,
                           idempotency_key: str | None = Header(default=None)):
        p = project(pid)
        split_seed = int(body.pop("split_seed", body.get("seed", 0)))
        try:
            cfg = se.SearchConfig(**body)
        except (TypeError, ValueError) as e:
            raise _error(422, "invalid_config", str(e))
        if p.dataset.schema.protected_column is None:
            raise _error(422, "schema_error", "protected attribute not set")
        split = p.split_for(split_seed)

        def run(job: Job):
            def progress(done, total):
                job.progress = done / total
            result = se.search(split, cfg, progress=progress)
            with p.lock:
                p.searches[job.id] = result
                for cid, model in result.models.items():
                    p.models[cid] = model
            return {"search_id": job.id,
                    "archive_size": len(result.archive.members),
                    "evaluated": len(result.evaluated)}

        key = (pid, "search", idempotency_key) if idempotency_key else None
        job = jobs.submit("search", run, key)
        return {"job_id": job.id}

    @app.get("/v1/jobs/{job_id}")
    async def get_job(job_id: str):
        return jobs.get(job_id).to_dict()

    @app.get("/v1/projects/{pid}/archives/{search_id}")
    async def get_archive(pid: str, search_id: str):
        p = project(pid)
        result = p.searches.get(search_id)
        if result is None:
            raise _error(404, "search_not_found", f"no search {search_id!r}")
        return {
            "search_id": search_id,
            "config": result.config.to_dict(),
            "best_accuracy": result.archive.best_accuracy,
            "points": se.archive_to_scatter(result.archive, result.evaluated),
        }

    @app.get("/v1/projects/{pid}/models/{mid}/logic")
    async def get_model_logic(pid: str, mid: str):
        p = project(pid)
        return learners.extract_logic(model_of(p, mid))

    @app.get("/v1/projects/{pid}/models/{mid}/report")
    async def get_model_report(pid: str, mid: str, split_seed: int = 0):
        p = project(pid)
        model = model_of(p, mid)
        split = p.split_for(split_seed)
        return metrics.evaluate(model, split.test, model_id=mid,
                                split_id=str(split_seed)).to_dict()

    @app.post("/v1/projects/{pid}/models/{mid}/tests", status_code=202)
    async def generate_tests(pid: str, mid: str, body: dict,
                             idempotency_key: str | None = Header(default=None)):
        p = project(pid)
        model = model_of(p, mid)
        n = int(body.get("n", 0))
        if not (1 <= n <= MAX_TEST_PAIRS):
            raise _error(422, "invalid_n", f"n must be in [1, {MAX_TEST_PAIRS}]")
        if "seed" not in body:
            raise _error(422, "missing_seed", "test generation requires a seed")
        seed = int(body["seed"])

        def run(job: Job):
            pairs = cf.generate(model, p.dataset, n, seed)
            suite = {"model_id": mid, "n": n, "seed": seed,
                     "pairs": [q.to_dict() for q in pairs]}
            with p.lock:
                p.suites[job.id] = suite
            return {"suite_id": job.id, "n": n}

        key = (pid, mid, "tests", idempotency_key) if idempotency_key else None
        job = jobs.submit("generate", run, key)
        return {"job_id": job.id}

    @app.get("/v1/projects/{pid}/tests/{sid}")
    async def list_tests(pid: str, sid: str, filter: str | None = None):
        p = project(pid)
        suite = suite_of(p, sid)
        pairs = [cf.TestPair.from_dict(d) for d in suite["pairs"]]
        if filter:
            pairs = cf.filter_pairs(pairs, filter,
                                    p.dataset.schema.positive_label)
        counts = {c: 0 for c in cf.CATEGORIES}
        for d in suite["pairs"]:
            counts[d["category"]] += 1
        return {"suite_id": sid, "model_id": suite["model_id"],
                "total": len(suite["pairs"]), "category_counts": counts,
                "pairs": [q.to_dict() for q in pairs]}

    @app.get("/v1/projects/{pid}/tests/{sid}/pairs/{pair_id}")
    async def get_test(pid: str, sid: str, pair_id: str):
        suite = suite_of(project(pid), sid)
        for d in suite["pairs"]:
            if d["id"] == pair_id:
                return d
        raise _error(404, "pair_not_found", f"no test pair {pair_id!r}")

    @app.post("/v1/projects/{pid}/tests/{sid}/pairs/{pair_id}/edit")
    async def post_edit(pid: str, sid: str, pair_id: str, body: dict):
        p = project(pid)
        suite = suite_of(p, sid)
        model = model_of(p, suite["model_id"])
        pair = None
        for d in suite["pairs"]:
            if d["id"] == pair_id:
                pair = cf.TestPair.from_dict(d)
        if pair is None:
            raise _error(404, "pair_not_found", f"no test pair {pair_id!r}")
        edit = cf.edit_counterfactual(pair, body.get("overrides", {}), model,
                                      p.dataset.schema)
        return edit.to_dict()

    @app.post("/v1/projects/{pid}/tests/{sid}/audit", status_code=202)
    async def post_audit(pid: str, sid: str, body: dict,
                         idempotency_key: str | None = Header(default=None)):
        p = project(pid)
        suite = suite_of(p, sid)
        model = model_of(p, suite["model_id"])
        rules = [cf.ProxyRule.from_dict(r) for r in body.get("rules", [])]
        cf.validate_rules(rules, p.dataset.schema)
        pairs = [cf.TestPair.from_dict(d) for d in suite["pairs"]]

        def run(job: Job):
            verdicts, summary = cf.audit(pairs, rules, model, p.dataset.schema)
            return {"suite_id": sid, "summary": summary,
                    "verdicts": [v.to_dict() for v in verdicts]}

        key = (pid, sid, "audit", idempotency_key) if idempotency_key else None
        job = jobs.submit("audit", run, key)
        return {"job_id": job.id}

    @app.post("/v1/projects/{pid}/models/{mid}/explain")
    async def post_explain(pid: str, mid: str, body: dict):
        p = project(pid)
        model = model_of(p, mid)
        if "seed" not in body:
            raise _error(422, "missing_seed", "explanation requires a seed")
        instance = None
        instance_id = None
        if "test_id" in body:
            sid = body.get("suite_id")
            sids = [sid] if sid else sorted(p.suites)
            for s in sids:
                for d in p.suites.get(s, {}).get("pairs", []):
                    if d["id"] == body["test_id"]:
                        which = body.get("side", "original")
                        instance = tuple(d[which if which in
                                           ("original", "counterfactual")
                                           else "original"])
                        instance_id = d["id"]
            if instance is None:
                raise _error(404, "pair_not_found",
                             f"no test pair {body['test_id']!r}")
        elif "instance" in body:
            instance = tuple(body["instance"])
        else:
            raise _error(422, "missing_instance",
                         "provide either test_id or instance")
        split = p.split_for(int(body.get("split_seed", 0)))
        explanation = ex.explain(
            model, instance, split.train,
            top_k=int(body.get("top_k", ex.DEFAULT_TOP_K)),
            n_samples=int(body.get("n_samples", ex.DEFAULT_N_SAMPLES)),
            seed=int(body["seed"]), instance_id=instance_id,
        )
        result = explanation.to_dict()
        if body.get("with_story"):
            report = tabular.interactions(p.dataset)
            result["story"] = ex.explanation_story(explanation, report)
        return result

    return app


app = create_app()
