"""Record API fixtures for the UI tests.

Drives the real /v1 service in-process with a seeded proxy dataset and dumps
every request/response exchange into fixtures/exchanges.json. The UI tests
replay these through a mock transport, so they never touch a live server.

Run from the frontend/ directory:

    python3 scripts/record_fixtures.py
"""

import io
import json
import os
import random
import sys
import time

from fastapi.testclient import TestClient

from fairdbg.service import create_app

OUT = os.path.join(os.path.dirname(__file__), "..", "fixtures",
                   "exchanges.json")

RULES = {
    "rules": [
        {"trigger": {"from": "Male", "to": "Female"},
         "adjustments": [{"column": "relationship", "from": "Husband",
                          "to": "Wife"}]},
        {"trigger": {"from": "Female", "to": "Male"},
         "adjustments": [{"column": "relationship", "from": "Wife",
                          "to": "Husband"}]},
    ]
}


def proxy_csv(n=800, seed=0):
    """Rows where relationship deterministically proxies sex and a trained
    tree reads sex above the proxy (see tests/test_acceptance.py)."""
    rng = random.Random(seed)
    lines = ["sex,age,workclass,relationship,hours_per_week,income",
             "Female,35,Private,Wife,40,>50K",
             "Male,40,Private,Husband,50,>50K",
             "Female,30,Private,Single,38,<=50K",
             "Male,28,Private,Single,45,>50K"]
    while len(lines) < n + 1:
        sex = rng.choice(["Male", "Female"])
        if sex == "Male":
            rel = "Husband" if rng.random() < 0.2 else "Single"
            label = ">50K"
        else:
            rel = "Wife" if rng.random() < 0.5 else "Single"
            label = ">50K" if rel == "Wife" else "<=50K"
        lines.append(f"{sex},{rng.randint(18, 80)},"
                     f"{rng.choice(['Private', 'Gov', 'Self'])},{rel},"
                     f"{rng.randint(10, 80)},{label}")
    return "\n".join(lines) + "\n"


class Recorder:
    def __init__(self, client):
        self.client = client
        self.exchanges = []

    def record(self, name, method, path, body=None, expect=200, **kwargs):
        resp = getattr(self.client, method.lower())(path, **kwargs)
        assert resp.status_code == expect, (path, resp.status_code, resp.text)
        self.exchanges.append({
            "name": name,
            "method": method,
            "path": path,
            "body": body,
            "status": resp.status_code,
            "response": resp.json(),
        })
        return resp.json()

    def get(self, name, path, expect=200):
        return self.record(name, "GET", path, expect=expect)

    def post(self, name, path, body, expect=200):
        return self.record(name, "POST", path, body=body, expect=expect,
                           json=body)

    def put(self, name, path, body, expect=200):
        return self.record(name, "PUT", path, body=body, expect=expect,
                           json=body)


def wait_job(rec, name, job_id):
    for _ in range(600):
        job = rec.client.get(f"/v1/jobs/{job_id}").json()
        if job["status"] in ("done", "failed"):
            assert job["status"] == "done", job
            rec.exchanges.append({
                "name": name, "method": "GET", "path": f"/v1/jobs/{job_id}",
                "body": None, "status": 200, "response": job,
            })
            return job
        time.sleep(0.05)
    raise TimeoutError(job_id)


def main():
    client = TestClient(create_app())
    rec = Recorder(client)

    csv = proxy_csv()
    resp = client.post(
        "/v1/projects",
        files={"file": ("proxy.csv", io.BytesIO(csv.encode()), "text/csv")},
        data={"label": "income", "positive_label": ">50K"},
    )
    assert resp.status_code == 201, resp.text
    pid = resp.json()["project_id"]
    # normalize the random project id so replay is stable
    base = "/v1/projects/demo"
    rec.exchanges.append({
        "name": "create_project", "method": "POST", "path": "/v1/projects",
        "body": None, "status": 201,
        "response": {**resp.json(), "project_id": "demo"},
    })

    def renamed(path):
        return path.replace(f"/v1/projects/{pid}", base)

    real = f"/v1/projects/{pid}"
    out = rec.put("set_protected", f"{real}/protected",
                  {"column": "sex", "groups": ["Male", "Female"]})

    rec.get("interactions", f"{real}/interactions")
    rec.get("histogram_relationship", f"{real}/interactions/relationship")
    rec.get("unknown_project", "/v1/projects/nope", expect=404)

    job = rec.post("start_search", f"{real}/search", {
        "algorithm": "dtree", "objective": "EOD", "evaluation_budget": 24,
        "population_size": 8, "seed": 9,
    }, expect=202)
    done = wait_job(rec, "search_job_done", job["job_id"])
    search_id = done["result"]["search_id"]
    archive = rec.get("archive", f"{real}/archives/{search_id}")
    # pick the most accurate Pareto member: with the proxy construction it
    # reads sex above relationship, which the edit-loop fixture relies on
    best = max((p for p in archive["points"] if p["is_pareto"]),
               key=lambda p: p["accuracy"])
    mid = best["model_id"]
    rec.get("model_logic", f"{real}/models/{mid}/logic")
    rec.get("model_report", f"{real}/models/{mid}/report")

    job = rec.post("start_tests", f"{real}/models/{mid}/tests",
                   {"n": 400, "seed": 25}, expect=202)
    done = wait_job(rec, "tests_job_done", job["job_id"])
    sid = done["result"]["suite_id"]
    listing = rec.get("suite", f"{real}/tests/{sid}")
    rec.get("suite_id_only", f"{real}/tests/{sid}?filter=id")

    # the canonical false-positive story: a favored Husband original whose
    # raw flip changes the outcome, restored by the Wife adjustment
    pair = next(p for p in listing["pairs"]
                if p["is_id"] and p["original"][0] == "Male"
                and p["original"][3] == "Husband"
                and p["proba_original"] >= 0.5)
    rec.get("pair", f"{real}/tests/{sid}/pairs/{pair['id']}")
    auto = rec.post("edit_auto", f"{real}/tests/{sid}/pairs/{pair['id']}/edit",
                    {"overrides": {}})
    adjusted = rec.post("edit_wife",
                        f"{real}/tests/{sid}/pairs/{pair['id']}/edit",
                        {"overrides": {"relationship": "Wife"}})
    assert auto["proba"] < 0.5 <= adjusted["proba"], \
        "fixture must show the adjustment flipping the outcome back"
    rec.post("edit_invalid", f"{real}/tests/{sid}/pairs/{pair['id']}/edit",
             {"overrides": {"relationship": "Butler"}}, expect=422)

    job = rec.post("start_audit", f"{real}/tests/{sid}/audit", RULES,
                   expect=202)
    wait_job(rec, "audit_job_done", job["job_id"])

    rec.post("explain_pair", f"{real}/models/{mid}/explain",
             {"test_id": pair["id"], "suite_id": sid, "seed": 7,
              "n_samples": 400, "top_k": 4})

    for e in rec.exchanges:
        e["path"] = renamed(e["path"])
    os.makedirs(os.path.dirname(OUT), exist_ok=True)
    with open(OUT, "w") as f:
        json.dump({"base": base, "exchanges": rec.exchanges}, f, indent=1,
                  sort_keys=True)
    print(f"wrote {len(rec.exchanges)} exchanges to {OUT}")


if __name__ == "__main__":
    sys.exit(main())
