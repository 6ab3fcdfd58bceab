"""Project persistence: one debugging session as a self-contained directory.

Layout:
    <project>/
      manifest.json        canonical JSON (sorted keys), hashes of everything
      data/<hash>.json     dataset (schema + rows + encodings)
      models/<hash>.json   serialized models
      tests/<hash>.jsonl   test suites (one pair per line) + metadata
      explanations/<hash>.json
      reports/<hash>.json  fairness reports, archives, audits

Artifacts are content-addressed (sha256), so identical content is stored
once and every load verifies integrity.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
import uuid
from dataclasses import dataclass, field

from .tabular import Dataset

MANIFEST_VERSION = 1
KIND_DIRS = {
    "dataset": "data",
    "model": "models",
    "test_suite": "tests",
    "explanation": "explanations",
    "report": "reports",
    "archive": "reports",
    "audit": "reports",
}


class IntegrityError(RuntimeError):
    pass


class FormatError(RuntimeError):
    pass


class ProjectLockError(RuntimeError):
    pass


def canonical_json(obj) -> str:
    """Deterministic serialization: sorted keys, no whitespace drift.

    Floats go through Python repr (shortest round-trip form), so equal values
    always serialize identically and reload exactly.
    """
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def content_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass
class Project:
    id: str
    created: float
    dataset: Dataset | None = None
    seeds: dict = field(default_factory=dict)       # stage name -> seed
    artifacts: dict = field(default_factory=dict)   # artifact id -> (kind, payload)

    @staticmethod
    def new(dataset: Dataset | None = None, project_id: str | None = None) -> "Project":
        return Project(project_id or uuid.uuid4().hex[:12], time.time(),
                       dataset=dataset)

    def put(self, kind: str, artifact_id: str, payload) -> str:
        if kind not in KIND_DIRS:
            raise ValueError(f"unknown artifact kind {kind!r}")
        self.artifacts[artifact_id] = (kind, payload)
        return artifact_id

    def get(self, artifact_id: str):
        return self.artifacts[artifact_id][1]

    def ids_of_kind(self, kind: str) -> list[str]:
        return sorted(a for a, (k, _) in self.artifacts.items() if k == kind)


def _artifact_path(kind: str, digest: str) -> str:
    return os.path.join(KIND_DIRS[kind], digest + ".json")


def save(project: Project, directory) -> str:
    """Write the project; returns the manifest hash."""
    os.makedirs(directory, exist_ok=True)
    lock = os.path.join(directory, ".lock")
    if os.path.exists(lock):
        raise ProjectLockError(f"project directory is locked: {lock}")
    with open(lock, "w") as f:
        f.write(str(os.getpid()))
    try:
        index = []
        entries = []
        if project.dataset is not None:
            entries.append(("dataset", "__dataset__", project.dataset.to_dict()))
        for aid in sorted(project.artifacts):
            kind, payload = project.artifacts[aid]
            entries.append((kind, aid, payload))
        for kind, aid, payload in entries:
            text = canonical_json(payload)
            digest = content_hash(text)
            rel = _artifact_path(kind, digest)
            path = os.path.join(directory, rel)
            os.makedirs(os.path.dirname(path), exist_ok=True)
            if not os.path.exists(path):
                with open(path, "w") as f:
                    f.write(text)
            index.append({"kind": kind, "id": aid, "path": rel, "hash": digest})
        manifest = {
            "version": MANIFEST_VERSION,
            "id": project.id,
            "created": project.created,
            "seeds": project.seeds,
            "artifacts": index,
        }
        text = canonical_json(manifest)
        with open(os.path.join(directory, "manifest.json"), "w") as f:
            f.write(text)
        return content_hash(text)
    finally:
        os.remove(lock)


def load(directory) -> Project:
    manifest_path = os.path.join(directory, "manifest.json")
    if not os.path.exists(manifest_path):
        raise FormatError(f"missing manifest: {manifest_path}")
    with open(manifest_path) as f:
        manifest = json.load(f)
    if manifest.get("version") != MANIFEST_VERSION:
        raise FormatError(f"unsupported manifest version {manifest.get('version')!r}")
    project = Project(manifest["id"], manifest["created"], seeds=manifest["seeds"])
    for entry in manifest["artifacts"]:
        path = os.path.join(directory, entry["path"])
        if not os.path.exists(path):
            raise IntegrityError(f"missing artifact {entry['id']!r} at {entry['path']}")
        with open(path) as f:
            text = f.read()
        if content_hash(text) != entry["hash"]:
            raise IntegrityError(f"hash mismatch for artifact {entry['id']!r} "
                                 f"at {entry['path']}")
        payload = json.loads(text)
        if entry["id"] == "__dataset__":
            project.dataset = Dataset.from_dict(payload)
        else:
            project.artifacts[entry["id"]] = (entry["kind"], payload)
    return project


def manifest_hash(directory) -> str:
    with open(os.path.join(directory, "manifest.json")) as f:
        return content_hash(f.read())
