import json
import os

import pytest

from fairdbg import learners, metrics, store, tabular
from fairdbg.store import (
    FormatError, IntegrityError, Project, canonical_json, load, manifest_hash,
    save,
)


@pytest.fixture
def project(adult_ds):
    p = Project.new(adult_ds, project_id="fixture01")
    p.created = 1700000000.0
    split = tabular.split_80_20(adult_ds, 3)
    hp = learners.HyperParams("dtree", {"max_depth": 4, "min_samples_split": 4})
    model = learners.train(split.train, hp, seed=3)
    p.put("model", "m1", learners.model_to_dict(model))
    report = metrics.evaluate(model, split.test, model_id="m1", split_id="3")
    p.put("report", "r1", report.to_dict())
    p.seeds["split"] = 3
    return p


class TestRoundTrip:
    def test_identical_reports_after_reload(self, project, tmp_path):
        save(project, tmp_path / "p")
        loaded = load(tmp_path / "p")
        assert loaded.get("r1") == project.get("r1")
        assert loaded.get("m1") == project.get("m1")
        assert loaded.dataset.to_dict() == project.dataset.to_dict()
        assert loaded.seeds == project.seeds

    def test_loaded_model_predicts_identically(self, project, tmp_path, adult_ds):
        save(project, tmp_path / "p")
        loaded = load(tmp_path / "p")
        m1 = learners.model_from_dict(project.get("m1"))
        m2 = learners.model_from_dict(loaded.get("m1"))
        X = m1.layout.encode_dataset(adult_ds)[:30]
        assert (m1.proba_matrix(X) == m2.proba_matrix(X)).all()

    def test_repeated_saves_byte_identical(self, project, tmp_path):
        save(project, tmp_path / "p")
        first = (tmp_path / "p" / "manifest.json").read_bytes()
        save(project, tmp_path / "p")
        assert (tmp_path / "p" / "manifest.json").read_bytes() == first

    def test_manifest_hash_stable(self, project, tmp_path):
        save(project, tmp_path / "a")
        save(project, tmp_path / "b")
        assert manifest_hash(tmp_path / "a") == manifest_hash(tmp_path / "b")


class TestIntegrity:
    def test_truncated_artifact_detected(self, project, tmp_path):
        save(project, tmp_path / "p")
        models_dir = tmp_path / "p" / "models"
        victim = next(models_dir.iterdir())
        victim.write_text(victim.read_text()[:-20])
        with pytest.raises(IntegrityError, match="m1"):
            load(tmp_path / "p")

    def test_missing_artifact_detected(self, project, tmp_path):
        save(project, tmp_path / "p")
        next((tmp_path / "p" / "reports").iterdir()).unlink()
        with pytest.raises(IntegrityError, match="r1"):
            load(tmp_path / "p")

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(FormatError):
            load(tmp_path)


class TestContentAddressing:
    def test_equal_content_single_copy(self, adult_ds, tmp_path):
        p = Project.new(adult_ds)
        payload = {"v": [1.0, 2.0]}
        p.put("report", "a", payload)
        p.put("report", "b", dict(payload))
        save(p, tmp_path / "p")
        files = list((tmp_path / "p" / "reports").iterdir())
        assert len(files) == 1
        manifest = json.loads((tmp_path / "p" / "manifest.json").read_text())
        paths = {e["id"]: e["path"] for e in manifest["artifacts"]}
        assert paths["a"] == paths["b"]


class TestCanonicalJson:
    def test_sorted_and_compact(self):
        assert canonical_json({"b": 1, "a": 2}) == '{"a":2,"b":1}'

    def test_float_roundtrip_exact(self):
        values = [0.1, 1 / 3, 1e-17, 123456.789012345678]
        out = json.loads(canonical_json(values))
        assert out == values

    def test_nan_rejected(self):
        with pytest.raises(ValueError):
            canonical_json(float("nan"))
