"""The four native binary classifiers: training, prediction, logic export."""

from __future__ import annotations

import numpy as np

from ..tabular import Dataset
from .layout import FeatureLayout, LayoutError
from .linear import LinearModel, TrainingError, grad_check, train_linsvm, train_logreg
from .spaces import ALGORITHMS, SPACES, HyperParamError, HyperParams, sample_hyperparams
from .trees import ForestModel, TreeModel, train_dtree, train_rforest

MODEL_FORMAT_VERSION = 1

__all__ = [
    "ALGORITHMS", "SPACES", "HyperParams", "HyperParamError", "sample_hyperparams",
    "FeatureLayout", "LayoutError", "LinearModel", "TreeModel", "ForestModel",
    "TrainingError", "train", "predict_proba", "predict", "proba_matrix",
    "extract_logic", "grad_check", "model_to_dict", "model_from_dict",
]

_TRAINERS = {
    "logreg": train_logreg,
    "linsvm": train_linsvm,
    "dtree": train_dtree,
    "rforest": train_rforest,
}


def train(train_set: Dataset, hp: HyperParams, seed: int):
    """Fit a model; deterministic under (train_set, hp, seed)."""
    if len(train_set) == 0:
        raise TrainingError("empty training set")
    layout = FeatureLayout.from_schema(train_set.schema)
    X = layout.encode_dataset(train_set)
    y = train_set.labels()
    return _TRAINERS[hp.algorithm](X, y, layout, hp, seed)


def proba_matrix(model, X: np.ndarray) -> np.ndarray:
    return model.proba_matrix(X)


def predict_proba(model, instance) -> float:
    """Positive-class probability for one schema-ordered row."""
    x = model.layout.encode_row(instance)
    return float(model.proba_matrix(x[None, :])[0])


def predict(model, instance) -> bool:
    """Ties at 0.5 classify positive."""
    return predict_proba(model, instance) >= 0.5


def dataset_probas(model, ds: Dataset) -> np.ndarray:
    return model.proba_matrix(model.layout.encode_dataset(ds))


def extract_logic(model) -> dict:
    """Serializable description of the fitted decision logic."""
    names = model.layout.feature_names
    if isinstance(model, LinearModel):
        w = np.asarray(model.w)
        m = np.max(np.abs(w))
        normalized = w / m if m > 0 else w
        return {
            "type": "linear",
            "algorithm": model.algorithm,
            "features": names,
            "weights": [float(v) for v in normalized],
            "bias": float(model.b),
            "note": "weights are normalized to max |w| = 1 in standardized feature space",
        }
    if isinstance(model, TreeModel):
        return {"type": "tree", "algorithm": "dtree", "features": names,
                "root": model.root}
    if isinstance(model, ForestModel):
        return {"type": "forest", "algorithm": "rforest", "features": names,
                "trees": list(model.roots)}
    raise TypeError(f"cannot extract logic from {type(model).__name__}")


def model_to_dict(model) -> dict:
    d = {
        "format_version": MODEL_FORMAT_VERSION,
        "algorithm": model.algorithm,
        "layout": model.layout.to_dict(),
        "hyperparams": model.hp.to_dict(),
        "seed": model.seed,
    }
    if isinstance(model, LinearModel):
        d["weights"] = [float(v) for v in model.w]
        d["bias"] = float(model.b)
        d["mean"] = [float(v) for v in model.mean]
        d["std"] = [float(v) for v in model.std]
    elif isinstance(model, TreeModel):
        d["root"] = model.root
    elif isinstance(model, ForestModel):
        d["trees"] = list(model.roots)
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    return d


def model_from_dict(d: dict):
    if d.get("format_version") != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model format: {d.get('format_version')!r}")
    layout = FeatureLayout.from_dict(d["layout"])
    hp = HyperParams.from_dict(d["hyperparams"])
    algo = d["algorithm"]
    if algo in ("logreg", "linsvm"):
        return LinearModel(algo, layout, np.array(d["weights"]), d["bias"],
                           np.array(d["mean"]), np.array(d["std"]), hp, d["seed"])
    if algo == "dtree":
        return TreeModel(algo, layout, d["root"], hp, d["seed"])
    if algo == "rforest":
        return ForestModel(algo, layout, tuple(d["trees"]), hp, d["seed"])
    raise ValueError(f"unknown algorithm {algo!r}")
