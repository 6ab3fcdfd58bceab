"""CART decision trees (Gini impurity) and bagged random forests.

Trees consume the one-hot design matrix, so a categorical split is always
"is value v" (threshold 0.5 on a one-hot slot) and numeric splits are
midpoint thresholds found by the Gini scan kernel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _kernels as K
from .layout import FeatureLayout
from .linear import TrainingError, _check_two_classes
from .spaces import HyperParams

MIN_GAIN = 1e-12


def _leaf(y: np.ndarray) -> dict:
    return {"leaf": True, "n": int(len(y)), "pos": int(y.sum())}


def _build_tree(X, y, depth, max_depth, min_samples_split, feature_pick=None) -> dict:
    n = len(y)
    pos = y.sum()
    if depth >= max_depth or n < min_samples_split or pos == 0 or pos == n:
        return _leaf(y)
    features = range(X.shape[1]) if feature_pick is None else feature_pick(X.shape[1])
    # zero-gain splits are allowed on impure nodes (the greedy XOR case);
    # gain < 0 means the feature is constant within the node
    best_gain = -MIN_GAIN
    best = None
    for f in features:
        threshold, gain = K.gini_split_scan(np.ascontiguousarray(X[:, f]), y)
        if gain > best_gain:
            best_gain = gain
            best = (f, threshold)
    if best is None:
        return _leaf(y)
    f, threshold = best
    left = X[:, f] <= threshold
    return {
        "leaf": False,
        "n": int(n),
        "pos": int(pos),
        "feature": int(f),
        "threshold": float(threshold),
        "left": _build_tree(X[left], y[left], depth + 1, max_depth,
                            min_samples_split, feature_pick),
        "right": _build_tree(X[~left], y[~left], depth + 1, max_depth,
                             min_samples_split, feature_pick),
    }


def tree_proba_row(node: dict, x: np.ndarray) -> float:
    while not node["leaf"]:
        node = node["left"] if x[node["feature"]] <= node["threshold"] else node["right"]
    return node["pos"] / node["n"] if node["n"] else 0.5


@dataclass(frozen=True)
class TreeModel:
    algorithm: str          # "dtree"
    layout: FeatureLayout
    root: dict
    hp: HyperParams
    seed: int

    def proba_matrix(self, X: np.ndarray) -> np.ndarray:
        return np.array([tree_proba_row(self.root, x) for x in X])


@dataclass(frozen=True)
class ForestModel:
    algorithm: str          # "rforest"
    layout: FeatureLayout
    roots: tuple
    hp: HyperParams
    seed: int

    def proba_matrix(self, X: np.ndarray) -> np.ndarray:
        per_tree = np.stack([
            np.array([tree_proba_row(r, x) for x in X]) for r in self.roots
        ])
        return per_tree.mean(axis=0)


def train_dtree(X, y, layout: FeatureLayout, hp: HyperParams, seed: int) -> TreeModel:
    _check_two_classes(y)
    root = _build_tree(X, y, 0, hp.params["max_depth"],
                       hp.params["min_samples_split"])
    return TreeModel("dtree", layout, root, hp, seed)


def train_rforest(X, y, layout: FeatureLayout, hp: HyperParams, seed: int) -> ForestModel:
    _check_two_classes(y)
    n, d = X.shape
    n_sub = max(1, int(round(hp.params["feature_frac"] * d)))
    roots = []
    seeds = np.random.SeedSequence(seed).spawn(hp.params["n_trees"])
    for ss in seeds:
        rng = np.random.default_rng(ss)
        boot = rng.integers(0, n, size=n)
        Xb, yb = X[boot], y[boot]
        if yb.sum() in (0, len(yb)):
            # degenerate bootstrap: fall back to the full sample
            Xb, yb = X, y

        def pick(total, rng=rng):
            return sorted(rng.choice(total, size=min(n_sub, total), replace=False))

        roots.append(_build_tree(Xb, yb, 0, hp.params["max_depth"], 2, pick))
    return ForestModel("rforest", layout, tuple(roots), hp, seed)
