"""Logistic regression and linear SVM trained by (sub)gradient descent."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _kernels as K
from .layout import FeatureLayout
from .spaces import HyperParams


class TrainingError(RuntimeError):
    pass


@dataclass(frozen=True)
class LinearModel:
    algorithm: str          # "logreg" | "linsvm"
    layout: FeatureLayout
    w: np.ndarray
    b: float
    mean: np.ndarray        # per-slot standardization (identity on one-hot slots)
    std: np.ndarray
    hp: HyperParams
    seed: int

    def score_matrix(self, X: np.ndarray) -> np.ndarray:
        return ((X - self.mean) / self.std) @ self.w + self.b

    def proba_matrix(self, X: np.ndarray) -> np.ndarray:
        return K.sigmoid(self.score_matrix(X))


def standardization(X: np.ndarray, numeric_mask: np.ndarray):
    """Mean/std per slot; only numeric slots are actually standardized."""
    mean = np.zeros(X.shape[1])
    std = np.ones(X.shape[1])
    if numeric_mask.any():
        mean[numeric_mask] = X[:, numeric_mask].mean(axis=0)
        s = X[:, numeric_mask].std(axis=0)
        s[s == 0] = 1.0
        std[numeric_mask] = s
    return mean, std


def _check_two_classes(y: np.ndarray):
    if len(np.unique(y)) < 2:
        raise TrainingError("training set contains a single label class")


def train_logreg(X, y, layout: FeatureLayout, hp: HyperParams, seed: int) -> LinearModel:
    _check_two_classes(y)
    mean, std = standardization(X, layout.numeric_slots())
    Xs = (X - mean) / std
    lr = hp.params["lr"]
    l2 = hp.params["l2"]
    w = np.zeros(X.shape[1])
    b = 0.0
    for _ in range(hp.params["epochs"]):
        gw, gb = K.logreg_grad(Xs, y, w, b, l2)
        w = w - lr * gw
        b = b - lr * gb
    if not (np.all(np.isfinite(w)) and np.isfinite(b)):
        raise TrainingError("logreg diverged: non-finite weights (param 'lr')")
    return LinearModel("logreg", layout, w, float(b), mean, std, hp, seed)


def train_linsvm(X, y, layout: FeatureLayout, hp: HyperParams, seed: int) -> LinearModel:
    _check_two_classes(y)
    mean, std = standardization(X, layout.numeric_slots())
    Xs = (X - mean) / std
    ypm = np.where(y > 0.5, 1.0, -1.0)
    lam = 1.0 / hp.params["C"]
    w = np.zeros(X.shape[1])
    b = 0.0
    for t in range(hp.params["epochs"]):
        gw, gb = K.linsvm_grad(Xs, ypm, w, b, lam)
        lr = 0.5 / np.sqrt(t + 1.0)
        w = w - lr * gw
        b = b - lr * gb
    if not (np.all(np.isfinite(w)) and np.isfinite(b)):
        raise TrainingError("linsvm diverged: non-finite weights (param 'C')")
    return LinearModel("linsvm", layout, w, float(b), mean, std, hp, seed)


def loss_and_grad_fns(algorithm: str, hp: HyperParams):
    """(loss, grad) closures over (X, y, w, b) for the gradient check."""
    if algorithm == "logreg":
        l2 = hp.params["l2"]
        return (lambda X, y, w, b: K.logreg_loss(X, y, w, b, l2),
                lambda X, y, w, b: K.logreg_grad(X, y, w, b, l2))
    if algorithm == "linsvm":
        lam = 1.0 / hp.params["C"]
        return (lambda X, y, w, b: K.linsvm_loss(X, np.where(y > 0.5, 1.0, -1.0), w, b, lam),
                lambda X, y, w, b: K.linsvm_grad(X, np.where(y > 0.5, 1.0, -1.0), w, b, lam))
    raise ValueError(f"gradient check only applies to linear learners, not {algorithm!r}")


def grad_check(hp: HyperParams, tiny_set, n_points: int = 20, h: float = 1e-5,
               seed: int = 0) -> float:
    """Max relative error between analytic and central-difference gradients."""
    if len(tiny_set) > 50:
        raise ValueError("gradient check expects at most 50 rows")
    layout = FeatureLayout.from_schema(tiny_set.schema)
    X = layout.encode_dataset(tiny_set)
    mean, std = standardization(X, layout.numeric_slots())
    Xs = (X - mean) / std
    y = tiny_set.labels()
    loss_fn, grad_fn = loss_and_grad_fns(hp.algorithm, hp)
    rng = np.random.default_rng(seed)
    # The hinge loss is non-differentiable where a margin equals 1; central
    # differences straddling that kink disagree with the (correct)
    # subgradient, so sampled points must keep every margin clear of it.
    kink_clearance = 100.0 * h * (np.max(np.abs(Xs)) + 1.0)
    worst = 0.0
    for _ in range(n_points):
        while True:
            w = rng.normal(0.0, 1.0, X.shape[1])
            b = float(rng.normal(0.0, 1.0))
            if hp.algorithm != "linsvm":
                break
            margins = np.where(y > 0.5, 1.0, -1.0) * (Xs @ w + b)
            if np.min(np.abs(1.0 - margins)) > kink_clearance:
                break
        gw, gb = grad_fn(Xs, y, w, b)
        analytic = np.append(gw, gb)
        fd = np.empty_like(analytic)
        for j in range(len(w)):
            e = np.zeros_like(w)
            e[j] = h
            fd[j] = (loss_fn(Xs, y, w + e, b) - loss_fn(Xs, y, w - e, b)) / (2 * h)
        fd[-1] = (loss_fn(Xs, y, w, b + h) - loss_fn(Xs, y, w, b - h)) / (2 * h)
        # the floor absorbs eps-level rounding noise in the central
        # difference when the true gradient component is exactly zero
        denom = np.maximum(np.abs(analytic) + np.abs(fd), 1e-6)
        worst = max(worst, float(np.max(np.abs(analytic - fd) / denom)))
    return worst
