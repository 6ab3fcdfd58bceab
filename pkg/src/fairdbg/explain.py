"""Local surrogate explanations: a weighted ridge fit on interpretable
perturbations around one instance, reporting per-feature signed contributions.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from . import learners
from .tabular import CATEGORICAL, Dataset, _numeric_bins, numeric_bin_label

DEFAULT_TOP_K = 6
DEFAULT_N_SAMPLES = 1000
RIDGE_LAMBDA = 1.0


class ExplanationError(RuntimeError):
    pass


@dataclass(frozen=True)
class FeatureContribution:
    feature: str
    condition: str   # e.g. "sex=Male" or "34 < age <= 41"
    weight: float


@dataclass(frozen=True)
class Explanation:
    instance_id: str | None
    contributions: tuple  # of FeatureContribution, ordered by |weight| desc
    intercept: float
    fidelity: float       # weighted R^2 of the surrogate on its own sample
    kernel_width: float
    n_samples: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "features": [
                {"feature": c.feature, "condition": c.condition, "weight": c.weight}
                for c in self.contributions
            ],
            "intercept": self.intercept,
            "fidelity": self.fidelity,
            "kernel_width": self.kernel_width,
            "n_samples": self.n_samples,
            "seed": self.seed,
        }


def _weighted_ridge(Z, y, sample_weight, lam):
    """Ridge with unpenalized intercept; returns (coefs, intercept)."""
    sw = np.sqrt(sample_weight)
    A = np.column_stack([Z, np.ones(len(y))]) * sw[:, None]
    b = y * sw
    d = Z.shape[1]
    reg = lam * np.eye(d + 1)
    reg[d, d] = 0.0
    beta = np.linalg.solve(A.T @ A + reg, A.T @ b)
    return beta[:d], float(beta[d])


def explain(model, x, train: Dataset, top_k: int = DEFAULT_TOP_K,
            n_samples: int = DEFAULT_N_SAMPLES, seed: int = 0,
            instance_id: str | None = None) -> Explanation:
    """Explain one prediction with a sparse local linear surrogate.

    Perturbations keep each feature with probability 0.5 or resample it from
    the training marginal; the interpretable representation is binary
    feature-equals-the-instance (numeric: same quartile bin). The surrogate
    is a proximity-weighted ridge fit, restricted to the top_k features by
    absolute weight after a full fit.
    """
    schema = train.schema
    if n_samples < 10 * top_k:
        raise ValueError("n_samples must be at least 10 * top_k")
    feat_idx = [j for j, c in enumerate(schema.columns)
                if c.name != schema.label_column]
    d = len(feat_idx)
    kernel_width = 0.75 * np.sqrt(d)

    bins = {}
    for j in feat_idx:
        col = schema.columns[j]
        if col.kind != CATEGORICAL:
            bins[j] = _numeric_bins([r[j] for r in train.rows])

    def interp(j, value):
        col = schema.columns[j]
        if col.kind == CATEGORICAL:
            return value
        return numeric_bin_label(float(value), bins[j])

    x = tuple(x)
    x_interp = {j: interp(j, x[j]) for j in feat_idx}

    rng = random.Random(seed)
    marginals = {j: [r[j] for r in train.rows] for j in feat_idx}
    rows = []
    Z = np.zeros((n_samples, d))
    for i in range(n_samples):
        row = list(x)
        for k, j in enumerate(feat_idx):
            if rng.random() < 0.5:
                value = x[j]
            else:
                value = rng.choice(marginals[j])
            row[j] = value
            Z[i, k] = 1.0 if interp(j, value) == x_interp[j] else 0.0
        rows.append(tuple(row))
    if all(r == rows[0] for r in rows):
        raise ExplanationError("degenerate perturbation set: all samples identical")

    X = model.layout.encode_rows(rows)
    probas = model.proba_matrix(X)

    hamming = d - Z.sum(axis=1)
    weights = np.exp(-(hamming ** 2) / kernel_width ** 2)

    if np.ptp(probas) == 0.0:
        # no local variation: the explanation is exactly the constant
        contribs = ()
        return Explanation(instance_id, contribs, float(probas[0]), 1.0,
                           float(kernel_width), n_samples, seed)

    coefs, _ = _weighted_ridge(Z, probas, weights, RIDGE_LAMBDA)
    top = sorted(range(d), key=lambda k: -abs(coefs[k]))[:top_k]
    top = sorted(top)  # stable feature order within the restricted fit
    coefs_r, intercept = _weighted_ridge(Z[:, top], probas, weights, RIDGE_LAMBDA)

    pred = Z[:, top] @ coefs_r + intercept
    ybar = np.average(probas, weights=weights)
    ss_res = np.sum(weights * (probas - pred) ** 2)
    ss_tot = np.sum(weights * (probas - ybar) ** 2)
    fidelity = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0

    contribs = []
    for k, w in sorted(zip(top, coefs_r), key=lambda t: -abs(t[1])):
        j = feat_idx[k]
        col = schema.columns[j]
        if col.kind == CATEGORICAL:
            condition = f"{col.name}={x[j]}"
        else:
            condition = f"{col.name} in {x_interp[j]}"
        contribs.append(FeatureContribution(col.name, condition, float(w)))
    return Explanation(instance_id, tuple(contribs), intercept, float(fidelity),
                       float(kernel_width), n_samples, seed)


def explanation_story(e: Explanation, interaction_report: dict,
                      weight_percentile: float = 50.0,
                      association_threshold: float = 0.5) -> dict:
    """Annotate each explained feature with its protected-attribute
    association; strong-weight + strong-association features are flagged."""
    scores = {c["column"]: c["association_score"]
              for c in interaction_report["columns"]}
    if e.contributions:
        cut = float(np.percentile([abs(c.weight) for c in e.contributions],
                                  weight_percentile))
    else:
        cut = 0.0
    annotated = []
    for c in e.contributions:
        assoc = scores.get(c.feature)
        flagged = (assoc is not None and abs(c.weight) >= cut
                   and assoc >= association_threshold)
        annotated.append({
            "feature": c.feature,
            "condition": c.condition,
            "weight": c.weight,
            "association_score": assoc,
            "proxy_suspect": bool(flagged),
        })
    return {"instance_id": e.instance_id, "features": annotated}
