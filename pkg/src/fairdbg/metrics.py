"""Accuracy and group-fairness metrics (EOD, AOD) for one model on one split.

EOD = TPR[group0] - TPR[group1]; AOD = ((TPR[group0] - TPR[group1]) +
(FPR[group0] - FPR[group1])) / 2, with group0 the schema's reference group.
Signed values are reported; search objectives take the absolute value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import learners
from .tabular import Dataset, SchemaError


class MetricError(ValueError):
    pass


@dataclass(frozen=True)
class GroupStats:
    tp: int
    fp: int
    tn: int
    fn: int
    degenerate_tpr: bool = False  # no positives in the group

    @property
    def size(self):
        return self.tp + self.fp + self.tn + self.fn

    @property
    def tpr(self):
        pos = self.tp + self.fn
        return self.tp / pos if pos else 0.0

    @property
    def fpr(self):
        neg = self.fp + self.tn
        return self.fp / neg if neg else 0.0


@dataclass(frozen=True)
class FairnessReport:
    accuracy: float
    eod: float
    aod: float
    groups: dict = field(default_factory=dict)  # group value -> GroupStats
    model_id: str | None = None
    split_id: str | None = None

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "eod": self.eod,
            "aod": self.aod,
            "groups": {
                str(g): {
                    "tp": s.tp, "fp": s.fp, "tn": s.tn, "fn": s.fn,
                    "size": s.size, "tpr": s.tpr, "fpr": s.fpr,
                    "degenerate_tpr": s.degenerate_tpr,
                }
                for g, s in self.groups.items()
            },
            "model_id": self.model_id,
            "split_id": self.split_id,
        }


def evaluate(model, ds: Dataset, model_id: str | None = None,
             split_id: str | None = None) -> FairnessReport:
    """Accuracy over all rows; EOD/AOD over the first two protected groups.

    Rows whose protected value is outside the declared groups count toward
    accuracy but not toward group metrics. A group with no positive labels
    gets TPR = 0 and a degenerate flag (the search objective stays total).
    """
    schema = ds.schema
    if schema.protected_column is None:
        raise SchemaError("protected attribute not set")
    if len(ds) == 0:
        raise MetricError("empty evaluation set")
    p_idx = schema.index(schema.protected_column)

    y = ds.labels()
    proba = learners.dataset_probas(model, ds)
    pred = (proba >= 0.5).astype(float)
    accuracy = float(np.mean(pred == y))

    stats: dict[object, GroupStats] = {}
    for g in schema.protected_groups:
        sel = np.array([r[p_idx] == g for r in ds.rows])
        if not sel.any():
            raise MetricError(f"protected group {g!r} is empty in the evaluated rows")
        yg, pg = y[sel], pred[sel]
        tp = int(np.sum((yg == 1) & (pg == 1)))
        fp = int(np.sum((yg == 0) & (pg == 1)))
        tn = int(np.sum((yg == 0) & (pg == 0)))
        fn = int(np.sum((yg == 1) & (pg == 0)))
        stats[g] = GroupStats(tp, fp, tn, fn, degenerate_tpr=(tp + fn == 0))

    g0, g1 = schema.protected_groups[0], schema.protected_groups[1]
    eod = stats[g0].tpr - stats[g1].tpr
    aod = 0.5 * ((stats[g0].tpr - stats[g1].tpr) + (stats[g0].fpr - stats[g1].fpr))
    return FairnessReport(accuracy, float(eod), float(aod), stats, model_id, split_id)
