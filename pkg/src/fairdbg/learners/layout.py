"""Feature layout: maps schema rows to the model's numeric design matrix.

Categorical columns expand to one-hot blocks (one slot per domain value, in
encoding order); numeric columns occupy a single slot. Unknown categorical
values map to an all-zeros block. The label column is never a feature; the
protected column is (counterfactual flipping needs the model to see it).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..tabular import CATEGORICAL, Dataset, Schema


class LayoutError(ValueError):
    """Instance does not conform to the model's feature layout."""


@dataclass(frozen=True)
class FeatureLayout:
    schema_names: tuple[str, ...]          # full schema column order
    entries: tuple                          # (column, kind, values-or-None)
    n_features: int

    @staticmethod
    def from_schema(schema: Schema) -> "FeatureLayout":
        entries = []
        n = 0
        for col in schema.columns:
            if col.name == schema.label_column:
                continue
            if col.kind == CATEGORICAL:
                entries.append((col.name, CATEGORICAL, tuple(col.domain)))
                n += len(col.domain)
            else:
                entries.append((col.name, "numeric", None))
                n += 1
        return FeatureLayout(tuple(schema.names), tuple(entries), n)

    @property
    def feature_names(self) -> list[str]:
        names = []
        for col, kind, values in self.entries:
            if kind == CATEGORICAL:
                names.extend(f"{col}={v}" for v in values)
            else:
                names.append(col)
        return names

    def encode_row(self, row) -> np.ndarray:
        if len(row) != len(self.schema_names):
            raise LayoutError(
                f"expected {len(self.schema_names)} values, got {len(row)}"
            )
        by_name = dict(zip(self.schema_names, row))
        x = np.zeros(self.n_features)
        off = 0
        for col, kind, values in self.entries:
            v = by_name[col]
            if kind == CATEGORICAL:
                if v in values:
                    x[off + values.index(v)] = 1.0
                off += len(values)
            else:
                try:
                    x[off] = float(v)
                except (TypeError, ValueError):
                    raise LayoutError(f"non-numeric value {v!r} for column {col!r}")
                off += 1
        return x

    def encode_rows(self, rows) -> np.ndarray:
        if len(rows) == 0:
            return np.zeros((0, self.n_features))
        return np.stack([self.encode_row(r) for r in rows])

    def encode_dataset(self, ds: Dataset) -> np.ndarray:
        return self.encode_rows(ds.rows)

    def numeric_slots(self) -> np.ndarray:
        """Boolean mask of slots holding raw numeric values."""
        m = np.zeros(self.n_features, dtype=bool)
        off = 0
        for _, kind, values in self.entries:
            if kind == CATEGORICAL:
                off += len(values)
            else:
                m[off] = True
                off += 1
        return m

    def to_dict(self) -> dict:
        return {
            "schema_names": list(self.schema_names),
            "entries": [
                {"column": c, "kind": k, "values": list(v) if v else None}
                for c, k, v in self.entries
            ],
        }

    @staticmethod
    def from_dict(d: dict) -> "FeatureLayout":
        entries = tuple(
            (e["column"], e["kind"], tuple(e["values"]) if e["values"] else None)
            for e in d["entries"]
        )
        n = sum(len(v) if k == CATEGORICAL else 1 for _, k, v in entries)
        return FeatureLayout(tuple(d["schema_names"]), entries, n)
