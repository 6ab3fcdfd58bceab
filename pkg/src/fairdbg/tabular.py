"""Tabular dataset ingestion, schema handling, splitting, interactions, masking.

Datasets are immutable: every operation that "modifies" a dataset returns a
new one. Rows keep their original (decoded) values; the encoding map assigns
integer codes to categorical values in first-appearance order so that repeated
ingests of the same file produce identical encodings.
"""

from __future__ import annotations

import csv
import io
import json
import random
from dataclasses import dataclass, field, replace

import numpy as np

CATEGORICAL = "categorical"
NUMERIC = "numeric"

MISSING_TOKEN = "Unknown"
MASK_TOKEN = "masked"


class ParseError(ValueError):
    """Malformed CSV input (ragged rows, empty file, ...)."""


class SchemaError(ValueError):
    """Input violates schema constraints (bad label, unknown column, ...)."""


class UsageError(ValueError):
    """Operation applied to a column it must not touch."""


class SizeError(ValueError):
    """Dataset too small for the requested operation."""


@dataclass(frozen=True)
class Column:
    name: str
    kind: str  # CATEGORICAL or NUMERIC
    # categorical: tuple of observed values in first-appearance order
    # numeric: (min, max) over observed values
    domain: tuple


@dataclass(frozen=True)
class Schema:
    columns: tuple[Column, ...]
    label_column: str
    positive_label: object
    protected_column: str | None = None
    protected_groups: tuple = ()

    def __post_init__(self):
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise SchemaError("duplicate column names")
        if self.label_column not in names:
            raise SchemaError(f"label column {self.label_column!r} not in columns")
        if self.protected_column is not None:
            if self.protected_column not in names:
                raise SchemaError(
                    f"protected column {self.protected_column!r} not in columns"
                )
            col = self.column(self.protected_column)
            if col.kind != CATEGORICAL:
                raise SchemaError("protected column must be categorical")
            if len(self.protected_groups) < 2:
                raise SchemaError("at least 2 protected groups required")
            for g in self.protected_groups:
                if g not in col.domain:
                    raise SchemaError(f"protected group {g!r} not in domain of "
                                      f"{self.protected_column!r}")

    def column(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise SchemaError(f"unknown column {name!r}")

    def index(self, name: str) -> int:
        for i, c in enumerate(self.columns):
            if c.name == name:
                return i
        raise SchemaError(f"unknown column {name!r}")

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.columns]

    @property
    def feature_columns(self) -> list[Column]:
        return [c for c in self.columns if c.name != self.label_column]

    def to_dict(self) -> dict:
        return {
            "columns": [
                {"name": c.name, "kind": c.kind, "domain": list(c.domain)}
                for c in self.columns
            ],
            "label_column": self.label_column,
            "positive_label": self.positive_label,
            "protected_column": self.protected_column,
            "protected_groups": list(self.protected_groups),
        }

    @staticmethod
    def from_dict(d: dict) -> "Schema":
        return Schema(
            columns=tuple(
                Column(c["name"], c["kind"], tuple(c["domain"])) for c in d["columns"]
            ),
            label_column=d["label_column"],
            positive_label=d["positive_label"],
            protected_column=d.get("protected_column"),
            protected_groups=tuple(d.get("protected_groups") or ()),
        )


@dataclass(frozen=True)
class Dataset:
    schema: Schema
    rows: tuple  # tuple of tuples, one value per schema column
    encoding_map: dict = field(default_factory=dict)  # col -> {value: code}

    def __len__(self):
        return len(self.rows)

    def column_values(self, name: str) -> list:
        i = self.schema.index(name)
        return [r[i] for r in self.rows]

    def encode_value(self, column: str, value) -> int:
        return self.encoding_map[column][value]

    def decode_value(self, column: str, code: int):
        for v, c in self.encoding_map[column].items():
            if c == code:
                return v
        raise KeyError(code)

    def labels(self) -> np.ndarray:
        """0/1 label vector (1 = positive_label)."""
        i = self.schema.index(self.schema.label_column)
        pos = self.schema.positive_label
        return np.array([1.0 if r[i] == pos else 0.0 for r in self.rows])

    def to_dict(self) -> dict:
        return {
            "schema": self.schema.to_dict(),
            "rows": [list(r) for r in self.rows],
            "encoding_map": {c: dict(m) for c, m in self.encoding_map.items()},
        }

    @staticmethod
    def from_dict(d: dict) -> "Dataset":
        return Dataset(
            schema=Schema.from_dict(d["schema"]),
            rows=tuple(tuple(r) for r in d["rows"]),
            encoding_map={c: dict(m) for c, m in d["encoding_map"].items()},
        )


@dataclass(frozen=True)
class SplitPair:
    train: Dataset
    test: Dataset
    seed: int


def _try_float(s: str):
    try:
        return float(s)
    except ValueError:
        return None


def ingest_csv(raw_text, label_column: str, positive_label,
               kind_overrides: dict | None = None) -> Dataset:
    """Parse a CSV (header required) into a Dataset.

    Column kinds are inferred: numeric iff every non-empty cell parses as a
    number, unless forced by ``kind_overrides`` (column name -> kind). Missing
    categorical cells become the "Unknown" token; missing numeric cells take
    the column median.
    """
    if hasattr(raw_text, "read"):
        raw_text = raw_text.read()
    if isinstance(raw_text, bytes):
        raw_text = raw_text.decode("utf-8")
    reader = csv.reader(io.StringIO(raw_text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty input: no header row")
    header = [h.strip() for h in header]
    if label_column not in header:
        raise SchemaError(f"label column {label_column!r} not in header")
    raw_rows = []
    for idx, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and row[0].strip() == ""):
            continue  # tolerate blank lines
        if len(row) != len(header):
            raise ParseError(f"row {idx}: expected {len(header)} cells, got {len(row)}")
        raw_rows.append([c.strip() for c in row])
    if not raw_rows:
        raise SchemaError("dataset has no data rows")

    kind_overrides = kind_overrides or {}
    ncols = len(header)
    kinds = []
    for j in range(ncols):
        if header[j] in kind_overrides:
            kinds.append(kind_overrides[header[j]])
            continue
        cells = [r[j] for r in raw_rows if r[j] != ""]
        numeric = bool(cells) and all(_try_float(c) is not None for c in cells)
        kinds.append(NUMERIC if numeric else CATEGORICAL)
    # the label must be treated categorically even if it looks numeric
    kinds[header.index(label_column)] = CATEGORICAL

    # numeric missing values -> column median
    medians = {}
    for j in range(ncols):
        if kinds[j] == NUMERIC:
            vals = [float(r[j]) for r in raw_rows if r[j] != ""]
            if not vals:
                raise SchemaError(f"column {header[j]!r} has no values")
            medians[j] = float(np.median(vals))

    rows = []
    for r in raw_rows:
        out = []
        for j, cell in enumerate(r):
            if kinds[j] == NUMERIC:
                out.append(float(cell) if cell != "" else medians[j])
            else:
                out.append(cell if cell != "" else MISSING_TOKEN)
        rows.append(tuple(out))

    columns = []
    encoding_map = {}
    for j in range(ncols):
        if kinds[j] == NUMERIC:
            vals = [r[j] for r in rows]
            columns.append(Column(header[j], NUMERIC, (min(vals), max(vals))))
        else:
            seen = []
            for r in rows:
                if r[j] not in seen:
                    seen.append(r[j])
            columns.append(Column(header[j], CATEGORICAL, tuple(seen)))
            encoding_map[header[j]] = {v: i for i, v in enumerate(seen)}

    label_values = columns[header.index(label_column)].domain
    if len(label_values) != 2:
        raise SchemaError(
            f"label column must have exactly 2 distinct values, got {len(label_values)}"
        )
    if str(positive_label) not in label_values:
        raise SchemaError(f"positive label {positive_label!r} not observed in "
                          f"{label_column!r}")

    schema = Schema(tuple(columns), label_column, str(positive_label))
    return Dataset(schema, tuple(rows), encoding_map)


def load_kind_overrides(path) -> dict:
    """Schema override file: JSON object mapping column name -> kind."""
    with open(path) as f:
        d = json.load(f)
    for col, kind in d.items():
        if kind not in (CATEGORICAL, NUMERIC):
            raise SchemaError(f"override for {col!r}: unknown kind {kind!r}")
    return d


def set_protected(ds: Dataset, column: str, groups: list) -> Dataset:
    col = ds.schema.column(column)
    if col.kind != CATEGORICAL:
        raise SchemaError(f"protected column {column!r} must be categorical")
    if len(groups) < 2:
        raise SchemaError("need at least 2 protected groups")
    for g in groups:
        if g not in col.domain:
            raise SchemaError(f"value {g!r} not in domain of {column!r}")
    schema = replace(ds.schema, protected_column=column,
                     protected_groups=tuple(groups))
    return Dataset(schema, ds.rows, ds.encoding_map)


def split_80_20(ds: Dataset, seed: int) -> SplitPair:
    n = len(ds)
    if n < 5:
        raise SizeError(f"need at least 5 rows to split, got {n}")
    n_train = int(n * 0.8 + 0.5)
    order = list(range(n))
    random.Random(seed).shuffle(order)
    train_rows = tuple(ds.rows[i] for i in order[:n_train])
    test_rows = tuple(ds.rows[i] for i in order[n_train:])
    train = Dataset(ds.schema, train_rows, ds.encoding_map)
    test = Dataset(ds.schema, test_rows, ds.encoding_map)
    return SplitPair(train, test, seed)


def cramers_v(x: list, y: list) -> float:
    """Cramér's V between two categorical sequences, in [0, 1]."""
    xs = sorted(set(x), key=str)
    ys = sorted(set(y), key=str)
    if len(xs) < 2 or len(ys) < 2:
        return 0.0
    xi = {v: i for i, v in enumerate(xs)}
    yi = {v: i for i, v in enumerate(ys)}
    table = np.zeros((len(xs), len(ys)))
    for a, b in zip(x, y):
        table[xi[a], yi[b]] += 1
    n = table.sum()
    row = table.sum(axis=1, keepdims=True)
    col = table.sum(axis=0, keepdims=True)
    expected = row @ col / n
    with np.errstate(invalid="ignore", divide="ignore"):
        chi2 = np.nansum((table - expected) ** 2 / expected)
    denom = n * (min(len(xs), len(ys)) - 1)
    v = float(np.sqrt(chi2 / denom)) if denom > 0 else 0.0
    return min(v, 1.0)


def correlation_ratio(values: np.ndarray, groups: list) -> float:
    """Correlation ratio eta of a numeric column grouped by category, in [0, 1]."""
    values = np.asarray(values, dtype=float)
    total_var = np.sum((values - values.mean()) ** 2)
    if total_var == 0:
        return 0.0
    between = 0.0
    for g in set(groups):
        sel = np.array([gg == g for gg in groups])
        if sel.any():
            between += sel.sum() * (values[sel].mean() - values.mean()) ** 2
    return float(np.sqrt(between / total_var))


def _numeric_bins(values: list[float]) -> list[float]:
    """Quartile bin edges (3 inner edges) for a numeric column."""
    qs = np.quantile(np.asarray(values, dtype=float), [0.25, 0.5, 0.75])
    return [float(q) for q in qs]


def numeric_bin_label(value: float, edges: list[float]) -> str:
    if value <= edges[0]:
        return f"<= {edges[0]:g}"
    if value <= edges[1]:
        return f"({edges[0]:g}, {edges[1]:g}]"
    if value <= edges[2]:
        return f"({edges[1]:g}, {edges[2]:g}]"
    return f"> {edges[2]:g}"


def interactions(ds: Dataset) -> dict:
    """Association of every non-protected feature with the protected attribute.

    Returns a JSON-ready report: per column an association score in [0, 1]
    (Cramér's V for categoricals, correlation ratio for numerics) and a
    per-value histogram of protected-group proportions. Numeric columns are
    quartile-binned for the histogram.
    """
    schema = ds.schema
    if schema.protected_column is None:
        raise SchemaError("protected attribute not set")
    groups = list(schema.protected_groups)
    p_idx = schema.index(schema.protected_column)
    keep = [r for r in ds.rows if r[p_idx] in groups]
    if not keep:
        raise SchemaError("no rows belong to the protected groups")
    prot = [r[p_idx] for r in keep]

    report = {"protected_column": schema.protected_column,
              "protected_groups": groups, "columns": []}
    for col in schema.columns:
        if col.name in (schema.protected_column, schema.label_column):
            continue
        j = schema.index(col.name)
        vals = [r[j] for r in keep]
        if col.kind == CATEGORICAL:
            score = cramers_v(vals, prot)
            keys = [v for v in col.domain if v in set(vals)]
            labelled = list(zip(vals, prot))
            key_of = dict(zip(keys, keys))
        else:
            score = correlation_ratio(np.array(vals), prot)
            edges = _numeric_bins(vals)
            keys = []
            labelled = []
            for v, p in zip(vals, prot):
                lab = numeric_bin_label(v, edges)
                if lab not in keys:
                    keys.append(lab)
                labelled.append((lab, p))
            key_of = dict(zip(keys, keys))
        histogram = []
        for k in keys:
            sub = [p for v, p in labelled if key_of.get(v) == k]
            n = len(sub)
            histogram.append({
                "value": k,
                "count": n,
                "proportions": {str(g): sub.count(g) / n for g in groups},
            })
        report["columns"].append({
            "column": col.name,
            "kind": col.kind,
            "association_score": score,
            "histogram": histogram,
        })
    return report


def mask(ds: Dataset, column: str, values: list | None = None) -> Dataset:
    """Collapse a column (or selected categorical values of it) to one token."""
    schema = ds.schema
    if column in (schema.label_column, schema.protected_column):
        raise UsageError(f"cannot mask the {column!r} column")
    col = schema.column(column)
    j = schema.index(column)
    if values is not None:
        if col.kind != CATEGORICAL:
            raise UsageError("value-targeted masking requires a categorical column")
        already_masked = MASK_TOKEN in col.domain
        for v in values:
            # a previously masked value is gone from the domain; re-masking
            # it must stay a no-op so mask is idempotent
            if v not in col.domain and v != MASK_TOKEN and not already_masked:
                raise SchemaError(f"value {v!r} not in domain of {column!r}")
        hit = set(values) | {MASK_TOKEN}
        new_rows = tuple(
            r[:j] + (MASK_TOKEN if r[j] in hit else r[j],) + r[j + 1:]
            for r in ds.rows
        )
        new_domain = []
        for v in col.domain:
            if v in hit:
                if MASK_TOKEN not in new_domain:
                    new_domain.append(MASK_TOKEN)
            else:
                new_domain.append(v)
        new_col = Column(column, CATEGORICAL, tuple(new_domain))
    else:
        new_rows = tuple(r[:j] + (MASK_TOKEN,) + r[j + 1:] for r in ds.rows)
        new_col = Column(column, CATEGORICAL, (MASK_TOKEN,))
    columns = tuple(new_col if c.name == column else c for c in schema.columns)
    new_schema = replace(schema, columns=columns)
    enc = {c: dict(m) for c, m in ds.encoding_map.items() if c != column}
    if new_col.kind == CATEGORICAL:
        enc[column] = {v: i for i, v in enumerate(new_col.domain)}
    return Dataset(new_schema, new_rows, enc)
