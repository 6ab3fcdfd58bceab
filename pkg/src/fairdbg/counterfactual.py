"""Counterfactual discrimination testing.

Generates random test instances, flips the protected attribute to build the
counterfactual twin, categorizes each pair by the two predicted outcomes,
audits raw flips against user-declared proxy-adjustment rules, and supports
user-driven counterfactual edits.
"""

from __future__ import annotations

import hashlib
import importlib.resources
import json
import random
from dataclasses import dataclass, field

from . import learners
from .tabular import CATEGORICAL, Dataset, Schema, SchemaError, UsageError

BOTH_POSITIVE = "both_positive"
BOTH_NEGATIVE = "both_negative"
ORIGINAL_FAVORED = "original_favored"
COUNTERFACTUAL_FAVORED = "counterfactual_favored"
CATEGORIES = (BOTH_POSITIVE, BOTH_NEGATIVE, ORIGINAL_FAVORED, COUNTERFACTUAL_FAVORED)

ID_CATEGORIES = (ORIGINAL_FAVORED, COUNTERFACTUAL_FAVORED)


class ConfigError(ValueError):
    pass


class ValidityError(ValueError):
    pass


def categorize(p_orig: float, p_cf: float) -> str:
    """Four-way outcome category; 0.5 counts as positive."""
    o, c = p_orig >= 0.5, p_cf >= 0.5
    if o and c:
        return BOTH_POSITIVE
    if not o and not c:
        return BOTH_NEGATIVE
    return ORIGINAL_FAVORED if o else COUNTERFACTUAL_FAVORED


@dataclass(frozen=True)
class TestPair:
    id: str
    original: tuple
    counterfactual: tuple
    proba_original: float
    proba_counterfactual: float
    category: str
    label: object = None  # ground-truth label when the original came from data

    @property
    def is_id(self) -> bool:
        return self.category in ID_CATEGORIES

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "original": list(self.original),
            "counterfactual": list(self.counterfactual),
            "proba_original": self.proba_original,
            "proba_counterfactual": self.proba_counterfactual,
            "category": self.category,
            "is_id": self.is_id,
            "label": self.label,
        }

    @staticmethod
    def from_dict(d: dict) -> "TestPair":
        return TestPair(d["id"], tuple(d["original"]), tuple(d["counterfactual"]),
                        d["proba_original"], d["proba_counterfactual"],
                        d["category"], d.get("label"))


def pair_id(seed: int, index: int) -> str:
    return hashlib.sha1(f"{seed}:{index}".encode()).hexdigest()[:12]


def _check_two_groups(schema: Schema):
    if schema.protected_column is None:
        raise SchemaError("protected attribute not set")
    if len(schema.protected_groups) != 2:
        raise SchemaError("counterfactual generation needs exactly 2 protected groups")


def flip_protected(schema: Schema, row: tuple) -> tuple:
    _check_two_groups(schema)
    p = schema.index(schema.protected_column)
    g0, g1 = schema.protected_groups
    flipped = g1 if row[p] == g0 else g0
    return row[:p] + (flipped,) + row[p + 1:]


def generate(model, ds: Dataset, n: int, seed: int) -> list[TestPair]:
    """Sample n random originals (each feature uniform over its observed
    domain, protected value uniform over the two groups), flip, score both."""
    schema = ds.schema
    _check_two_groups(schema)
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = random.Random(seed)
    p_idx = schema.index(schema.protected_column)
    l_idx = schema.index(schema.label_column)
    pairs = []
    for i in range(n):
        row = []
        for j, col in enumerate(schema.columns):
            if j == l_idx:
                row.append(None)
            elif j == p_idx:
                row.append(rng.choice(list(schema.protected_groups)))
            elif col.kind == CATEGORICAL:
                row.append(rng.choice(list(col.domain)))
            else:
                lo, hi = col.domain
                row.append(rng.uniform(float(lo), float(hi)))
        original = tuple(row)
        cf = flip_protected(schema, original)
        po = learners.predict_proba(model, original)
        pc = learners.predict_proba(model, cf)
        pairs.append(TestPair(pair_id(seed, i), original, cf, po, pc,
                              categorize(po, pc)))
    return pairs


def filter_pairs(pairs: list[TestPair], predicate: str,
                 positive_label=None) -> list[TestPair]:
    """predicate: 'id', one of the four categories, or a confusion cell
    ('tp'/'fp'/'tn'/'fn') judged on the original's prediction vs its label."""
    predicate = predicate.lower()
    if predicate == "id":
        return [p for p in pairs if p.is_id]
    if predicate in CATEGORIES:
        return [p for p in pairs if p.category == predicate]
    if predicate in ("tp", "fp", "tn", "fn"):
        if any(p.label is None for p in pairs):
            raise UsageError("confusion-cell filters require labeled pairs")
        out = []
        for p in pairs:
            actual = p.label == positive_label
            predicted = p.proba_original >= 0.5
            cell = {(True, True): "tp", (False, True): "fp",
                    (False, False): "tn", (True, False): "fn"}[(actual, predicted)]
            if cell == predicate:
                out.append(p)
        return out
    raise UsageError(f"unknown filter {predicate!r}")


@dataclass(frozen=True)
class ProxyRule:
    """When the protected value flips trigger_from -> trigger_to, also apply
    each (column, from_value, to_value) adjustment to the counterfactual."""
    trigger_from: object
    trigger_to: object
    adjustments: tuple  # of (column, from_value, to_value)

    def to_dict(self) -> dict:
        return {
            "trigger": {"from": self.trigger_from, "to": self.trigger_to},
            "adjustments": [
                {"column": c, "from": f, "to": t} for c, f, t in self.adjustments
            ],
        }

    @staticmethod
    def from_dict(d: dict) -> "ProxyRule":
        return ProxyRule(
            d["trigger"]["from"], d["trigger"]["to"],
            tuple((a["column"], a["from"], a["to"]) for a in d["adjustments"]),
        )


def load_rules(path) -> list[ProxyRule]:
    with open(path) as f:
        data = json.load(f)
    return [ProxyRule.from_dict(d) for d in data["rules"]]


def default_adult_rules() -> list[ProxyRule]:
    """The bundled Husband<->Wife adjustment for Adult-style sex flips."""
    text = (importlib.resources.files("fairdbg.data") / "adult_proxies.json"
            ).read_text()
    return [ProxyRule.from_dict(d) for d in json.loads(text)["rules"]]


def validate_rules(rules: list[ProxyRule], schema: Schema):
    _check_two_groups(schema)
    groups = set(schema.protected_groups)
    for rule in rules:
        if rule.trigger_from not in groups or rule.trigger_to not in groups:
            raise ConfigError(
                f"rule trigger {rule.trigger_from!r}->{rule.trigger_to!r} "
                "does not match the protected groups"
            )
        for col, frm, to in rule.adjustments:
            if col in (schema.protected_column, schema.label_column):
                raise ConfigError(f"rule adjusts forbidden column {col!r}")
            c = schema.column(col)  # raises SchemaError for unknown columns
            if c.kind == CATEGORICAL:
                for v in (frm, to):
                    if v not in c.domain:
                        raise ConfigError(f"value {v!r} not in domain of {col!r}")


@dataclass(frozen=True)
class AuditVerdict:
    pair_id: str
    raw_is_id: bool
    adjusted_is_id: bool
    label: str  # TP | FP | TN | FN
    adjusted_counterfactual: tuple

    def to_dict(self) -> dict:
        return {
            "pair_id": self.pair_id,
            "raw_is_id": self.raw_is_id,
            "adjusted_is_id": self.adjusted_is_id,
            "label": self.label,
            "adjusted_counterfactual": list(self.adjusted_counterfactual),
        }


def _verdict_label(raw: bool, adjusted: bool) -> str:
    return {(True, True): "TP", (True, False): "FP",
            (False, False): "TN", (False, True): "FN"}[(raw, adjusted)]


def apply_rules(schema: Schema, pair: TestPair, rules: list[ProxyRule]) -> tuple:
    """Adjusted counterfactual: the raw counterfactual plus every matching
    rule adjustment (trigger matches the flip direction and the original's
    column value equals the adjustment's from_value)."""
    p_idx = schema.index(schema.protected_column)
    frm, to = pair.original[p_idx], pair.counterfactual[p_idx]
    adjusted = list(pair.counterfactual)
    for rule in rules:
        if rule.trigger_from != frm or rule.trigger_to != to:
            continue
        for col, from_value, to_value in rule.adjustments:
            j = schema.index(col)
            if pair.original[j] == from_value:
                adjusted[j] = to_value
    return tuple(adjusted)


def audit(pairs: list[TestPair], rules: list[ProxyRule], model,
          schema: Schema) -> tuple[list[AuditVerdict], dict]:
    """Re-judge every pair after proxy adjustment; summarize TP/FP/TN/FN rates."""
    validate_rules(rules, schema)
    verdicts = []
    counts = {"TP": 0, "FP": 0, "TN": 0, "FN": 0}
    for pair in pairs:
        adjusted_cf = apply_rules(schema, pair, rules)
        p_orig = pair.proba_original
        p_adj = learners.predict_proba(model, adjusted_cf)
        adjusted_is_id = categorize(p_orig, p_adj) in ID_CATEGORIES
        label = _verdict_label(pair.is_id, adjusted_is_id)
        counts[label] += 1
        verdicts.append(AuditVerdict(pair.id, pair.is_id, adjusted_is_id,
                                     label, adjusted_cf))
    total = len(pairs) or 1
    rates = {k: v / total for k, v in counts.items()}
    return verdicts, {"counts": counts, "rates": rates, "total": len(pairs)}


def gower_distance(schema: Schema, a: tuple, b: tuple) -> float:
    """Mean per-feature-column Gower distance in [0, 1] (label excluded)."""
    dists = []
    for j, col in enumerate(schema.columns):
        if col.name == schema.label_column:
            continue
        if col.kind == CATEGORICAL:
            dists.append(0.0 if a[j] == b[j] else 1.0)
        else:
            lo, hi = float(col.domain[0]), float(col.domain[1])
            rng = hi - lo
            d = abs(float(a[j]) - float(b[j])) / rng if rng > 0 else 0.0
            dists.append(min(d, 1.0))
    return sum(dists) / len(dists) if dists else 0.0


@dataclass(frozen=True)
class CounterfactualEdit:
    base_pair_id: str
    overrides: dict
    instance: tuple
    proba: float
    changed_feature_count: int
    proximity: float

    def to_dict(self) -> dict:
        return {
            "base_pair_id": self.base_pair_id,
            "overrides": dict(self.overrides),
            "instance": list(self.instance),
            "proba": self.proba,
            "changed_feature_count": self.changed_feature_count,
            "proximity": self.proximity,
        }


def edit_counterfactual(base: TestPair, overrides: dict, model,
                        schema: Schema) -> CounterfactualEdit:
    """User-tweaked counterfactual: protected flip plus explicit overrides."""
    instance = list(base.counterfactual)
    for col, value in overrides.items():
        c = schema.column(col)
        if col in (schema.label_column,):
            raise ValidityError(f"cannot override the label column {col!r}")
        j = schema.index(col)
        if c.kind == CATEGORICAL:
            if value not in c.domain:
                raise ValidityError(
                    f"value {value!r} not in the domain of column {col!r}"
                )
        else:
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise ValidityError(f"column {col!r} expects a number")
            lo, hi = float(c.domain[0]), float(c.domain[1])
            if not (lo <= value <= hi):
                raise ValidityError(
                    f"value {value} outside [{lo}, {hi}] for column {col!r}"
                )
        instance[j] = value
    instance = tuple(instance)
    proba = learners.predict_proba(model, instance)
    changed = sum(
        1 for j, col in enumerate(schema.columns)
        if col.name != schema.label_column and instance[j] != base.original[j]
    )
    proximity = gower_distance(schema, base.original, instance)
    return CounterfactualEdit(base.id, dict(overrides), instance, proba,
                              changed, proximity)
