import random

import numpy as np
import pytest

from fairdbg import tabular
from fairdbg.learners import FeatureLayout, HyperParams
from fairdbg.learners.linear import LinearModel


def make_csv(header, rows):
    lines = [",".join(header)]
    lines += [",".join(str(c) for c in r) for r in rows]
    return "\n".join(lines) + "\n"


@pytest.fixture
def tiny_ds():
    """3 rows: age numeric, sex categorical, income binary label."""
    text = make_csv(
        ["age", "sex", "income"],
        [[25, "Male", "yes"], [40, "Female", "no"], [31, "Female", "yes"]],
    )
    return tabular.ingest_csv(text, "income", "yes")


def synthetic_adult_csv(n=2000, seed=0, proxy_deterministic=True):
    """Adult-like data where relationship (Husband/Wife) proxies sex.

    Husband is always Male and Wife always Female when proxy_deterministic;
    the label leans on relationship and hours so trees pick up the proxy.
    """
    rng = random.Random(seed)
    header = ["age", "workclass", "relationship", "hours_per_week", "sex", "income"]
    rows = []
    for _ in range(n):
        sex = rng.choice(["Male", "Female"])
        if rng.random() < 0.6:
            if proxy_deterministic:
                rel = "Husband" if sex == "Male" else "Wife"
            else:
                rel = rng.choice(["Husband", "Wife"])
        else:
            rel = rng.choice(["Unmarried", "Own-child"])
        age = rng.randint(18, 80)
        hours = rng.randint(10, 80)
        workclass = rng.choice(["Private", "Gov", "Self"])
        score = (2.0 if rel == "Husband" else 0.0) + hours / 40.0 + age / 200.0
        label = ">50K" if score + rng.gauss(0, 0.3) > 2.5 else "<=50K"
        rows.append([age, workclass, rel, hours, sex, label])
    return make_csv(header, rows)


@pytest.fixture(scope="session")
def adult_ds():
    ds = tabular.ingest_csv(synthetic_adult_csv(), "income", ">50K")
    return tabular.set_protected(ds, "sex", ["Male", "Female"])


def linear_stub(schema, slot_weights, bias=0.0):
    """A logistic model with hand-set weights over named layout slots."""
    layout = FeatureLayout.from_schema(schema)
    names = layout.feature_names
    w = np.zeros(layout.n_features)
    for name, weight in slot_weights.items():
        w[names.index(name)] = weight
    hp = HyperParams("logreg", {"lr": 0.1, "l2": 0.0, "epochs": 10})
    return LinearModel("logreg", layout, w, bias,
                       np.zeros(layout.n_features), np.ones(layout.n_features),
                       hp, seed=0)
