import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairdbg import tabular
from fairdbg.tabular import (
    MASK_TOKEN, ParseError, SchemaError, SizeError, UsageError,
    cramers_v, ingest_csv, interactions, mask, set_protected, split_80_20,
)

from conftest import make_csv, synthetic_adult_csv


class TestIngest:
    def test_basic_parse(self, tiny_ds):
        assert len(tiny_ds) == 3
        assert tiny_ds.schema.column("age").kind == "numeric"
        assert tiny_ds.schema.column("sex").kind == "categorical"
        assert tiny_ds.schema.column("sex").domain == ("Male", "Female")

    def test_three_label_values_rejected(self):
        text = make_csv(["x", "y"], [[1, "a"], [2, "b"], [3, "c"]])
        with pytest.raises(SchemaError):
            ingest_csv(text, "y", "a")

    def test_ragged_row_names_index(self):
        text = "a,b\n1,2\n3\n"
        with pytest.raises(ParseError, match="row 3"):
            ingest_csv(text, "b", "2")

    def test_empty_dataset(self):
        with pytest.raises(SchemaError):
            ingest_csv("a,b\n", "b", "x")

    def test_missing_values(self):
        text = "age,job,y\n10,,yes\n,Cook,no\n30,Cook,yes\n"
        ds = ingest_csv(text, "y", "yes")
        assert ds.rows[0][1] == "Unknown"
        assert ds.rows[1][0] == 20.0  # median of 10, 30

    def test_encoding_first_appearance_and_roundtrip(self, tiny_ds):
        assert tiny_ds.encode_value("sex", "Male") == 0
        assert tiny_ds.encode_value("sex", "Female") == 1
        for col in tiny_ds.schema.columns:
            if col.kind == "categorical":
                for v in col.domain:
                    assert tiny_ds.decode_value(col.name, tiny_ds.encode_value(col.name, v)) == v

    def test_kind_override(self):
        text = make_csv(["zip", "y"], [[10001, "a"], [90210, "b"], [10001, "a"]])
        ds = ingest_csv(text, "y", "a", kind_overrides={"zip": "categorical"})
        assert ds.schema.column("zip").kind == "categorical"

    def test_rfc4180_quoting(self):
        text = 'name,y\n"Smith, Jane",yes\n"O""Brien",no\n'
        ds = ingest_csv(text, "y", "yes")
        assert ds.rows[0][0] == "Smith, Jane"
        assert ds.rows[1][0] == 'O"Brien'


class TestProtected:
    def test_set_protected(self, tiny_ds):
        ds = set_protected(tiny_ds, "sex", ["Male", "Female"])
        assert ds.schema.protected_column == "sex"
        assert ds.schema.protected_groups == ("Male", "Female")

    def test_numeric_column_rejected(self, tiny_ds):
        with pytest.raises(SchemaError):
            set_protected(tiny_ds, "age", ["25", "40"])

    def test_unknown_value_rejected(self, tiny_ds):
        with pytest.raises(SchemaError):
            set_protected(tiny_ds, "sex", ["Male", "Other"])


class TestSplit:
    def test_sizes_small(self):
        text = make_csv(["x", "y"], [[i, "a" if i % 2 else "b"] for i in range(10)])
        ds = ingest_csv(text, "y", "a")
        sp = split_80_20(ds, 1)
        assert len(sp.train) == 8 and len(sp.test) == 2

    def test_adult_scale_sizes(self):
        # round(0.8 * 48842) = 39074
        n = 48842
        assert int(n * 0.8 + 0.5) == 39074 and n - 39074 == 9768

    def test_determinism_and_partition(self):
        text = make_csv(["x", "y"], [[i, "a" if i % 2 else "b"] for i in range(23)])
        ds = ingest_csv(text, "y", "a")
        s1, s2 = split_80_20(ds, 7), split_80_20(ds, 7)
        assert s1.train.rows == s2.train.rows and s1.test.rows == s2.test.rows
        assert sorted(s1.train.rows + s1.test.rows) == sorted(ds.rows)
        assert not set(s1.train.rows) & set(s1.test.rows)

    def test_too_small(self):
        text = make_csv(["x", "y"], [[1, "a"], [2, "b"], [3, "a"]])
        ds = ingest_csv(text, "y", "a")
        with pytest.raises(SizeError):
            split_80_20(ds, 0)


class TestCramersV:
    def test_copy_of_protected_is_one(self):
        x = ["a", "b", "a", "b", "a", "b"] * 10
        assert cramers_v(x, x) == pytest.approx(1.0)

    def test_independent_is_small(self):
        # oracle: sample from independent marginals, V should be near 0
        rng = random.Random(0)
        x = [rng.choice("abc") for _ in range(10000)]
        y = [rng.choice("MF") for _ in range(10000)]
        assert cramers_v(x, y) < 0.05

    def test_constant_column_is_zero(self):
        assert cramers_v(["k"] * 50, ["a", "b"] * 25) == 0.0

    def test_relabeling_invariance(self):
        rng = random.Random(1)
        x = [rng.choice("abcd") for _ in range(500)]
        y = [rng.choice("MF") for _ in range(500)]
        relabel = {"a": "z", "b": "q", "c": "w", "d": "e"}
        assert cramers_v(x, y) == pytest.approx(
            cramers_v([relabel[v] for v in x], y))

    @given(st.lists(st.tuples(st.sampled_from("abc"), st.sampled_from("MF")),
                    min_size=2, max_size=200))
    @settings(max_examples=50, deadline=None)
    def test_bounded(self, pairs):
        x = [p[0] for p in pairs]
        y = [p[1] for p in pairs]
        assert 0.0 <= cramers_v(x, y) <= 1.0


class TestInteractions:
    def test_proxy_column_high_score(self):
        ds = ingest_csv(synthetic_adult_csv(), "income", ">50K")
        ds = set_protected(ds, "sex", ["Male", "Female"])
        report = interactions(ds)
        by_col = {c["column"]: c for c in report["columns"]}
        assert by_col["relationship"]["association_score"] > 0.7
        assert by_col["workclass"]["association_score"] < 0.1
        husband = next(h for h in by_col["relationship"]["histogram"]
                       if h["value"] == "Husband")
        assert husband["proportions"]["Male"] == pytest.approx(1.0)

    def test_histogram_rows_sum_to_one(self, adult_ds):
        report = interactions(adult_ds)
        for col in report["columns"]:
            for h in col["histogram"]:
                assert sum(h["proportions"].values()) == pytest.approx(1.0, abs=1e-9)

    def test_numeric_column_binned(self, adult_ds):
        report = interactions(adult_ds)
        by_col = {c["column"]: c for c in report["columns"]}
        assert 1 <= len(by_col["age"]["histogram"]) <= 4
        assert 0.0 <= by_col["age"]["association_score"] <= 1.0

    def test_requires_protected(self, tiny_ds):
        with pytest.raises(SchemaError):
            interactions(tiny_ds)


class TestMask:
    def test_targeted_mask(self, adult_ds):
        masked = mask(adult_ds, "relationship", ["Husband", "Wife"])
        vals = set(masked.column_values("relationship"))
        assert MASK_TOKEN in vals
        assert "Husband" not in vals and "Wife" not in vals
        assert "Unmarried" in vals

    def test_full_mask_kills_association(self, adult_ds):
        masked = mask(adult_ds, "relationship")
        report = interactions(masked)
        by_col = {c["column"]: c for c in report["columns"]}
        assert by_col["relationship"]["association_score"] == 0.0

    def test_mask_label_rejected(self, adult_ds):
        with pytest.raises(UsageError):
            mask(adult_ds, "income")

    def test_mask_protected_rejected(self, adult_ds):
        with pytest.raises(UsageError):
            mask(adult_ds, "sex")

    def test_idempotent(self, adult_ds):
        once = mask(adult_ds, "relationship", ["Husband", "Wife"])
        twice = mask(once, "relationship", ["Husband", "Wife"])
        assert once.rows == twice.rows
        assert once.schema == twice.schema


def test_immutability(adult_ds):
    before = adult_ds.rows
    mask(adult_ds, "relationship", ["Husband"])
    set_protected(adult_ds, "relationship", ["Husband", "Wife"])
    assert adult_ds.rows is before
