"""CSV ingestion and stream dump tests."""
from __future__ import annotations

import csv

import pytest

from skewstream.ingest import (
    CsvFormatError,
    CsvSchema,
    dump_schema,
    dump_stream,
    load_csv_stream,
)
from skewstream.labels import NEG, POS
from skewstream.presets import preset_schedule
from skewstream.streams import StreamGenerator


def write_rows(path, rows, header=None):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow(header)
        w.writerows(rows)


def test_three_row_file_loads_in_order(tmp_path):
    path = tmp_path / "small.csv"
    write_rows(
        path,
        [[0.1, 0.2, "spam"], [0.3, 0.4, "ham"], [0.5, 0.6, "spam"]],
        header=["a", "b", "kind"],
    )
    schema = CsvSchema(
        feature_cols=("a", "b"), label_col="kind", positive_token="spam",
        negative_token="ham", scale=False,
    )
    examples = load_csv_stream(path, schema)
    assert [ex.t for ex in examples] == [1, 2, 3]
    assert [ex.label for ex in examples] == [POS, NEG, POS]
    assert examples[0].features == (0.1, 0.2)


def test_unknown_label_token_names_row(tmp_path):
    path = tmp_path / "bad_label.csv"
    write_rows(path, [[1, "yes"], [2, "no"], [3, "maybe"]], header=["x", "y"])
    schema = CsvSchema(
        feature_cols=("x",), label_col="y", positive_token="yes",
        negative_token="no",
    )
    with pytest.raises(CsvFormatError, match="row 3"):
        load_csv_stream(path, schema)


def test_inferred_negative_token(tmp_path):
    path = tmp_path / "infer.csv"
    write_rows(path, [[1, "y"], [2, "n"], [3, "n"]], header=["x", "lab"])
    schema = CsvSchema(feature_cols=("x",), label_col="lab", positive_token="y")
    examples = load_csv_stream(path, schema)
    assert [ex.label for ex in examples] == [POS, NEG, NEG]
    # a third distinct token is still an error
    write_rows(path, [[1, "y"], [2, "n"], [3, "m"]], header=["x", "lab"])
    with pytest.raises(CsvFormatError, match="row 3"):
        load_csv_stream(path, schema)


def test_parse_error_names_row_and_column(tmp_path):
    path = tmp_path / "bad_number.csv"
    write_rows(path, [[1.0, "y"], ["oops", "n"]], header=["x", "lab"])
    schema = CsvSchema(feature_cols=("x",), label_col="lab", positive_token="y")
    with pytest.raises(CsvFormatError, match="row 2.*'x'"):
        load_csv_stream(path, schema)


def test_name_columns_require_header(tmp_path):
    path = tmp_path / "headerless.csv"
    write_rows(path, [[0.5, "y"], [0.7, "n"]])
    named = CsvSchema(
        feature_cols=("x",), label_col="lab", positive_token="y", has_header=False
    )
    with pytest.raises(CsvFormatError, match="no header"):
        load_csv_stream(path, named)
    indexed = CsvSchema(
        feature_cols=(0,), label_col=1, positive_token="y", negative_token="n",
        has_header=False, scale=False,
    )
    examples = load_csv_stream(path, indexed)
    assert len(examples) == 2
    assert examples[1].features == (0.7,)


def test_scaling_from_first_pass_and_declared_ranges(tmp_path):
    path = tmp_path / "scale.csv"
    write_rows(
        path,
        [[0.0, 5.0, "y"], [10.0, 5.0, "n"], [5.0, 5.0, "y"]],
        header=["a", "b", "lab"],
    )
    computed = CsvSchema(
        feature_cols=("a", "b"), label_col="lab", positive_token="y",
        negative_token="n",
    )
    examples = load_csv_stream(path, computed)
    assert [ex.features[0] for ex in examples] == [0.0, 1.0, 0.5]
    assert [ex.features[1] for ex in examples] == [0.0, 0.0, 0.0]  # constant col

    declared = CsvSchema(
        feature_cols=("a", "b"), label_col="lab", positive_token="y",
        negative_token="n", ranges=((0.0, 20.0), (0.0, 10.0)),
    )
    examples = load_csv_stream(path, declared)
    assert [ex.features[0] for ex in examples] == [0.0, 0.5, 0.25]
    assert [ex.features[1] for ex in examples] == [0.5, 0.5, 0.5]


def test_dump_then_load_round_trips(tmp_path):
    path = tmp_path / "stream.csv"
    stream = list(StreamGenerator(preset_schedule("sea-py"), seed=4))[:50]
    assert dump_stream(stream, path) == 50
    loaded = load_csv_stream(path, dump_schema(n_features=3))
    assert len(loaded) == 50
    for orig, back in zip(stream, loaded):
        assert back.t == orig.t
        assert back.label == orig.label
        assert back.features == orig.features  # repr round-trip is exact


def test_large_file_row_count(tmp_path):
    path = tmp_path / "tweets.csv"
    rows = [[i % 97 / 97.0, (i * 7) % 89 / 89.0, "pos" if i % 5 == 0 else "neg"]
            for i in range(8774)]
    write_rows(path, rows, header=["f1", "f2", "lab"])
    schema = CsvSchema(
        feature_cols=("f1", "f2"), label_col="lab", positive_token="pos",
        negative_token="neg",
    )
    assert len(load_csv_stream(path, schema)) == 8774


def test_schema_validation():
    with pytest.raises(ValueError):
        CsvSchema(feature_cols=(), label_col=0, positive_token="y")
    with pytest.raises(ValueError):
        CsvSchema(
            feature_cols=(0, 1), label_col=2, positive_token="y",
            ranges=((0.0, 1.0),),
        )
