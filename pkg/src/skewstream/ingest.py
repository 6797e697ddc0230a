"""Loading labeled streams from delimited files, and dumping streams to them.

The dump format is one example per line, `t,f1,...,fn,label`, with a header
row. Arbitrary external CSVs are loaded through a CsvSchema that names the
feature columns, the label column and the label tokens; features can be
rescaled to [0, 1] either from ranges declared in the schema or from a first
pass over the file.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .labels import NEG, POS
from .streams import Example


class CsvFormatError(ValueError):
    """A row failed to parse; the message names the row and column."""


@dataclass(frozen=True)
class CsvSchema:
    """How to interpret an external delimited file as a labeled stream.

    Columns may be header names (requires has_header) or 0-based indices.
    negative_token may be omitted, in which case the first non-positive token
    encountered is adopted as the negative class; any further distinct token
    is an error either way.
    """

    feature_cols: tuple
    label_col: object
    positive_token: str
    negative_token: str | None = None
    ranges: tuple[tuple[float, float], ...] | None = None  # per feature column
    delimiter: str = ","
    has_header: bool = True
    scale: bool = True

    def __post_init__(self) -> None:
        if len(self.feature_cols) == 0:
            raise ValueError("schema needs at least one feature column")
        if self.ranges is not None and len(self.ranges) != len(self.feature_cols):
            raise ValueError("ranges must match feature_cols one-to-one")


def _resolve_columns(schema: CsvSchema, header: list[str] | None):
    def resolve(col):
        if isinstance(col, int):
            return col
        if header is None:
            raise CsvFormatError(
                f"column {col!r} referenced by name but the file has no header"
            )
        try:
            return header.index(col)
        except ValueError:
            raise CsvFormatError(f"column {col!r} not found in header {header}")

    return [resolve(c) for c in schema.feature_cols], resolve(schema.label_col)


def load_csv_stream(path, schema: CsvSchema) -> list[Example]:
    """Read a delimited file into a list of examples, in file order.

    t is the 1-based data-row index. With scale=True features are mapped to
    [0, 1] using schema.ranges when declared, otherwise per-column min/max
    computed in a first pass (constant columns map to 0).
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh, delimiter=schema.delimiter))
    header = None
    if schema.has_header:
        if not rows:
            raise CsvFormatError(f"{path}: empty file, expected a header")
        header = [h.strip() for h in rows[0]]
        rows = rows[1:]
    feat_idx, label_idx = _resolve_columns(schema, header)

    negative_token = schema.negative_token
    raw: list[tuple[list[float], int]] = []
    for i, row in enumerate(rows, start=1):
        feats = []
        for j, col in enumerate(feat_idx):
            try:
                feats.append(float(row[col]))
            except (ValueError, IndexError):
                raise CsvFormatError(
                    f"{path}: row {i}, column {schema.feature_cols[j]!r}: "
                    f"cannot parse a number"
                )
        try:
            token = row[label_idx].strip()
        except IndexError:
            raise CsvFormatError(f"{path}: row {i}: missing label column")
        if token == schema.positive_token:
            label = POS
        elif negative_token is None:
            negative_token = token
            label = NEG
        elif token == negative_token:
            label = NEG
        else:
            raise CsvFormatError(
                f"{path}: row {i}: unknown label token {token!r} "
                f"(expected {schema.positive_token!r} or {negative_token!r})"
            )
        raw.append((feats, label))

    if schema.scale and raw:
        n = len(feat_idx)
        if schema.ranges is not None:
            lows = [r[0] for r in schema.ranges]
            highs = [r[1] for r in schema.ranges]
        else:
            lows = [min(f[j] for f, _ in raw) for j in range(n)]
            highs = [max(f[j] for f, _ in raw) for j in range(n)]
        spans = [hi - lo for lo, hi in zip(lows, highs)]
        for feats, _ in raw:
            for j in range(n):
                feats[j] = (feats[j] - lows[j]) / spans[j] if spans[j] > 0 else 0.0

    return [
        Example(t=i, features=tuple(feats), label=label)
        for i, (feats, label) in enumerate(raw, start=1)
    ]


def dump_stream(examples: Iterable[Example], path) -> int:
    """Write examples as `t,f1,...,fn,label` CSV with a header; returns row count."""
    path = Path(path)
    n_written = 0
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        header: list[str] | None = None
        for ex in examples:
            if header is None:
                header = ["t"] + [f"f{j + 1}" for j in range(len(ex.features))] + ["label"]
                writer.writerow(header)
            writer.writerow([ex.t, *[repr(v) for v in ex.features], ex.label])
            n_written += 1
        if header is None:  # no examples at all: still emit a minimal header
            writer.writerow(["t", "label"])
    return n_written


def dump_schema(n_features: int, scale: bool = False) -> CsvSchema:
    """Schema matching dump_stream's output (t column skipped)."""
    return CsvSchema(
        feature_cols=tuple(range(1, n_features + 1)),
        label_col=n_features + 1,
        positive_token=str(POS),
        negative_token=str(NEG),
        scale=scale,
    )
