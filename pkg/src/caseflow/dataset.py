"""Rectangular numeric case data: parsing, validation, subsetting.

A dataset is rows-as-cases, columns-as-profile-elements. Only numeric
values are accepted; anything else is rejected at parse time with the
offending cell located.
"""

from __future__ import annotations

import csv
import hashlib
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DuplicateIds,
    EmptyInput,
    NonNumericCell,
    RaggedRows,
    UnknownFeature,
)

SEPARATORS = (",", ";", "\t")


@dataclass(frozen=True)
class CaseDataset:
    """Immutable case-by-feature matrix with identifiers.

    ``values`` is an (n_cases, n_features) float array; every entry is
    finite. Case ids and feature names are unique.
    """

    case_ids: tuple[str, ...]
    feature_names: tuple[str, ...]
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        vals.setflags(write=False)
        object.__setattr__(self, "case_ids", tuple(str(c) for c in self.case_ids))
        object.__setattr__(self, "feature_names", tuple(str(f) for f in self.feature_names))
        object.__setattr__(self, "values", vals)
        if vals.ndim != 2:
            raise ValueError("values must be a 2-D matrix")
        n, m = vals.shape
        if len(self.case_ids) != n:
            raise ValueError("case_ids length does not match row count")
        if len(self.feature_names) != m:
            raise ValueError("feature_names length does not match column count")
        if len(set(self.case_ids)) != n:
            raise DuplicateIds("case ids are not unique")
        if len(set(self.feature_names)) != m:
            raise DuplicateIds("feature names are not unique")
        if vals.size and not np.all(np.isfinite(vals)):
            raise NonNumericCell(-1, "?", "non-finite")

    @property
    def n_cases(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, CaseDataset):
            return NotImplemented
        return (
            self.case_ids == other.case_ids
            and self.feature_names == other.feature_names
            and self.values.shape == other.values.shape
            and bool(np.array_equal(self.values, other.values))
        )

    def to_dict(self) -> dict:
        return {
            "case_ids": list(self.case_ids),
            "feature_names": list(self.feature_names),
            "values": [[float(v) for v in row] for row in self.values],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CaseDataset":
        return cls(
            case_ids=tuple(d["case_ids"]),
            feature_names=tuple(d["feature_names"]),
            values=np.asarray(d["values"], dtype=float).reshape(
                len(d["case_ids"]), len(d["feature_names"])
            ),
        )


def _parse_cell(text: str, row: int, column: str) -> float:
    stripped = text.strip()
    if stripped == "":
        raise NonNumericCell(row, column, text)
    try:
        value = float(stripped)
    except ValueError:
        raise NonNumericCell(row, column, text) from None
    if not np.isfinite(value):
        raise NonNumericCell(row, column, text)
    return value


def parse_csv(
    raw: bytes | str,
    *,
    has_header: bool = True,
    separator: str = ",",
    id_column: str | int | None = None,
) -> CaseDataset:
    """Parse CSV bytes/text into a :class:`CaseDataset`.

    Rows are cases, columns are profile elements. Without a header row the
    features are named ``V1..Vm``; without an id column the cases are
    named ``1..n`` in file order.
    """
    if separator not in SEPARATORS:
        raise ValueError(f"separator must be one of {SEPARATORS!r}")
    text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    rows = [r for r in csv.reader(io.StringIO(text), delimiter=separator)]
    rows = [r for r in rows if any(cell.strip() for cell in r)]
    if not rows:
        raise EmptyInput("no data rows found")

    width = len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != width:
            raise RaggedRows(i + 1, width, len(r))

    if has_header:
        header = [h.strip() for h in rows[0]]
        body = rows[1:]
    else:
        header = [f"V{j + 1}" for j in range(width)]
        body = rows
    if not body:
        raise EmptyInput("no data rows after header")

    id_idx: int | None = None
    if id_column is not None:
        if isinstance(id_column, int):
            if not 0 <= id_column < width:
                raise UnknownFeature(f"id column index {id_column} out of range")
            id_idx = id_column
        else:
            if id_column not in header:
                raise UnknownFeature(f"id column {id_column!r} not in header")
            id_idx = header.index(id_column)

    feature_names = [h for j, h in enumerate(header) if j != id_idx]
    case_ids = []
    data = []
    for i, r in enumerate(body):
        if id_idx is not None:
            case_ids.append(r[id_idx].strip())
        else:
            case_ids.append(str(i + 1))
        vals = []
        for j, cell in enumerate(r):
            if j == id_idx:
                continue
            vals.append(_parse_cell(cell, i + 1, header[j]))  # 1-based data row
        data.append(vals)

    if len(set(case_ids)) != len(case_ids):
        seen, dups = set(), []
        for c in case_ids:
            if c in seen:
                dups.append(c)
            seen.add(c)
        raise DuplicateIds(f"duplicate case ids: {sorted(set(dups))}")

    return CaseDataset(
        case_ids=tuple(case_ids),
        feature_names=tuple(feature_names),
        values=np.asarray(data, dtype=float),
    )


def serialize_csv(data: CaseDataset, *, separator: str = ",", id_column: str = "id") -> str:
    """Write a dataset back to CSV text (header + id column included).

    Floats use ``repr`` so parse -> serialize -> parse round-trips exactly.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter=separator, lineterminator="\n")
    writer.writerow([id_column, *data.feature_names])
    for cid, row in zip(data.case_ids, data.values):
        writer.writerow([cid, *(repr(float(v)) for v in row)])
    return buf.getvalue()


def subset_features(data: CaseDataset, keep: list[str]) -> CaseDataset:
    """Keep only the named features, in ``keep`` order."""
    if not keep:
        raise UnknownFeature("keep list is empty")
    missing = [f for f in keep if f not in data.feature_names]
    if missing:
        raise UnknownFeature(f"unknown features: {missing}")
    idx = [data.feature_names.index(f) for f in keep]
    return CaseDataset(
        case_ids=data.case_ids,
        feature_names=tuple(keep),
        values=data.values[:, idx],
    )


def dataset_fingerprint(data: CaseDataset) -> str:
    """Stable sha256 over the canonical CSV serialization."""
    return hashlib.sha256(serialize_csv(data).encode("utf-8")).hexdigest()
