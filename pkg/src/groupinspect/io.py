"""File formats: data panels (CSV), groupings (JSON) and result tables."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable

import numpy as np

from .model import Grouping

MISSING_TOKENS = {"", "na", "nan", "null", "none", "?"}


class InputError(ValueError):
    """Malformed input file; the message carries the location."""


def _parse_float(cell: str) -> float | None:
    try:
        value = float(cell)
    except ValueError:
        return None
    return value


def read_panel(path, header: str = "auto") -> tuple[np.ndarray, list[str] | None]:
    """Read a p x n panel: one row per coordinate, one column per time point.

    ``header`` is ``"auto"`` (first row is a header when none of its cells
    parse as numbers), ``"yes"`` or ``"no"``. Missing or non-numeric cells
    raise :class:`InputError` naming the row and column (1-based, counting
    file lines).
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh)]
    if not rows:
        raise InputError(f"{path}: file is empty")

    labels = None
    first = 0
    if header == "yes" or (
        header == "auto" and all(_parse_float(c.strip()) is None for c in rows[0])
    ):
        labels = [c.strip() for c in rows[0]]
        first = 1
    elif header not in ("auto", "no"):
        raise ValueError(f"header must be auto, yes or no, not {header!r}")

    data = []
    width = None
    for lineno, row in enumerate(rows[first:], start=first + 1):
        if not row or all(not c.strip() for c in row):
            continue
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise InputError(
                f"{path}: row {lineno} has {len(row)} columns, expected {width}"
            )
        values = []
        for col, cell in enumerate(row, start=1):
            text = cell.strip()
            if text.lower() in MISSING_TOKENS:
                raise InputError(
                    f"{path}: missing value at row {lineno}, column {col}; "
                    "remove or impute incomplete series before detection"
                )
            value = _parse_float(text)
            if value is None or not math.isfinite(value):
                raise InputError(
                    f"{path}: cannot parse {text!r} as a number at row {lineno}, column {col}"
                )
            values.append(value)
        data.append(values)
    if not data:
        raise InputError(f"{path}: no data rows")
    if labels is not None and len(labels) != width:
        raise InputError(f"{path}: header has {len(labels)} columns, data has {width}")
    return np.array(data, dtype=float), labels


def write_panel(path, X: np.ndarray) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        for row in X:
            w.writerow([repr(float(v)) for v in row])


def read_grouping(path, p: int) -> Grouping:
    """Grouping from a JSON array of arrays of 1-based coordinate indices."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}") from exc
    if isinstance(raw, dict) and "groups" in raw:
        raw = raw["groups"]
    if not isinstance(raw, list) or not all(isinstance(g, list) for g in raw):
        raise InputError(f"{path}: expected a JSON array of index arrays")
    for gi, g in enumerate(raw, start=1):
        if not all(isinstance(j, int) and not isinstance(j, bool) for j in g):
            raise InputError(f"{path}: group {gi} contains non-integer indices")
    return Grouping.from_one_based(raw, p)


def write_grouping(path, grouping: Grouping) -> None:
    Path(path).write_text(json.dumps(grouping.to_one_based()) + "\n", encoding="utf-8")


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    if isinstance(v, bool):
        return str(int(v))
    return v


def write_rows(path, fieldnames: list[str], rows: Iterable[dict]) -> None:
    """RFC 4180 CSV with a header; floats in shortest round-trip form."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=fieldnames, extrasaction="ignore")
        w.writeheader()
        for row in rows:
            w.writerow({k: _fmt(row.get(k, "")) for k in fieldnames})


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")
