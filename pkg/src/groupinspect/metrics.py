"""Evaluation metrics for direction and location estimates."""

from __future__ import annotations

import csv
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np


def sin_angle_loss(v_hat, v, tol: float = 1e-6) -> float:
    """Sine of the angle between unit vectors, sqrt(1 - <v_hat, v>^2)."""
    v_hat = np.asarray(v_hat, dtype=float)
    v = np.asarray(v, dtype=float)
    for name, x in (("v_hat", v_hat), ("v", v)):
        if abs(np.linalg.norm(x) - 1.0) > tol:
            raise ValueError(f"{name} is not a unit vector")
    c = float(v_hat @ v)
    if c * c > 0.5:
        # the residual of v_hat off v keeps precision for tiny angles
        return float(min(np.linalg.norm(v_hat - c * v), 1.0))
    return float(np.sqrt(max(1.0 - c * c, 0.0)))


def location_error(estimates: Sequence[int], z: int) -> float:
    """Mean absolute deviation of the estimates from the true location."""
    est = np.asarray(estimates, dtype=float)
    if est.size == 0:
        raise ValueError("no estimates given")
    return float(np.mean(np.abs(est - z)))


def segment_labels(change_points: Sequence[int], n: int) -> np.ndarray:
    """Label time points 1..n by segment id; a change at b splits after b."""
    cps = np.asarray(sorted(change_points), dtype=np.int64)
    if cps.size and (cps[0] < 1 or cps[-1] > n - 1 or np.any(np.diff(cps) <= 0)):
        raise ValueError(f"change-points must be distinct and within [1, {n - 1}]")
    t = np.arange(1, n + 1)
    return np.searchsorted(cps, t, side="left")


def _comb2(x):
    return x * (x - 1) / 2.0


def adjusted_rand_index(seg_a, seg_b, n: int) -> float:
    """ARI between the partitions of 1..n induced by two segmentations.

    Either argument may be a list of change-points or any object with a
    ``change_points`` attribute. When the chance adjustment is 0/0 (e.g. both segmentations empty) the
    value is 1 for identical partitions and 0 otherwise.
    """
    la = segment_labels(getattr(seg_a, "change_points", seg_a), n)
    lb = segment_labels(getattr(seg_b, "change_points", seg_b), n)
    table = np.zeros((la.max() + 1, lb.max() + 1))
    np.add.at(table, (la, lb), 1)
    sum_ij = _comb2(table).sum()
    sum_a = _comb2(table.sum(axis=1)).sum()
    sum_b = _comb2(table.sum(axis=0)).sum()
    total = _comb2(float(n))
    expected = sum_a * sum_b / total if total else 0.0
    max_index = 0.5 * (sum_a + sum_b)
    denom = max_index - expected
    if denom == 0:
        return 1.0 if np.array_equal(la, lb) else 0.0
    return float((sum_ij - expected) / denom)


REPORT_FIELDS = ("loss", "abs_error", "ari")


@dataclass
class EvaluationReport:
    """Per-replicate metric records with mean and median summaries.

    Any metric may be missing from a record (stored as ``None``).
    """

    records: list[dict] = field(default_factory=list)

    def add(self, loss: float | None = None, abs_error: float | None = None,
            ari: float | None = None) -> None:
        if loss is not None and not -1e-12 <= loss <= 1.0 + 1e-12:
            raise ValueError("loss must lie in [0, 1]")
        if ari is not None and ari > 1.0 + 1e-12:
            raise ValueError("ARI cannot exceed 1")
        self.records.append({"loss": loss, "abs_error": abs_error, "ari": ari})

    def summary(self) -> dict:
        out = {}
        for f in REPORT_FIELDS:
            vals = [r[f] for r in self.records if r[f] is not None]
            out[f"mean_{f}"] = float(np.mean(vals)) if vals else None
            out[f"median_{f}"] = float(np.median(vals)) if vals else None
        return out

    def write_csv(self, path) -> None:
        """One row per replicate, then a row labelled ``mean`` and one ``median``."""
        def cell(v):
            return "" if v is None else repr(float(v))

        summary = self.summary()
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["replicate", *REPORT_FIELDS])
            for i, r in enumerate(self.records):
                w.writerow([i, *(cell(r[f]) for f in REPORT_FIELDS)])
            for agg in ("mean", "median"):
                w.writerow([agg, *(cell(summary[f"{agg}_{f}"]) for f in REPORT_FIELDS)])
