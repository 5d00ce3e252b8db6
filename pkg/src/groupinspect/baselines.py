"""Comparator estimators: inspect and simple CUSUM aggregations.

The l2 / l-infinity aggregates are simplified argmax-of-aggregated-CUSUM
forms; they omit the extra normalisations of the original test statistics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cusum import cusum_transform
from .locate import SingleCpResult, single_changepoint
from .model import Grouping, as_panel
from .tuning import inspect_lambda


@dataclass(frozen=True)
class BaselineResult:
    z_hat: int
    statistic: float


def inspect_single(X, lam: float | None = None) -> SingleCpResult:
    """groupInspect with singleton groups, i.e. entrywise soft-thresholding."""
    X = as_panel(X)
    p, n = X.shape
    if lam is None:
        lam = inspect_lambda(n, p)
    return single_changepoint(X, Grouping.singletons(p), lam)


def _aggregate(X, reduce) -> BaselineResult:
    T = cusum_transform(X)
    stat = reduce(T)
    t = int(np.argmax(stat))
    return BaselineResult(t + 1, float(stat[t]))


def l2_aggregate(X) -> BaselineResult:
    return _aggregate(X, lambda T: np.linalg.norm(T, axis=0))


def linf_aggregate(X) -> BaselineResult:
    return _aggregate(X, lambda T: np.abs(T).max(axis=0))
