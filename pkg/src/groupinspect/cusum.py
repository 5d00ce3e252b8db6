"""CUSUM transformation of a p x n panel."""

from __future__ import annotations

import numpy as np

from .model import as_panel


def _kahan_cumsum(X: np.ndarray) -> np.ndarray:
    out = np.empty_like(X)
    acc = np.zeros(X.shape[0])
    comp = np.zeros(X.shape[0])
    for t in range(X.shape[1]):
        y = X[:, t] - comp
        s = acc + y
        comp = (s - acc) - y
        acc = s
        out[:, t] = acc
    return out


def cusum_transform(X, compensated: bool = False) -> np.ndarray:
    """Return the p x (n-1) CUSUM matrix.

    Entry (j, t) is ``sqrt(t (n-t) / n)`` times the difference between the
    mean of ``X[j, t:]`` and the mean of ``X[j, :t]`` (t = 1..n-1). Each row is
    shifted by its first value before accumulating, so constant rows map to
    exact zeros.
    """
    X = as_panel(X)
    return _cusum(X, compensated)


def _cusum(X: np.ndarray, compensated: bool = False) -> np.ndarray:
    n = X.shape[1]
    Y = X - X[:, :1]
    S = _kahan_cumsum(Y) if compensated else np.cumsum(Y, axis=1)
    total = S[:, -1:]
    left = S[:, :-1]
    t = np.arange(1, n, dtype=float)
    w = np.sqrt(t * (n - t) / n)
    return w * ((total - left) / (n - t) - left / t)
