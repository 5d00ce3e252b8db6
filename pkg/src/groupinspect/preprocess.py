"""Row-wise noise scale estimation and standardisation."""

from __future__ import annotations

import numpy as np

from .model import as_panel

# E|N(0, 2 sigma^2)| = 2 sigma / sqrt(pi)
_MAD_DIFF_CONST = np.sqrt(np.pi) / 2.0


class ConstantRowError(ValueError):
    def __init__(self, row: int):
        self.row = row
        super().__init__(f"row {row + 1} is constant; its scale estimate is zero")


def estimate_row_sd(X) -> np.ndarray:
    """Per-row sigma estimate from the mean absolute successive difference.

    Returns ``sqrt(pi)/2 * mean_t |X[j, t+1] - X[j, t]|`` for each row, which is
    unbiased for sigma when the row is iid Gaussian.
    """
    X = as_panel(X, min_cols=3)
    sd = _MAD_DIFF_CONST * np.mean(np.abs(np.diff(X, axis=1)), axis=1)
    bad = np.flatnonzero(sd <= 0)
    if bad.size:
        raise ConstantRowError(int(bad[0]))
    return sd


def standardize(X, scale=None) -> np.ndarray:
    """Divide each row by its scale; estimates the scale when not given."""
    X = as_panel(X)
    if scale is None:
        scale = estimate_row_sd(X)
    scale = np.asarray(scale, dtype=float)
    if scale.shape != (X.shape[0],):
        raise ValueError(f"scale has shape {scale.shape}, expected ({X.shape[0]},)")
    if not np.all((scale > 0) & np.isfinite(scale)):
        raise ValueError("row scales must be positive and finite")
    return X / scale[:, None]
