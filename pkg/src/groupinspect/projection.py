"""Leading left singular vector by power iteration."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ProjectionEstimate:
    v_hat: np.ndarray
    iterations_used: int
    residual: float
    converged: bool = True


def _fix_sign(v: np.ndarray) -> np.ndarray:
    return -v if v[np.argmax(np.abs(v))] < 0 else v


def leading_left_singular_vector(
    M, tol: float = 1e-10, max_iter: int = 1000, seed: int = 0
) -> ProjectionEstimate:
    """Top left singular vector of ``M``, sign-normalised.

    Alternates ``u = M^T v / |.|`` and ``v = M u / |.|`` from the normalised
    row of largest norm. Rows and columns that are identically zero are
    dropped first (soft-thresholded inputs are mostly zero). The result has
    its largest-magnitude entry nonnegative.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise ValueError("M must be a matrix")
    rows = np.flatnonzero(np.any(M != 0, axis=1))
    if rows.size == 0:
        raise ValueError("M is the zero matrix")
    cols = np.flatnonzero(np.any(M[rows] != 0, axis=0))
    A = M[np.ix_(rows, cols)]

    row_norms = np.linalg.norm(A, axis=1)
    start = int(np.argmax(row_norms))
    # v starts as the indicator of that row: M^T v is then the row itself
    v = np.zeros(A.shape[0])
    v[start] = 1.0
    if np.linalg.norm(A.T @ v) == 0.0:  # pragma: no cover - unreachable after row filtering
        v = np.random.default_rng(seed).standard_normal(A.shape[0])
        v /= np.linalg.norm(v)

    converged = False
    delta = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        u = A.T @ v
        u /= np.linalg.norm(u)
        w = A @ u
        w /= np.linalg.norm(w)
        delta = float(np.linalg.norm(w - v))
        v = w
        if delta <= tol:
            converged = True
            break

    out = np.zeros(M.shape[0])
    out[rows] = v
    return ProjectionEstimate(_fix_sign(out), it, delta, converged)
