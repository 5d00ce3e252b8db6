"""Single change-point estimation, plain and sample-splitting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cusum import _cusum, cusum_transform
from .fw_solver import FwConfig, solve_penalized_fw
from .groupnorm import PenalizedSolution, group_soft_threshold
from .model import Grouping, as_panel
from .projection import ProjectionEstimate, leading_left_singular_vector


@dataclass(frozen=True)
class SingleCpResult:
    z_hat: int
    t_max: float
    v_hat: ProjectionEstimate | None
    degenerate: bool = False
    solution: PenalizedSolution | None = None


def estimate_direction(T: np.ndarray, grouping: Grouping, lam: float,
                       fw_config: FwConfig | None = None):
    """Solve the penalised problem on a CUSUM matrix and project.

    Returns ``(solution, projection)``; ``projection`` is None when the
    solution is degenerate (all-zero T or every block thresholded away).
    """
    if grouping.non_overlapping:
        sol = group_soft_threshold(T, grouping, lam)
    elif not np.any(T):
        sol = PenalizedSolution(np.zeros_like(T), True, 0.0)
    else:
        cfg = fw_config if fw_config is not None else FwConfig(lam)
        if cfg.lam != lam:
            cfg = FwConfig(lam, cfg.epsilon, cfg.max_iter, cfg.record_trace)
        sol = solve_penalized_fw(T, grouping, cfg)
    if sol.degenerate:
        return sol, None
    return sol, leading_left_singular_vector(sol.m_hat)


def _argmax_abs(projected: np.ndarray) -> int:
    # np.argmax returns the first maximiser: ties go to the smallest t
    return int(np.argmax(np.abs(projected)))


def single_changepoint(X, grouping: Grouping, lam: float,
                       fw_config: FwConfig | None = None) -> SingleCpResult:
    """Locate one change-point by projecting the CUSUM matrix.

    Returns ``z_hat`` in 1..n-1 maximising ``|v_hat^T T_t|`` and that maximum
    as ``t_max``. A degenerate direction estimate gives ``t_max = 0`` with the
    placeholder ``z_hat = n // 2``.
    """
    X = as_panel(X)
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    return _single_from_panel(X, grouping, lam, fw_config)


def _single_from_panel(X, grouping, lam, fw_config=None) -> SingleCpResult:
    T = _cusum(X)
    sol, proj = estimate_direction(T, grouping, lam, fw_config)
    if proj is None:
        return SingleCpResult(X.shape[1] // 2, 0.0, None, True, sol)
    projected = proj.v_hat @ T
    t = _argmax_abs(projected)
    return SingleCpResult(t + 1, float(abs(projected[t])), proj, False, sol)


def split_changepoint(X, grouping: Grouping, lam: float,
                      fw_config: FwConfig | None = None) -> SingleCpResult:
    """Sample-splitting variant.

    The direction is estimated from odd time points (1, 3, 5, ...) and the
    change located on the CUSUM of even time points, so ``z_hat`` is even.
    For odd ``n`` the final column is dropped.
    """
    X = as_panel(X)
    if X.shape[1] < 4:
        raise ValueError("sample splitting needs n >= 4")
    n1 = X.shape[1] // 2
    X = X[:, : 2 * n1]
    X_odd, X_even = X[:, 0::2], X[:, 1::2]
    T1 = cusum_transform(X_odd)
    T2 = cusum_transform(X_even)
    sol, proj = estimate_direction(T1, grouping, lam, fw_config)
    if proj is None:
        return SingleCpResult(2 * (n1 // 2), 0.0, None, True, sol)
    projected = proj.v_hat @ T2
    t = _argmax_abs(projected)
    return SingleCpResult(2 * (t + 1), float(abs(projected[t])), proj, False, sol)
