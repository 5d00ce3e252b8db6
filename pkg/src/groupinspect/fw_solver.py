"""Frank-Wolfe iteration for the penalised problem with overlapping groups."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .groupnorm import PenalizedSolution
from .model import Grouping

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FwConfig:
    lam: float
    epsilon: float = 1e-6
    max_iter: int = 500
    record_trace: bool = False

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.lam < 0:
            raise ValueError("lam must be nonnegative")


class _Blocks:
    """Group membership in the form cheapest for repeated small products."""

    def __init__(self, grouping: Grouping, lam: float):
        A = grouping.indicator
        # dense products beat sparse ones by a wide margin on small panels
        self.A = A.toarray() if grouping.G * grouping.p <= 250_000 else A
        self.lam_g = lam * np.sqrt(grouping.sizes)

    def norms(self, M: np.ndarray) -> np.ndarray:
        return np.sqrt(np.maximum(self.A @ (M * M), 0.0))

    def penalty(self, norms: np.ndarray) -> float:
        return float(self.lam_g @ norms.sum(axis=1))

    def gradient(self, T: np.ndarray, M: np.ndarray, norms: np.ndarray) -> np.ndarray:
        lam_g = self.lam_g[:, None]
        w = np.divide(lam_g, norms, out=np.zeros_like(norms), where=norms > 0)
        return T - M * (self.A.T @ w)


def solve_penalized_fw(T, grouping: Grouping, config: FwConfig) -> PenalizedSolution:
    """Maximise <T, M> - lam ||M||_grp over the unit Frobenius ball.

    Starts at T / ||T||_F and moves towards the normalised generalised
    gradient with step 2 / (t + 2), projecting each iterate back onto the
    unit sphere. Stops once successive iterates differ by at most
    ``config.epsilon`` in Frobenius norm. Zero-norm block columns contribute
    nothing to the gradient.

    If ``max_iter`` is exhausted first the best iterate seen is returned
    with ``converged=False``.
    """
    T = np.asarray(T, dtype=float)
    if T.shape[0] != grouping.p:
        raise ValueError(f"T has {T.shape[0]} rows, grouping has p={grouping.p}")
    fro = np.linalg.norm(T)
    if fro == 0.0:
        raise ValueError("T is zero; the Frank-Wolfe start point is undefined")
    lam = config.lam

    blocks = _Blocks(grouping, lam)
    M = T / fro
    norms = blocks.norms(M)
    obj = float(np.vdot(T, M)) - blocks.penalty(norms)
    best_M, best_obj = M, obj
    trace = [obj] if config.record_trace else None
    converged = False
    it = 0
    for it in range(1, config.max_iter + 1):
        G = blocks.gradient(T, M, norms)
        g_norm = np.linalg.norm(G)
        if g_norm == 0.0:
            converged = True
            break
        step = 2.0 / (it + 2)
        M_tilde = (1.0 - step) * M + step * (G / g_norm)
        M_new = M_tilde / np.linalg.norm(M_tilde)
        moved = np.linalg.norm(M_new - M)
        M = M_new
        norms = blocks.norms(M)
        obj = float(np.vdot(T, M)) - blocks.penalty(norms)
        if trace is not None:
            trace.append(obj)
        if obj > best_obj:
            best_M, best_obj = M, obj
        if moved <= config.epsilon:
            converged = True
            break

    if converged:
        out_M, out_obj = M, obj
    else:
        log.debug("Frank-Wolfe stopped after %d iterations without converging", it)
        out_M, out_obj = best_M, best_obj
    return PenalizedSolution(
        out_M, False, out_obj, iterations=it, converged=converged,
        objective_trace=tuple(trace) if trace is not None else (),
    )
