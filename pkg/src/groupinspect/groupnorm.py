"""Group norm, its dual, and the closed-form penalised direction estimate."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Grouping, GroupingError


@dataclass(frozen=True)
class PenalizedSolution:
    """Maximiser of <T, M> - lam * ||M||_grp over the unit Frobenius ball."""

    m_hat: np.ndarray
    degenerate: bool
    objective: float
    iterations: int = 0
    converged: bool = True
    objective_trace: tuple[float, ...] = ()


def _check(M, grouping: Grouping) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M[:, None]
    if M.shape[0] != grouping.p:
        raise ValueError(f"matrix has {M.shape[0]} rows, grouping has p={grouping.p}")
    return M


def group_norm(M, grouping: Grouping) -> float:
    """Sum over groups of sqrt(p_g) times the sum of block column l2 norms."""
    M = _check(M, grouping)
    norms = grouping.block_norms(M)
    return float(np.sqrt(grouping.sizes) @ norms.sum(axis=1))


def group_dual_norm(R, grouping: Grouping) -> float:
    """Max over groups and columns of the block column norm over sqrt(p_g)."""
    R = _check(R, grouping)
    norms = grouping.block_norms(R)
    return float((norms / np.sqrt(grouping.sizes)[:, None]).max())


def penalized_objective(T, M, grouping: Grouping, lam: float) -> float:
    T = _check(T, grouping)
    M = _check(M, grouping)
    return float(np.vdot(T, M) - lam * group_norm(M, grouping))


def dual_witness(M, grouping: Grouping) -> np.ndarray:
    """R with unit dual norm and <R, M> = ||M||_grp (disjoint groups only).

    Each block column is ``sqrt(p_g) M_block / ||M_block||``; zero blocks stay
    zero.
    """
    M = _check(M, grouping)
    if not grouping.non_overlapping:
        raise GroupingError("the norming witness needs non-overlapping groups")
    norms = grouping.block_norms(M)
    scale = np.divide(np.sqrt(grouping.sizes)[:, None], norms,
                      out=np.zeros_like(norms), where=norms > 0)
    return M * scale[grouping.row_group]


def group_soft_threshold(T, grouping: Grouping, lam: float) -> PenalizedSolution:
    """Closed-form solution for non-overlapping groups.

    Every block column is shrunk towards zero by ``lam * sqrt(p_g)`` in l2
    norm (blocks at or below the threshold vanish) and the result is scaled
    to unit Frobenius norm. If nothing survives the solution is flagged
    degenerate and ``m_hat`` is zero.
    """
    T = _check(T, grouping)
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    if not grouping.non_overlapping:
        raise GroupingError(
            "closed form needs non-overlapping groups; use solve_penalized_fw"
        )
    if grouping.sizes.max() == 1:
        # singleton groups: plain entrywise soft-thresholding
        D = np.sign(T) * np.maximum(np.abs(T) - lam, 0.0)
        fro = np.linalg.norm(D)
    else:
        norms = grouping.block_norms(T)
        shrunk = np.maximum(norms - lam * np.sqrt(grouping.sizes)[:, None], 0.0)
        factor = np.divide(shrunk, norms, out=np.zeros_like(norms), where=shrunk > 0)
        D = T * factor[grouping.row_group]
        fro = float(np.sqrt(np.sum(shrunk * shrunk)))
    if fro == 0.0:
        return PenalizedSolution(np.zeros_like(T), True, 0.0)
    # at the optimum <T, M> - lam ||M||_grp = ||D||_F
    return PenalizedSolution(D / fro, False, float(fro))
