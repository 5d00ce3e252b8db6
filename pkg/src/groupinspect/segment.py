"""Multiple change-points by wild binary segmentation over random intervals."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .fw_solver import FwConfig
from .locate import SingleCpResult, _single_from_panel, single_changepoint
from .model import Grouping, as_panel, rng_from_seed
from .preprocess import standardize


@dataclass(frozen=True)
class WbsConfig:
    xi: float
    Q: int = 1000
    seed: int = 0
    min_len: int = 2

    def __post_init__(self):
        if self.Q < 0:
            raise ValueError("Q must be nonnegative")
        if self.xi < 0:
            raise ValueError("xi must be nonnegative")
        if self.min_len < 2:
            raise ValueError("min_len must be at least 2")


@dataclass(frozen=True)
class IntervalRecord:
    """An admitted point: search range (s, e], winning interval q = (start, end]."""

    s: int
    e: int
    q: int
    start: int
    end: int
    z_local: int
    statistic: float
    b: int


@dataclass(frozen=True)
class Candidate:
    q: int
    start: int
    end: int
    result: SingleCpResult


@dataclass
class Segmentation:
    n: int
    change_points: list[int] = field(default_factory=list)
    interval_log: list[IntervalRecord] = field(default_factory=list)
    # every interval scanned during the search, in draw order; not serialised
    candidates: list[Candidate] = field(default_factory=list, compare=False, repr=False)

    def __post_init__(self):
        cps = [int(b) for b in self.change_points]
        if cps != sorted(set(cps)):
            raise ValueError("change-points must be strictly increasing")
        if cps and (cps[0] < 1 or cps[-1] > self.n - 1):
            raise ValueError(f"change-points must lie in [1, {self.n - 1}]")
        self.change_points = cps

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "change_points": self.change_points,
            "interval_log": [vars(r) for r in self.interval_log],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "Segmentation":
        log = [IntervalRecord(**r) for r in d.get("interval_log", [])]
        return cls(int(d["n"]), list(d["change_points"]), log)

    @classmethod
    def from_json(cls, text: str) -> "Segmentation":
        return cls.from_dict(json.loads(text))


def draw_intervals(n: int, Q: int, seed: int, min_len: int = 2) -> np.ndarray:
    """Q pairs (l, r) uniform on {0 <= l < r <= n, r - l >= min_len}."""
    rng = rng_from_seed(seed)
    out = np.empty((0, 2), dtype=np.int64)
    if n < min_len:
        return out
    while out.shape[0] < Q:
        need = Q - out.shape[0]
        cand = rng.integers(0, n + 1, size=(2 * need + 16, 2))
        keep = cand[cand[:, 1] - cand[:, 0] >= min_len]
        out = np.vstack([out, keep[:need]])
    return out


class _CandidateCache:
    def __init__(self, X, grouping, lam, intervals, fw_config):
        self.X = X
        self.grouping = grouping
        self.lam = lam
        self.intervals = intervals
        self.fw_config = fw_config
        self.cache: dict[int, SingleCpResult] = {}

    def __call__(self, q: int) -> SingleCpResult:
        res = self.cache.get(q)
        if res is None:
            s, e = self.intervals[q]
            res = _single_from_panel(self.X[:, s:e], self.grouping, self.lam,
                                     self.fw_config)
            self.cache[q] = res
        return res


def wbs_detect(X, grouping: Grouping, lam: float, config: WbsConfig,
               fw_config: FwConfig | None = None) -> Segmentation:
    """Recursive interval search admitting candidates with statistic >= xi.

    Within ``(s, e]`` every drawn interval nested in it is scanned with
    ``single_changepoint``; the one with the largest statistic (smallest
    index on ties) proposes ``b = s_q + z_hat``. If admitted, the search
    recurses on ``(s, b]`` and ``(b, e]``.
    """
    X = as_panel(X)
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    n = X.shape[1]
    intervals = draw_intervals(n, config.Q, config.seed, config.min_len)
    candidate = _CandidateCache(X, grouping, lam, intervals, fw_config)
    found: list[int] = []
    log: list[IntervalRecord] = []

    stack = [(0, n)]
    while stack:
        s, e = stack.pop()
        inside = np.flatnonzero((intervals[:, 0] >= s) & (intervals[:, 1] <= e))
        if inside.size == 0:
            continue
        best_q, best = -1, None
        for q in inside:
            res = candidate(int(q))
            if best is None or res.t_max > best.t_max:
                best_q, best = int(q), res
        if best.degenerate or best.t_max < config.xi:
            continue
        b = int(intervals[best_q, 0]) + best.z_hat
        found.append(b)
        start, end = (int(x) for x in intervals[best_q])
        log.append(IntervalRecord(s, e, best_q, start, end, best.z_hat, best.t_max, b))
        stack.append((b, e))
        stack.append((s, b))

    order = np.argsort(found, kind="stable")
    scanned = [Candidate(q, int(intervals[q, 0]), int(intervals[q, 1]), res)
               for q, res in sorted(candidate.cache.items())]
    return Segmentation(n, [found[i] for i in order], [log[i] for i in order], scanned)


def calibrate_threshold(
    n: int,
    p: int,
    grouping: Grouping,
    lam: float,
    n_null: int = 1000,
    quantile: float = 1.0,
    seed: int = 0,
    standardize_rows: bool = True,
    fw_config: FwConfig | None = None,
) -> float:
    """Empirical quantile of the single change-point statistic under no change.

    Replicate ``i`` draws an N(0, I) panel from seed ``seed + i``; with the
    default ``quantile=1`` the maximum over replicates is returned.
    """
    stats = null_statistics(n, p, grouping, lam, n_null, seed, standardize_rows,
                            fw_config)
    return empirical_quantile(stats, quantile)


def null_statistics(n, p, grouping, lam, n_null, seed, standardize_rows=True,
                    fw_config=None) -> np.ndarray:
    if n_null < 1:
        raise ValueError("n_null must be at least 1")
    if grouping.p != p:
        raise ValueError("grouping dimension does not match p")
    out = np.empty(n_null)
    for i in range(n_null):
        X = rng_from_seed(seed + i).standard_normal((p, n))
        if standardize_rows:
            X = standardize(X)
        out[i] = single_changepoint(X, grouping, lam, fw_config).t_max
    return out


def empirical_quantile(values, quantile: float) -> float:
    if not 0.0 < quantile <= 1.0:
        raise ValueError("quantile must lie in (0, 1]")
    return float(np.quantile(np.asarray(values, dtype=float), quantile,
                             method="inverted_cdf"))
