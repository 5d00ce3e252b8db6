"""Data-generating model: groupings, change scenarios and a seeded generator.

Internally every index is 0-based; the JSON wire format uses 1-based
coordinate indices to match how groupings are usually written down.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse


class GroupingError(ValueError):
    """Grouping is malformed or does not cover all coordinates."""


class ScenarioError(ValueError):
    """Change scenario violates the model constraints."""


def as_panel(X, min_cols: int = 2) -> np.ndarray:
    """Validate a p x n data panel (rows = coordinates, columns = time)."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[np.newaxis, :]
    if X.ndim != 2:
        raise ValueError(f"expected a 2-d panel, got shape {X.shape}")
    p, n = X.shape
    if p < 1 or n < min_cols:
        raise ValueError(f"panel needs p >= 1 and n >= {min_cols}, got {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("panel contains non-finite values")
    return X


@dataclass(frozen=True, eq=False)
class Grouping:
    """G index sets over the p coordinates, possibly overlapping."""

    groups: tuple[np.ndarray, ...]
    p: int

    def __post_init__(self):
        if self.p < 1:
            raise GroupingError("p must be positive")
        if len(self.groups) == 0:
            raise GroupingError("grouping has no groups")
        cleaned = []
        covered = np.zeros(self.p, dtype=bool)
        for g, idx in enumerate(self.groups):
            idx = np.unique(np.asarray(idx, dtype=np.int64))
            if idx.size == 0:
                raise GroupingError(f"group {g + 1} is empty")
            if idx[0] < 0 or idx[-1] >= self.p:
                raise GroupingError(
                    f"group {g + 1} has indices outside [1, {self.p}]"
                )
            idx.setflags(write=False)
            cleaned.append(idx)
            covered[idx] = True
        if not covered.all():
            missing = np.flatnonzero(~covered)[:5] + 1
            raise GroupingError(
                f"grouping does not cover coordinates {missing.tolist()}"
                + ("..." if (~covered).sum() > 5 else "")
            )
        object.__setattr__(self, "groups", tuple(cleaned))

    @classmethod
    def from_one_based(cls, groups: Iterable[Sequence[int]], p: int | None = None):
        groups = [np.asarray(list(g), dtype=np.int64) - 1 for g in groups]
        if p is None:
            p = int(max(g.max() for g in groups if g.size)) + 1 if groups else 0
        return cls(tuple(groups), p)

    @classmethod
    def contiguous(cls, p: int, size: int) -> "Grouping":
        """Disjoint consecutive blocks of ``size`` coordinates (last may be short)."""
        if size < 1:
            raise GroupingError("group size must be positive")
        return cls(tuple(np.arange(a, min(a + size, p)) for a in range(0, p, size)), p)

    @classmethod
    def equal(cls, p: int, G: int) -> "Grouping":
        if G < 1 or p % G:
            raise GroupingError(f"cannot split p={p} into {G} equal groups")
        return cls.contiguous(p, p // G)

    @classmethod
    def singletons(cls, p: int) -> "Grouping":
        return cls.contiguous(p, 1)

    @classmethod
    def sliding(cls, p: int, size: int, overlap: int) -> "Grouping":
        """Overlapping windows of ``size`` coordinates; neighbours share ``overlap``."""
        step = size - overlap
        if step < 1 or size > p:
            raise GroupingError("need 0 <= overlap < size <= p")
        starts = list(range(0, p - size + 1, step))
        if starts[-1] + size < p:
            starts.append(p - size)
        return cls(tuple(np.arange(a, a + size) for a in starts), p)

    @property
    def G(self) -> int:
        return len(self.groups)

    @cached_property
    def sizes(self) -> np.ndarray:
        return np.array([g.size for g in self.groups], dtype=np.int64)

    @property
    def p_star(self) -> int:
        return int(self.sizes.min())

    @cached_property
    def membership(self) -> np.ndarray:
        """Number of groups each coordinate belongs to."""
        return np.asarray(self.indicator.sum(axis=0)).ravel().astype(np.int64)

    @property
    def max_membership(self) -> int:
        return int(self.membership.max())

    @property
    def non_overlapping(self) -> bool:
        return self.max_membership == 1

    @cached_property
    def indicator(self) -> sparse.csr_matrix:
        """G x p 0/1 membership matrix."""
        rows = np.concatenate([np.full(g.size, i) for i, g in enumerate(self.groups)])
        cols = np.concatenate(self.groups)
        data = np.ones(cols.size)
        return sparse.csr_matrix((data, (rows, cols)), shape=(self.G, self.p))

    @cached_property
    def row_group(self) -> np.ndarray:
        """Owning group of each coordinate; only defined without overlap."""
        if not self.non_overlapping:
            raise GroupingError("row_group is undefined for overlapping groups")
        out = np.empty(self.p, dtype=np.int64)
        for i, g in enumerate(self.groups):
            out[g] = i
        return out

    def block_norms(self, M: np.ndarray) -> np.ndarray:
        """G x m matrix of column l2 norms of each group's row block."""
        if M.shape[0] != self.p:
            raise ValueError(f"matrix has {M.shape[0]} rows, grouping has p={self.p}")
        sq = self.indicator @ (M * M)
        return np.sqrt(np.maximum(sq, 0.0))

    def phi(self, x: np.ndarray) -> np.ndarray:
        """Per-group l2 norms of a vector in R^p."""
        return self.block_norms(np.asarray(x, dtype=float)[:, None])[:, 0]

    def to_one_based(self) -> list[list[int]]:
        return [(g + 1).tolist() for g in self.groups]

    def __eq__(self, other):
        if not isinstance(other, Grouping):
            return NotImplemented
        return self.p == other.p and self.G == other.G and all(
            np.array_equal(a, b) for a, b in zip(self.groups, other.groups)
        )

    def __hash__(self):
        return hash((self.p, tuple(tuple(g.tolist()) for g in self.groups)))


def make_theta(
    grouping: Grouping,
    s: int,
    k: int,
    vartheta: float,
    support_groups: Sequence[int] | None = None,
) -> np.ndarray:
    """Change vector with ``k`` equal-magnitude entries over ``s`` groups.

    Entries have magnitude ``vartheta / sqrt(k)``. Groups are filled in order
    (first ``s`` groups unless ``support_groups`` lists 0-based group ids),
    first coordinates first, with the ``k`` coordinates spread as evenly as
    possible so every chosen group receives at least one. Coordinates already
    used by an earlier chosen group are skipped.
    """
    if vartheta <= 0:
        raise ScenarioError("vartheta must be positive")
    if not 1 <= s <= grouping.G:
        raise ScenarioError(f"s={s} must lie in [1, G={grouping.G}]")
    if k < s:
        raise ScenarioError(f"k={k} < s={s}: each chosen group needs a coordinate")
    chosen = list(range(s)) if support_groups is None else list(support_groups)
    if len(chosen) != s or len(set(chosen)) != s:
        raise ScenarioError("support_groups must list s distinct groups")

    used = np.zeros(grouping.p, dtype=bool)
    avail = []
    for g in chosen:
        idx = grouping.groups[g]
        fresh = idx[~used[idx]]
        used[fresh] = True
        avail.append(fresh)
    capacity = np.array([a.size for a in avail])
    if capacity.sum() < k or (capacity == 0).any():
        raise ScenarioError(
            f"infeasible: the {s} chosen groups hold {capacity.sum()} distinct "
            f"coordinates, fewer than k={k} (or a group adds none)"
        )
    # water-filling: even split, overflow moves to groups with spare room
    quota = np.zeros(s, dtype=np.int64)
    remaining = k
    open_ = capacity > 0
    while remaining > 0:
        live = np.flatnonzero(open_)
        share, extra = divmod(remaining, live.size)
        for rank, g in enumerate(live):
            want = share + (1 if rank < extra else 0)
            take = min(want, capacity[g] - quota[g])
            quota[g] += take
            remaining -= take
        open_ = quota < capacity

    theta = np.zeros(grouping.p)
    mag = vartheta / np.sqrt(k)
    for a, q in zip(avail, quota):
        theta[a[:q]] = mag
    return theta


@dataclass(frozen=True, eq=False)
class ChangeScenario:
    """Piecewise-constant mean structure plus isotropic noise level."""

    n: int
    grouping: Grouping
    change_times: tuple[int, ...]
    mean_levels: np.ndarray  # (nu + 1) x p
    sigma: float = 1.0

    def __post_init__(self):
        levels = np.array(self.mean_levels, dtype=float, ndmin=2)
        levels.setflags(write=False)
        object.__setattr__(self, "mean_levels", levels)
        object.__setattr__(self, "change_times", tuple(int(z) for z in self.change_times))
        zs = self.change_times
        if self.n < 2:
            raise ScenarioError("n must be at least 2")
        if self.sigma < 0:
            raise ScenarioError("sigma must be nonnegative")
        if any(b <= a for a, b in zip(zs, zs[1:])):
            raise ScenarioError("change times must be strictly increasing")
        if zs and (zs[0] < 1 or zs[-1] > self.n - 1):
            raise ScenarioError(f"change times must lie in [1, {self.n - 1}]")
        if levels.shape != (len(zs) + 1, self.grouping.p):
            raise ScenarioError(
                f"mean_levels must be ({len(zs) + 1}, {self.grouping.p}), got {levels.shape}"
            )
        if np.any(self.varthetas <= 0):
            raise ScenarioError("every change must have a nonzero mean shift")

    @classmethod
    def from_thetas(cls, n, grouping, change_times, thetas, sigma=1.0, base=None):
        base = np.zeros(grouping.p) if base is None else np.asarray(base, dtype=float)
        levels = [base]
        for th in thetas:
            levels.append(levels[-1] + np.asarray(th, dtype=float))
        return cls(n, grouping, tuple(change_times), np.vstack(levels), sigma)

    @property
    def p(self) -> int:
        return self.grouping.p

    @property
    def nu(self) -> int:
        return len(self.change_times)

    @property
    def thetas(self) -> np.ndarray:
        return np.diff(self.mean_levels, axis=0)

    @property
    def varthetas(self) -> np.ndarray:
        return np.linalg.norm(self.thetas, axis=1)

    @property
    def ks(self) -> np.ndarray:
        return np.count_nonzero(self.thetas, axis=1)

    @property
    def ss(self) -> np.ndarray:
        return np.array([np.count_nonzero(self.grouping.phi(th)) for th in self.thetas],
                        dtype=np.int64)

    @property
    def tau(self) -> float:
        edges = np.array((0, *self.change_times, self.n))
        return float(np.diff(edges).min() / self.n)

    @property
    def oracle_directions(self) -> np.ndarray:
        return self.thetas / self.varthetas[:, None]

    def mean_matrix(self) -> np.ndarray:
        edges = (0, *self.change_times, self.n)
        seg_len = np.diff(edges)
        return np.repeat(self.mean_levels, seg_len, axis=0).T

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "sigma": self.sigma,
            "grouping": self.grouping.to_one_based(),
            "change_times": list(self.change_times),
            "mean_levels": self.mean_levels.tolist(),
            "theta": self.thetas.tolist(),
            "vartheta": self.varthetas.tolist(),
            "k": self.ks.tolist(),
            "s": self.ss.tolist(),
            "tau": self.tau,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "ChangeScenario":
        grouping = Grouping.from_one_based(d["grouping"], int(d["p"]))
        return cls(int(d["n"]), grouping, tuple(d["change_times"]),
                   np.asarray(d["mean_levels"], dtype=float), float(d.get("sigma", 1.0)))

    @classmethod
    def from_json(cls, text: str) -> "ChangeScenario":
        return cls.from_dict(json.loads(text))


def rng_from_seed(seed: int) -> np.random.Generator:
    """PCG64 stream for a 64-bit seed."""
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return np.random.Generator(np.random.PCG64(seed))


def generate_data(scenario: ChangeScenario, seed: int) -> np.ndarray:
    """Draw X with columns mu_t + sigma * eps_t, eps_t iid N(0, I_p)."""
    rng = rng_from_seed(seed)
    noise = rng.standard_normal((scenario.p, scenario.n))
    return scenario.mean_matrix() + scenario.sigma * noise
