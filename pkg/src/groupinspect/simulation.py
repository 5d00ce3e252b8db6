"""Monte-Carlo experiment grids.

Every grid cell is a dict of scenario parameters; replicate ``r`` of any cell
draws its data from seed ``seed + r``, so cells share random numbers and the
output does not depend on how work is scheduled across processes.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .baselines import inspect_single, l2_aggregate, linf_aggregate
from .locate import SingleCpResult, single_changepoint, split_changepoint
from .metrics import adjusted_rand_index, sin_angle_loss
from .model import ChangeScenario, Grouping, generate_data, make_theta
from .preprocess import standardize
from .segment import WbsConfig, calibrate_threshold, wbs_detect
from .tuning import inspect_lambda, practical_lambda, theoretical_lambda

EXPERIMENTS = ("theory", "tuning", "compare", "multi")

DEFAULTS = {
    "theory": {"n": 1000, "p": 600, "p_star": 1, "vartheta": 8.0, "k": 60,
               "z": 400, "lambda_mode": "theoretical"},
    "tuning": {"n": 1000, "p": 500, "G": 10, "s": 3, "vartheta": 2.0, "z": 400,
               "multiplier": 1.0},
    "compare": {"n": 1000, "p": 500, "G": 10, "s": 3, "vartheta": 2.0, "z": 400,
                "overlap": 0},
    "multi": {"n": 1200, "p": 500, "G": 50, "s": 3, "vartheta": 1.4, "Q": 1000,
              "n_null": 1000, "with_inspect": 1},
}

# CSV columns, in order, for each experiment's per-replicate rows
RESULT_FIELDS = {
    "theory": ["loss", "abs_error"],
    "tuning": ["lambda", "loss", "abs_error"],
    "compare": ["loss_groupinspect", "loss_inspect", "err_groupinspect",
                "err_inspect", "err_l2", "err_linf", "err_split"],
    "multi": ["xi_groupinspect", "n_cp_groupinspect", "ari_groupinspect",
              "xi_inspect", "n_cp_inspect", "ari_inspect"],
}


class GridError(ValueError):
    pass


def tuning_multipliers(count: int = 7, lo: float = 0.1, hi: float = 3.0) -> list[float]:
    """Log-spaced multipliers of the theoretical penalty."""
    return np.geomspace(lo, hi, count).tolist()


def divisors(m: int) -> list[int]:
    return [d for d in range(1, m + 1) if m % d == 0]


def expand_grid(experiment: str, params: dict) -> list[dict]:
    """Cartesian product of list-valued parameters over the defaults."""
    if experiment not in EXPERIMENTS:
        raise GridError(f"unknown experiment {experiment!r}")
    base = dict(DEFAULTS[experiment])
    unknown = set(params) - set(base) - {"s", "k"}
    if unknown:
        raise GridError(f"unknown grid parameters for {experiment}: {sorted(unknown)}")
    base.update(params)
    if experiment == "theory" and "s" in params and "k" not in params:
        base.pop("k")
    keys = list(base)
    values = [v if isinstance(v, (list, tuple)) else [v] for v in base.values()]
    if any(len(v) == 0 for v in values):
        raise GridError("every grid parameter needs at least one value")
    cells = [dict(zip(keys, combo)) for combo in itertools.product(*values)]
    for cell in cells:
        validate_cell(experiment, cell)
    return cells


def validate_cell(experiment: str, cell: dict) -> None:
    try:
        build_scenario(experiment, cell)
    except (ValueError, KeyError) as exc:
        raise GridError(f"invalid grid cell {cell}: {exc}") from exc


def _grouping(cell: dict) -> Grouping:
    p = int(cell["p"])
    if "p_star" in cell:
        return Grouping.contiguous(p, int(cell["p_star"]))
    G = int(cell["G"])
    if cell.get("overlap"):
        # G equal windows spread evenly; neighbours share about half
        size = -(-2 * p // (G + 1))
        starts = np.round(np.linspace(0, p - size, G)).astype(int)
        return Grouping(tuple(np.arange(a, a + size) for a in starts), p)
    return Grouping.equal(p, G)


def build_scenario(experiment: str, cell: dict) -> ChangeScenario:
    n = int(cell["n"])
    g = _grouping(cell)
    vt = float(cell["vartheta"])
    if experiment == "theory":
        ps = g.p_star
        if "k" in cell and cell.get("k") is not None:
            k = int(cell["k"])
            s = math.ceil(k / ps)
        else:
            s = int(cell["s"])
            k = s * ps
        theta = make_theta(g, s, k, vt)
        return ChangeScenario.from_thetas(n, g, [int(cell["z"])], [theta])
    s = int(cell["s"])
    k = int(cell["k"]) if cell.get("k") is not None else None
    if experiment == "multi":
        k = k if k is not None else s * g.p_star
        unit = make_theta(g, s, k, 1.0)
        zs = [n // 4, n // 2, 3 * n // 4]
        return ChangeScenario.from_thetas(n, g, zs, [vt * unit, 1.5 * vt * unit, 2 * vt * unit])
    if k is None:
        k = int(np.unique(np.concatenate(g.groups[:s])).size)
    theta = make_theta(g, s, k, vt)
    return ChangeScenario.from_thetas(n, g, [int(cell["z"])], [theta])


def _loss(res: SingleCpResult, v: np.ndarray) -> float:
    # no direction at all counts as the worst possible loss
    return 1.0 if res.degenerate else sin_angle_loss(res.v_hat.v_hat, v)


@dataclass(frozen=True)
class Task:
    experiment: str
    cell: dict
    replicate: int
    seed: int
    context: dict


def run_replicate(task: Task) -> dict:
    """Evaluate one replicate of one grid cell; returns the CSV row values."""
    exp, cell = task.experiment, task.cell
    sc = build_scenario(exp, cell)
    g = sc.grouping
    X = standardize(generate_data(sc, task.seed))
    v = sc.oracle_directions[0]
    zs = sc.change_times
    out: dict = {}

    if exp == "theory":
        rule = theoretical_lambda if cell["lambda_mode"] == "theoretical" else practical_lambda
        res = single_changepoint(X, g, rule(sc.n, g))
        out = {"loss": _loss(res, v), "abs_error": abs(res.z_hat - zs[0])}
    elif exp == "tuning":
        lam = float(cell["multiplier"]) * theoretical_lambda(sc.n, g)
        res = single_changepoint(X, g, lam)
        out = {"lambda": lam, "loss": _loss(res, v), "abs_error": abs(res.z_hat - zs[0])}
    elif exp == "compare":
        lam = practical_lambda(sc.n, g)
        gi = single_changepoint(X, g, lam)
        ins = inspect_single(X)
        sp = split_changepoint(X, g, lam)
        out = {
            "loss_groupinspect": _loss(gi, v),
            "loss_inspect": _loss(ins, v),
            "err_groupinspect": abs(gi.z_hat - zs[0]),
            "err_inspect": abs(ins.z_hat - zs[0]),
            "err_l2": abs(l2_aggregate(X).z_hat - zs[0]),
            "err_linf": abs(linf_aggregate(X).z_hat - zs[0]),
            "err_split": abs(sp.z_hat - zs[0]),
        }
    elif exp == "multi":
        wbs_seed = task.seed
        lam = practical_lambda(sc.n, g)
        xi = task.context["xi_groupinspect"]
        seg = wbs_detect(X, g, lam, WbsConfig(xi, int(cell["Q"]), wbs_seed))
        out = {"xi_groupinspect": xi, "n_cp_groupinspect": len(seg.change_points),
               "ari_groupinspect": adjusted_rand_index(seg.change_points, zs, sc.n)}
        if int(cell["with_inspect"]):
            single = Grouping.singletons(sc.p)
            xi_i = task.context["xi_inspect"]
            seg_i = wbs_detect(X, single, inspect_lambda(sc.n, sc.p),
                               WbsConfig(xi_i, int(cell["Q"]), wbs_seed))
            out.update(xi_inspect=xi_i, n_cp_inspect=len(seg_i.change_points),
                       ari_inspect=adjusted_rand_index(seg_i.change_points, zs, sc.n))
        else:
            out.update(xi_inspect="", n_cp_inspect="", ari_inspect="")
    return out


# null replicates use a seed range disjoint from the data replicates
CALIBRATION_OFFSET = 1_000_000


def cell_context(experiment: str, cell: dict, seed: int) -> dict:
    """Per-cell quantities shared by all replicates (calibrated thresholds)."""
    if experiment != "multi":
        return {}
    sc = build_scenario(experiment, cell)
    g = sc.grouping
    n_null = int(cell["n_null"])
    ctx = {"xi_groupinspect": calibrate_threshold(
        sc.n, sc.p, g, practical_lambda(sc.n, g), n_null, 1.0, seed + CALIBRATION_OFFSET)}
    if int(cell["with_inspect"]):
        ctx["xi_inspect"] = calibrate_threshold(
            sc.n, sc.p, Grouping.singletons(sc.p), inspect_lambda(sc.n, sc.p),
            n_null, 1.0, seed + CALIBRATION_OFFSET)
    return ctx


def _map(fn, items, workers: int):
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def _context_job(args):
    return cell_context(*args)


def run_grid(experiment: str, cells: list[dict], reps: int, seed: int = 0,
             workers: int = 1) -> list[dict]:
    """Run every (cell, replicate) pair; rows come back in grid order."""
    if reps < 0:
        raise GridError("reps must be nonnegative")
    if reps == 0:
        return []
    contexts = _map(_context_job, [(experiment, c, seed) for c in cells], workers)
    tasks = [(i, Task(experiment, c, r, seed + r, ctx))
             for i, (c, ctx) in enumerate(zip(cells, contexts)) for r in range(reps)]
    results = _map(run_replicate, [t for _, t in tasks], workers)
    rows = []
    for (i, t), res in zip(tasks, results):
        row = {"cell": i, **t.cell, "replicate": t.replicate, "seed": t.seed}
        row.update(res)
        rows.append(row)
    return rows


def summarize(experiment: str, cells: list[dict], rows: list[dict]) -> list[dict]:
    """Mean and median of each metric per cell."""
    out = []
    for i, cell in enumerate(cells):
        mine = [r for r in rows if r["cell"] == i]
        summary = {"cell": i, **cell, "reps": len(mine)}
        for f in RESULT_FIELDS[experiment]:
            vals = [r[f] for r in mine if r.get(f, "") != ""]
            if vals:
                summary[f"mean_{f}"] = float(np.mean(vals))
                summary[f"median_{f}"] = float(np.median(vals))
            else:
                summary[f"mean_{f}"] = ""
                summary[f"median_{f}"] = ""
        out.append(summary)
    return out


def row_fields(experiment: str, cells: list[dict]) -> list[str]:
    keys = list(cells[0]) if cells else list(DEFAULTS[experiment])
    return ["cell", *keys, "replicate", "seed", *RESULT_FIELDS[experiment]]


def summary_fields(experiment: str, cells: list[dict]) -> list[str]:
    keys = list(cells[0]) if cells else list(DEFAULTS[experiment])
    stats = [f"{agg}_{f}" for f in RESULT_FIELDS[experiment] for agg in ("mean", "median")]
    return ["cell", *keys, "reps", *stats]
