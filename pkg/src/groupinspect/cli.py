"""Command-line front end: ``detect``, ``simulate`` and ``calibrate``.

Exit codes: 0 success, 2 unreadable or malformed input, 3 infeasible
grouping or invalid parameters, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .io import InputError, read_grouping, read_panel, write_json, write_rows
from .locate import single_changepoint, split_changepoint
from .model import Grouping, GroupingError
from .preprocess import ConstantRowError, standardize
from .segment import (Candidate, IntervalRecord, Segmentation, WbsConfig,
                      calibrate_threshold, wbs_detect)
from .simulation import (CALIBRATION_OFFSET, EXPERIMENTS, GridError, divisors,
                         expand_grid, row_fields, run_grid, summarize,
                         summary_fields)
from .tuning import resolve_lambda

log = logging.getLogger("groupinspect")

EXIT_OK, EXIT_INPUT, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# -- argument helpers -------------------------------------------------------

def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must lie in [0, 2^64)")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _number(text: str):
    try:
        return int(text)
    except ValueError:
        return float(text)


def parse_param_values(text: str) -> list:
    """Values of one grid parameter.

    ``1,2,3`` is a list, ``divisors:60`` the divisors of 60 and
    ``geom:0.1:3:7`` seven log-spaced values from 0.1 to 3.
    """
    try:
        if text.startswith("divisors:"):
            return divisors(int(text.split(":", 1)[1]))
        if text.startswith("geom:"):
            _, lo, hi, count = text.split(":")
            return np.geomspace(float(lo), float(hi), int(count)).tolist()
        return [_number(v.strip()) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise GridError(f"cannot parse parameter values {text!r}") from exc


def parse_params(pairs: list[str]) -> dict:
    params: dict = {}
    for pair in pairs:
        key, sep, values = pair.partition("=")
        if not sep or not key.strip():
            raise GridError(f"--param expects key=values, got {pair!r}")
        params[key.strip()] = parse_param_values(values.strip())
    return params


def _load_grid(path) -> dict:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}") from exc
    if not isinstance(raw, dict):
        raise GridError(f"{path}: grid must be a JSON object of parameter values")
    return raw


def _add_lambda_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lambda-mode", choices=["practical", "theoretical", "explicit"],
                   default="practical", help="penalty rule (default: practical)")
    p.add_argument("--lambda", dest="lam", type=float,
                   help="penalty value; implies --lambda-mode explicit")


def _add_grouping_args(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--grouping", type=Path,
                   help="JSON array of arrays of 1-based coordinate indices")
    g.add_argument("--groups", type=_positive_int,
                   help="use G equal contiguous groups (G must divide p)")


def _grouping(args, p: int) -> Grouping:
    if args.grouping is not None:
        return read_grouping(args.grouping, p)
    return Grouping.equal(p, args.groups)


def _lambda(args, n: int, grouping: Grouping) -> float:
    mode = "explicit" if args.lam is not None else args.lambda_mode
    return resolve_lambda(mode, n, grouping, args.lam)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="groupinspect",
        description="Group-sparse high-dimensional mean change-point detection.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    d = sub.add_parser("detect", help="detect change-points in a data panel")
    d.add_argument("data", type=Path, help="CSV panel, rows = coordinates, columns = time")
    d.add_argument("--header", choices=["auto", "yes", "no"], default="auto")
    _add_grouping_args(d)
    d.add_argument("--mode", choices=["single", "split", "multiple"], default="multiple")
    _add_lambda_args(d)
    d.add_argument("--Q", type=int, default=1000, help="number of random intervals")
    d.add_argument("--xi", type=float, help="threshold; calibrated on null data if omitted")
    d.add_argument("--n-null", type=_positive_int, default=1000,
                   help="null replicates for automatic calibration")
    d.add_argument("--no-standardize", action="store_true")
    d.add_argument("--seed", type=_seed, default=0)
    d.add_argument("--out", type=Path, default=Path("."))

    s = sub.add_parser("simulate", help="run a Monte-Carlo experiment grid")
    s.add_argument("--experiment", choices=EXPERIMENTS, required=True)
    s.add_argument("--param", action="append", default=[], metavar="KEY=VALUES",
                   help="grid values: 1,2,3 or divisors:M or geom:LO:HI:COUNT")
    s.add_argument("--grid", type=Path, help="JSON object of parameter values")
    s.add_argument("--reps", type=int, default=100)
    s.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    s.add_argument("--seed", type=_seed, default=0)
    s.add_argument("--out", type=Path, default=Path("."))

    c = sub.add_parser("calibrate", help="calibrate the detection threshold")
    c.add_argument("--n", type=_positive_int, required=True)
    c.add_argument("--p", type=_positive_int, required=True)
    _add_grouping_args(c)
    _add_lambda_args(c)
    c.add_argument("--n-null", type=_positive_int, default=1000)
    c.add_argument("--quantile", type=float, default=1.0)
    c.add_argument("--no-standardize", action="store_true")
    c.add_argument("--seed", type=_seed, default=0)
    c.add_argument("--out", type=Path, default=Path("."))
    return parser


# -- commands ---------------------------------------------------------------

def _single_segmentation(res, n: int) -> Segmentation:
    if res.degenerate:
        return Segmentation(n, [], [], [Candidate(0, 0, n, res)])
    rec = IntervalRecord(0, n, 0, 0, n, res.z_hat, res.t_max, res.z_hat)
    return Segmentation(n, [res.z_hat], [rec], [Candidate(0, 0, n, res)])


def cmd_detect(args) -> int:
    X, _ = read_panel(args.data, args.header)
    p, n = X.shape
    grouping = _grouping(args, p)
    if not args.no_standardize:
        X = standardize(X)
    lam = _lambda(args, n, grouping)
    meta = {"mode": args.mode, "lambda": lam, "standardized": not args.no_standardize,
            "seed": args.seed}

    if args.mode == "multiple":
        xi = args.xi
        if xi is None:
            log.info("calibrating threshold on %d null panels", args.n_null)
            xi = calibrate_threshold(n, p, grouping, lam, args.n_null, 1.0,
                                     args.seed + CALIBRATION_OFFSET,
                                     not args.no_standardize)
            meta["n_null"] = args.n_null
        seg = wbs_detect(X, grouping, lam, WbsConfig(xi, args.Q, args.seed))
        meta.update(xi=xi, Q=args.Q)
    else:
        fn = single_changepoint if args.mode == "single" else split_changepoint
        seg = _single_segmentation(fn(X, grouping, lam), n)

    args.out.mkdir(parents=True, exist_ok=True)
    write_json(args.out / "segmentation.json", {**seg.to_dict(), "meta": meta})
    write_rows(args.out / "segmentation.csv", ["change_point"],
               [{"change_point": b} for b in seg.change_points])

    accepted = {r.q: r.b for r in seg.interval_log}
    diag = []
    for c in seg.candidates:
        r = c.result
        diag.append({"q": c.q, "start": c.start, "end": c.end, "z_local": r.z_hat,
                     "z_global": c.start + r.z_hat, "t_max": r.t_max,
                     "degenerate": int(r.degenerate), "accepted": int(c.q in accepted)})
    write_rows(args.out / "diagnostics.csv",
               ["q", "start", "end", "z_local", "z_global", "t_max", "degenerate",
                "accepted"], diag)

    by_q = {c.q: c.result for c in seg.candidates}
    columns = {f"v_hat_{b}": by_q[q].v_hat.v_hat
               for q, b in sorted(accepted.items(), key=lambda kv: kv[1])}
    write_rows(args.out / "directions.csv", ["coordinate", *columns],
               [{"coordinate": j + 1, **{k: float(v[j]) for k, v in columns.items()}}
                for j in range(p)])
    print(" ".join(map(str, seg.change_points)) or "no change-points")
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.reps < 0:
        raise GridError("--reps must be nonnegative")
    params = _load_grid(args.grid) if args.grid is not None else {}
    params.update(parse_params(args.param))
    cells = expand_grid(args.experiment, params)
    log.info("%d cells x %d replicates", len(cells), args.reps)
    rows = run_grid(args.experiment, cells, args.reps, args.seed, max(1, args.workers))
    args.out.mkdir(parents=True, exist_ok=True)
    write_rows(args.out / "results.csv", row_fields(args.experiment, cells), rows)
    write_rows(args.out / "summary.csv", summary_fields(args.experiment, cells),
               summarize(args.experiment, cells, rows))
    return EXIT_OK


def cmd_calibrate(args) -> int:
    if not 0.0 < args.quantile <= 1.0:
        raise CliError("--quantile must lie in (0, 1]", EXIT_INVALID)
    grouping = _grouping(args, args.p)
    lam = _lambda(args, args.n, grouping)
    xi = calibrate_threshold(args.n, args.p, grouping, lam, args.n_null, args.quantile,
                             args.seed, not args.no_standardize)
    args.out.mkdir(parents=True, exist_ok=True)
    write_json(args.out / "calibration.json",
               {"xi": xi, "n_null": args.n_null, "quantile": args.quantile,
                "seed": args.seed, "lambda": lam})
    print(repr(xi))
    return EXIT_OK


COMMANDS = {"detect": cmd_detect, "simulate": cmd_simulate, "calibrate": cmd_calibrate}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except CliError as exc:
        msg, code = str(exc), exc.code
    except (InputError, FileNotFoundError, IsADirectoryError, UnicodeDecodeError) as exc:
        msg, code = str(exc), EXIT_INPUT
    except ConstantRowError as exc:
        msg, code = f"{exc}; remove it or pass --no-standardize", EXIT_NUMERIC
    except (GroupingError, GridError) as exc:
        msg, code = str(exc), EXIT_INVALID
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        msg, code = f"numerical failure: {exc}", EXIT_NUMERIC
    except ValueError as exc:
        msg, code = str(exc), EXIT_INVALID
    print(f"groupinspect: error: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
