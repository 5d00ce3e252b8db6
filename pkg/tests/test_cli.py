import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from groupinspect.cli import main, parse_param_values
from groupinspect.io import write_grouping, write_panel
from groupinspect.model import Grouping
from groupinspect.segment import Segmentation
from groupinspect.simulation import GridError


@pytest.fixture
def noiseless(tmp_path):
    p, n = 20, 1200
    X = np.zeros((p, n))
    X[:5, 300:600] = 1.0
    X[:5, 600:900] = 3.0
    write_panel(tmp_path / "x.csv", X)
    write_grouping(tmp_path / "g.json", Grouping.equal(p, 4))
    return tmp_path


@pytest.fixture
def noisy(tmp_path):
    rng = np.random.default_rng(8)
    X = rng.standard_normal((12, 300))
    X[:3, 150:] += 2.0
    write_panel(tmp_path / "y.csv", X)
    return tmp_path / "y.csv"


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_detect_noiseless(noiseless):
    out = noiseless / "out"
    rc = main(["detect", str(noiseless / "x.csv"), "--grouping", str(noiseless / "g.json"),
               "--no-standardize", "--xi", "0.5", "--Q", "500", "--out", str(out)])
    assert rc == 0
    assert [int(r["change_point"]) for r in _rows(out / "segmentation.csv")] == [300, 600, 900]
    data = json.loads((out / "segmentation.json").read_text())
    assert data["change_points"] == [300, 600, 900]
    assert data["meta"]["xi"] == 0.5
    seg = Segmentation.from_json((out / "segmentation.json").read_text())
    assert seg.change_points == [300, 600, 900]
    assert seg.to_dict() == {k: v for k, v in data.items() if k != "meta"}
    diag = _rows(out / "diagnostics.csv")
    assert sum(int(r["accepted"]) for r in diag) == 3
    directions = _rows(out / "directions.csv")
    assert len(directions) == 20
    assert list(directions[0]) == ["coordinate", "v_hat_300", "v_hat_600", "v_hat_900"]
    v = np.array([[float(r["v_hat_300"])] for r in directions])[:, 0]
    assert np.linalg.norm(v) == pytest.approx(1.0)
    assert np.all(v[5:] == 0)


@pytest.mark.parametrize("mode", ["single", "split"])
def test_detect_single_modes(noisy, tmp_path, mode):
    out = tmp_path / mode
    assert main(["detect", str(noisy), "--groups", "4", "--mode", mode, "--out", str(out)]) == 0
    cps = [int(r["change_point"]) for r in _rows(out / "segmentation.csv")]
    assert len(cps) == 1 and abs(cps[0] - 150) <= 4
    assert len(_rows(out / "diagnostics.csv")) == 1


def test_detect_auto_calibration(noisy, tmp_path):
    out = tmp_path / "auto"
    assert main(["detect", str(noisy), "--groups", "4", "--n-null", "30", "--Q", "100",
                 "--out", str(out)]) == 0
    meta = json.loads((out / "segmentation.json").read_text())["meta"]
    assert meta["n_null"] == 30 and meta["xi"] > 0


def test_stock_layout_smoke(tmp_path):
    rng = np.random.default_rng(1)
    X = np.cumsum(rng.standard_normal((256, 1259)) * 0.01, axis=1) + 100
    write_panel(tmp_path / "prices.csv", X)
    bounds = np.linspace(0, 256, 12).astype(int)
    groups = [list(range(a + 1, b + 1)) for a, b in zip(bounds[:-1], bounds[1:])]
    (tmp_path / "sectors.json").write_text(json.dumps(groups))
    out = tmp_path / "out"
    rc = main(["detect", str(tmp_path / "prices.csv"), "--grouping",
               str(tmp_path / "sectors.json"), "--Q", "50", "--n-null", "5",
               "--out", str(out)])
    assert rc == 0
    seg = Segmentation.from_json((out / "segmentation.json").read_text())
    assert seg.n == 1259
    assert len(_rows(out / "directions.csv")) == 256


def test_exit_codes(tmp_path, noisy, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2,3,4\n5,6,oops,8\n")
    assert main(["detect", str(bad), "--groups", "1"]) == 2
    assert "row 2" in capsys.readouterr().err

    missing = tmp_path / "na.csv"
    missing.write_text("1,2,3,4\n5,,7,8\n")
    assert main(["detect", str(missing), "--groups", "1"]) == 2
    assert "impute" in capsys.readouterr().err

    assert main(["detect", str(tmp_path / "nope.csv"), "--groups", "1"]) == 2

    gfile = tmp_path / "g.json"
    gfile.write_text("[[1, 2], [3]]")
    assert main(["detect", str(noisy), "--grouping", str(gfile)]) == 3
    gfile.write_text("[[1, 2")
    assert main(["detect", str(noisy), "--grouping", str(gfile)]) == 2
    assert main(["detect", str(noisy), "--groups", "5"]) == 3

    const = tmp_path / "const.csv"
    const.write_text("1,1,1,1,1\n1,2,3,4,6\n")
    assert main(["detect", str(const), "--groups", "1", "--mode", "single"]) == 4
    assert "row 1 is constant" in capsys.readouterr().err

    assert main(["detect", str(noisy), "--groups", "4", "--lambda", "-1"]) == 3

    with pytest.raises(SystemExit) as exc:
        main(["detect", str(noisy)])
    assert exc.value.code == 2


def test_simulate_row_count(tmp_path):
    out = tmp_path / "sim"
    rc = main(["simulate", "--experiment", "theory", "--param", "p_star=divisors:60",
               "--param", "n=200", "--param", "z=80", "--reps", "2", "--workers", "1",
               "--out", str(out)])
    assert rc == 0
    rows = _rows(out / "results.csv")
    assert len(rows) == 2 * 12
    assert len(_rows(out / "summary.csv")) == 12


def test_simulate_zero_reps(tmp_path):
    out = tmp_path / "sim"
    assert main(["simulate", "--experiment", "compare", "--reps", "0", "--out", str(out)]) == 0
    lines = (out / "results.csv").read_text().splitlines()
    assert len(lines) == 1 and lines[0].startswith("cell,")


def test_simulate_grid_file_and_errors(tmp_path):
    grid = tmp_path / "grid.json"
    grid.write_text(json.dumps({"n": 200, "z": 80, "p": [60], "G": 6, "s": 1}))
    assert main(["simulate", "--experiment", "compare", "--grid", str(grid), "--reps", "1",
                 "--workers", "1", "--out", str(tmp_path / "a")]) == 0
    assert main(["simulate", "--experiment", "compare", "--param", "bogus=1", "--reps", "1",
                 "--out", str(tmp_path / "b")]) == 3
    assert main(["simulate", "--experiment", "compare", "--param", "p=7", "--reps", "1",
                 "--out", str(tmp_path / "b")]) == 3
    assert main(["simulate", "--experiment", "compare", "--param", "noequals", "--reps", "1",
                 "--out", str(tmp_path / "b")]) == 3
    grid.write_text("[1, 2]")
    assert main(["simulate", "--experiment", "compare", "--grid", str(grid),
                 "--out", str(tmp_path / "b")]) == 3


def test_param_values():
    assert parse_param_values("1,2.5,3") == [1, 2.5, 3]
    assert parse_param_values("divisors:12") == [1, 2, 3, 4, 6, 12]
    g = parse_param_values("geom:0.1:3:7")
    assert len(g) == 7 and g[0] == pytest.approx(0.1) and g[-1] == pytest.approx(3)
    with pytest.raises(GridError):
        parse_param_values("geom:1:2")


def test_calibrate(tmp_path):
    out = tmp_path / "cal"
    assert main(["calibrate", "--n", "50", "--p", "10", "--groups", "2", "--n-null", "1",
                 "--seed", "4", "--out", str(out)]) == 0
    data = json.loads((out / "calibration.json").read_text())
    assert set(data) >= {"xi", "n_null", "quantile", "seed"}
    assert data["n_null"] == 1 and data["seed"] == 4 and data["quantile"] == 1.0
    assert data["xi"] >= 0
    assert main(["calibrate", "--n", "50", "--p", "10", "--groups", "2",
                 "--quantile", "1.5", "--out", str(out)]) == 3
    assert main(["calibrate", "--n", "50", "--p", "10", "--groups", "2",
                 "--quantile", "0", "--out", str(out)]) == 3


def test_calibrate_golden(tmp_path):
    out = tmp_path / "gold"
    assert main(["calibrate", "--n", "50", "--p", "10", "--groups", "2", "--n-null", "200",
                 "--seed", "3", "--out", str(out)]) == 0
    data = json.loads((out / "calibration.json").read_text())
    assert data["xi"] == pytest.approx(5.928107178175323, rel=1e-12)
    assert data["lambda"] == pytest.approx(1.4597051824376162, rel=1e-15)


def test_module_entry_point(noiseless):
    proc = subprocess.run([sys.executable, "-m", "groupinspect", "detect",
                           str(noiseless / "x.csv"), "--grouping", str(noiseless / "g.json"),
                           "--no-standardize", "--xi", "0.5", "--Q", "200",
                           "--out", str(noiseless / "cli")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "300 600 900"
