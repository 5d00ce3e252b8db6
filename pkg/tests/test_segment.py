import numpy as np
import pytest

from groupinspect.locate import single_changepoint
from groupinspect.model import Grouping, rng_from_seed
from groupinspect.preprocess import standardize
from groupinspect.segment import (Segmentation, WbsConfig, calibrate_threshold,
                                  draw_intervals, empirical_quantile, null_statistics,
                                  wbs_detect)
from groupinspect.tuning import practical_lambda


@pytest.fixture(scope="module")
def noiseless_three():
    """n=1200 with mean shifts after 300, 600 and 900 on the first group."""
    p, n = 20, 1200
    X = np.zeros((p, n))
    X[:5, 300:600] = 1.0
    X[:5, 600:900] = 3.0
    X[:5, 900:] = 0.0
    return X, Grouping.equal(p, 4)


def test_noiseless_three_changes(noiseless_three):
    X, g = noiseless_three
    seg = wbs_detect(X, g, 0.1, WbsConfig(xi=0.5, Q=500, seed=1))
    assert seg.change_points == [300, 600, 900]
    for rec in seg.interval_log:
        assert rec.s < rec.b < rec.e
        assert rec.s <= rec.start < rec.end <= rec.e


def test_q_zero_is_empty(noiseless_three):
    X, g = noiseless_three
    seg = wbs_detect(X, g, 0.1, WbsConfig(xi=0.5, Q=0))
    assert seg.change_points == [] and seg.interval_log == []


def test_huge_threshold_is_empty(noiseless_three):
    X, g = noiseless_three
    assert wbs_detect(X, g, 0.1, WbsConfig(xi=1e9, Q=100)).change_points == []


def test_deterministic(rng):
    X = rng.standard_normal((8, 150))
    X[:4, 60:] += 1.5
    g = Grouping.equal(8, 2)
    a = wbs_detect(X, g, 0.5, WbsConfig(3.0, 200, 9))
    b = wbs_detect(X, g, 0.5, WbsConfig(3.0, 200, 9))
    assert a == b


def test_draw_intervals():
    iv = draw_intervals(50, 300, 4, min_len=3)
    assert iv.shape == (300, 2)
    assert np.all(iv[:, 0] >= 0) and np.all(iv[:, 1] <= 50)
    assert np.all(iv[:, 1] - iv[:, 0] >= 3)
    np.testing.assert_array_equal(iv, draw_intervals(50, 300, 4, min_len=3))
    assert draw_intervals(1, 10, 0).shape == (0, 2)


def test_config_validation():
    with pytest.raises(ValueError):
        WbsConfig(xi=-1)
    with pytest.raises(ValueError):
        WbsConfig(xi=1, Q=-1)
    with pytest.raises(ValueError):
        WbsConfig(xi=1, min_len=1)


def test_segmentation_validation_and_round_trip(noiseless_three):
    with pytest.raises(ValueError):
        Segmentation(10, [5, 3])
    with pytest.raises(ValueError):
        Segmentation(10, [10])
    X, g = noiseless_three
    seg = wbs_detect(X, g, 0.1, WbsConfig(xi=0.5, Q=200, seed=2))
    assert Segmentation.from_json(seg.to_json()) == seg


def test_null_false_detection_rate():
    n, p = 200, 20
    g = Grouping.equal(p, 4)
    lam = practical_lambda(n, g)
    xi = calibrate_threshold(n, p, g, lam, n_null=200, seed=10**6)
    false = 0
    for r in range(100):
        X = standardize(rng_from_seed(r).standard_normal((p, n)))
        false += bool(wbs_detect(X, g, lam, WbsConfig(xi, 200, r)).change_points)
    assert false <= 10


def test_single_null_replicate_echoes_statistic():
    g = Grouping.equal(6, 2)
    xi = calibrate_threshold(40, 6, g, 0.7, n_null=1, seed=123)
    X = standardize(rng_from_seed(123).standard_normal((6, 40)))
    assert xi == single_changepoint(X, g, 0.7).t_max
    assert xi >= 0


def test_golden_threshold():
    g = Grouping.equal(10, 2)
    lam = practical_lambda(50, g)
    assert calibrate_threshold(50, 10, g, lam, 1000, 1.0, 7) == pytest.approx(
        7.1504841854604715, rel=1e-12)
    assert calibrate_threshold(50, 10, g, lam, 1000, 0.95, 7) == pytest.approx(
        4.882348468622723, rel=1e-12)


def test_quantile_rules():
    vals = [3.0, 1.0, 2.0, 5.0]
    assert empirical_quantile(vals, 1.0) == 5.0
    assert empirical_quantile(vals, 0.5) == 2.0
    for bad in (0.0, -0.1, 1.01):
        with pytest.raises(ValueError):
            empirical_quantile(vals, bad)


def test_null_statistics_validation():
    g = Grouping.equal(4, 2)
    with pytest.raises(ValueError):
        null_statistics(20, 4, g, 0.5, 0, 0)
    with pytest.raises(ValueError):
        null_statistics(20, 5, g, 0.5, 3, 0)
