import numpy as np

from groupinspect.baselines import inspect_single, l2_aggregate, linf_aggregate
from groupinspect.cusum import cusum_transform
from groupinspect.model import Grouping
from groupinspect.locate import single_changepoint
from groupinspect.tuning import inspect_lambda


def test_inspect_delegates(rng):
    X = rng.standard_normal((6, 25))
    a = inspect_single(X, 0.4)
    b = single_changepoint(X, Grouping.singletons(6), 0.4)
    assert (a.z_hat, a.t_max) == (b.z_hat, b.t_max)
    np.testing.assert_array_equal(a.v_hat.v_hat, b.v_hat.v_hat)


def test_default_lambda(rng):
    X = rng.standard_normal((6, 25))
    assert inspect_single(X).z_hat == inspect_single(X, inspect_lambda(25, 6)).z_hat


def test_noiseless_exact():
    X = np.zeros((5, 30))
    X[2, 11:] = 1.0
    X[4, 11:] = -0.5
    assert l2_aggregate(X).z_hat == 11
    assert linf_aggregate(X).z_hat == 11


def test_univariate(rng):
    x = rng.standard_normal((1, 40))
    x[0, 25:] += 1.5
    z = int(np.argmax(np.abs(cusum_transform(x)[0]))) + 1
    assert l2_aggregate(x).z_hat == linf_aggregate(x).z_hat == z


def test_scale_invariance(rng):
    X = rng.standard_normal((8, 30))
    assert l2_aggregate(3 * X).z_hat == l2_aggregate(X).z_hat
    assert linf_aggregate(3 * X).z_hat == linf_aggregate(X).z_hat
    assert inspect_single(3 * X, 3 * 0.5).z_hat == inspect_single(X, 0.5).z_hat


def test_dense_vs_sparse_ordering():
    # both changes have the same l2 norm
    p, n, z = 200, 200, 80
    norm = 1.2
    dense = np.full(p, norm / np.sqrt(p))
    sparse = np.zeros(p)
    sparse[0] = norm
    rng = np.random.default_rng(5)
    errs = {("dense", "l2"): [], ("dense", "linf"): [], ("sparse", "l2"): [],
            ("sparse", "linf"): []}
    for _ in range(100):
        noise = rng.standard_normal((p, n))
        for name, theta in (("dense", dense), ("sparse", sparse)):
            X = noise.copy()
            X[:, z:] += theta[:, None]
            errs[(name, "l2")].append(abs(l2_aggregate(X).z_hat - z))
            errs[(name, "linf")].append(abs(linf_aggregate(X).z_hat - z))
    med = {k: np.median(v) for k, v in errs.items()}
    assert med[("dense", "l2")] < med[("dense", "linf")]
    assert med[("sparse", "linf")] < med[("sparse", "l2")]
