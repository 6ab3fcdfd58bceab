"""Both kernel backends must agree (to float tolerance) on random inputs."""

import numpy as np
import pytest

from fairdbg._kernels import py_kernels

try:
    from fairdbg._kernels import _fast
except ImportError:
    _fast = None

pytestmark = pytest.mark.skipif(_fast is None,
                                reason="compiled kernels not built")


@pytest.fixture(params=range(3))
def problem(request):
    rng = np.random.default_rng(request.param)
    X = rng.normal(size=(40, 7))
    y01 = (rng.random(40) > 0.5).astype(float)
    w = rng.normal(size=7)
    b = float(rng.normal())
    return X, y01, w, b


def test_sigmoid_agreement():
    z = np.linspace(-30, 30, 101)
    np.testing.assert_allclose(_fast.sigmoid(z), py_kernels.sigmoid(z),
                               rtol=1e-12)


def test_logreg_agreement(problem):
    X, y, w, b = problem
    assert _fast.logreg_loss(X, y, w, b, 0.1) == pytest.approx(
        py_kernels.logreg_loss(X, y, w, b, 0.1), rel=1e-12)
    gw1, gb1 = _fast.logreg_grad(X, y, w, b, 0.1)
    gw2, gb2 = py_kernels.logreg_grad(X, y, w, b, 0.1)
    np.testing.assert_allclose(gw1, gw2, rtol=1e-10, atol=1e-12)
    assert gb1 == pytest.approx(gb2, rel=1e-10)


def test_linsvm_agreement(problem):
    X, y, w, b = problem
    ypm = np.where(y > 0.5, 1.0, -1.0)
    assert _fast.linsvm_loss(X, ypm, w, b, 0.2) == pytest.approx(
        py_kernels.linsvm_loss(X, ypm, w, b, 0.2), rel=1e-12)
    gw1, gb1 = _fast.linsvm_grad(X, ypm, w, b, 0.2)
    gw2, gb2 = py_kernels.linsvm_grad(X, ypm, w, b, 0.2)
    np.testing.assert_allclose(gw1, gw2, rtol=1e-10, atol=1e-12)
    assert gb1 == pytest.approx(gb2, rel=1e-10, abs=1e-12)


def test_gini_scan_agreement():
    rng = np.random.default_rng(7)
    for _ in range(20):
        x = rng.choice([0.0, 1.0, 2.0, 3.0], size=60)
        y = (rng.random(60) > 0.4).astype(float)
        t1, g1 = _fast.gini_split_scan(x, y)
        t2, g2 = py_kernels.gini_split_scan(x, y)
        assert g1 == pytest.approx(g2, abs=1e-12)
        assert t1 == pytest.approx(t2)


def test_gini_scan_constant_feature():
    x = np.ones(10)
    y = np.array([0.0, 1.0] * 5)
    for impl in (_fast, py_kernels):
        t, g = impl.gini_split_scan(x, y)
        assert g < 0


def test_gini_scan_perfect_split():
    x = np.array([0.0] * 5 + [1.0] * 5)
    y = np.array([0.0] * 5 + [1.0] * 5)
    for impl in (_fast, py_kernels):
        t, g = impl.gini_split_scan(x, y)
        assert t == pytest.approx(0.5)
        assert g == pytest.approx(0.5)  # parent gini 0.5 -> children pure
