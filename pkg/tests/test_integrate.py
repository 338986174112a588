import numpy as np
import pytest

from oscint.errors import ToleranceNotMet
from oscint.integrate import GAUSS_WEIGHTS, KRONROD_WEIGHTS, NODES, adaptive, gk15


def test_rule_constants():
    assert NODES.size == 15 and np.all(np.diff(NODES) > 0)
    assert KRONROD_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    assert GAUSS_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    # Kronrod is exact to degree 22, Gauss-7 to degree 13
    for p in range(0, 23, 2):
        assert KRONROD_WEIGHTS @ NODES**p == pytest.approx(2.0 / (p + 1), abs=1e-14)
    for p in range(0, 14, 2):
        assert GAUSS_WEIGHTS @ NODES**p == pytest.approx(2.0 / (p + 1), abs=1e-14)


def test_gk15_polynomial_exact():
    v, e = gk15(lambda t: t**9 + 0j, [0.0, 1.0], [1.0, 2.0])
    np.testing.assert_allclose(v.real, [0.1, (2**10 - 1) / 10], rtol=1e-14)
    assert np.all(e < 1e-10)


def test_adaptive_oscillatory():
    # int_0^{20 pi} e^{i 10 t} dt = 0 and int_0^1 sqrt(t) = 2/3
    a = np.linspace(0, 20 * np.pi, 101)
    v, err, _ = adaptive(lambda t: np.exp(10j * t), a[:-1], a[1:], 1e-12)
    assert abs(v) < 1e-11 and err <= 1e-12
    v, err, _ = adaptive(lambda t: np.sqrt(t) + 0j, [0.0], [1.0], 1e-10)
    assert v.real == pytest.approx(2 / 3, abs=1e-10)


def test_adaptive_reports_failure_with_estimate():
    with pytest.raises(ToleranceNotMet) as exc:
        adaptive(lambda t: np.sin(1 / t) / t + 0j, [1e-9], [1.0], 1e-14, max_rounds=3)
    assert exc.value.value is not None and exc.value.abs_err > 1e-14
