import math

import numpy as np
import pytest

from oscint.fewnomial import make_fewnomial
from oscint.oracle import pv_multiplier_oracle


@pytest.mark.parametrize("k", [3, 5])
def test_oracle_monomial_anchor(k):
    v = pv_multiplier_oracle(make_fewnomial([1], [k]), 0.0, tol=1e-5)
    assert abs(v - 1j * math.pi / k) < 1e-5


def test_oracle_zero_phase():
    Z = make_fewnomial([], [])
    assert pv_multiplier_oracle(Z, 0.0) == 0
    v = pv_multiplier_oracle(Z, 3.0, tol=1e-3)
    assert abs(v + 1j * math.pi) < 1e-3


def test_oracle_even_phase_vanishes_at_zero():
    v = pv_multiplier_oracle(make_fewnomial([1.3, -0.2], [2, 4]), 0.0, tol=1e-5)
    assert abs(v) < 1e-5
