import math

import numpy as np
import pytest
from hypothesis import assume, example, given, settings, strategies as st

from oscint.decomposition import IntegerInterval, good_components
from oscint.errors import InsufficientPoints
from oscint.experiments import good_piece_instances, sample_fewnomial
from oscint.fewnomial import make_fewnomial, scale_frame
from oscint.oracle import oracle_nodes, pv_multiplier_oracle
from oscint.quadrature import (
    GridSpec,
    decay_fit,
    default_grid,
    hilbert_value,
    multiplier_sup,
    piece_index,
    piece_multiplier,
    piece_sup,
    pv_multiplier,
    second_derivative_ratio,
    stationary_frequencies,
)


@pytest.mark.parametrize("k", range(2, 10))
def test_monomial_anchor(k):
    s = pv_multiplier(make_fewnomial([1], [k]), 0.0, 1e-7)
    expected = 1j * math.pi / k if k % 2 else 0j
    assert abs(s.value - expected) <= 1e-6
    assert s.abs_err_estimate <= 1e-7


@pytest.mark.parametrize("xi", [-1024.0, -1.0, 1.0, 1024.0, 3.7e-3])
def test_zero_phase_is_hilbert(xi):
    s = pv_multiplier(make_fewnomial([], []), xi, 1e-7)
    assert abs(s.value - hilbert_value(xi)) <= 1e-6
    assert pv_multiplier(make_fewnomial([], []), 0.0).value == 0


def test_known_value_cubic_plus_quadratic():
    # reference from the independent oracle at tight tolerance
    Q = make_fewnomial([1, 1], [2, 3])
    ref = pv_multiplier_oracle(Q, 2.0, tol=1e-6)
    assert abs(pv_multiplier(Q, 2.0, 1e-8).value - ref) < 1e-6


def test_far_stationary_point():
    # stationary point of the negative side near t = 4843 at xi = 0
    Q = make_fewnomial([22811.0, -3.144], [2, 3])
    s = pv_multiplier(Q, 0.0, 1e-6)
    assert s.abs_err_estimate <= 1e-6
    assert abs(s.value) < 1e-4


def test_tolerance_validated():
    Q = make_fewnomial([1], [3])
    for bad in (0.0, 1e-13, 0.5):
        with pytest.raises(ValueError):
            pv_multiplier(Q, 0.0, bad)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31), xi=st.floats(-50, 50), r=st.sampled_from([2.0**-6, 0.5, 3.0, 2.0**8]))
@example(seed=0, xi=3.8e-238, r=2.0**8)  # huge phase at t = 1 with a tiny xi
def test_conjugation_and_scaling(seed, xi, r):
    tol = 1e-6
    Q = sample_fewnomial(seed, 2, 8, 4.0)
    m = pv_multiplier(Q, xi, tol).value
    assert abs(pv_multiplier(Q.negated(), -xi, tol).value - m.conjugate()) <= 2 * tol
    assert abs(pv_multiplier(Q.scaled(r), xi * r, tol).value - m) <= 2 * tol


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**31), xi=st.sampled_from([-3.0, 0.0, 0.7, 6.0]))
def test_against_oracle(seed, xi):
    Q = sample_fewnomial(seed, 2, 6, 3.0)
    assume(oracle_nodes(Q, xi, 1e-5) <= 2e6)
    s = pv_multiplier(Q, xi, 1e-6)
    ref = pv_multiplier_oracle(Q, xi, tol=1e-5)
    assert abs(s.value - ref) <= 1e-5 + s.abs_err_estimate


def test_multiplier_sample_flags():
    s = pv_multiplier(make_fewnomial([1], [3]), 1.0)
    assert not s.ceiling_exceeded and s.certified
    js = s.to_json()
    assert js["abs"] == pytest.approx(abs(s.value))


def _t2_component():
    Q = make_fewnomial([1], [2])
    (comp,) = good_components(scale_frame(Q), 6, IntegerInterval(-64, 64))
    return Q, comp


def test_piece_index_offset():
    Q, comp = _t2_component()
    assert piece_index(scale_frame(Q), comp, 5) == 5
    Q2 = make_fewnomial([0.2], [3])
    (c2,) = good_components(scale_frame(Q2), 6, IntegerInterval(-64, 64))
    # gamma_1 = 7/3 so the first bump index is ceil(7/3) = 3
    assert piece_index(scale_frame(Q2), c2, 0) == 3


def test_piece_bounded_by_ceiling():
    Q, comp = _t2_component()
    for l in (0, 3, 8):
        s, _ = piece_sup(Q, comp, l)
        assert s <= 2 * math.log(2) + 1e-5


def test_even_monomial_piece_at_zero_frequency():
    # the cutoff is even and t^2 is even, so the odd kernel integrates to 0
    Q, comp = _t2_component()
    assert abs(piece_multiplier(Q, comp, 10, 0.0)) <= 0.15
    assert abs(piece_multiplier(Q, comp, 10, 0.0)) < 1e-6


def test_piece_outside_component_is_zero():
    Q = make_fewnomial([1], [2])
    (comp,) = good_components(scale_frame(Q), 6, IntegerInterval(-8, 8))
    assert piece_multiplier(Q, comp, 40, 1.0) == 0
    assert stationary_frequencies(Q, comp, 40) == []
    assert piece_sup(Q, comp, 40)[0] == 0.0


def test_decay_of_quadratic():
    Q, comp = _t2_component()
    fit = decay_fit(Q, comp, None, IntegerInterval(4, 16))
    assert 0.4 <= fit.delta_hat <= 0.6
    assert fit.residual <= 0.5
    assert fit.second_derivative_ratio >= 1.0


def test_second_derivative_chain_random():
    for Q, comp in good_piece_instances(6, seed=11):
        frame = scale_frame(Q)
        for l in (0, 5, 16):
            assert second_derivative_ratio(Q, comp, l, frame=frame) >= 1.0


def test_decay_needs_points():
    Q = make_fewnomial([1], [2])
    (comp,) = good_components(scale_frame(Q), 6, IntegerInterval(-8, 8))
    with pytest.raises(InsufficientPoints):
        decay_fit(Q, comp, [0.0, 1.0], IntegerInterval(30, 40))


def test_grid_and_sup():
    g = GridSpec(-2, 2, 1)
    assert g.values() == [-4.0, -2.0, -1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0, 2.0, 4.0]
    Q = make_fewnomial([1], [3])
    grid = default_grid(Q, per_octave=2)
    assert grid.k_lo < 0 < grid.k_hi
    res = multiplier_sup(Q, GridSpec(-4, 4, 1))
    assert res.certified_fraction == 1.0
    assert res.sup >= math.pi / 3 - 1e-6
    assert res.sup == pytest.approx(max(abs(s.value) for s in res.samples))
    with pytest.raises(ValueError):
        multiplier_sup(Q, GridSpec(1, 0, 1, include_zero=False))
