import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oscint.errors import (
    DegeneratePhase,
    FewnomialError,
    LinearTermPresent,
    NonIncreasingExponents,
    PhaseOverflow,
    ZeroCoefficient,
)
from oscint.fewnomial import (
    Fewnomial,
    eval_phase,
    floor_log2,
    floor_scaled_log2,
    make_fewnomial,
    scale_frame,
    sparse_positive_roots,
)


def test_construction_examples():
    Q = make_fewnomial([1, 1], [2, 4])
    assert (Q.d, Q.n) == (2, 4)
    Q = make_fewnomial([0.5, -2], [3, 7])
    assert (Q.d, Q.n) == (2, 7)
    Z = make_fewnomial([], [])
    assert (Z.d, Z.n) == (0, 0)


@pytest.mark.parametrize(
    "coeffs, exps, err",
    [
        ([1], [1], LinearTermPresent),
        ([1, 1], [4, 2], NonIncreasingExponents),
        ([1, 1], [3, 3], NonIncreasingExponents),
        ([0.0, 1], [2, 3], ZeroCoefficient),
        ([1], [2, 3], FewnomialError),
        ([math.inf], [2], FewnomialError),
        ([1], [0], FewnomialError),
        ([1], [2.5], FewnomialError),
    ],
)
def test_construction_rejects(coeffs, exps, err):
    with pytest.raises(err):
        make_fewnomial(coeffs, exps)


def test_linear_term_message_points_to_absorption():
    with pytest.raises(LinearTermPresent, match="frequency"):
        make_fewnomial([5, 1], [1, 3])


def test_json_round_trip():
    Q = make_fewnomial([0.5, -2e-7], [3, 17])
    assert Fewnomial.from_json(Q.to_json()) == Q


def test_eval_phase_examples():
    assert eval_phase(make_fewnomial([1, 1], [2, 4]), 1.0, 2) == 14.0
    assert eval_phase(make_fewnomial([3], [5]), 2.0, 2) == 480.0
    Q = make_fewnomial([1], [2])
    assert eval_phase(Q, 7.3, 3) == 0.0
    np.testing.assert_array_equal(eval_phase(Q, np.array([-1.0, 2.0]), 3), [0.0, 0.0])


def test_eval_phase_overflow():
    with pytest.raises(PhaseOverflow):
        eval_phase(make_fewnomial([1], [9]), 1e200)
    with pytest.raises(ValueError):
        eval_phase(make_fewnomial([1], [2]), 1.0, -1)


def test_scale_frame_examples():
    f = scale_frame(make_fewnomial([1], [2]))
    assert f.lam == pytest.approx(math.sqrt(2), rel=4 * np.finfo(float).eps)
    assert (f.b, f.B, f.gamma) == ((0,), (0,), (Fraction(0),))
    f = scale_frame(make_fewnomial([2], [2]))
    assert f.b == (2,) and f.B == (-2,) and f.gamma == (Fraction(-1),)
    f = scale_frame(make_fewnomial([-0.3], [2]))
    assert f.b == (-4,)
    with pytest.raises(DegeneratePhase):
        scale_frame(make_fewnomial([], []))


def test_bracketing_random_ensemble():
    rng = np.random.default_rng(7)
    for _ in range(10_000):
        d = int(rng.integers(1, 7))
        exps = np.sort(rng.choice(np.arange(2, 65), d, replace=False))
        coeffs = rng.choice([-1, 1], d) * 10.0 ** rng.uniform(-8, 8, d)
        f = scale_frame(make_fewnomial(coeffs, exps.tolist()))
        for a, k, b, B, lam_j in zip(f.Q.coeffs, f.Q.exponents, f.b, f.B, f.lam_j):
            assert f.lam**b <= abs(a) < f.lam ** (b + 1)
            assert lam_j ** (-B) <= abs(a) < lam_j ** (-B + 1)


@settings(max_examples=300, deadline=None)
@given(
    a=st.floats(1e-12, 1e12, allow_nan=False) | st.sampled_from([2.0**k for k in range(-40, 41)]),
    k=st.integers(1, 80),
)
def test_floor_scaled_log2_exact(a, k):
    m = floor_scaled_log2(a, k)
    p = Fraction(a) ** k
    assert Fraction(2) ** m <= p < Fraction(2) ** (m + 1)


def test_floor_log2_powers():
    for k in range(-70, 70):
        assert floor_log2(Fraction(2) ** k) == k
        assert floor_log2(Fraction(2) ** k * Fraction(3, 2)) == k
    with pytest.raises(ValueError):
        floor_log2(Fraction(0))


def _horner(Q, t):
    dense = [0.0] * (Q.n + 1)
    for a, k in zip(Q.coeffs, Q.exponents):
        dense[k] = a
    acc = 0.0
    for c in reversed(dense):
        acc = acc * t + c
    return acc


@settings(max_examples=200, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    e=st.floats(-20, 20),
    sign=st.sampled_from([-1.0, 1.0]),
)
def test_matches_horner(seed, e, sign):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 5))
    exps = np.sort(rng.choice(np.arange(2, 17), d, replace=False)).tolist()
    Q = make_fewnomial(rng.choice([-1, 1], d) * 10.0 ** rng.uniform(-3, 3, d), exps)
    t = sign * 2.0**e
    try:
        v = eval_phase(Q, t)
    except PhaseOverflow:
        return
    # error measured against the size of the summands, which is what
    # floating evaluation can control under cancellation
    scale = sum(abs(a) * abs(t) ** k for a, k in zip(Q.coeffs, Q.exponents))
    assert abs(v - _horner(Q, t)) <= 1e-12 * scale


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0.01, 100), min_size=1, max_size=4), st.floats(1e-3, 1e3))
def test_parity(mags, t):
    d = len(mags)
    even = make_fewnomial(mags, [2 * (i + 1) for i in range(d)])
    odd = make_fewnomial(mags, [2 * i + 3 for i in range(d)])
    assert eval_phase(even, -t) == eval_phase(even, t)
    assert eval_phase(odd, -t) == -eval_phase(odd, t)


def test_odd_even_parts():
    Q = make_fewnomial([1, 2, 3], [2, 3, 6])
    assert Q.odd_part() == [(2.0, 3)]
    assert Q.even_part() == [(1.0, 2), (3.0, 6)]
    assert Q.scaled(2.0).coeffs == (4.0, 16.0, 192.0)
    assert Q.negated().coeffs == (-1.0, -2.0, -3.0)


def test_sparse_roots_product():
    roots = [0.3, 0.7, 1.1, 5.0, 9.0]
    c = np.poly1d([1.0])
    for z in roots:
        c = c * np.poly1d([1.0, -z])
    got = sparse_positive_roots(c.coeffs[::-1], range(len(c.coeffs)), 0.01, 100)
    np.testing.assert_allclose(got, roots, rtol=1e-12)


def test_sparse_roots_large_degree():
    # t^60 - 2 t^2 + 1 has roots near 1 and 2^(-1/2) ... checked by sign changes
    c, e = [1.0, -2.0, 1.0], [0, 2, 60]
    got = sparse_positive_roots(c, e, 1e-3, 10.0)
    f = lambda t: 1 - 2 * t**2 + t**60
    assert len(got) == 2
    for r in got:
        assert abs(f(r)) < 1e-10
    assert sparse_positive_roots([1.0, 2.0], [0, 3], 0.0, 10.0) == []
