import math

import numpy as np
import pytest

import oscint.experiments as ex
from oscint.decomposition import IntegerInterval, bad_set_0
from oscint.errors import InvalidDimensions
from oscint.experiments import (
    SweepRecord,
    derive_seed,
    good_piece_instances,
    logd_scan,
    parissis_growth,
    records_to_csv,
    replay_failure,
    sample_fewnomial,
    structure_suite,
    summarize,
    tie_instance,
    uniformity_sweep,
)
from oscint.fewnomial import scale_frame
from oscint.quadrature import GridSpec

SMALL_GRID = GridSpec(-2, 2, 1)


def test_seeds_are_deterministic_and_distinct():
    assert derive_seed(0, 1, 2) == derive_seed(0, 1, 2)
    assert len({derive_seed(0, 1, i) for i in range(1000)}) == 1000
    assert 0 <= derive_seed(5, 7) < 2**63


def test_sample_fewnomial():
    Q = sample_fewnomial(3, 4, 10, 6.0)
    assert Q == sample_fewnomial(3, 4, 10, 6.0)
    assert Q.d == 4 and all(2 <= k <= 10 for k in Q.exponents)
    assert all(1e-3 <= abs(a) <= 1e3 for a in Q.coeffs)
    full = sample_fewnomial(1, 9, 10, 2.0)
    assert full.exponents == tuple(range(2, 11))
    with pytest.raises(InvalidDimensions):
        sample_fewnomial(0, 10, 10, 2.0)
    with pytest.raises(InvalidDimensions):
        sample_fewnomial(0, 0, 10, 2.0)


def test_exponent_pairs_cover_all_choices():
    pairs = {sample_fewnomial(s, 2, 10, 1.0).exponents for s in range(2000)}
    assert len(pairs) == 36


def test_sweep_csv_byte_identical():
    a, _ = uniformity_sweep(2, [(2, 3), (2, 5)], 3, 4.0, SMALL_GRID, 1e-5, seed=9, threads=1, bootstrap=10)
    b, _ = uniformity_sweep(2, [(2, 3), (2, 5)], 3, 4.0, SMALL_GRID, 1e-5, seed=9, threads=1, bootstrap=10)
    assert records_to_csv(a, timing=False) == records_to_csv(b, timing=False)
    assert len(a) == 6 and all(r.certified_fraction == 1.0 for r in a)
    assert records_to_csv(a).splitlines()[0].split(",") == ex.CSV_COLUMNS
    with pytest.raises(InvalidDimensions):
        uniformity_sweep(2, [(2, 3, 4)], 1, grid=SMALL_GRID)


def test_sweep_thread_count_does_not_change_results():
    a, _ = uniformity_sweep(1, [(3,)], 4, 4.0, SMALL_GRID, 1e-5, seed=2, threads=1, bootstrap=10)
    b, _ = uniformity_sweep(1, [(3,)], 4, 4.0, SMALL_GRID, 1e-5, seed=2, threads=2, bootstrap=10)
    assert records_to_csv(a, False) == records_to_csv(b, False)


def _rec(seed, n, sup, cert=1.0):
    return SweepRecord(seed, 2, (2, n), 12.0, sup, 0.0, cert, 0.0)


def test_summary_inclusion_rules():
    recs = [_rec(i, 3, 1.0 + 0.01 * i) for i in range(25)]
    recs += [_rec(100 + i, 8, 1.2 + 0.01 * i) for i in range(25)]
    recs += [_rec(200 + i, 20, 5.0) for i in range(10)]          # too few
    recs += [_rec(300 + i, 20, 9.0, cert=0.5) for i in range(30)]  # uncertified
    s = summarize(recs, bootstrap=200)
    assert s.excluded == (20,)
    assert [g.key for g in s.groups] == [3, 8, 20]
    assert s.groups[2].count == 10 and s.groups[2].max_sup == 5.0
    assert s.slope == pytest.approx((1.44 - 1.24) / math.log2(8 / 3))
    assert s.ci_low <= s.slope <= s.ci_high
    js = s.to_json()
    assert "records" not in js and "label" not in js


def test_summary_with_single_group_has_no_slope():
    s = summarize([_rec(i, 3, 1.0) for i in range(30)], bootstrap=10)
    assert s.slope is None and s.ci_contains_zero is None


def test_parissis_small():
    recs, s = parissis_growth([2, 3], 3, tol=1e-5, seed=1, threads=1, bootstrap=10)
    # Q = a t^2 is even, so m(0) vanishes for n = 2
    assert all(r.sup == 0.0 for r in recs if r.n == 2)
    assert all(r.exponents == (2, 3) for r in recs if r.n == 3)
    with pytest.raises(InvalidDimensions):
        parissis_growth([3, 2], 1)


def test_logd_scan_labels_exploratory():
    s = logd_scan([1], 4, 2, SMALL_GRID, 1e-5, seed=0, threads=1, bootstrap=10)
    assert s.exploratory and s.c_hat is None
    assert s.to_json()["label"] == "exploratory"
    with pytest.raises(InvalidDimensions):
        logd_scan([4], 4, 1)


def test_good_piece_instances():
    inst = good_piece_instances(9, seed=4)
    assert [Q.d for Q, _ in inst] == [1, 2, 3] * 3
    for Q, comp in inst:
        assert ex.covers_pieces(scale_frame(Q), comp, IntegerInterval(0, 16))


def test_tie_convention():
    for k in (0, 3, 7):
        for g in (1, 2, 4):
            iv = bad_set_0(scale_frame(tie_instance(k)), g, 1, 2)
            assert (iv.lo, iv.hi) == (-2 * k - 2 * g, -2 * k + 2 * g)


def test_structure_suite_passes():
    rep = structure_suite(100, seed=3)
    assert rep.total_failures == 0
    assert rep.checks["set_equality"][0] > 0 and rep.checks["domination"][0] > 0
    with pytest.raises(InvalidDimensions):
        structure_suite(10)


def test_failures_are_recorded_and_replayable(monkeypatch):
    real = ex.brute_force_bad_set

    def off_by_one(Q, gamma, j1, j2, level, scan):
        ref = real(Q, gamma, j1, j2, level, scan)
        return ref[1:] if ref else ref

    monkeypatch.setattr(ex, "brute_force_bad_set", off_by_one)
    rep = structure_suite(100, seed=0, gammas=(1,), domination=False)
    assert rep.failed("set_equality") > 0
    entry = rep.failures[0]
    assert {"seed", "coeffs", "exponents", "gamma", "check"} <= set(entry)
    assert replay_failure(entry).failed("set_equality") > 0
    monkeypatch.setattr(ex, "brute_force_bad_set", real)
    assert replay_failure(entry).total_failures == 0
