"""Bad/good dyadic scales, dominating monomials and smooth partitions of unity.

Scale index l refers to the annulus |t| ~ lam^l with lam = 2^(1/n).  Two
monomials are *comparable* at scale l when their sizes at t = lam^l are
within a factor 2^gamma of each other; such l are bad.  Level 0 compares
|a_j| lam^(alpha_j l), level 1 compares the second-derivative weights
alpha_j (alpha_j - 1) |a_j| lam^(alpha_j l).

All interval endpoints are computed exactly: raising the defining inequality
to the n-th power turns it into a comparison of a rational number with a
power of two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import EmptyWindow, IndexOutOfRange
from .fewnomial import Fewnomial, ScaleFrame, floor_log2, scale_frame

__all__ = [
    "DEFAULT_GAMMA",
    "IntegerInterval",
    "BadSets",
    "GoodComponent",
    "PartitionOfUnity",
    "DominationReport",
    "gamma_min",
    "bad_set_0",
    "bad_set_1",
    "bad_sets",
    "default_window",
    "good_intervals",
    "good_components",
    "verify_domination",
    "minimal_passing_gamma",
    "smooth_step",
    "bump",
    "component_cutoff",
]

DEFAULT_GAMMA = 8
INF = math.inf


@dataclass(frozen=True)
class IntegerInterval:
    """Closed interval of integers; lo may be -inf and hi may be +inf."""

    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def finite(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    @property
    def cardinality(self):
        return int(self.hi - self.lo + 1) if self.finite else INF

    def __contains__(self, l) -> bool:
        return self.lo <= l <= self.hi

    def __iter__(self):
        if not self.finite:
            raise ValueError("cannot iterate an unbounded interval")
        return iter(range(int(self.lo), int(self.hi) + 1))

    def intersect(self, other: "IntegerInterval") -> Optional["IntegerInterval"]:
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return IntegerInterval(lo, hi) if lo <= hi else None

    def to_json(self):
        return [int(v) if math.isfinite(v) else None for v in (self.lo, self.hi)]


@dataclass(frozen=True)
class BadSets:
    gamma: int
    level0: Dict[Tuple[int, int], IntegerInterval] = field(default_factory=dict)
    level1: Dict[Tuple[int, int], IntegerInterval] = field(default_factory=dict)

    def intervals(self, levels=(0, 1)):
        out = []
        if 0 in levels:
            out.extend(self.level0.values())
        if 1 in levels:
            out.extend(self.level1.values())
        return out

    def to_json(self):
        def rows(m):
            return [
                {"j1": j1, "j2": j2, "lo": int(iv.lo), "hi": int(iv.hi)}
                for (j1, j2), iv in sorted(m.items())
            ]

        return {"bad0": rows(self.level0), "bad1": rows(self.level1)}


@dataclass(frozen=True)
class GoodComponent:
    """Maximal run of good scales.

    j1 dominates Q and j2 dominates Q'' (1-based indices) at every scale of
    `range`; `margin` is the smallest dominance ratio over the run.
    """

    range: IntegerInterval
    j1: int
    j2: int
    margin: float
    gamma: int

    def to_json(self):
        return {
            "lo": int(self.range.lo),
            "hi": int(self.range.hi),
            "j1": self.j1,
            "j2": self.j2,
            "margin": self.margin if math.isfinite(self.margin) else None,
        }


def gamma_min(d: int) -> int:
    """Smallest gamma for which the domination inequalities are expected to hold."""
    return math.ceil(math.log2(max(d, 1))) + 6


def _weight(Q: Fewnomial, j: int, level: int) -> Fraction:
    a = Fraction(abs(Q.coeffs[j - 1]))
    if level == 1:
        k = Q.exponents[j - 1]
        a *= k * (k - 1)
    return a


def _bad_interval(frame: ScaleFrame, gamma: int, j1: int, j2: int, level: int):
    Q = frame.Q
    if not (1 <= j1 <= Q.d and 1 <= j2 <= Q.d) or j1 == j2:
        raise IndexOutOfRange(f"invalid monomial pair ({j1}, {j2}) for d={Q.d}")
    if gamma < 1:
        raise ValueError("gamma must be a positive integer")
    if j1 > j2:
        j1, j2 = j2, j1
    n = Q.n
    delta = Q.exponents[j2 - 1] - Q.exponents[j1 - 1]
    # |w1| lam^(a1 l) vs |w2| lam^(a2 l), both sides to the n-th power:
    #   log2 R - n*gamma <= delta*l <= log2 R + n*gamma,  R = (w1/w2)^n
    R = (_weight(Q, j1, level) / _weight(Q, j2, level)) ** n
    L = floor_log2(R)
    U = L if Fraction(2) ** L == R else L + 1
    lo = -((-(U - n * gamma)) // delta)
    hi = (L + n * gamma) // delta
    return IntegerInterval(lo, hi) if lo <= hi else None


def bad_set_0(frame: ScaleFrame, gamma: int, j1: int, j2: int) -> Optional[IntegerInterval]:
    """{l : 2^-g |a_j2 lam^(a_j2 l)| <= |a_j1 lam^(a_j1 l)| <= 2^g |a_j2 lam^(a_j2 l)|}, or None."""
    return _bad_interval(frame, gamma, j1, j2, 0)


def bad_set_1(frame: ScaleFrame, gamma: int, j1: int, j2: int) -> Optional[IntegerInterval]:
    """Same as bad_set_0 with weights alpha_j (alpha_j - 1) a_j."""
    return _bad_interval(frame, gamma, j1, j2, 1)


def bad_sets(frame: ScaleFrame, gamma: int = DEFAULT_GAMMA) -> BadSets:
    out = BadSets(gamma)
    for j1 in range(1, frame.d + 1):
        for j2 in range(j1 + 1, frame.d + 1):
            iv = bad_set_0(frame, gamma, j1, j2)
            if iv is not None:
                out.level0[(j1, j2)] = iv
            iv = bad_set_1(frame, gamma, j1, j2)
            if iv is not None:
                out.level1[(j1, j2)] = iv
    return out


def _unit_scale(frame: ScaleFrame, j: int) -> float:
    # l at which |a_j| lam^(alpha_j l) = 1
    a, k = frame.Q.coeffs[j - 1], frame.Q.exponents[j - 1]
    return -frame.n * math.log2(abs(a)) / k


def default_window(frame: ScaleFrame, gamma: int = DEFAULT_GAMMA, pad: Optional[int] = None) -> IntegerInterval:
    """Finite working window in l.

    Covers every bad interval and every scale where a monomial has unit
    size, padded by `pad` scales (default 24 n, i.e. a factor 2^24 in t).
    """
    n = frame.n
    pad = 24 * n if pad is None else pad
    marks = [_unit_scale(frame, j) for j in range(1, frame.d + 1)]
    for iv in bad_sets(frame, gamma).intervals():
        marks.extend([iv.lo, iv.hi])
    return IntegerInterval(math.floor(min(marks)) - pad, math.ceil(max(marks)) + pad)


def good_intervals(frame: ScaleFrame, gamma: int, window: IntegerInterval, levels=(0, 1)) -> List[IntegerInterval]:
    """Maximal runs of `window` avoiding the bad intervals of the given levels."""
    if window is None or not window.finite:
        raise EmptyWindow("a finite window is required")
    bad = sorted(
        (iv for iv in bad_sets(frame, gamma).intervals(levels) if iv.intersect(window)),
        key=lambda iv: iv.lo,
    )
    out = []
    cursor = window.lo
    for iv in bad:
        if iv.lo > cursor:
            out.append(IntegerInterval(cursor, min(iv.lo - 1, window.hi)))
        cursor = max(cursor, iv.hi + 1)
        if cursor > window.hi:
            break
    if cursor <= window.hi:
        out.append(IntegerInterval(cursor, window.hi))
    return out


def _log2_sizes(frame: ScaleFrame, l: float, level: int) -> np.ndarray:
    Q = frame.Q
    out = []
    for j in range(1, Q.d + 1):
        w = _weight(Q, j, level)
        out.append(math.log2(w) + Q.exponents[j - 1] * l / frame.n)
    return np.array(out)


def good_components(frame: ScaleFrame, gamma: int = DEFAULT_GAMMA, window: Optional[IntegerInterval] = None) -> List[GoodComponent]:
    if window is None:
        window = default_window(frame, gamma)
    comps = []
    for iv in good_intervals(frame, gamma, window):
        log_margin = INF
        dom = []
        for level in (0, 1):
            ends = [_log2_sizes(frame, l, level) for l in (iv.lo, iv.hi)]
            j = int(np.argmax(ends[0])) + 1
            dom.append(j)
            if frame.d > 1:
                for sizes in ends:
                    others = np.delete(sizes, j - 1)
                    log_margin = min(log_margin, sizes[j - 1] - others.max())
        margin = INF if not math.isfinite(log_margin) else 2.0 ** min(log_margin, 1023.0)
        comps.append(GoodComponent(iv, dom[0], dom[1], margin, gamma))
    return comps


# -- partition of unity ------------------------------------------------------


def _s(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)


def smooth_step(x):
    """C-infinity step: 1 for x <= 0, 0 for x >= 1, g(1/2) = 1/2."""
    a, b = _s(1.0 - np.asarray(x, dtype=float)), _s(x)
    return a / (a + b)


@dataclass(frozen=True)
class PartitionOfUnity:
    """Bumps psi_l(t) = psi_0(log_base|t| - l) with psi_0(u) = g(u-1) - g(u).

    psi_0 is supported in 0 < u < 2, i.e. 1 < |t| < base^2, and the
    translates telescope to 1 on t != 0.
    """

    base: float

    def log_scale(self, t):
        t = np.abs(np.asarray(t, dtype=float))
        with np.errstate(divide="ignore"):
            return np.log2(t) / math.log2(self.base)

    def psi0(self, u):
        return smooth_step(np.asarray(u) - 1.0) - smooth_step(u)


def bump(pou: PartitionOfUnity, l: int, t):
    """psi_l(t); 0 at t = 0."""
    scalar = np.ndim(t) == 0
    t = np.asarray(t, dtype=float)
    out = np.where(t != 0, pou.psi0(pou.log_scale(t) - l), 0.0)
    out = np.clip(out, 0.0, 1.0)
    return float(out) if scalar else out


def component_cutoff(pou: PartitionOfUnity, comp, t):
    """Sum of psi_l over l in the component range (telescoped)."""
    rng = comp.range if isinstance(comp, GoodComponent) else comp
    scalar = np.ndim(t) == 0
    t = np.asarray(t, dtype=float)
    u = pou.log_scale(t)
    upper = smooth_step(u - rng.hi - 1.0) if math.isfinite(rng.hi) else np.ones_like(u)
    lower = smooth_step(u - rng.lo) if math.isfinite(rng.lo) else np.zeros_like(u)
    out = np.where(t != 0, np.clip(upper - lower, 0.0, 1.0), 0.0)
    return float(out) if scalar else out


# -- domination checks -------------------------------------------------------


@dataclass(frozen=True)
class DominationReport:
    """Sampled check of |Q| <= 2|a_j1 t^a_j1| and |Q''| >= |a_j2 a(a-1) t^(a-2)| / 2.

    q_ratio_max:      max |Q(t)| / |a_j1 t^alpha_j1|            (needs <= 2)
    q2_ratio_min:     min |Q''(t)| / |j2-th term of Q''|        (needs >= 1/2)
    q2_j1_ratio_min:  min |Q''(t)| / |a_j1 t^(alpha_j1 - 2)|    (reported only)
    """

    passed: bool
    q_ratio_max: float
    q2_ratio_min: float
    q2_j1_ratio_min: float
    points: int
    failures: int
    gamma: int


def _log2_abs_signed_sum(logs, signs, ref):
    # log2 |sum_j signs_j 2^logs_j| - ref, stable for huge exponents
    top = logs.max(axis=0)
    s = np.sum(signs * np.exp2(logs - top), axis=0)
    with np.errstate(divide="ignore"):
        return np.log2(np.abs(s)) + top - ref


def verify_domination(Q: Fewnomial, comp: GoodComponent, samples_per_scale: int = 9) -> DominationReport:
    if samples_per_scale < 3:
        raise ValueError("samples_per_scale must be >= 3")
    if not comp.range.finite:
        raise EmptyWindow("component range must be clamped to a finite window")
    n = Q.n
    ls = np.arange(int(comp.range.lo), int(comp.range.hi) + 1, dtype=float)
    v = (ls[:, None] + np.linspace(-2.0, 1.0, samples_per_scale)[None, :]).ravel()
    log2t = v / n
    alphas = np.array(Q.exponents, dtype=float)[:, None]
    log2a = np.array([math.log2(abs(a)) for a in Q.coeffs])[:, None]
    sgn_a = np.sign(np.array(Q.coeffs))[:, None]
    w2 = np.array([k * (k - 1) for k in Q.exponents], dtype=float)[:, None]

    j1, j2 = comp.j1 - 1, comp.j2 - 1
    q_logs = log2a + alphas * log2t
    q2_logs = log2a + np.log2(w2) + (alphas - 2.0) * log2t
    ref_q = q_logs[j1]
    ref_q2 = q2_logs[j2]
    ref_q2_j1 = log2a[j1, 0] + (alphas[j1, 0] - 2.0) * log2t

    worst_q, worst_q2, worst_q2_j1 = -INF, INF, INF
    failures = 0
    for side in (1.0, -1.0):
        par = side ** alphas  # sign of t^alpha for t of this sign
        par2 = side ** (alphas - 2.0)
        rq = np.exp2(_log2_abs_signed_sum(q_logs, sgn_a * par, ref_q))
        rq2 = np.exp2(_log2_abs_signed_sum(q2_logs, sgn_a * par2, ref_q2))
        rq2j1 = np.exp2(_log2_abs_signed_sum(q2_logs, sgn_a * par2, ref_q2_j1))
        failures += int(np.count_nonzero((rq > 2.0) | (rq2 < 0.5)))
        worst_q = max(worst_q, float(rq.max()))
        worst_q2 = min(worst_q2, float(rq2.min()))
        worst_q2_j1 = min(worst_q2_j1, float(rq2j1.min()))
    return DominationReport(
        passed=failures == 0,
        q_ratio_max=worst_q,
        q2_ratio_min=worst_q2,
        q2_j1_ratio_min=worst_q2_j1,
        points=2 * v.size,
        failures=failures,
        gamma=comp.gamma,
    )


def minimal_passing_gamma(Q: Fewnomial, gammas=range(1, 13), window=None, samples_per_scale: int = 9):
    """Smallest gamma in `gammas` for which every good component passes, else None."""
    frame = scale_frame(Q)
    for g in gammas:
        comps = good_components(frame, g, window)
        if all(verify_domination(Q, c, samples_per_scale).passed for c in comps):
            return g
    return None
