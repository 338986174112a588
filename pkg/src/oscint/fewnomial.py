"""Fewnomial phases Q(t) = a_1 t^alpha_1 + ... + a_d t^alpha_d and their scale constants.

Monomial indices are 1-based everywhere in the package, matching the usual
a_1 t^{alpha_1} notation.  Exponents are strictly increasing integers >= 2;
a linear term has to be absorbed into the frequency variable by the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import (
    DegeneratePhase,
    LinearTermPresent,
    NonIncreasingExponents,
    PhaseOverflow,
    ZeroCoefficient,
    FewnomialError,
)

__all__ = [
    "Fewnomial",
    "ScaleFrame",
    "make_fewnomial",
    "eval_phase",
    "scale_frame",
    "falling",
    "floor_log2",
    "floor_scaled_log2",
    "sparse_positive_roots",
]


@dataclass(frozen=True)
class Fewnomial:
    coeffs: tuple
    exponents: tuple

    @property
    def d(self) -> int:
        return len(self.exponents)

    @property
    def n(self) -> int:
        """Degree; 0 for the degenerate phase Q = 0."""
        return self.exponents[-1] if self.exponents else 0

    def to_json(self) -> dict:
        return {"coeffs": list(self.coeffs), "exponents": list(self.exponents)}

    @classmethod
    def from_json(cls, obj) -> "Fewnomial":
        return make_fewnomial(obj["coeffs"], obj["exponents"])

    def scaled(self, r: float) -> "Fewnomial":
        """Q_r(t) = Q(r t)."""
        return make_fewnomial(
            [a * r**k for a, k in zip(self.coeffs, self.exponents)], self.exponents
        )

    def negated(self) -> "Fewnomial":
        return make_fewnomial([-a for a in self.coeffs], self.exponents)

    def odd_part(self):
        return [(a, k) for a, k in zip(self.coeffs, self.exponents) if k % 2]

    def even_part(self):
        return [(a, k) for a, k in zip(self.coeffs, self.exponents) if not k % 2]

    def __str__(self):
        if not self.exponents:
            return "0"
        return " + ".join(f"{a:.6g}*t^{k}" for a, k in zip(self.coeffs, self.exponents))


def make_fewnomial(coeffs: Sequence[float], exponents: Sequence[int]) -> Fewnomial:
    coeffs = [float(a) for a in coeffs]
    if len(coeffs) != len(exponents):
        raise FewnomialError(
            f"{len(coeffs)} coefficients but {len(exponents)} exponents"
        )
    exps = []
    for k in exponents:
        if isinstance(k, float) and not k.is_integer():
            raise FewnomialError(f"exponent {k} is not an integer")
        exps.append(int(k))
    for a in coeffs:
        if not math.isfinite(a):
            raise FewnomialError(f"coefficient {a} is not finite")
        if a == 0.0:
            raise ZeroCoefficient("all coefficients must be nonzero")
    for k in exps:
        if k < 1:
            raise FewnomialError(f"exponent {k} is not a positive integer")
    if any(b <= a for a, b in zip(exps, exps[1:])):
        raise NonIncreasingExponents(f"exponents {exps} are not strictly increasing")
    if exps and exps[0] == 1:
        raise LinearTermPresent()
    return Fewnomial(tuple(coeffs), tuple(exps))


def falling(k: int, order: int) -> int:
    """k (k-1) ... (k-order+1)."""
    out = 1
    for i in range(order):
        out *= k - i
    return out


def eval_phase(Q: Fewnomial, t, order: int = 0):
    """Q^{(order)}(t); `t` may be a scalar or an array."""
    if order < 0:
        raise ValueError("order must be >= 0")
    scalar = np.ndim(t) == 0
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    # powers of |t| with the sign reattached, so parity holds exactly
    at, neg = np.abs(t), np.signbit(t)
    with np.errstate(over="ignore", invalid="ignore"):
        for a, k in zip(Q.coeffs, Q.exponents):
            if k < order:
                continue
            p = k - order
            term = (a * falling(k, order)) * at**p
            out = out + (np.where(neg, -term, term) if p % 2 else term)
    if not np.all(np.isfinite(out)):
        raise PhaseOverflow(f"Q^({order}) overflows at |t| up to {np.max(np.abs(t)):g}")
    return float(out) if scalar else out


def floor_log2(x: Fraction) -> int:
    """Exact floor(log2 x) for a positive rational."""
    p, q = x.numerator, x.denominator
    if p <= 0:
        raise ValueError("floor_log2 needs a positive argument")
    k = p.bit_length() - q.bit_length()
    if (p << -k if k < 0 else p) < (q << k if k > 0 else q):
        k -= 1
    return k


def floor_scaled_log2(x: float, k: int) -> int:
    """floor(k * log2|x|) for k >= 1, certified by exact comparison.

    A floating estimate is corrected until 2^m <= |x|^k < 2^(m+1) holds in
    exact rational arithmetic.
    """
    ax = abs(x)
    m = math.floor(k * math.log2(ax))
    power = Fraction(ax) ** k
    while Fraction(2) ** m > power:
        m -= 1
    while Fraction(2) ** (m + 1) <= power:
        m += 1
    return m


@dataclass(frozen=True)
class ScaleFrame:
    """Scale constants of one fewnomial.

    lam = 2^(1/n); lambda^b_j <= |a_j| < lambda^(b_j+1);
    lam_j = 2^(1/alpha_j); lam_j^(-B_j) <= |a_j| < lam_j^(-B_j+1);
    gamma_j = B_j / alpha_j (exact).
    """

    Q: Fewnomial
    lam: float
    b: tuple
    lam_j: tuple
    B: tuple
    gamma: tuple

    @property
    def n(self):
        return self.Q.n

    @property
    def d(self):
        return self.Q.d


def scale_frame(Q: Fewnomial) -> ScaleFrame:
    if Q.d == 0:
        raise DegeneratePhase("the zero phase has no scale frame")
    n = Q.n
    b = tuple(floor_scaled_log2(a, n) for a in Q.coeffs)
    B = tuple(-floor_scaled_log2(a, k) for a, k in zip(Q.coeffs, Q.exponents))
    return ScaleFrame(
        Q=Q,
        lam=2.0 ** (1.0 / n),
        b=b,
        lam_j=tuple(2.0 ** (1.0 / k) for k in Q.exponents),
        B=B,
        gamma=tuple(Fraction(Bj, k) for Bj, k in zip(B, Q.exponents)),
    )


def _sparse_sign_eval(logc, sgn, e):
    """t -> sum_j sgn_j exp(logc_j + e_j ln t), rescaled by its largest term."""

    def f(t):
        x = logc + e * math.log(t)
        return float(np.sum(sgn * np.exp(x - x.max())))

    return f


def sparse_positive_roots(coeffs, exps, lo: float, hi: float) -> list:
    """All roots in (lo, hi) of sum_j c_j t^(e_j), t > 0, e_j >= 0 distinct integers.

    Roots are isolated recursively: after dividing by the lowest power, the
    derivative has one term fewer and its roots split (lo, hi) into
    intervals on which the function is monotone.  Descartes' rule of signs
    short-cuts the recursion.  Evaluation is rescaled by the largest term so
    huge degrees do not overflow.
    """
    from scipy.optimize import brentq

    terms = sorted((int(k), float(c)) for c, k in zip(coeffs, exps) if c != 0.0)
    if len(terms) < 2 or not lo < hi:
        return []
    e = np.array([k for k, _ in terms], dtype=float)
    c = np.array([v for _, v in terms])
    sgn = np.sign(c)
    if np.count_nonzero(sgn[1:] != sgn[:-1]) == 0:
        return []
    f = _sparse_sign_eval(np.log(np.abs(c)), sgn, e)
    if len(terms) == 2:
        # exactly one positive root, |c0| = |c1| t^(e1 - e0)
        r = math.exp((math.log(abs(c[0])) - math.log(abs(c[1]))) / (e[1] - e[0]))
        return [r] if lo < r < hi else []
    e0 = e[0]
    crit = sparse_positive_roots(c[1:] * (e[1:] - e0), e[1:] - e0 - 1, lo, hi)
    pts = [lo] + crit + [hi]
    out = []
    vals = [f(p) for p in pts]
    for (a, fa), (b, fb) in zip(zip(pts, vals), zip(pts[1:], vals[1:])):
        if fa == 0.0 and a > lo:
            out.append(a)
        elif fa * fb < 0:
            out.append(brentq(f, a, b, xtol=1e-300, rtol=4 * np.finfo(float).eps))
    return sorted(set(out))
