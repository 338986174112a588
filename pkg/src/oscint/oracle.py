"""Brute-force reference for the multiplier, sharing no code with the engine.

Composite Simpson on a uniform grid over [0, T] with grid doubling and one
Richardson step.  The phase is evaluated from the dense coefficient vector
with numpy.polynomial, and the tail past T is only bounded (one
integration by parts, |int_T^inf e^{i phi} dt/t| <= 2 / (T |phi'(T)|)),
never corrected.  The cost grows with the total phase on [0, T], so
instances with far stationary points are out of reach (see oracle_nodes).
"""

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import ToleranceNotMet

__all__ = ["pv_multiplier_oracle", "oracle_nodes"]

_CHUNK = 1 << 20


def _simpson(g, T, N):
    """Composite Simpson with N (even) intervals on [0, T], evaluated in chunks."""
    h = T / N
    total = 0j
    for s in range(0, N + 1, _CHUNK):
        i = np.arange(s, min(s + _CHUNK, N + 1))
        w = np.where((i == 0) | (i == N), 1.0, np.where(i % 2 == 1, 4.0, 2.0))
        total += np.sum(w * g(i * h))
    return total * h / 3.0


def _dense(Q):
    dense = np.zeros(Q.n + 1)
    for a, k in zip(Q.coeffs, Q.exponents):
        dense[k] = a
    ddense = P.polyder(dense) if Q.n else np.zeros(1)
    return dense, ddense


def _plan(Q, xi, tol):
    """Tail cut T and starting Simpson size N."""
    dense, ddense = _dense(Q)

    def tail_bound(T):
        d_plus = abs(P.polyval(T, ddense) - xi)
        d_minus = abs(P.polyval(-T, ddense) - xi)
        if d_plus == 0 or d_minus == 0:
            return np.inf
        return 2.0 / (T * d_plus) + 2.0 / (T * d_minus)

    def last_turning_point():
        # beyond every real root of phi' phi'' (both sides) 1/(t phi') is monotone
        if Q.n == 0:
            return 0.0
        roots = []
        d2 = P.polyder(ddense)
        for sign in (1.0, -1.0):
            d1 = ddense.copy()
            d1[0] -= xi
            d1 = d1 * sign ** np.arange(d1.size)
            prod = P.polymul(d1, d2 * sign ** np.arange(d2.size))
            r = P.polyroots(P.polytrim(prod)) if np.any(prod) else []
            roots.extend(x.real for x in r if abs(x.imag) <= 1e-9 * max(1.0, abs(x)))
        return max([0.0] + roots)

    T = max(1.0, 1.01 * last_turning_point())
    while not tail_bound(T) < tol / 2:
        T *= 2.0**0.125
        if T > 1e12:
            raise ToleranceNotMet("oracle could not place the tail cut")
    dmax = P.polyval(T, np.abs(ddense)) + abs(xi)
    N = 2 * int(np.ceil(T * dmax / 2.0)) + 2
    return T, N


def oracle_nodes(Q, xi, tol=1e-4) -> float:
    """Size of the first Simpson grid; the oracle needs a few times this many evaluations."""
    if Q.n == 0 and float(xi) == 0:
        return 0.0
    return float(_plan(Q, float(xi), tol)[1])


def pv_multiplier_oracle(Q, xi, tol=1e-4, max_nodes=1 << 27):
    xi = float(xi)
    if Q.n == 0 and xi == 0:
        return 0j
    dense, ddense = _dense(Q)

    def g(t):
        out = np.empty(t.shape, dtype=complex)
        pos = t > 0
        tp = t[pos]
        plus = np.exp(1j * (P.polyval(tp, dense) - tp * xi))
        minus = np.exp(1j * (P.polyval(-tp, dense) + tp * xi))
        out[pos] = (plus - minus) / tp
        # limit of the symmetrised bracket at 0: 2i (Q'(0) - xi)
        out[~pos] = 2j * (ddense[0] - xi)
        return out

    T, N = _plan(Q, xi, tol)
    # successive Simpson values S_N, S_2N combined by one Richardson step,
    # S_2N + (S_2N - S_N) / 15, whose error is below |S_2N - S_N| / 15 once
    # the grid resolves the oscillation; two extrapolants must also agree
    s_prev = _simpson(g, T, N)
    r_prev = None
    while True:
        N *= 2
        if N > max_nodes:
            raise ToleranceNotMet("oracle grid budget exhausted", value=s_prev)
        s_cur = _simpson(g, T, N)
        r_cur = s_cur + (s_cur - s_prev) / 15.0
        if abs(s_cur - s_prev) / 15.0 < tol / 4 and (r_prev is None or abs(r_cur - r_prev) < tol / 2):
            return complex(r_cur)
        s_prev, r_prev = s_cur, r_cur
