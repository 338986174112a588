"""
Growth like log n for full polynomials
======================================

When every power up to n is available the bound must grow.  The
polynomial

    P(t) = (pi/2) [1 - (1 + (n-1) t) (1 - t)^(n-1)]

has no constant or linear term, rises to about pi/2 within t ~ (log n)/n
and stays there up to t = 1.  On that plateau e^{iP(t)} ~ i while
P(-t) stays small, so the part of m(0) = int_0^inf (e^{iP(t)} - e^{iP(-t)}) dt/t
coming from the plateau is about i log(n / log n).  Random coefficients almost never
produce such a plateau, which is why random sweeps show no growth.
"""

import math

import numpy as np
from numpy.polynomial import polynomial as P

from oscint import make_fewnomial, pv_multiplier


def plateau(n):
    c = P.polymul([1.0, n - 1.0], P.polypow([1.0, -1.0], n - 1))
    c = -c * math.pi / 2
    c[0] += math.pi / 2
    exps = [k for k in range(2, n + 1) if c[k] != 0]
    return make_fewnomial([c[k] for k in exps], exps)


ns, vals = [], []
for n in (3, 4, 6, 8, 12, 16, 20):
    s = pv_multiplier(plateau(n), 0.0, tol=1e-6)
    ns.append(n)
    vals.append(abs(s.value))
    print(f"n = {n:2d}   |m(0)| = {abs(s.value):.4f}   log n = {math.log(n):.3f}")

slope, icpt = np.polyfit(np.log(ns), vals, 1)
print(f"|m(0)| ~ {slope:.2f} log n {icpt:+.2f}")
# past n ~ 20 the binomial coefficients cancel to ~1e-8 and the
# requested tolerance is no longer certifiable in double precision
