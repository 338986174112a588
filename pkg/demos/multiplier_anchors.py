"""
Principal-value multipliers with known values
=============================================

m(xi) = p.v. int e^{i(Q(t) - t xi)} dt/t.  For a single odd monomial
t^k the value at xi = 0 is i pi / k, even monomials give 0, and the
zero phase gives the Hilbert multiplier -i pi sgn(xi).
"""

import math

from oscint import make_fewnomial, pv_multiplier
from oscint.oracle import pv_multiplier_oracle

for k in range(2, 10):
    s = pv_multiplier(make_fewnomial([1.0], [k]), 0.0, tol=1e-8)
    exact = 1j * math.pi / k if k % 2 else 0j
    print(f"t^{k}: m(0) = {s.value:.10f}  error {abs(s.value - exact):.1e}  (estimate {s.abs_err_estimate:.1e})")

Z = make_fewnomial([], [])
for xi in (-1024.0, 1.0):
    print(f"Q = 0, xi = {xi:g}: m = {pv_multiplier(Z, xi).value:.8f}")

# a mixed phase, checked against the slow uniform-grid reference
Q = make_fewnomial([1.0, -0.3, 0.02], [2, 3, 5])
for xi in (-2.0, 0.0, 3.0):
    fast = pv_multiplier(Q, xi).value
    slow = pv_multiplier_oracle(Q, xi, tol=1e-5)
    print(f"xi = {xi:+.1f}: engine {fast:.6f}  reference {slow:.6f}")
