"""
Per-scale pieces decay geometrically
=====================================

On a good component the multiplier is split into pieces, one per dyadic
scale of the dominant monomial.  Far from the unit scale the phase has
a large second derivative, so each piece is small; the fit below
estimates the decay rate delta in s(l) ~ C 2^(-delta l).
"""

from oscint import IntegerInterval, decay_fit, good_components, make_fewnomial, scale_frame
from oscint.experiments import covers_pieces

Q = make_fewnomial([1.0], [2])
(comp,) = good_components(scale_frame(Q), 6, IntegerInterval(-64, 64))
fit = decay_fit(Q, comp, None, IntegerInterval(4, 16))
print("Q =", Q)
for l, s in fit.levels:
    print(f"  l = {l:2d}   max_xi |piece| = {s:.5f}")
print(f"delta = {fit.delta_hat:.3f} (van der Corput predicts 1/2), residual {fit.residual:.3f}")

# a three-term phase, on a component whose cutoff is 1 on all pieces used
Q = make_fewnomial([1e-4, 1.0, 1e4], [3, 5, 8])
frame = scale_frame(Q)
levels = IntegerInterval(4, 12)
comp = next(c for c in good_components(frame, 8) if covers_pieces(frame, c, levels))
fit = decay_fit(Q, comp, None, levels)
print("Q =", Q, " component", comp.range.lo, "..", comp.range.hi, "dominant", comp.j1)
print(f"delta = {fit.delta_hat:.3f}, residual {fit.residual:.3f}, "
      f"min second-derivative ratio {fit.second_derivative_ratio:.2f}")
