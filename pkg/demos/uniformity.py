"""
The supremum does not grow with the degree
==========================================

For two-term phases a t^2 + b t^n the supremum of |m(xi)| over xi stays
bounded as n grows, whatever the coefficients.  A small version of the
sweep: 10 random coefficient pairs per degree.
"""

from oscint.experiments import uniformity_sweep

records, summary = uniformity_sweep(2, [(2, 3), (2, 8), (2, 20), (2, 50)], draws=10, coeff_decades=12.0, seed=1)
for g in summary.groups:
    print(f"n = {g.key:2d}: max sup {g.max_sup:.3f}   median {g.median_sup:.3f}")

best = max(records, key=lambda r: r.sup)
print(f"largest value {best.sup:.3f} at xi = {best.argmax_xi:.4g} for exponents {best.exponents}")
# groups of 10 are below the 20 needed for the slope fit
print("slope fitted:", summary.slope)
