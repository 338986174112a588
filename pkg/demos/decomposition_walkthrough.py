"""
Splitting the scales of a fewnomial into bad and good ranges
=============================================================

Q(t) = t^2 + t^4 has two monomials that trade places around |t| = 1.
Scale l stands for |t| ~ lambda^l with lambda = 2^(1/n).  Near the
crossover neither term dominates (bad scales); away from it one term
carries Q and another carries Q''.
"""

import numpy as np

from oscint import IntegerInterval, bad_sets, good_components, make_fewnomial, scale_frame, verify_domination

Q = make_fewnomial([1.0, 1.0], [2, 4])
frame = scale_frame(Q)
print("Q(t) =", Q)
print("lambda =", frame.lam, " b =", frame.b, " gamma_j =", [str(g) for g in frame.gamma])

# bad sets for a small separation gamma, so the picture stays readable
gamma = 2
bad = bad_sets(frame, gamma)
for level, ivs in ((0, bad.level0), (1, bad.level1)):
    for (j1, j2), iv in ivs.items():
        print(f"level {level}, pair ({j1},{j2}): bad scales {iv.lo}..{iv.hi}")

window = IntegerInterval(-50, 50)
for c in good_components(frame, gamma, window):
    rep = verify_domination(Q, c)
    print(f"good scales {c.range.lo}..{c.range.hi}: j1={c.j1} j2={c.j2}, "
          f"max |Q|/|dominant| = {rep.q_ratio_max:.3f}, min |Q''|/|dominant''| = {rep.q2_ratio_min:.3f}")

# the dominant term really does carry Q on the good ranges
t = np.geomspace(frame.lam**-50, frame.lam**-12, 5)
print("on the left range Q(t)/t^2 =", np.round((t**2 + t**4) / t**2, 6))
