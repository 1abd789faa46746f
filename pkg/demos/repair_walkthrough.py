"""
Completing a certificate
========================

A point that satisfies the single 5 x 5 condition may still fail one of
the two 4 x 4 conditions, because the lift variables alpha are not pinned
down.  Folding alpha_1 into (x1, X11) reduces to the case alpha_1 = 0, where
alpha_2 has an explicit feasible interval; moving alpha_2 to its nearest end
fixes the point without touching (x, X, y, Y12).
"""
import numpy as np

from switchhull.hull2 import check
from switchhull.repair import alpha2_interval, classify, reduce_alpha1, repair, sample_lacking

pts = sample_lacking(seed=4, budget=3)
z = pts[0]
print("alpha before:", np.round(z.alpha, 6))
print(classify(z))
rep = check(z, "nobeta")
print({k: f"{v:.3e}" for k, v in rep.violated.items()})

work = reduce_alpha1(z) if z.alpha[0] > 0 else z
print("alpha_2 interval:", alpha2_interval(work))

fixed = repair(z)
print("alpha after: ", np.round(fixed.alpha, 6))
print("passes all four conditions:", bool(check(fixed, "nobeta")))
print("hull coordinates unchanged:", np.array_equal(z.vector()[:8], fixed.vector()[:8]))
