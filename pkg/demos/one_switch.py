"""
One switching variable
======================

The hull of (x1, x1^2, y1) with 0 <= x1 <= y1 and y1 in {0, 1} is the
perspective cone cut by y1 <= 1.  Every member has a 4 x 4 doubly
nonnegative certificate; non-members do not.
"""
import numpy as np

from switchhull.cones import dnn4_contains
from switchhull.hull1 import h1_contains, h1_matrix, h1_witness

# a point halfway along the chord between the atoms (0, 0, 0) and (1, 1, 1)
p = (0.5, 0.5, 0.5)
print(h1_contains(p))
w = h1_witness(p)
print("s1 =", w.s1, " t1 =", w.t1)
print(np.round(w.W.dense(), 3))

# X11 below x1^2 / y1 breaks the perspective inequality
q = (0.5, 0.2, 0.5)
print(h1_contains(q))
print("certificate is DNN:", bool(dnn4_contains(h1_matrix(q))))

# the two descriptions agree on a random cloud
rng = np.random.default_rng(0)
pts = rng.random((20000, 3))
inside = np.array([bool(h1_contains(p)) for p in pts])
dnn = np.array([bool(dnn4_contains(h1_matrix(p))) for p in pts])
print(f"{inside.sum()} of {len(pts)} inside, disagreements: {(inside != dnn).sum()}")
