"""
Two switching variables: four descriptions of one hull
=======================================================

The same convex set written three exact ways (disjunctive, four PSD
conditions without beta, a single 5 x 5 condition) and one weaker way (the
original moment matrix).  Support values are compared with the exact
maximum over the rank-one points.
"""
import numpy as np

from switchhull import solver
from switchhull.oracle import Objective, support_atoms

rng = np.random.default_rng(5)
obj = Objective.from_coefficients(rng.uniform(-1, 1, 8))
print(obj)

exact, atom = support_atoms(obj)
print(f"hull maximum {exact:.8f} at y = {atom.y}, x = {np.round(atom.x, 4)}")

for system in ("disjunctive", "nobeta", "minimal", "conjecture"):
    res = solver.support(system, obj, accuracy=1e-7)
    print(f"{system:12s} {res.value:.8f}  gap {res.value - exact:+.1e}  ({res.iterations} iterations)")

# the maximizer of the single-condition system, as a point of the lift
res = solver.support("minimal", obj)
print(res.argmax)
