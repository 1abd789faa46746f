"""Independent reference implementations used only by the tests."""
import numpy as np
from scipy.optimize import minimize

_T = np.linspace(0.0, 1.0, 501)


def grid_max_quad_box(c, Q, ub):
    """501 x 501 grid over the box, then L-BFGS-B polish from the best cells."""
    c = np.asarray(c, dtype=float)
    Q = np.asarray(Q, dtype=float)
    g1, g2 = np.meshgrid(_T * ub[0], _T * ub[1], indexing="ij")
    f = c[0] * g1 + c[1] * g2 + Q[0, 0] * g1**2 + 2 * Q[0, 1] * g1 * g2 + Q[1, 1] * g2**2
    best = float(f.max())
    for k in np.argsort(f, axis=None)[-5:]:
        i, j = np.unravel_index(k, f.shape)
        x0 = np.array([g1[i, j], g2[i, j]])
        res = minimize(lambda x: -(c @ x + x @ Q @ x), x0, jac=lambda x: -(c + 2 * Q @ x),
                       bounds=[(0, ub[0]), (0, ub[1])], method="L-BFGS-B",
                       options={"ftol": 1e-15, "gtol": 1e-12})
        best = max(best, -float(res.fun))
    return best
