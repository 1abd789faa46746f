"""Property suites run by ``switchhull selftest``.

Each suite draws from its own generator (derived from the master seed and
the suite's index) and returns ``(passed, detail)``.  Sample sizes are a
desk-scale cut of the full test suite; the whole run takes well under a
minute once the compiled kernels are cached.
"""
from __future__ import annotations

import time

import numpy as np

from . import solver
from .cones import dnn4_contains
from .experiments import find_gap_witness, run_experiment
from .hull1 import h1_contains, h1_matrix
from .hull2 import DecompositionError, _m3x3, decompose
from .oracle import Objective, max_quad_box, support_atoms
from .repair import repair, sample_lacking
from .sampling import random_lifted_hull_point, random_linear_point
from .smat import TolerancePolicy, eig_min


def literal_lambda_weights(y, Y12):
    """The weights with ``y1 - Y12`` in the ``e2`` slot: the mutant."""
    y1, y2 = y
    return (1.0 - y1 - y2 + Y12, y1 - Y12, y1 - Y12, Y12)


def suite_eigen(rng, n=300):
    worst = 0.0
    for _ in range(n):
        d = int(rng.integers(1, 6))
        a = rng.normal(size=(d, d))
        a = a + a.T
        worst = max(worst, abs(eig_min(a)[0] - np.linalg.eigvalsh(a)[0]) / (1 + np.abs(a).max()))
    return worst <= 1e-12, f"max relative eigenvalue error {worst:.1e}"


def suite_hull1(rng, n=3000):
    bad = pos = 0
    for p in rng.random((n, 3)):
        inside = bool(h1_contains(p))
        pos += inside
        bad += inside != bool(dnn4_contains(h1_matrix(p)))
    return bad == 0 and 0 < pos < n, f"{bad} disagreements, {pos}/{n} inside"


def suite_redundant_3x3(rng, n=5000):
    worst = np.inf
    for _ in range(n):
        M = _m3x3(random_linear_point(rng).vector())
        worst = min(worst, np.linalg.eigvalsh(M)[0] / (1 + np.abs(M).max()))
    return worst >= -1e-8, f"min scaled eig_min {worst:.2e}"


def _decomposition_failures(rng, n, weights) -> int:
    fails = 0
    for _ in range(n):
        try:
            decompose(random_lifted_hull_point(rng), weights=weights)
        except DecompositionError:
            fails += 1
    return fails


def suite_decomposition(rng, n=2000):
    fails = _decomposition_failures(rng, n, None)
    return fails == 0, f"{fails}/{n} failures"


def suite_decomposition_mutation(rng, n=200):
    fails = _decomposition_failures(rng, n, literal_lambda_weights)
    return fails > 0, f"mutant rejected on {fails}/{n} points"


def suite_repair(rng, n=100):
    pts = sample_lacking(int(rng.integers(2**31)), n)
    tol = TolerancePolicy(psd_tol=1e-8)
    ok = 0
    for z in pts:
        try:
            repair(z, tol)
            ok += 1
        except Exception:  # noqa: BLE001 - any failure counts against the suite
            pass
    return len(pts) == n and ok == n, f"{ok}/{len(pts)} repaired ({n} requested)"


def suite_oracle(rng, n=100, grid=201):
    t = np.linspace(0.0, 1.0, grid)
    g1, g2 = np.meshgrid(t, t, indexing="ij")
    worst = 0.0
    for _ in range(n):
        c = rng.uniform(-1, 1, 2)
        q = rng.uniform(-1, 1, 3)
        val, x = max_quad_box(c, q, (1.0, 1.0))
        f = c[0] * g1 + c[1] * g2 + q[0] * g1**2 + 2 * q[1] * g1 * g2 + q[2] * g2**2
        Q = np.array([[q[0], q[1]], [q[1], q[2]]])
        attained = abs(c @ x + x @ Q @ x - val)
        worst = max(worst, f.max() - val, attained)
    return worst <= 1e-12, f"grid beats oracle by at most {worst:.1e}"


def suite_exactness(rng, n=20):
    worst = 0.0
    for _ in range(n):
        obj = Objective.from_coefficients(rng.uniform(-1, 1, 8))
        worst = max(worst, abs(solver.support("minimal", obj).value - support_atoms(obj)[0]))
    return worst <= 1e-5, f"max |gap| {worst:.2e}"


def suite_conjecture(rng, n=20):
    rows = run_experiment("conjecture", n, int(rng.integers(2**31)))
    bad = sum(r.status != "ok" for r in rows)
    return bad == 0, f"{bad} non-ok rows of {n}"


def suite_witness(rng):
    row = find_gap_witness(int(rng.integers(2**31)))
    if row is None:
        return False, "no witness"
    return True, f"trial {row.trial_id}: gap {row.gap:.3e}"


SUITES: dict = {
    "eigen": suite_eigen,
    "hull1": suite_hull1,
    "redundant_3x3": suite_redundant_3x3,
    "decomposition": suite_decomposition,
    "decomposition_mutation": suite_decomposition_mutation,
    "repair": suite_repair,
    "oracle": suite_oracle,
    "exactness": suite_exactness,
    "conjecture": suite_conjecture,
    "witness": suite_witness,
}


def run(seed: int = 0, suites: dict = SUITES, out=print) -> bool:
    ok = True
    for i, (name, fn) in enumerate(suites.items()):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i,)))
        t0 = time.perf_counter()
        passed, detail = fn(rng)
        dt = time.perf_counter() - t0
        ok &= passed
        out(f"{'PASS' if passed else 'FAIL'}  {name:<24} {dt:7.2f}s  {detail}")
    return ok
