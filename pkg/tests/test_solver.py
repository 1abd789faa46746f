import numpy as np
import pytest

from switchhull import solver
from switchhull.hull2 import PSD_CONDITIONS, Atom, System, affine_map, atom_lift, check
from switchhull.oracle import Objective, support_atoms
from switchhull.sampling import random_lifted_hull_point, random_linear_point
from switchhull.smat import DEFAULT_TOL, psd_margin

SYSTEMS = list(System)


def test_separate_feasible_atom():
    for system in SYSTEMS:
        for a in [Atom("e", (0.5, 1)), Atom("e1", (0.3, 0)), Atom("0", (0, 0))]:
            assert solver.separate(atom_lift(a).vector(), system) is None


def test_separate_linear_cut():
    z = atom_lift(Atom("e", (0.5, 0.5)))
    v = z.vector()
    v[3] = 0.7  # X12 > min(x1 - alpha1, x2 - alpha2)
    cut = solver.separate(v, "minimal")
    assert cut.name in ("X12_le_x1_minus_alpha1", "X12_le_x2_minus_alpha2")
    assert np.linalg.norm(cut.normal) == pytest.approx(1.0)
    assert cut.normal @ v > cut.offset


def test_separate_psd_cut():
    # push a feasible interior point until the 5x5 condition breaks
    rng = np.random.default_rng(0)
    build = PSD_CONDITIONS["5x5"][0]
    found = 0
    for _ in range(2000):
        v = random_linear_point(rng).vector()
        if psd_margin(build(v)) > -1e-3:
            continue
        cut = solver.separate(v, "minimal")
        if cut is None or not cut.name.startswith("psd"):
            continue
        found += 1
        assert cut.name == "psd_5x5"
        assert cut.normal @ v > cut.offset
        # the cut is w'M(v')w >= 0 for the eigenvector w of M(v), linear in v'
        M = build(v)
        w = np.linalg.eigh(M)[1][:, 0]
        assert w @ M @ w < 0
        C, B = affine_map(build, 5)
        g = np.array([w @ Bk @ w for Bk in B])
        nrm = np.linalg.norm(g)
        assert cut.normal == pytest.approx(-g / nrm, abs=1e-8)
        assert cut.offset == pytest.approx(w @ C @ w / nrm, abs=1e-8)
    assert found > 20


@pytest.mark.parametrize("system", SYSTEMS)
def test_cuts_are_valid(system):
    rng = np.random.default_rng(1)
    feasible = [random_lifted_hull_point(rng).vector() for _ in range(300)]
    n = 0
    for _ in range(3000):
        v = rng.random(10)
        cut = solver.separate(v, system)
        if cut is None:
            continue
        n += 1
        assert cut.normal @ v > cut.offset
        for p in feasible[:30]:
            assert cut.normal @ p <= cut.offset + 1e-9, cut.name
    assert n > 100


def test_disjunctive_beta_cut_names():
    z = atom_lift(Atom("e1", (0.5, 0)))
    v = z.vector()
    v[2] = 0.1  # X11 below beta_1 = alpha_1^2 / (y1 - Y12) = 0.25
    cut = solver.separate(v, "disjunctive")
    assert cut.name.startswith("beta1") or cut.name.startswith("psd")
    assert cut.normal @ v > cut.offset


@pytest.mark.parametrize("system", SYSTEMS)
def test_support_examples(system):
    r = solver.support(system, Objective(c_x=(1, 1)))
    assert r.value == pytest.approx(2, abs=1e-6) and r.certified_gap <= 1e-6
    assert solver.support(system, Objective(c_Y=1)).value == pytest.approx(1, abs=1e-6)


def test_support_result_contract():
    rng = np.random.default_rng(2)
    for system in SYSTEMS:
        obj = Objective.from_coefficients(rng.uniform(-1, 1, 8))
        r = solver.support(system, obj, 1e-6)
        assert r.certified_gap <= 1e-6
        assert r.upper_bound == pytest.approx(r.value + r.certified_gap)
        assert check(r.argmax, system, DEFAULT_TOL.loosened(10))
        assert obj.lifted_vector() @ r.argmax.vector() == pytest.approx(r.value, abs=1e-12)
        again = solver.support(system, obj, 1e-6)
        assert (again.value, again.iterations) == (r.value, r.iterations)
        if system is System.DISJUNCTIVE:
            assert r.argmax.beta is not None


def test_support_accuracy_floor():
    with pytest.raises(ValueError):
        solver.support("minimal", Objective(c_x=(1, 1)), 1e-9)


def test_iteration_cap_is_fatal():
    with pytest.raises(solver.SolverError, match="iteration cap"):
        solver.support("minimal", Objective(c_x=(1, -1), Q=(0.3, -0.2, 0.1)), max_iter=50)


def test_iteration_cap_formula():
    assert solver.iteration_cap(1e-6, 1.0) > 2 * 100 * np.log(np.sqrt(10) / 2 / 1e-6)


def test_minimal_matches_oracle():
    rng = np.random.default_rng(3)
    for _ in range(100):
        obj = Objective.from_coefficients(rng.uniform(-1, 1, 8))
        assert solver.support("minimal", obj).value == pytest.approx(
            support_atoms(obj)[0], abs=1e-5)


def test_regression_balanced_direction():
    # this direction once collapsed the ellipsoid's shape matrix through round-off
    c = [0.38672584229304996, 0.09991097025053157, 0.21502374706902705, 0.040873854887104814,
         0.40763531448199974, -0.601749589362077, -0.5075462847325313, -0.08174770977420942]
    obj = Objective.from_coefficients(c)
    for system in SYSTEMS:
        r = solver.support(system, obj)
        assert r.value >= support_atoms(obj)[0] - 1e-6


def test_conjecture_dominates_minimal():
    rng = np.random.default_rng(4)
    for _ in range(100):
        obj = Objective.from_coefficients(rng.uniform(-1, 1, 8))
        assert (solver.support("conjecture", obj).value
                >= solver.support("minimal", obj).value - 2e-6)


def test_minimal_beta():
    z = atom_lift(Atom("e1", (0.5, 0)))
    assert solver.minimal_beta(z.with_beta(None)) == pytest.approx((0.25, 0.0))
