import csv
import io
import json

import numpy as np
import pytest

from switchhull import experiments
from switchhull.experiments import CSV_FIELDS, run_experiment, run_trial


def test_trial_is_deterministic():
    a = run_trial("exactness", 7, 0)
    b = run_trial("exactness", 7, 0)
    assert a.csv_values() == b.csv_values()
    assert run_trial("exactness", 8, 0).csv_values() != a.csv_values()


def test_rows_independent_of_order_and_workers():
    rows = run_experiment("exactness", 6, 3)
    assert [r.trial_id for r in rows] == list(range(6))
    tail = run_experiment("exactness", 3, 3, first_trial=3)
    assert [r.csv_values() for r in rows[3:]] == [r.csv_values() for r in tail]
    par = run_experiment("exactness", 6, 3, workers=2)
    assert experiments.csv_text(par) == experiments.csv_text(rows)


def test_csv_schema():
    rows = run_experiment("exactness", 3, 1)
    parsed = list(csv.DictReader(io.StringIO(experiments.csv_text(rows))))
    assert tuple(parsed[0]) == CSV_FIELDS
    for r, p in zip(rows, parsed):
        assert float(p["gap"]) == float(p["repr_value"]) - float(p["oracle_value"])
        assert p["status"] == "ok" and float(p["gap"]) >= -1e-6
        assert float(p["c_Y"]) == r.coefficients[7]
        assert len(p["oracle_value"].replace("-", "").replace(".", "").lstrip("0")) <= 17


def test_conjecture_draws_have_no_Y_term():
    rows = run_experiment("conjecture", 5, 2)
    assert all(r.coefficients[7] == 0 for r in rows)
    assert all(r.status == "ok" for r in rows)


def test_balanced_coefficients_tie_all_patterns():
    from switchhull.oracle import Objective, max_quad_box

    rng = np.random.default_rng(0)
    for _ in range(50):
        c = experiments.balanced_coefficients(rng)
        assert c[7] == 1.0 and np.abs(c).max() <= 10 + 1e-12
        Q = Objective.from_coefficients(c).Q_matrix()
        vals = [max_quad_box(c[:2], Q, y)[0] + c[5] * y[0] + c[6] * y[1] + c[7] * y[0] * y[1]
                for y in [(0, 0), (1, 0), (0, 1), (1, 1)]]
        assert vals == pytest.approx([0, 0, 0, 0], abs=1e-12)


def test_witness_and_dump(tmp_path):
    row = experiments.find_gap_witness(1)
    assert row is not None and row.gap > 1e-4 and row.coefficients[7] == 1.0
    path = tmp_path / "ce.jsonl"
    err = io.StringIO()
    n = experiments.dump_counterexamples([row], str(path), err)
    rec = json.loads(path.read_text())
    assert n == 1 and rec["trial_id"] == row.trial_id and set(rec["point"]) >= {"x", "alpha"}
    assert err.getvalue().startswith("COUNTEREXAMPLE ")


def test_solver_error_rows(monkeypatch):
    from switchhull import solver

    def boom(*a, **k):
        raise solver.SolverError("forced")

    monkeypatch.setattr(solver, "support", boom)
    rows = run_experiment("exactness", 2, 1)
    assert all(r.status == "solver_error" for r in rows)
    assert experiments.summary(rows)["solver_errors"] == 2


def test_rejects_bad_arguments():
    with pytest.raises(ValueError):
        run_experiment("exactness", 0, 1)
    with pytest.raises(ValueError):
        run_experiment("other", 1, 1)
