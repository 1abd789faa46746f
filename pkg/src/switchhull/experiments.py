"""Trial harnesses comparing solver supports with the exact oracle.

Every trial draws its objective from its own generator, seeded by
``SeedSequence(seed, spawn_key=(trial_id,))``, so a trial's row depends
only on ``(seed, trial_id)`` and not on the order or the process that runs
it.  Rows are always returned sorted by ``trial_id``.

Three draws are available:

``exactness``
    all eight coefficients uniform in [-1, 1], compared over ``minimal``;
``conjecture``
    the same with ``c_Y = 0``, compared over ``conjecture`` against the
    oracle that ignores ``Y12``;
``witness``
    ``c_x`` and ``Q`` uniform in [-1, 1], then ``c_y`` and ``c_Y`` chosen so
    that the best point of each of the four ``y`` patterns has value 0, and
    the vector rescaled to ``c_Y = +1`` (draws where ``c_Y`` is not
    positive and at least a tenth of the largest coefficient are redrawn).
    Such balanced directions make every atom family optimal at once; they
    are where the weaker conic condition of the ``conjecture``
    system loses exactness on the full hull.  Plain uniform draws with
    ``c_Y = 1`` almost never land there.
"""
from __future__ import annotations

import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import solver
from .hull2 import LiftedPoint, System
from .oracle import Objective, max_quad_box, support_atoms
from .pointfile import point_to_dict

COEFF_NAMES = ("c_x1", "c_x2", "Q11", "Q12", "Q22", "c_y1", "c_y2", "c_Y")
CSV_FIELDS = ("trial_id", "seed", *COEFF_NAMES, "oracle_value", "repr_value", "gap",
              "solve_iterations", "status")
COUNTEREXAMPLE_GAP = 1e-5
KINDS = ("exactness", "conjecture", "witness")
DEFAULT_SYSTEM = {"exactness": System.MINIMAL, "conjecture": System.CONJECTURE,
                  "witness": System.CONJECTURE}


def fmt(v: float) -> str:
    return format(float(v), ".17g")


def trial_rng(seed: int, trial_id: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial_id,)))


def balanced_coefficients(rng: np.random.Generator) -> np.ndarray:
    """A ``witness`` direction: every ``y`` pattern attains the same maximum 0."""
    while True:
        c = rng.uniform(-1.0, 1.0, 8)
        Q = np.array([[c[2], c[3]], [c[3], c[4]]])
        c[5] = -max_quad_box(c[:2], Q, (1.0, 0.0))[0]
        c[6] = -max_quad_box(c[:2], Q, (0.0, 1.0))[0]
        c[7] = -(max_quad_box(c[:2], Q, (1.0, 1.0))[0] + c[5] + c[6])
        if c[7] > 0.1 * np.abs(c).max():
            return c / c[7]


def draw_objective(kind: str, rng: np.random.Generator) -> np.ndarray:
    if kind == "exactness":
        return rng.uniform(-1.0, 1.0, 8)
    if kind == "conjecture":
        c = rng.uniform(-1.0, 1.0, 8)
        c[7] = 0.0
        return c
    if kind == "witness":
        return balanced_coefficients(rng)
    raise ValueError(f"unknown experiment kind {kind!r}")


@dataclass
class TrialRow:
    trial_id: int
    seed: int
    coefficients: np.ndarray
    oracle_value: float
    repr_value: float
    gap: float
    solve_iterations: int
    status: str
    point: Optional[LiftedPoint] = None
    message: str = ""

    def csv_values(self) -> list:
        return [str(self.trial_id), str(self.seed), *(fmt(t) for t in self.coefficients),
                fmt(self.oracle_value), fmt(self.repr_value), fmt(self.gap),
                str(self.solve_iterations), self.status]


def run_trial(kind: str, seed: int, trial_id: int, system=None,
              accuracy: float = 1e-6) -> TrialRow:
    system = System.parse(system or DEFAULT_SYSTEM[kind])
    c = draw_objective(kind, trial_rng(seed, trial_id))
    obj = Objective.from_coefficients(c)
    oracle, _ = support_atoms(obj, restrict_Y=(obj.c_Y == 0.0 and kind == "conjecture"))
    try:
        res = solver.support(system, obj, accuracy)
    except solver.SolverError as exc:
        nan = float("nan")
        return TrialRow(trial_id, seed, c, oracle, nan, nan, 0, "solver_error", message=str(exc))
    gap = res.value - oracle
    if kind == "exactness":
        bad = abs(gap) > COUNTEREXAMPLE_GAP
    else:
        bad = gap > COUNTEREXAMPLE_GAP
    return TrialRow(trial_id, seed, c, oracle, res.value, gap, res.iterations,
                    "counterexample" if bad else "ok", res.argmax)


def _run_one(args):
    return run_trial(*args)


def run_experiment(kind: str, trials: int, seed: int, system=None, accuracy: float = 1e-6,
                   workers: int = 1, first_trial: int = 0) -> list:
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if kind not in KINDS:
        raise ValueError(f"unknown experiment kind {kind!r}")
    jobs = [(kind, seed, t, system, accuracy) for t in range(first_trial, first_trial + trials)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            rows = list(pool.map(_run_one, jobs, chunksize=16))
    else:
        rows = [_run_one(j) for j in jobs]
    return sorted(rows, key=lambda r: r.trial_id)


def find_gap_witness(seed: int = 1, max_trials: int = 200, threshold: float = 1e-4,
                     accuracy: float = 1e-6) -> Optional[TrialRow]:
    """First ``witness`` trial whose conjecture support exceeds the hull's by ``threshold``."""
    for t in range(max_trials):
        row = run_trial("witness", seed, t, System.CONJECTURE, accuracy)
        if row.status != "solver_error" and row.gap > threshold:
            return row
    return None


def write_csv(rows, out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in rows:
        w.writerow(r.csv_values())


def csv_text(rows) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


def read_csv(path) -> list:
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def counterexample_records(rows) -> list:
    out = []
    for r in rows:
        if r.status != "counterexample":
            continue
        out.append({"trial_id": r.trial_id, "seed": r.seed,
                    "coefficients": dict(zip(COEFF_NAMES, map(float, r.coefficients))),
                    "oracle_value": r.oracle_value, "repr_value": r.repr_value, "gap": r.gap,
                    "point": point_to_dict(r.point)})
    return out


def dump_counterexamples(rows, path=None, stream=None, echo: bool = True) -> int:
    """Write every counterexample point in full (JSON lines) to ``path`` and to
    ``stream`` (standard error by default; ``echo=False`` silences it)."""
    recs = counterexample_records(rows)
    stream = (stream or sys.stderr) if echo else None
    lines = [json.dumps(r) for r in recs]
    if path is not None and lines:
        with open(path, "w") as f:
            f.write("\n".join(lines) + "\n")
    if stream is not None:
        for line in lines:
            print(f"COUNTEREXAMPLE {line}", file=stream)
    return len(recs)


def summary(rows) -> dict:
    gaps = np.array([r.gap for r in rows if r.status != "solver_error"])
    return {
        "trials": len(rows),
        "max_abs_gap": float(np.max(np.abs(gaps))) if gaps.size else float("nan"),
        "max_gap": float(np.max(gaps)) if gaps.size else float("nan"),
        "min_gap": float(np.min(gaps)) if gaps.size else float("nan"),
        "counterexamples": sum(r.status == "counterexample" for r in rows),
        "solver_errors": sum(r.status == "solver_error" for r in rows),
    }


def summary_line(rows) -> str:
    s = summary(rows)
    return (f"trials {s['trials']}  max|gap| {s['max_abs_gap']:.3e}  max gap {s['max_gap']:.3e}  "
            f"min gap {s['min_gap']:.3e}  counterexamples {s['counterexamples']}  "
            f"solver_errors {s['solver_errors']}")
