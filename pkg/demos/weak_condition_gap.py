"""
Where the weaker moment condition stops being exact
===================================================

With no cost on Y12 the original moment matrix seems to describe the
projected hull exactly: random objectives show no gap.  Once Y12 is priced
it is strictly weaker.  Balanced directions, in which the best point of
every y pattern scores the same, expose the gap at once.
"""
import numpy as np

from switchhull.experiments import find_gap_witness, run_experiment, summary

rows = run_experiment("conjecture", 300, seed=11)
print("c_Y = 0:", summary(rows))

row = find_gap_witness(seed=1)
print(f"balanced trial {row.trial_id}: hull {row.oracle_value:.6f}, "
      f"weak relaxation {row.repr_value:.6f}, gap {row.gap:.4f}")
print("objective:", np.round(row.coefficients, 4))

rows = run_experiment("witness", 40, seed=2)
gaps = np.array([r.gap for r in rows])
print(f"{(gaps > 1e-4).sum()} of {len(gaps)} balanced objectives show a gap above 1e-4; "
      f"largest {gaps.max():.3f}")
