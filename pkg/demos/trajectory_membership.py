"""
Which short trajectories does the data explain?
===============================================

The spectra of one experiment span every length-L trajectory of the system,
so membership reduces to a least-squares problem.  A trajectory the system
can produce fits to round-off; a corrupted one leaves a clear residual.
"""

import numpy as np

from fdwfl import ExperimentConfig, Trajectory, benchmark_model, run_experiment
from fdwfl.lti import simulate
from fdwfl.wfl import generate_trajectory, membership_steady, membership_transient, rank_certificate

rng = np.random.default_rng(1)
model = benchmark_model()
data = run_experiment(ExperimentConfig(seed=0)).data

print("rank certificate (L=6):", rank_certificate(data, 6))

u = rng.standard_normal(10)
_, y = simulate(model, u, rng.standard_normal(4))
good = membership_transient(data, Trajectory(u, y))
print(f"simulated trajectory: feasible={good.feasible}, residual={good.residual:.1e}")

y_bad = y.copy()
y_bad[5] += 1.0
bad = membership_transient(data, Trajectory(u, y_bad))
print(f"corrupted trajectory: feasible={bad.feasible}, residual={bad.residual:.2f}")

# Ignoring the leakage is not harmless: the boundary term then acts as an
# unmodelled input and the steady-state test accepts the corrupted record.
print(f"steady-state test on corrupted trajectory: feasible={membership_steady(data, Trajectory(u, y_bad)).feasible}")

# The coefficients found for the good trajectory regenerate it.
traj, defect = generate_trajectory(data, good.G0, good.G1, 10)
print(f"regenerated output error: {np.abs(traj.y - y).max():.1e}")
