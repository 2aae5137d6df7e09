"""
Noise-robust estimation from a long noisy record
================================================

100 periods of the multisine are recorded with output noise at SNR 20.  The
period-averaged spectra no longer satisfy the exact relations, so the data
matrix becomes full rank.  Truncating its structured SVD to the rank a
noise-free system of order 4 would produce restores a usable estimator.
"""

import numpy as np

from fdwfl import ExperimentConfig, run_experiment, run_noisy_case_study
from fdwfl.frfeval import rank_heuristic_check

record = run_experiment(ExperimentConfig(periods=100, snr=20.0, seed=0))

# The singular values drop sharply after the rank of the noise-free data.
observed, expected, gap = rank_heuristic_check(record.data, L0=4, n_x_guess=4)
print(f"numerical rank {observed}, noise-free rank {expected}, gap ratio {gap:.3f}")

report = run_noisy_case_study(ExperimentConfig(periods=100, snr=20.0, seed=0))
print(f"max |H - Yz| = {report.max_err_H:.3f}")
print(f"max |T - Tz| = {report.max_err_T:.3f}")
print(f"bound {report.bound:.4f}: {'met' if report.passed else 'exceeded'}")

# Errors shrink as the noise gets weaker.
for snr in (5, 20, 100):
    r = run_noisy_case_study(ExperimentConfig(periods=100, snr=snr, seed=0, n_sweep=100))
    print(f"snr {snr:>3}: max error {max(r.max_err_H, r.max_err_T):.4f}")
