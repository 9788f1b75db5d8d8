"""Recover a single clustered pulse from 150 random projections.

Run with ``python3 demos/quickstart.py``. OMP and LAMP get the same
measurements; LAMP grows each greedy seed into its neighbors, so it needs
far fewer full correlation scans.
"""
import numpy as np

from lampcs import LampConfig, gen_sensing, lamp_smv, normalize_columns, omp
from lampcs.metrics import mse, relative_recovery
from lampcs.signals import gaussian_monocycle

N, M, K = 400, 150, 50

rng = np.random.default_rng(2024)
A = normalize_columns(gen_sensing(M, N, "gaussian", rng)).matrix
x = gaussian_monocycle(N, start=175, length=K)
y = A @ x.values

for name, res in [("omp", omp(A, y, K)),
                  ("lamp", lamp_smv(A, y, LampConfig(K=K, epsilon=0.02)))]:
    print(f"{name:5s} RR={relative_recovery(x.true_support, res.support):.2f} "
          f"MSE={mse(x.values, res.estimate()):.2e} seed searches={res.seed_searches}")
