"""Sampling fractional Brownian motion three ways.

We draw paths with the exact Cholesky factorization, the circulant
(Davies-Harte) embedding and the Volterra transfer representation, then
check that the sample covariance matches R_H(s, t) and that the three
generators agree in distribution.
"""

import numpy as np

from fbmlab import HurstParam, TimeGrid, covariance_rh
from fbmlab.fbm import (
    covariance_matrix,
    sample_fbm_cholesky,
    sample_fbm_circulant,
    sample_fbm_circulant_batch,
    sample_fbm_transfer,
)

grid = TimeGrid(1.0, 64)
h = HurstParam(0.75)

print("Single paths from each generator (same seed, different streams):")
for sampler in (sample_fbm_cholesky, sample_fbm_circulant):
    path = sampler(grid, h, 1, seed=2024)
    print(f"  {path.generator_tag.value:10s} terminal value {path.values[-1, 0]:+.4f}")
path, wiener = sample_fbm_transfer(grid, h, 1, seed=2024)
print(f"  {path.generator_tag.value:10s} terminal value {path.values[-1, 0]:+.4f} "
      f"(driving Wiener terminal {wiener[-1, 0]:+.4f})")

print("\nSample covariance vs R_H on a 10^4-path circulant ensemble:")
paths = sample_fbm_circulant_batch(grid, h, 10_000, seed=7)
emp = np.cov(paths[:, 1:], rowvar=False, bias=True)
exact = covariance_matrix(grid, h)
err = np.abs(emp - exact).max()
print(f"  max entrywise error {err:.4f} "
      f"(Monte Carlo scale ~ {exact.max() / np.sqrt(10_000):.4f})")

t, s = 0.75, 0.5
print(f"\nR_H({s}, {t}) = {covariance_rh(s, t, h):.6f} at H = {h.h}")
print("Increment variance check E[(B_t - B_s)^2] = |t-s|^{2H}:")
inc = paths[:, grid.index_of(t)] - paths[:, grid.index_of(s)]
print(f"  empirical {inc.var():.5f} vs exact {abs(t - s) ** (2 * h.h):.5f}")
