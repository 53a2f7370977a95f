"""
Probing the Heintze-Karcher inequality
======================================

The flow's monotonicity for ``B_{-1}`` leans on a Heintze-Karcher type
inequality for mean-convex hypersurfaces.  Here we look for violations among
random axisymmetric graphs.  This is a restricted search: only radial graphs
with a handful of cosine modes are sampled.
"""

# %%
import numpy as np

from dsflow import AmbientParams, compute_snapshot
from dsflow.verifier import SamplerParams, heintze_karcher_gap, random_admissible_sampler

ambient = AmbientParams(3)
gaps = []
for seed in range(40):
    grid = random_admissible_sampler(SamplerParams(
        rho0=1.0, M=4, amp_max=0.1, n=3, target_class="mean-convex", seed=seed, N=128))
    gaps.append(heintze_karcher_gap(compute_snapshot(grid, ambient, 1)))
gaps = np.array(gaps)

# %%
# A negative gap would be a counterexample worth saving.
print(f"{gaps.size} samples, min gap {gaps.min():.3e}, median {np.median(gaps):.3e}")
counts, edges = np.histogram(gaps, bins=6)
for c, lo, hi in zip(counts, edges[:-1], edges[1:]):
    print(f"[{lo:.2e}, {hi:.2e})  {'#' * c}")
