"""From three masses to the single stability parameter beta.

Run with ``python demos/01_masses_to_beta.py``.
"""

# %%
# The collinear configuration is fixed by the positive root of the Euler
# quintic.  Equal masses sit symmetrically, so the root is exactly 1.
import numpy as np

from eulerstab import MassTriple, central_config
from eulerstab.central_config import delta_from_geometry

cc = central_config(MassTriple(1, 1, 1))
print(f"equal masses: x = {cc.x:.15g}, beta = {cc.beta:.15g}, alpha = {cc.alpha:.15g}")

# %%
# Putting all the mass in the middle body gives the boundary beta = 0.
print("middle body only: beta =", central_config((0, 1, 0)).beta)

# %%
# beta never leaves [0, 7].  Sweep the mass simplex and look at the extremes.
rng = np.random.default_rng(0)
betas = np.array([central_config(m).beta for m in rng.dirichlet([0.3] * 3, size=2000)])
print(f"beta over 2000 random triples: min {betas.min():.4f}, max {betas.max():.4f}")

# %%
# delta is defined by sums over pairs of bodies and always equals beta + 1.
# The check below is an identity, not a fit.
worst = 0.0
for m in rng.uniform(0.01, 1, size=(500, 3)):
    c = central_config(m)
    worst = max(worst, abs(delta_from_geometry(c.masses, c.x) - c.beta - 1))
print(f"largest |delta - (beta + 1)| over 500 triples: {worst:.2e}")
