"""The circular orbit, where everything has a closed form.

Run with ``python demos/02_circular_orbit.py``.
"""

# %%
# At e = 0 the linear system has constant coefficients.  The end matrix has
# a real pair exp(+-2 pi sqrt(alpha_1)) and a unit pair exp(+-2 pi i theta).
import numpy as np

from eulerstab import EssentialSystem, analytic_e0_tables, beta_hat, index_pair, monodromy
from eulerstab.index_theory import alpha1_e0, theta_e0

for beta in (0.5, 1.4, 4.0):
    mu = monodromy(EssentialSystem(beta, 0.0)).eigenvalues()
    lam = np.exp(2 * np.pi * np.sqrt(alpha1_e0(beta)))
    unit = mu[np.abs(np.abs(mu) - 1) < 1e-6]
    print(f"beta={beta}: largest {abs(mu[-1]):.6e} vs {lam:.6e}; "
          f"unit angle {abs(np.angle(unit[0])) / (2 * np.pi):.10f} vs frac(theta) "
          f"{theta_e0(beta) % 1:.10f} (up to sign)")

# %%
# Indices change only at the thresholds hat_n (omega = 1) and
# hat_{n+1/2} (omega = -1), where the nullity is 2.
print("thresholds:", ", ".join(f"{n}: {beta_hat(n):.6f}" for n in (1.5, 2, 2.5, 3)))

# %%
# The Galerkin Morse indices reproduce the closed-form table exactly.
print(f"{'beta':>8} {'table (i1,nu1,i-1,nu-1)':>26} {'Galerkin':>16}  branch")
for beta in np.r_[np.linspace(0, 7, 8), beta_hat(2), beta_hat(2.5)]:
    t = analytic_e0_tables(beta)
    g = index_pair(beta, 0, 1).as_tuple() + index_pair(beta, 0, -1).as_tuple()
    print(f"{beta:8.4f} {str((t.i_plus, t.nu_plus, t.i_minus, t.nu_minus)):>26} {str(g):>16}  {t.branch}")
