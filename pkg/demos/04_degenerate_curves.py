"""Tracing the degenerate curves and naming the regions between them.

Run with ``python demos/04_degenerate_curves.py``.  Takes about half a minute.
"""

# %%
# On each slice of constant e the negative eigenvalue count of the operator
# only grows with beta, so the degenerate points are its jumps.
import numpy as np

from eulerstab import order_check, region_classify, trace_curves
from eulerstab.atlas import slice_positions

e_grid = np.round(np.linspace(0.0, 0.6, 7), 12)
curves = trace_curves(1, e_grid, beta_max=8.0) + trace_curves(-1, e_grid, beta_max=8.0)
for c in sorted(curves, key=lambda c: c.expected_start):
    print(f"{c.label:8s}", " ".join(f"{b:8.5f}" for b in c.beta))

# %%
# Pairs of -1 curves start together and separate as e grows; the 1 curves
# stay double.
for c in curves:
    if c.label.endswith("+"):
        print(c.label[:-2], "separation:", " ".join(f"{g:.1e}" for g in c.gap))

# %%
# The left-to-right order never changes.
print("ordering holds on every slice:", all(order_check(curves, e).ok for e in e_grid))

# %%
# Walk across the slice e = 0.3 and compare the predicted case with what
# the monodromy matrix and the Galerkin indices say.
pairs, gammas = slice_positions(curves, 0.3)
lo, hi = pairs[0]
for beta in (0.5 * lo, lo, 0.5 * (lo + hi), hi, 1.5, gammas[0], 4.0):
    r = region_classify(beta, 0.3, curves)
    print(f"beta={beta:.8f} case {r.prediction.case:>4}: {r.tag:22s}"
          f" (i1,nu1,i-1,nu-1)=({r.i_plus},{r.nu_plus},{r.i_minus},{r.nu_minus})"
          f" conflicts={len(r.conflicts)}")
