"""Stability at one (beta, e): two routes to the same index.

Run with ``python demos/03_single_point.py``.
"""

# %%
# The monodromy matrix is integrated as a product of 16 segment propagators.
# For hyperbolic orbits the product has entries near 1e10, but the factors
# stay small, so eigenvalues on the unit circle are still resolved.
from eulerstab import EssentialSystem, classify, index_pair, monodromy, propagate_index

beta, e = 1.5, 0.3
m = monodromy(EssentialSystem(beta, e))
print("largest entry of the end matrix:", f"{abs(m.entries).max():.3e}")
print("worst factor symplectic defect:", f"{m.symplectic_defect:.1e}")
print("eigenvalues:", m.eigenvalues())

# %%
# The normal form says which basic blocks the end matrix is built from.
cls = classify(m)
print("normal form:", cls.tag, "->", cls.label)

# %%
# Route 1: the index at -1 straight from the Galerkin operator.
# Route 2: the index at 1, carried around the circle with splitting numbers.
i1 = index_pair(beta, e, 1).index
print("i_1 =", i1)
print("i_-1 by Galerkin   :", index_pair(beta, e, -1).index)
print("i_-1 by propagation:", propagate_index(i1, cls, -1))
