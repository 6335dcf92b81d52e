"""Symplectic matrices stored as products of short-time factors.

A monodromy matrix of an unstable orbit can have entries of size 1e10 while
the eigenvalues on the unit circle are what decide stability.  Working with
the product directly loses those eigenvalues to round-off.  Here a matrix
``M = F[K-1] @ ... @ F[0]`` keeps its factors, and spectral questions are
answered on the block-cyclic lift

    C = [[0, ..., 0, F[K-1]],
         [F[0], 0, ..., 0  ],
         [0, F[1], ..., 0  ],
         ...             ]

whose eigenvalues are the K-th roots of those of ``M``.  The factors have
modest norm, so a dense eigen-solver on ``C`` is backward stable in a sense
that matters for ``M``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

__all__ = [
    "standard_j",
    "J2",
    "J4",
    "symplectic_defect",
    "krein_form",
    "SymplecticMatrix",
]


def standard_j(n: int) -> np.ndarray:
    """The standard symplectic matrix ``[[0, -I], [I, 0]]`` of size ``2n``."""
    z = np.zeros((n, n))
    i = np.eye(n)
    return np.block([[z, -i], [i, z]])


J2 = standard_j(1)
J4 = standard_j(2)


def symplectic_defect(m: np.ndarray) -> float:
    """``max |M^T J M - J|`` for a square matrix of even size."""
    m = np.asarray(m, dtype=float)
    j = standard_j(m.shape[0] // 2)
    return float(np.max(np.abs(m.T @ j @ m - j)))


def krein_form(x: np.ndarray) -> float:
    """Real number ``x^* J x / i`` for a complex vector ``x``.

    For the eigenvalue ``e^{i phi}``, ``0 < phi < pi``, of ``R(theta)`` it is
    positive when ``theta = phi`` and negative when ``theta = 2 pi - phi``.
    """
    x = np.asarray(x)
    j = standard_j(x.shape[0] // 2)
    return float((np.conj(x) @ j @ x / 1j).real)


def _principal_root(omega: complex, k: int) -> complex:
    return abs(omega) ** (1.0 / k) * np.exp(1j * np.angle(omega) / k)


@dataclass(frozen=True, eq=False)
class SymplecticMatrix:
    """A real symplectic matrix together with a factorization into segments.

    Attributes
    ----------
    entries : ndarray
        The matrix itself, ``factors[-1] @ ... @ factors[0]``.
    factors : tuple of ndarray
        Segment propagators in time order.
    symplectic_defect : float
        Largest max-norm defect ``|F^T J F - J|`` over the factors.
    det_defect : float
        Largest ``|det F - 1|`` over the factors.
    backward_residual : float
        Largest deviation from the identity after integrating each segment
        back to its start (``nan`` when not measured).
    """

    entries: np.ndarray
    factors: tuple
    symplectic_defect: float
    det_defect: float
    backward_residual: float = float("nan")
    _cache: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_factors(cls, factors, backward_residual=float("nan")) -> "SymplecticMatrix":
        fs = tuple(np.array(f, dtype=float) for f in factors)
        if not fs:
            raise ValueError("at least one factor is required")
        prod = fs[0]
        for f in fs[1:]:
            prod = f @ prod
        sd = max(symplectic_defect(f) for f in fs)
        dd = max(abs(np.linalg.det(f) - 1.0) for f in fs)
        return cls(prod, fs, sd, dd, backward_residual)

    @classmethod
    def from_matrix(cls, m) -> "SymplecticMatrix":
        return cls.from_factors([m])

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def n_factors(self) -> int:
        return len(self.factors)

    def lift(self) -> np.ndarray:
        """The block-cyclic matrix whose spectrum is the K-th roots."""
        if "lift" not in self._cache:
            k, d = self.n_factors, self.dim
            c = np.zeros((k * d, k * d))
            c[0:d, (k - 1) * d:] = self.factors[-1]
            for i in range(k - 1):
                c[(i + 1) * d:(i + 2) * d, i * d:(i + 1) * d] = self.factors[i]
            self._cache["lift"] = c
        return self._cache["lift"]

    def _lift_eig(self):
        if "eig" not in self._cache:
            nu, vecs = linalg.eig(self.lift())
            self._cache["eig"] = (nu, vecs)
        return self._cache["eig"]

    def eigenpairs(self):
        """Eigenvalues of the product and unit eigenvectors.

        Returns
        -------
        mu : (d,) complex ndarray
            Eigenvalues sorted by modulus, then by argument.
        vecs : (d, d) complex ndarray
            Column ``j`` is an eigenvector for ``mu[j]``.
        """
        if "pairs" in self._cache:
            return self._cache["pairs"]
        k, d = self.n_factors, self.dim
        nu, vecs = self._lift_eig()
        mu_all = nu ** k
        used = np.zeros(len(nu), dtype=bool)
        mus, xs = [], []
        for i in np.argsort(np.abs(np.angle(nu))):
            if used[i]:
                continue
            dist = np.abs(mu_all - mu_all[i]) / max(abs(mu_all[i]), 1e-300)
            dist[used] = np.inf
            members = np.argsort(dist, kind="stable")[:k]
            used[members] = True
            mus.append(mu_all[members].mean())
            x = vecs[:d, i]
            xs.append(x / np.linalg.norm(x))
        mus = np.array(mus)
        xs = np.array(xs).T
        order = np.lexsort((np.angle(mus), np.round(np.abs(mus), 12)))
        out = (mus[order], xs[:, order])
        self._cache["pairs"] = out
        return out

    def eigenvalues(self) -> np.ndarray:
        return self.eigenpairs()[0]

    def singular_values_at(self, omega: complex) -> np.ndarray:
        """Singular values of ``C - omega^(1/K) I`` divided by ``||C||_2``."""
        k = self.n_factors
        c = self.lift()
        scale = max(np.linalg.norm(f, 2) for f in self.factors)
        nu0 = _principal_root(complex(omega), k)
        s = linalg.svdvals(c - nu0 * np.eye(c.shape[0]))
        return s / scale

    def kernel_dimension(self, omega: complex, rtol: float = 1e-8) -> int:
        """``dim ker(M - omega I)`` by singular-value thresholding on the lift.

        ``x`` solves ``M x = omega x`` exactly when the stacked vector of its
        partial products solves the lifted problem, so both kernels have the
        same dimension.
        """
        return int(np.sum(self.singular_values_at(omega) < rtol))

    def restrict(self, center: complex, radius: float):
        """Generalized eigenspace of eigenvalues within ``radius`` of ``center``.

        Returns
        -------
        basis : (d, r) complex ndarray
            Orthonormal basis of the invariant subspace.
        block : (r, r) complex ndarray
            Matrix of ``M`` restricted to that subspace in this basis.
        """
        k, d = self.n_factors, self.dim

        def select(nu):
            return abs(nu ** k - center) < radius

        t, z, sdim = linalg.schur(self.lift().astype(complex), output="complex", sort=select)
        if sdim == 0:
            return np.zeros((d, 0), dtype=complex), np.zeros((0, 0), dtype=complex)
        x = z[:d, :sdim]
        r = max(1, int(round(sdim / k)))
        u, _, _ = np.linalg.svd(x, full_matrices=False)
        basis = u[:, :r]
        g = basis.conj().T @ x
        s = t[:sdim, :sdim]
        sk = np.linalg.matrix_power(s, k)
        block = g @ sk @ np.linalg.pinv(g)
        return basis, block
