r"""Fourier-Galerkin realization of the second order operator.

For a unit complex number ``omega`` the operator

    A(beta, e) = -d^2/dt^2 - I + C(t),
    C(t) = ((3 + beta) I + 3 (1 + beta) S(t)) / (2 (1 + e cos t)),
    S(t) = [[cos 2t, sin 2t], [sin 2t, -cos 2t]],

acts on ``C^2``-valued functions with ``y(2 pi) = omega y(0)`` and
``y'(2 pi) = omega y'(0)``.  Its number of negative eigenvalues and its
nullity are the omega-index and omega-nullity of the monodromy path.

Functions ``u e^{i (k + s) t}`` with ``s = arg(omega) / 2 pi`` and ``|k| <= N``
span the trial space, which makes the Galerkin matrix Hermitian for every
``omega``.  Since the trial spaces are nested, Galerkin eigenvalues decrease
towards the exact ones as ``N`` grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .errors import ConvergenceError, DomainError

__all__ = [
    "BoundaryTwist",
    "as_twist",
    "decay_ratio",
    "suggest_truncation",
    "weight_coefficients",
    "GalerkinProblem",
    "IndexPair",
    "assemble",
    "count_negative",
    "morse_index",
    "index_pair",
    "smallest_eigenvalues",
    "e0_block_spectrum",
    "KernelReport",
    "kernel_by_recurrence",
    "PositivityReport",
    "positivity_check_A_minus1",
]

MAX_N = 1024
NULL_RTOL = 1e-9
KERNEL_RTOL = 1e-8


@dataclass(frozen=True)
class BoundaryTwist:
    """Boundary multiplier ``omega = exp(2 pi i varsigma)``, ``0 <= varsigma < 1``."""

    omega: complex
    varsigma: float

    @classmethod
    def from_omega(cls, omega) -> "BoundaryTwist":
        omega = complex(omega)
        if abs(abs(omega) - 1.0) > 1e-14:
            raise DomainError(f"omega must have modulus 1, got |omega| = {abs(omega)!r}")
        s = (math.atan2(omega.imag, omega.real) / (2 * math.pi)) % 1.0
        if s >= 1.0:
            s = 0.0
        return cls(omega, s)

    @classmethod
    def from_varsigma(cls, varsigma: float) -> "BoundaryTwist":
        s = float(varsigma) % 1.0
        # keep +-1 exact
        if s == 0.0:
            om = 1.0 + 0j
        elif s == 0.5:
            om = -1.0 + 0j
        else:
            om = complex(math.cos(2 * math.pi * s), math.sin(2 * math.pi * s))
        return cls(om, s)


def as_twist(value) -> BoundaryTwist:
    """Accept a ``BoundaryTwist`` or a unit complex number."""
    if isinstance(value, BoundaryTwist):
        return value
    return BoundaryTwist.from_omega(value)


def decay_ratio(ecc: float) -> float:
    """Geometric decay rate ``r`` of the Fourier coefficients of ``1/(1+e cos t)``."""
    if ecc == 0:
        return 0.0
    return (1.0 - math.sqrt(1.0 - ecc * ecc)) / ecc


def suggest_truncation(ecc: float, beta: float = 0.0) -> int:
    """Starting truncation: enough modes for ``beta`` and for ``r^(2N) < 1e-14``."""
    n = 16 + int(math.ceil(math.sqrt(max(beta, 0.0) + 3.0)))
    r = decay_ratio(ecc)
    if r > 0:
        n = max(n, int(math.ceil(math.log(1e-14) / (2.0 * math.log(r)))) + 8)
    return int(8 * math.ceil(n / 8))


def weight_coefficients(ecc: float, m: np.ndarray) -> np.ndarray:
    """Closed form Fourier coefficients of ``1/(1+e cos t)``.

    ``(1/sqrt(1-e^2)) (-r)^|m|``, used only to cross-check the quadrature.
    """
    m = np.abs(np.asarray(m))
    return (-decay_ratio(ecc)) ** m / math.sqrt(1.0 - ecc * ecc)


def _check_ecc(ecc):
    if not (math.isfinite(ecc) and 0 <= ecc < 1):
        raise DomainError(f"eccentricity must lie in [0, 1), got {ecc}")


def _coefficient_fft(beta: float, ecc: float, n_samples: int):
    t = 2 * math.pi * np.arange(n_samples) / n_samples
    w = 0.5 / (1.0 + ecc * np.cos(t))
    c2, s2 = np.cos(2 * t), np.sin(2 * t)
    c11 = w * ((3.0 + beta) + 3.0 * (1.0 + beta) * c2)
    c22 = w * ((3.0 + beta) - 3.0 * (1.0 + beta) * c2)
    c12 = w * 3.0 * (1.0 + beta) * s2
    return [np.fft.fft(c) / n_samples for c in (c11, c12, c22)]


def operator_scale(beta: float, ecc: float) -> float:
    """Sup norm of the multiplication part ``C(t)``."""
    return ((3.0 + beta) + 3.0 * abs(1.0 + beta)) / (2.0 * (1.0 - ecc))


@dataclass(frozen=True, eq=False)
class GalerkinProblem:
    """Galerkin matrix of ``A(beta, e)`` on the ``omega``-twisted domain.

    Unknowns are ordered first by component (``e1`` then ``e2``), then by
    frequency ``k = -N, ..., N``.
    """

    beta: float
    ecc: float
    twist: BoundaryTwist
    N: int
    matrix: np.ndarray
    hermitian_defect: float
    null_rtol: float = NULL_RTOL
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def null_tol(self) -> float:
        return self.null_rtol * operator_scale(self.beta, self.ecc)

    def eigenvalues(self) -> np.ndarray:
        if "eig" not in self._cache:
            self._cache["eig"] = linalg.eigvalsh(self.matrix, check_finite=False)
        return self._cache["eig"]

    def eigh(self):
        if "eigh" not in self._cache:
            self._cache["eigh"] = linalg.eigh(self.matrix, check_finite=False)
        return self._cache["eigh"]

    def refined(self, n: int) -> "GalerkinProblem":
        return assemble(self.beta, self.ecc, self.twist, n, self.null_rtol)


def assemble(beta: float, ecc: float, twist=1.0, N: int | None = None,
             null_rtol: float = NULL_RTOL) -> GalerkinProblem:
    """Assemble the Hermitian Galerkin matrix of dimension ``2 (2N + 1)``.

    ``beta = -1`` is accepted and gives the non-negative operator
    ``-d^2/dt^2 - I + I / (1 + e cos t)``.  Eigenvalues below
    ``null_rtol`` times the operator scale count as zero.
    """
    _check_ecc(ecc)
    if not (math.isfinite(beta) and beta >= -1):
        raise DomainError(f"beta must be >= -1, got {beta}")
    tw = as_twist(twist)
    if N is None:
        N = suggest_truncation(ecc, beta)
    if N < 8:
        raise DomainError(f"truncation N must be at least 8, got {N}")
    n_samples = 8 * N
    f11, f12, f22 = _coefficient_fft(beta, ecc, n_samples)
    k = np.arange(-N, N + 1)
    diff = (k[:, None] - k[None, :]) % n_samples
    h = np.block([[f11[diff], f12[diff]], [f12[diff], f22[diff]]])
    h[np.diag_indices_from(h)] += np.tile((k + tw.varsigma) ** 2 - 1.0, 2)
    defect = float(np.max(np.abs(h - h.conj().T)))
    h = 0.5 * (h + h.conj().T)
    return GalerkinProblem(float(beta), float(ecc), tw, int(N), h, defect, float(null_rtol))


@dataclass(frozen=True)
class IndexPair:
    """Morse index and nullity of ``A(beta, e)`` at one ``omega``.

    ``N`` is the first truncation of the stable run, ``history`` lists
    ``(N, index, nullity)`` for every truncation tried, and ``ambiguous``
    flags an eigenvalue between ``null_tol`` and ``10 null_tol`` in size.
    """

    index: int
    nullity: int
    N: int = 0
    converged: bool = True
    ambiguous: bool = False
    history: tuple = ()

    def as_tuple(self) -> tuple[int, int]:
        return (self.index, self.nullity)


def _counts(prob: GalerkinProblem):
    lam = prob.eigenvalues()
    tol = prob.null_tol
    index = int(np.sum(lam < -tol))
    nullity = int(np.sum(np.abs(lam) <= tol))
    near = np.abs(lam)
    ambiguous = bool(np.any((near > tol) & (near <= 10 * tol)))
    return index, nullity, ambiguous


def count_negative(prob: GalerkinProblem) -> int:
    """Number of strictly negative Galerkin eigenvalues (no tolerance)."""
    return int(np.sum(prob.eigenvalues() < 0.0))


def morse_index(prob: GalerkinProblem, max_N: int = MAX_N) -> IndexPair:
    """Index and nullity with the truncation doubled until they are stable.

    The result is accepted once three consecutive truncations ``N, 2N, 4N``
    agree.
    """
    history = []
    p = prob
    while True:
        idx, nul, amb = _counts(p)
        history.append((p.N, idx, nul))
        if len(history) >= 3 and len({h[1:] for h in history[-3:]}) == 1:
            return IndexPair(idx, nul, history[-3][0], True, amb, tuple(history))
        if 2 * p.N > max_N:
            raise ConvergenceError(
                f"index not stable up to N={p.N} at beta={prob.beta}, e={prob.ecc}",
                history[-2:])
        p = p.refined(2 * p.N)


def index_pair(beta: float, ecc: float, omega=1.0, N: int | None = None,
               null_rtol: float = NULL_RTOL) -> IndexPair:
    """Convenience wrapper: assemble and compute the converged index pair."""
    return morse_index(assemble(beta, ecc, omega, N, null_rtol))


def smallest_eigenvalues(prob: GalerkinProblem, count: int) -> np.ndarray:
    """The ``count`` smallest Galerkin eigenvalues in ascending order."""
    return prob.eigenvalues()[:count].copy()


def e0_block_spectrum(beta: float, n_max: int) -> np.ndarray:
    """Sorted union of the spectra of the circular-case Fourier blocks.

    In the rotating frame the operator at ``e = 0`` splits into
    ``B_0 = diag(2 beta + 3, -beta)`` and, for ``n >= 1``, the matrices
    ``[[n^2 + 2 beta + 3, +-2n], [+-2n, n^2 - beta]]`` (each sign once).
    """
    vals = [2 * beta + 3, -beta]
    for n in range(1, n_max + 1):
        m = np.array([[n * n + 2 * beta + 3, 2 * n], [2 * n, n * n - beta]])
        ev = np.linalg.eigvalsh(m)
        vals.extend(ev)
        vals.extend(ev)  # the -2n block is similar to the +2n block
    return np.sort(np.array(vals))


# ----------------------------------------------------------------------
# kernel elements from the three-term recurrence

def _b_block(m: int, beta: float) -> np.ndarray:
    return np.array([[m * m + 2 * beta + 3, 2.0 * m], [2.0 * m, m * m - beta]])


def _a_block(n: int) -> np.ndarray:
    return -(n / 2.0) * np.array([[n, 2.0], [2.0, n]])


def _recurrence_matrix(beta: float, ecc: float, n: int) -> np.ndarray:
    """Rows ``B_m v_m - e A_{m-1} v_{m-1} - e A_{m+1} v_{m+1}``, ``m = 1..n``.

    Each block row is divided by ``m^2`` so that singular values are
    comparable across harmonics.
    """
    L = np.zeros((2 * n, 2 * n))
    for m in range(1, n + 1):
        r = slice(2 * (m - 1), 2 * m)
        L[r, r] = _b_block(m, beta)
        if m >= 2:
            L[r, 2 * (m - 2):2 * (m - 1)] = -ecc * _a_block(m - 1)
        if m < n:
            L[r, 2 * m:2 * (m + 1)] = -ecc * _a_block(m + 1)
        L[r] /= m * m
    return L


@dataclass(frozen=True)
class KernelReport:
    """Outcome of the recurrence test at one ``(beta, e)``.

    When ``exists`` is true the two kernel elements are

        w1 = R(t) (a0 + sum a_n cos nt,  sum d_n sin nt),
        w2 = R(t) (sum a_n sin nt,  c0 - sum d_n cos nt),

    with ``a0 = -e (a_1/2 + d_1) / (2 beta + 3)`` and
    ``c0 = -(e/beta) (a_1 + d_1/2)``.
    """

    beta: float
    ecc: float
    parity: str
    exists: bool
    sigma_rel: float
    harmonics: int
    a0: float
    a: np.ndarray
    d: np.ndarray
    c0: float

    def _frame(self, t, x, y):
        c, s = np.cos(t), np.sin(t)
        return np.array([c * x - s * y, s * x + c * y])

    def w1(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        n = np.arange(1, self.harmonics + 1)
        x = self.a0 + np.cos(np.outer(t, n)) @ self.a
        y = np.sin(np.outer(t, n)) @ self.d
        return self._frame(t, x, y)

    def w2(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        n = np.arange(1, self.harmonics + 1)
        x = np.sin(np.outer(t, n)) @ self.a
        y = self.c0 - np.cos(np.outer(t, n)) @ self.d
        return self._frame(t, x, y)


def kernel_by_recurrence(beta: float, ecc: float, parity: str = "ad",
                         rtol: float = KERNEL_RTOL, max_harmonics: int = 512) -> KernelReport:
    """Decide whether a periodic kernel element exists and build the pair.

    The ``ad`` family ``(x, y) = (a0 + sum a_n cos nt, sum d_n sin nt)`` and
    the ``bc`` family ``(sum b_n sin nt, c0 + sum c_n cos nt)`` satisfy the
    same recurrence after ``c_n -> -c_n``, so one solution of either family
    yields one of the other.  The truncated system is analyzed by SVD rather
    than forward substitution because some ``A_n`` blocks are singular.
    """
    _check_ecc(ecc)
    if not beta > 0:
        raise DomainError("the recurrence test needs beta > 0")
    if parity not in ("ad", "bc"):
        raise DomainError(f"parity must be 'ad' or 'bc', got {parity!r}")
    flip = np.tile([1.0, -1.0], 1) if parity == "bc" else np.ones(2)
    n = max(16, int(math.ceil(math.sqrt(beta))) + 8)
    misses = 0
    while True:
        L = _recurrence_matrix(beta, ecc, n)
        if parity == "bc":
            L = L * np.tile(flip, n)[None, :]
        _, s, vh = np.linalg.svd(L)
        sigma_rel = s[-1] / s[0]
        v = vh[-1]
        tail = np.linalg.norm(v[-8:]) / np.linalg.norm(v)
        if sigma_rel < rtol and tail < 1e-14:
            break
        if sigma_rel >= rtol:
            misses += 1
            if misses >= 2:
                break
        if 2 * n > max_harmonics:
            break
        n *= 2
    exists = bool(sigma_rel < rtol)
    u = v.reshape(n, 2)
    if parity == "bc":
        a, d = u[:, 0], -u[:, 1]
    else:
        a, d = u[:, 0], u[:, 1]
    k = np.argmax(np.abs(np.concatenate([a, d])))
    sgn = np.sign(np.concatenate([a, d])[k]) or 1.0
    a, d = a * sgn, d * sgn
    a0 = -ecc * (a[0] / 2 + d[0]) / (2 * beta + 3)
    c0 = -(ecc / beta) * (a[0] + d[0] / 2)
    return KernelReport(float(beta), float(ecc), parity, exists, float(sigma_rel), n,
                        float(a0), a, d, float(c0))


@dataclass(frozen=True)
class PositivityReport:
    """Spectral summary of ``A(-1, e)`` at one ``omega``."""

    ecc: float
    omega: complex
    smallest: float
    near_null: int
    null_space_residual: float
    N: int

    @property
    def non_negative(self) -> bool:
        return self.smallest >= -1e-9


def positivity_check_A_minus1(ecc: float, twist=1.0, N: int | None = None,
                              tol: float = 1e-9) -> PositivityReport:
    """Check that ``A(-1, e)`` is non-negative with the expected kernel.

    At ``omega = 1`` the kernel should be ``(1 + e cos t) u`` for constant
    ``u``; the returned residual measures how far these two functions lie
    from the computed near-null eigenspace.  Elsewhere it is ``nan``.
    """
    prob = assemble(-1.0, ecc, twist, N)
    lam, vec = prob.eigh()
    null = np.abs(lam) <= tol
    residual = float("nan")
    if prob.twist.varsigma == 0.0:
        n = prob.N
        dim = 2 * n + 1
        expected = np.zeros((prob.dimension, 2), dtype=complex)
        for comp in range(2):
            base = comp * dim + n
            expected[base, comp] = 1.0
            expected[base - 1, comp] = ecc / 2
            expected[base + 1, comp] = ecc / 2
        expected /= np.linalg.norm(expected, axis=0)
        q = vec[:, null]
        residual = float(np.linalg.norm(expected - q @ (q.conj().T @ expected)))
    return PositivityReport(float(ecc), prob.twist.omega, float(lam[0]), int(null.sum()),
                            residual, prob.N)
