"""Essential linearized system and its fundamental solution over one period.

The linear system is ``gamma' = J B(t) gamma`` with ``gamma(0) = I4``, where
``t`` is the true anomaly of the Keplerian ellipse of eccentricity ``e`` and
``B(t)`` depends on the masses only through ``beta``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .errors import DomainError, IntegrationError
from .symplectic import J4, SymplecticMatrix

__all__ = [
    "ECC_CAP",
    "EssentialSystem",
    "coefficient_matrix",
    "monodromy",
    "monodromy_e0_exact",
    "e0_characteristic_polynomial",
    "rotation4",
    "modified_coefficient",
    "ModifiedPath",
    "modified_path",
]

ECC_CAP = 0.99
TWO_PI = 2.0 * math.pi
DEFAULT_SEGMENTS = 16
DEFAULT_RTOL = 1e-12
DEFAULT_ATOL = 1e-14


@dataclass(frozen=True)
class EssentialSystem:
    """Parameters ``(beta, e)`` of the essential part of the linearization.

    Eccentricities above ``ECC_CAP`` are refused unless ``allow_high_ecc``
    is set, in which case a warning is issued.
    """

    beta: float
    ecc: float
    allow_high_ecc: bool = False

    def __post_init__(self):
        b, e = float(self.beta), float(self.ecc)
        if not (math.isfinite(b) and b >= 0):
            raise DomainError(f"beta must be a finite number >= 0, got {self.beta}")
        if not (math.isfinite(e) and 0 <= e < 1):
            raise DomainError(f"eccentricity must lie in [0, 1), got {self.ecc}")
        if e > ECC_CAP:
            if not self.allow_high_ecc:
                raise DomainError(
                    f"eccentricity {e} exceeds the default cap {ECC_CAP}; pass allow_high_ecc")
            warnings.warn(f"eccentricity {e} above {ECC_CAP}: accuracy is not monitored",
                          RuntimeWarning, stacklevel=3)
        object.__setattr__(self, "beta", b)
        object.__setattr__(self, "ecc", e)

    def coefficient(self, t: float) -> np.ndarray:
        return coefficient_matrix(self, t)


def coefficient_matrix(sys: EssentialSystem, t: float) -> np.ndarray:
    """The symmetric matrix ``B(t)``."""
    b, e = sys.beta, sys.ecc
    ec = e * math.cos(t)
    d = 1.0 + ec
    return np.array([
        [1.0, 0.0, 0.0, 1.0],
        [0.0, 1.0, -1.0, 0.0],
        [0.0, -1.0, (-2.0 * b - 2.0 + ec) / d, 0.0],
        [1.0, 0.0, 0.0, (b + 1.0 + ec) / d],
    ])


def _generator(sys: EssentialSystem):
    """Right-hand side of the flattened equation ``Y' = J B(t) Y``."""
    b, e = sys.beta, sys.ecc
    a = np.array([
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 1.0],
        [0.0, 1.0, -1.0, 0.0],
    ])

    def rhs(t, y):
        ec = e * math.cos(t)
        d = 1.0 + ec
        a[0, 2] = (2.0 * b + 2.0 - ec) / d
        a[1, 3] = -(b + 1.0 + ec) / d
        return (a @ y.reshape(4, 4)).ravel()

    return rhs


def _integrate(rhs, t0, t1, y0, rtol, atol):
    sol = solve_ivp(rhs, (t0, t1), np.asarray(y0, dtype=float).ravel(), method="DOP853",
                    rtol=rtol, atol=atol)
    if sol.status != 0:
        t_reached = float(sol.t[-1]) if sol.t.size else t0
        raise IntegrationError(f"integration from {t0} to {t1} stopped: {sol.message}",
                               t_reached)
    return sol.y[:, -1].reshape(4, 4)


def _segment_factors(sys, t_grid, rtol, atol, check_reversibility):
    rhs = _generator(sys)
    factors = []
    back = 0.0
    for t0, t1 in zip(t_grid[:-1], t_grid[1:]):
        f = _integrate(rhs, t0, t1, np.eye(4), rtol, atol)
        factors.append(f)
        if check_reversibility:
            g = _integrate(rhs, t1, t0, f, rtol, atol)
            back = max(back, float(np.max(np.abs(g - np.eye(4)))))
    return factors, (back if check_reversibility else float("nan"))


def monodromy(sys: EssentialSystem, segments: int = DEFAULT_SEGMENTS,
              rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL,
              check_reversibility: bool = True) -> SymplecticMatrix:
    """The end matrix ``gamma(2 pi)`` of the fundamental solution.

    The period is split into ``segments`` equal pieces, each integrated from
    the identity with an adaptive 8th order Dormand-Prince scheme.  The
    factors are kept so that eigenvalues stay accurate when the product is
    strongly hyperbolic.  With ``check_reversibility`` every segment is also
    integrated backwards and the worst deviation from ``I4`` is recorded.
    """
    if segments < 1:
        raise DomainError("segments must be a positive integer")
    t_grid = np.linspace(0.0, TWO_PI, segments + 1)
    factors, back = _segment_factors(sys, t_grid, rtol, atol, check_reversibility)
    return SymplecticMatrix.from_factors(factors, backward_residual=back)


def e0_generator(beta: float) -> np.ndarray:
    """Constant matrix ``J B`` of the circular case."""
    return J4 @ coefficient_matrix(EssentialSystem(beta, 0.0), 0.0)


def monodromy_e0_exact(beta: float, segments: int = DEFAULT_SEGMENTS) -> SymplecticMatrix:
    """``exp(2 pi J B)`` for ``e = 0`` by scaling and squaring.

    The exponential is stored as ``segments`` equal factors
    ``exp(2 pi J B / segments)``.
    """
    f = expm(TWO_PI / segments * e0_generator(beta))
    return SymplecticMatrix.from_factors([f] * segments, backward_residual=0.0)


def e0_characteristic_polynomial(beta: float) -> np.ndarray:
    """Coefficients of ``det(JB - lambda I)`` at ``e = 0``, highest first."""
    return np.array([1.0, 0.0, 1.0 - beta, 0.0, -beta * (2.0 * beta + 3.0)])


def _rotation(t: float) -> np.ndarray:
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, -s], [s, c]])


def rotation4(t: float) -> np.ndarray:
    """``diag(R(t), R(t))``, a symplectic rotation."""
    r = _rotation(t)
    out = np.zeros((4, 4))
    out[:2, :2] = r
    out[2:, 2:] = r
    return out


def modified_coefficient(sys: EssentialSystem, t: float) -> np.ndarray:
    """Coefficient of the rotated equation ``xi' = J diag(I, R (I - K) R^T) xi``."""
    d = 1.0 + sys.ecc * math.cos(t)
    k = np.diag([(2.0 * sys.beta + 3.0) / d, -sys.beta / d])
    r = _rotation(t)
    out = np.zeros((4, 4))
    out[:2, :2] = np.eye(2)
    out[2:, 2:] = r @ (np.eye(2) - k) @ r.T
    return out


@dataclass(frozen=True)
class ModifiedPath:
    """Samples ``xi(t_j) = R4(t_j) gamma(t_j)`` on a uniform grid."""

    t: np.ndarray
    samples: tuple
    system: EssentialSystem

    @property
    def endpoint(self) -> SymplecticMatrix:
        return self.samples[-1]


def modified_path(sys: EssentialSystem, samples: int = 64, rtol: float = DEFAULT_RTOL,
                  atol: float = DEFAULT_ATOL) -> ModifiedPath:
    """The rotated path, which starts at ``I4`` and ends at ``gamma(2 pi)``.

    ``R4(2 pi)`` is the identity, so the last sample reuses the factors of
    ``gamma(2 pi)`` without the rounding of ``sin(2 pi)``.
    """
    if samples < 1:
        raise DomainError("samples must be a positive integer")
    t_grid = np.linspace(0.0, TWO_PI, samples + 1)
    factors, _ = _segment_factors(sys, t_grid, rtol, atol, False)
    out = [SymplecticMatrix.from_matrix(np.eye(4))]
    for j in range(1, samples + 1):
        rot = np.eye(4) if j == samples else rotation4(t_grid[j])
        out.append(SymplecticMatrix.from_factors(factors[:j] + [rot]))
    return ModifiedPath(t=t_grid, samples=tuple(out), system=sys)
