"""Collinear central configuration of three masses.

Masses are ordered along the line as ``q1, q2, q3`` with ``x`` the ratio of
the distance ``|q1 q2|`` to ``|q2 q3|``.  Everything the stability analysis
needs from the masses is the single number ``beta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from scipy.optimize import brentq

from .errors import ConfigurationError, InputError

__all__ = [
    "MassTriple",
    "CentralConfig",
    "quintic_coefficients",
    "quintic_residual",
    "solve_euler_quintic",
    "mass_parameter",
    "delta_from_geometry",
    "central_config",
]

_MAX_BRACKET = 2.0 ** 40
_RTOL = 1e-14


@dataclass(frozen=True)
class MassTriple:
    """Three non-negative masses, normalized on construction to sum 1.

    At most one mass may vanish, except for ``(0, m2, 0)`` which is kept
    as the ``beta = 0`` boundary case.
    """

    m1: float
    m2: float
    m3: float

    def __post_init__(self):
        ms = [float(m) for m in (self.m1, self.m2, self.m3)]
        if not all(math.isfinite(m) for m in ms):
            raise InputError(f"masses must be finite, got {ms}")
        if any(m < 0 for m in ms):
            raise InputError(f"masses must be non-negative, got {ms}")
        total = math.fsum(ms)
        if total <= 0:
            raise InputError("at least one mass must be positive")
        ms = [m / total for m in ms]
        zeros = sum(m == 0.0 for m in ms)
        if zeros > 1 and not (ms[0] == 0.0 and ms[2] == 0.0):
            raise InputError(
                f"at most one mass may vanish (except the (0,1,0) boundary), got {ms}")
        object.__setattr__(self, "m1", ms[0])
        object.__setattr__(self, "m2", ms[1])
        object.__setattr__(self, "m3", ms[2])

    @classmethod
    def coerce(cls, masses) -> "MassTriple":
        if isinstance(masses, cls):
            return masses
        m = list(masses)
        if len(m) != 3:
            raise InputError(f"expected three masses, got {len(m)}")
        return cls(*m)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.m1, self.m2, self.m3)

    def swapped(self) -> "MassTriple":
        """The same configuration read from the other end of the line."""
        return MassTriple(self.m3, self.m2, self.m1)

    @property
    def is_boundary(self) -> bool:
        """True for the degenerate ``(0, 1, 0)`` triple."""
        return self.m1 == 0.0 and self.m3 == 0.0


@dataclass(frozen=True)
class CentralConfig:
    """Central configuration data for one mass triple.

    For the ``(0, 1, 0)`` boundary the scale ``alpha`` is infinite and
    ``mu``/``sigma`` vanish; only ``x``, ``beta`` and ``delta`` keep meaning.
    """

    x: float
    alpha: float
    beta: float
    delta: float
    mu: float
    sigma: float
    masses: MassTriple
    p: float = 1.0
    residual: float = field(default=0.0, compare=False)


def quintic_coefficients(masses: MassTriple) -> list[float]:
    """Coefficients of the Euler quintic, highest degree first."""
    m1, m2, m3 = MassTriple.coerce(masses).as_tuple()
    return [
        m3 + m2,
        3 * m3 + 2 * m2,
        3 * m3 + m2,
        -(3 * m1 + m2),
        -(3 * m1 + 2 * m2),
        -(m1 + m2),
    ]


def _horner(coeffs: Sequence[float], x: float) -> float:
    acc = 0.0
    for c in coeffs:
        acc = acc * x + c
    return acc


def quintic_residual(masses: MassTriple, x: float) -> float:
    """``|p(x)|`` scaled by ``sum |c_k| x^k`` (a backward-error measure)."""
    coeffs = quintic_coefficients(masses)
    scale = _horner([abs(c) for c in coeffs], abs(x))
    return abs(_horner(coeffs, x)) / scale


def solve_euler_quintic(masses: MassTriple) -> float:
    """Unique positive root of the Euler quintic.

    The coefficient signs are ``(+,+,+,-,-,-)``, so Descartes' rule leaves
    exactly one positive root.  It is bracketed by doubling ``[0, 1]`` and
    refined with Brent's method.
    """
    masses = MassTriple.coerce(masses)
    coeffs = quintic_coefficients(masses)

    def p(x):
        return _horner(coeffs, x)

    lo, hi = 0.0, 1.0
    if p(lo) >= 0:
        raise ConfigurationError(f"quintic has no sign change for masses {masses.as_tuple()}")
    while p(hi) <= 0:
        lo, hi = hi, 2 * hi
        if hi > _MAX_BRACKET:
            raise ConfigurationError(
                f"no sign change of the quintic within [0, 2^40] for masses {masses.as_tuple()}")
    x = brentq(p, lo, hi, xtol=1e-300, rtol=_RTOL, maxiter=500)
    if quintic_residual(masses, x) > 1e-12:
        raise ConfigurationError(f"quintic root {x!r} failed the residual check")
    return float(x)


def mass_parameter(masses: MassTriple, x: float) -> float:
    """The mass parameter ``beta`` from the masses and the quintic root."""
    m1, m2, m3 = MassTriple.coerce(masses).as_tuple()
    num = m1 * (3 * x * x + 3 * x + 1) + m3 * x * x * (x * x + 3 * x + 3)
    den = x * x + m2 * ((x + 1) ** 2 * (x * x + 1) - x * x)
    assert den > 0, "beta denominator must be positive"
    return num / den


def _alpha(m1: float, m3: float, x: float) -> float:
    q = m1 * (1 - m1) * x * x + 2 * m1 * m3 * x + m3 * (1 - m3)
    return math.inf if q == 0 else q ** -0.5


def delta_from_geometry(masses: MassTriple, x: float) -> float:
    """``delta`` as a ratio of two pair sums over the configuration.

    The numerator weighs ``m_i m_j (b_i - b_j)^2 / |a_i - a_j|^3`` and the
    denominator ``m_i m_j / |a_i - a_j|``.  Products ``sqrt(m_i) rho_i`` are
    formed directly so that a vanishing mass does not produce ``0 * inf``.
    At ``(0, 1, 0)`` both sums vanish and the continuous extension 1 is
    returned.
    """
    masses = MassTriple.coerce(masses)
    m = masses.as_tuple()
    m1, _, m3 = m
    alpha = _alpha(m1, m3, x)
    if not math.isfinite(alpha):
        alpha = 1.0  # alpha cancels in the ratio
    a = (-(m3 + (1 - m1) * x) * alpha, (-m3 + m1 * x) * alpha, ((1 - m3) + m1 * x) * alpha)
    # b_i = rho_i * c_i * alpha, rho_i = sqrt(m1 m2 m3) / m_i
    c = (1.0, -(1.0 + x), x)
    rho_t = (math.sqrt(m[1] * m[2]), math.sqrt(m[0] * m[2]), math.sqrt(m[0] * m[1]))
    num = 0.0
    den = 0.0
    for i, j in ((0, 1), (1, 2), (0, 2)):
        r = abs(a[i] - a[j])
        w = alpha * alpha * (math.sqrt(m[j]) * rho_t[i] * c[i] - math.sqrt(m[i]) * rho_t[j] * c[j]) ** 2
        num += w / r ** 3
        den += m[i] * m[j] / r
    if den == 0.0:
        return 1.0
    return num / den


def central_config(masses, p: float = 1.0) -> CentralConfig:
    """Assemble ``x, alpha, beta, delta, mu, sigma`` for a mass triple."""
    masses = MassTriple.coerce(masses)
    if not (p > 0 and math.isfinite(p)):
        raise InputError(f"semi-latus rectum must be positive, got {p}")
    x = solve_euler_quintic(masses)
    m1, m2, m3 = masses.as_tuple()
    alpha = _alpha(m1, m3, x)
    beta = mass_parameter(masses, x)
    delta = delta_from_geometry(masses, x)
    if math.isfinite(alpha):
        mu = (m1 * m2 / x + m2 * m3 + m3 * m1 / (1 + x)) / alpha
    else:
        mu = 0.0
    sigma = (mu * p) ** 0.25
    return CentralConfig(x=x, alpha=alpha, beta=beta, delta=delta, mu=mu, sigma=sigma,
                         masses=masses, p=p, residual=quintic_residual(masses, x))
