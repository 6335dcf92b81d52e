"""Normal forms, splitting numbers and omega-index bookkeeping for Sp(4).

A classification is a list of basic normal-form blocks whose symplectic sum
has the same spectrum, the same eigenspace dimensions and the same Krein
data as the matrix.  That is enough to tell apart every class occurring for
the Euler orbits; it is not a construction of the homotopy component.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AmbiguityError, InputError
from .symplectic import SymplecticMatrix, krein_form, standard_j

__all__ = [
    "Block",
    "NormalForm",
    "Classification",
    "SplittingPair",
    "nullity",
    "classify",
    "splitting_numbers",
    "propagate_index",
    "beta_hat",
    "theta_e0",
    "alpha1_e0",
    "E0Tables",
    "analytic_e0_tables",
]

SNAP_TOL = 1e-5
UNIT_TOL = 1e-7
NULL_RTOL = 1e-8
ANGLE_TOL = 1e-9
TWO_PI = 2.0 * math.pi


def _as_symplectic(m) -> SymplecticMatrix:
    if isinstance(m, SymplecticMatrix):
        return m
    return SymplecticMatrix.from_matrix(np.asarray(m, dtype=float))


# ----------------------------------------------------------------------
# normal forms

@dataclass(frozen=True)
class Block:
    """One basic normal form.

    ``kind`` is one of

    - ``"D"``: hyperbolic ``D(lam)``, real ``|lam| > 1``;
    - ``"R"``: rotation ``R(theta)``, ``theta`` in ``(0, pi)`` or ``(pi, 2 pi)``;
    - ``"N1"``: ``N1(lam, a)`` with ``lam = +-1`` and ``a = +-1``;
    - ``"I2"``: ``lam * I2`` with ``lam = +-1`` (that is ``N1(lam, 0)``);
    - ``"N2"``: ``N2(omega, b)``, ``omega`` in the upper half plane,
      ``a = 1`` when nontrivial and ``0`` when trivial (4-dimensional);
    - ``"Q"``: quadruple ``lam, 1/lam, conj`` off both axes (4-dimensional).
    """

    kind: str
    value: complex
    a: int = 0

    @property
    def dim(self) -> int:
        return 4 if self.kind in ("N2", "Q") else 2

    def eigenvalues(self) -> list[complex]:
        v = self.value
        if self.kind == "D":
            return [complex(v), complex(1.0 / v)]
        if self.kind == "R":
            return [cmath.exp(1j * v), cmath.exp(-1j * v)]
        if self.kind in ("N1", "I2"):
            return [complex(v), complex(v)]
        if self.kind == "N2":
            return [v, v, v.conjugate(), v.conjugate()]
        return [v, 1 / v, v.conjugate(), 1 / v.conjugate()]

    def class_label(self) -> str:
        k, v = self.kind, self.value
        if k == "D":
            return "D(2)" if v.real > 0 else "D(-2)"
        if k == "R":
            return "R(θ∈(0,π))" if v.real < math.pi else "R(θ∈(π,2π))"
        if k == "N1":
            return f"N1({int(v.real)},{self.a})"
        if k == "I2":
            return "I2" if v.real > 0 else "-I2"
        if k == "N2":
            return "N2(nontrivial)" if self.a else "N2(trivial)"
        return "Q"

    def __str__(self) -> str:
        k, v = self.kind, self.value
        if k == "D":
            return f"D({v.real:.6g})"
        if k == "R":
            return f"R({v.real:.10g})"
        if k == "N2":
            return f"N2(e^i{cmath.phase(v):.10g},{'nontrivial' if self.a else 'trivial'})"
        if k == "Q":
            return f"Q({v:.6g})"
        return self.class_label()


_ORDER = {"I2": 0, "N1": 1, "R": 2, "N2": 3, "D": 4, "Q": 5}


@dataclass(frozen=True)
class NormalForm:
    """A symplectic sum of basic normal forms."""

    blocks: tuple

    def __post_init__(self):
        blocks = tuple(sorted(self.blocks, key=lambda b: (_ORDER[b.kind], b.class_label())))
        object.__setattr__(self, "blocks", blocks)

    @property
    def dim(self) -> int:
        return sum(b.dim for b in self.blocks)

    def eigenvalues(self) -> np.ndarray:
        return np.array([z for b in self.blocks for z in b.eigenvalues()])

    def class_label(self) -> str:
        return "⋄".join(b.class_label() for b in self.blocks)

    def __str__(self) -> str:
        return "⋄".join(str(b) for b in self.blocks)


@dataclass(frozen=True)
class Classification:
    """Result of :func:`classify`.

    ``tag`` is ``None`` when the decision is ambiguous; ``candidates`` then
    lists the competing normal forms and ``notes`` explains why.
    """

    tag: NormalForm | None
    eigenvalues: np.ndarray
    nullity_plus: int
    nullity_minus: int
    ambiguous: bool = False
    candidates: tuple = ()
    notes: tuple = ()
    krein: tuple = field(default=())

    @property
    def label(self) -> str:
        if self.tag is not None:
            return self.tag.class_label()
        return " | ".join(c.class_label() for c in self.candidates) or "ambiguous"


@dataclass(frozen=True)
class SplittingPair:
    s_plus: int
    s_minus: int

    def __add__(self, other: "SplittingPair") -> "SplittingPair":
        return SplittingPair(self.s_plus + other.s_plus, self.s_minus + other.s_minus)

    def as_tuple(self) -> tuple[int, int]:
        return (self.s_plus, self.s_minus)


# ----------------------------------------------------------------------
# kernel dimension and classification

def nullity(m, omega, rtol: float = NULL_RTOL) -> int:
    """``dim ker(M - omega I)`` by singular-value thresholding."""
    return _as_symplectic(m).kernel_dimension(complex(omega), rtol)


def _real_restriction(m: SymplecticMatrix, lam: float, radius: float):
    """Real basis and restricted matrix of the generalized eigenspace at ``lam``."""
    basis, block = m.restrict(lam, radius)
    r = basis.shape[1]
    u, _, _ = np.linalg.svd(np.hstack([basis.real, basis.imag]), full_matrices=False)
    vr = u[:, :r]
    p = basis.conj().T @ vr
    t = np.linalg.solve(p, block @ p)
    return vr, t.real


def _quadratic_signs(m: SymplecticMatrix, lam: float, radius: float, count: int):
    """Signs of ``u^T J (M - lam) u`` on the generalized eigenspace.

    For ``N1(lam, a)`` this form is ``a u_2^2``, so the signs of its
    ``count`` largest eigenvalues are the ``a`` parameters.
    """
    vr, t = _real_restriction(m, lam, radius)
    j = standard_j(m.dim // 2)
    g = vr.T @ j @ vr
    q = g @ (t - lam * np.eye(t.shape[0]))
    q = 0.5 * (q + q.T)
    ev = np.linalg.eigvalsh(q)
    ev = ev[np.argsort(-np.abs(ev))][:count]
    return [int(np.sign(x)) for x in ev]


def _collision_block(m: SymplecticMatrix, omega: complex, radius: float, notes: list):
    """Blocks for a double non-real unit-circle eigenvalue ``omega``."""
    basis, t = m.restrict(omega, radius)
    nul = m.kernel_dimension(omega)
    j = standard_j(m.dim // 2)
    if nul >= 2:
        h = basis.conj().T @ j @ basis / 1j
        ev = np.linalg.eigvalsh(0.5 * (h + h.conj().T))
        phi = cmath.phase(omega)
        return [Block("R", phi if s > 0 else TWO_PI - phi) for s in np.sign(ev)]
    a = t - omega * np.eye(2)
    _, s, vh = np.linalg.svd(a)
    y = vh[-1].conj()
    # drop the near-null direction; the eigenvector is J-isotropic so w is
    # only determined up to multiples of x anyway
    z = np.linalg.lstsq(a, y, rcond=1e-6)[0]
    pair = np.column_stack([y, z])
    if np.linalg.cond(pair) > 1e8:
        notes.append("Jordan reduction at a Krein collision is ill-conditioned")
        return None
    x, w = basis @ y, basis @ z
    c = ((w.conj() @ j @ x) / 1j).real
    return [Block("N2", omega, 1 if c > 0 else 0)]


def classify(m, snap_tol: float = SNAP_TOL, unit_tol: float = UNIT_TOL,
             null_rtol: float = NULL_RTOL) -> Classification:
    """Basic normal-form decomposition of a symplectic matrix.

    Eigenvalues within ``snap_tol`` of ``+-1`` are treated as exactly ``+-1``;
    their block structure comes from the kernel dimension and, for Jordan
    blocks, from the sign of the form ``u^T J (M - lam) u``.  Simple
    unit-circle eigenvalues become ``R(theta)`` with the branch fixed by the
    Krein sign.  Eigenvalues in the bands ``[snap_tol, 10 snap_tol)`` around
    ``+-1`` or ``[unit_tol, 10 unit_tol)`` around the circle make the result
    ambiguous.
    """
    m = _as_symplectic(m)
    mu, vecs = m.eigenpairs()
    d = m.dim
    nul_p = m.kernel_dimension(1.0, null_rtol)
    nul_m = m.kernel_dimension(-1.0, null_rtol)
    remaining = list(range(d))
    blocks: list[Block] = []
    notes: list[str] = []
    krein: list[float] = []
    candidates: list[NormalForm] = []

    for lam, nul in ((1.0, nul_p), (-1.0, nul_m)):
        dist = {j: abs(mu[j] - lam) for j in remaining}
        members = [j for j in remaining if dist[j] < snap_tol]
        if any(snap_tol <= dist[j] < 10 * snap_tol for j in remaining):
            notes.append(f"eigenvalue within {10 * snap_tol:g} of {lam:+g} but not on it")
        if not members:
            continue
        remaining = [j for j in remaining if j not in members]
        r = len(members)
        radius = 2 * snap_tol
        if r % 2:
            notes.append(f"odd number of eigenvalues at {lam:+g}")
            continue
        jordan = r - nul
        if nul > r or jordan < 0:
            notes.append(f"kernel dimension {nul} exceeds multiplicity {r} at {lam:+g}")
            continue
        if r == nul:
            blocks += [Block("I2", lam)] * (r // 2)
        elif jordan == r // 2:
            signs = _quadratic_signs(m, lam, radius, jordan)
            blocks += [Block("I2", lam)] * ((r - 2 * jordan) // 2)
            blocks += [Block("N1", lam, s) for s in signs]
        elif r == 4 and nul == 3:
            signs = _quadratic_signs(m, lam, radius, 1)
            blocks += [Block("I2", lam), Block("N1", lam, signs[0])]
        else:
            notes.append(f"eigenvalue {lam:+g} of multiplicity {r} with kernel dimension {nul}")
            if nul == 0 and r == 2:
                phi = 1e-3 if lam > 0 else math.pi - 1e-3
                candidates += [NormalForm((Block("R", phi),)), NormalForm((Block("D", 2 * lam),))]

    # remaining eigenvalues: unit circle pairs, hyperbolic pairs, quadruples
    while remaining:
        j = remaining[0]
        z = mu[j]
        if abs(abs(z) - 1.0) < unit_tol:
            if abs(z.imag) < 10 * unit_tol:
                notes.append(f"unit eigenvalue {z} too close to the real axis")
                remaining.pop(0)
                continue
            up = j if z.imag > 0 else min(remaining, key=lambda i: abs(mu[i] - z.conjugate()))
            zu = mu[up]
            twin = [i for i in remaining if i != up and abs(mu[i] - zu) < snap_tol]
            conj = [i for i in remaining if i != up and abs(mu[i] - zu.conjugate()) < snap_tol]
            if twin:
                got = _collision_block(m, zu, 2 * snap_tol, notes)
                used = {up, twin[0]} | set(conj[:2])
                if got is None:
                    remaining = [i for i in remaining if i not in used]
                    continue
                blocks += got
                remaining = [i for i in remaining if i not in used]
                continue
            k = krein_form(vecs[:, up])
            krein.append(k)
            if abs(k) < 1e-7:
                notes.append(f"Krein form of eigenvalue {zu} is numerically zero")
            phi = cmath.phase(zu)
            blocks.append(Block("R", phi if k > 0 else TWO_PI - phi))
            used = {up} | set(conj[:1])
            remaining = [i for i in remaining if i not in used]
            continue
        if abs(abs(z) - 1.0) < 10 * unit_tol:
            notes.append(f"eigenvalue {z} within {10 * unit_tol:g} of the unit circle")
        big = z if abs(z) > 1 else 1 / z
        if abs(big.imag) < unit_tol * abs(big):
            partner = min((i for i in remaining if i != j), key=lambda i: abs(mu[i] - 1 / z),
                          default=None)
            blocks.append(Block("D", complex(big.real)))
            remaining = [i for i in remaining if i not in (j, partner)]
            continue
        quad = [big, 1 / big, big.conjugate(), 1 / big.conjugate()]
        used = set()
        for q in quad:
            cands = [i for i in remaining if i not in used]
            if cands:
                used.add(min(cands, key=lambda i: abs(mu[i] - q)))
        blocks.append(Block("Q", big if big.imag > 0 else big.conjugate()))
        remaining = [i for i in remaining if i not in used]

    tag = NormalForm(tuple(blocks))
    ambiguous = bool(notes) or tag.dim != d
    if ambiguous:
        if tag.dim == d and not candidates:
            candidates = [tag]
        else:
            candidates = [NormalForm(tuple(blocks) + c.blocks) for c in candidates]
        return Classification(None, mu, nul_p, nul_m, True, tuple(candidates), tuple(notes),
                              tuple(krein))
    return Classification(tag, mu, nul_p, nul_m, False, (tag,), (), tuple(krein))


# ----------------------------------------------------------------------
# splitting numbers and index propagation

def _same_point(z: complex, w: complex) -> bool:
    return abs(cmath.phase(z / w)) < ANGLE_TOL


def _block_splitting(b: Block, omega: complex) -> SplittingPair:
    k = b.kind
    if k in ("D", "Q"):
        return SplittingPair(0, 0)
    if k == "R":
        if _same_point(cmath.exp(1j * b.value.real), omega):
            return SplittingPair(0, 1)
        if _same_point(cmath.exp(-1j * b.value.real), omega):
            return SplittingPair(1, 0)
        return SplittingPair(0, 0)
    if k in ("N1", "I2"):
        lam = b.value.real
        if not _same_point(complex(lam), omega):
            return SplittingPair(0, 0)
        a = 0 if k == "I2" else b.a
        # N1(1, a) is split for a in {1, 0}; N1(-1, a) for a in {-1, 0}
        split = (a in (1, 0)) if lam > 0 else (a in (-1, 0))
        return SplittingPair(1, 1) if split else SplittingPair(0, 0)
    # N2
    if _same_point(b.value, omega) or _same_point(b.value.conjugate(), omega):
        return SplittingPair(1, 1) if b.a else SplittingPair(0, 0)
    return SplittingPair(0, 0)


def splitting_numbers(tag, omega) -> SplittingPair:
    """Splitting numbers ``(S+, S-)`` of a normal form at ``omega``.

    Values come from the table of basic normal forms and are summed over the
    blocks; they vanish away from the spectrum.
    """
    if isinstance(tag, Block):
        tag = NormalForm((tag,))
    omega = complex(omega)
    out = SplittingPair(0, 0)
    for b in tag.blocks:
        out = out + _block_splitting(b, omega)
    return out


def _angle(z: complex) -> float:
    return cmath.phase(z) % TWO_PI


def propagate_index(i_1: int, tag, omega_0) -> int:
    """``i_omega0`` from ``i_1`` and the splitting numbers of the end matrix.

    Walks counterclockwise from 1 to ``omega_0`` adding ``S+ - S-`` at each
    unit-circle eigenvalue passed, with ``S+(1)`` at the start and ``-S-``
    at ``omega_0``.
    """
    if isinstance(tag, Classification):
        if tag.tag is None:
            raise AmbiguityError("cannot propagate through an ambiguous classification",
                                 tag.candidates)
        tag = tag.tag
    omega_0 = complex(omega_0)
    if _same_point(omega_0, 1.0):
        return int(i_1)
    target = _angle(omega_0)
    total = int(i_1) + splitting_numbers(tag, 1.0).s_plus
    points = set()
    for z in tag.eigenvalues():
        if abs(abs(z) - 1.0) > 1e-9:
            continue
        a = _angle(z)
        if a < ANGLE_TOL or abs(a - TWO_PI) < ANGLE_TOL:
            continue
        if abs(a - target) < ANGLE_TOL:
            continue
        if abs(a - target) < 100 * ANGLE_TOL:
            raise AmbiguityError(f"eigenvalue angle {a} unresolved against {target}")
        if a < target:
            points.add(round(a, 12))
    for a in sorted(points):
        s = splitting_numbers(tag, cmath.exp(1j * a))
        total += s.s_plus - s.s_minus
    total -= splitting_numbers(tag, omega_0).s_minus
    return total


# ----------------------------------------------------------------------
# circular case closed forms

def beta_hat(n: float) -> float:
    """Threshold ``(n^2 - 3 + sqrt(9 n^4 - 14 n^2 + 9)) / 4``; ``n`` may be half-integer."""
    n2 = n * n
    return (n2 - 3.0 + math.sqrt(9.0 * n2 * n2 - 14.0 * n2 + 9.0)) / 4.0


def theta_e0(beta: float) -> float:
    """Rotation number of the elliptic pair at ``e = 0``."""
    return math.sqrt((1.0 - beta + math.sqrt(9.0 * beta * beta + 10.0 * beta + 1.0)) / 2.0)


def alpha1_e0(beta: float) -> float:
    """Positive root ``alpha_1`` giving the real pair ``exp(+-2 pi sqrt(alpha_1))``."""
    return (beta - 1.0 + math.sqrt(9.0 * beta * beta + 10.0 * beta + 1.0)) / 2.0


@dataclass(frozen=True)
class E0Tables:
    """Closed-form stability data of the circular orbit."""

    beta: float
    theta: float
    alpha1: float
    i_plus: int
    nu_plus: int
    i_minus: int
    nu_minus: int
    bracket_plus: tuple
    bracket_minus: tuple
    branch: str
    eigenvalues: tuple

    def as_dict(self) -> dict:
        return {
            "beta": self.beta, "theta": self.theta, "alpha1": self.alpha1,
            "i_1": self.i_plus, "nu_1": self.nu_plus,
            "i_-1": self.i_minus, "nu_-1": self.nu_minus,
            "bracket_1": list(self.bracket_plus), "bracket_-1": list(self.bracket_minus),
            "branch": self.branch,
            "eigenvalues": [complex(z) for z in self.eigenvalues],
        }


def analytic_e0_tables(beta: float, tol: float = 1e-9) -> E0Tables:
    """Indices, nullities and the end-matrix branch at ``e = 0``.

    ``tol`` decides when ``beta`` counts as sitting on a threshold.
    """
    if not (math.isfinite(beta) and beta >= 0):
        raise InputError(f"beta must be >= 0, got {beta}")
    th = theta_e0(beta)
    a1 = alpha1_e0(beta)
    lam = math.exp(TWO_PI * math.sqrt(a1))
    eig = (complex(lam), complex(1 / lam), cmath.exp(2j * math.pi * th),
           cmath.exp(-2j * math.pi * th))

    if beta <= tol:
        return E0Tables(beta, th, a1, 0, 3, 2, 0, (0.0, 0.0), (0.0, beta_hat(1.5)),
                        "I2⋄N1(1,1)", eig)

    # omega = 1: beta in (hat_n, hat_{n+1}] gives 2n + 1
    n = 1
    while beta > beta_hat(n + 1) + tol:
        n += 1
    on_plus = abs(beta - beta_hat(n + 1)) <= tol
    i_plus, nu_plus = 2 * n + 1, (2 if on_plus else 0)

    # omega = -1: [0, hat_{3/2}] gives 2, (hat_{n-1/2}, hat_{n+1/2}] gives 2n
    k = 1
    while beta > beta_hat(k + 0.5) + tol:
        k += 1
    on_minus = abs(beta - beta_hat(k + 0.5)) <= tol
    i_minus = 2 if k == 1 else 2 * k
    nu_minus = 2 if on_minus else 0
    lo_minus = 0.0 if k == 1 else beta_hat(k - 0.5)

    frac = th - math.floor(th)
    if on_plus:
        branch = "I2⋄D(2)"
    elif on_minus:
        branch = "-I2⋄D(2)"
    else:
        branch = "R(θ∈(0,π))⋄D(2)" if frac < 0.5 else "R(θ∈(π,2π))⋄D(2)"
    return E0Tables(beta, th, a1, i_plus, nu_plus, i_minus, nu_minus,
                    (beta_hat(n), beta_hat(n + 1)), (lo_minus, beta_hat(k + 0.5)), branch, eig)
