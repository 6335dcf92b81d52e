"""Degenerate curves in the ``(beta, e)`` plane and the regions between them.

For fixed ``e`` and ``omega = +-1`` the Galerkin eigenvalues of ``A(beta, e)``
decrease strictly in ``beta``, so the number of negative eigenvalues is a
non-decreasing step function whose jumps are the degenerate points.  Each
jump is located by bisection on that count.  Counting crossings with
multiplicity and sorting gives the n-th degenerate point ``beta_n(omega, e)``:
for ``omega = 1`` points ``2n-1`` and ``2n`` coincide and form ``Gamma_n``,
for ``omega = -1`` they form the pair ``Xi_n^-`` <= ``Xi_n^+``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import AmbiguityError, ClassificationConflict, DomainError, InputError
from .index_theory import beta_hat, classify, propagate_index
from .monodromy import EssentialSystem, monodromy
from .spectral import _counts, assemble, count_negative, morse_index, suggest_truncation

__all__ = [
    "WORKERS_ENV",
    "worker_count",
    "Slice",
    "scan_slice",
    "degenerate_betas",
    "DegeneracyCurve",
    "trace_curves",
    "OrderReport",
    "order_check",
    "slice_positions",
    "Prediction",
    "theorem_prediction",
    "RegionRecord",
    "region_classify",
    "GridCell",
    "AtlasGrid",
    "region_grid",
]

WORKERS_ENV = "EULERSTAB_WORKERS"
SCAN_STEP = 0.02
ROOT_TOL = 1e-12
MERGE_TOL = 1e-9
SPLIT_TOL = 1e-6
SLOPE_CAP = 50.0
ON_CURVE_TOL = 1e-8
NEAR_CURVE_TOL = 1e-5


def worker_count(requested: int | None = None) -> int:
    """Number of worker processes, capped by the ``EULERSTAB_WORKERS`` variable."""
    n = requested if requested is not None else (os.cpu_count() or 1)
    cap = os.environ.get(WORKERS_ENV)
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError as exc:
            raise InputError(f"{WORKERS_ENV} must be an integer, got {cap!r}") from exc
    return max(1, n)


def _base_count(omega: float) -> int:
    # negative eigenvalues just to the right of beta = 0
    return 3 if omega == 1 else 2


def _omega_value(omega) -> float:
    w = complex(omega)
    if abs(w - 1) < 1e-14:
        return 1.0
    if abs(w + 1) < 1e-14:
        return -1.0
    raise DomainError(f"degenerate curves are traced for omega = +-1 only, got {omega}")


@dataclass(frozen=True)
class Slice:
    """All degenerate points of one ``(omega, e)`` slice up to ``beta_max``.

    ``crossings`` repeats each point once per eigenvalue crossing;
    ``roots`` merges crossings closer than ``MERGE_TOL`` into
    ``(beta, multiplicity, kernel_dimension)`` triples.
    """

    omega: float
    ecc: float
    beta_max: float
    N: int
    crossings: tuple
    roots: tuple


def _choose_truncation(ecc, omega, beta_max, N):
    if N is not None:
        return N
    n = suggest_truncation(ecc, beta_max)
    while True:
        c1 = count_negative(assemble(beta_max, ecc, omega, n))
        c2 = count_negative(assemble(beta_max, ecc, omega, 2 * n))
        if c1 == c2 or n >= 512:
            return n
        n *= 2


def scan_slice(omega, ecc: float, beta_max: float = 12.0, step: float = SCAN_STEP,
               N: int | None = None, root_tol: float = ROOT_TOL) -> Slice:
    """Scan ``beta`` in ``(0, beta_max]`` and bisect every jump of the index."""
    om = _omega_value(omega)
    if not (0 < beta_max <= 50):
        raise DomainError(f"beta_max must lie in (0, 50], got {beta_max}")
    if not (0 <= ecc < 1):
        raise DomainError(f"eccentricity must lie in [0, 1), got {ecc}")
    n = _choose_truncation(ecc, om, beta_max, N)

    def count(b):
        return count_negative(assemble(b, ecc, om, n))

    grid = np.arange(1, int(math.ceil(beta_max / step)) + 1) * step
    grid[-1] = min(grid[-1], beta_max)
    crossings = []
    lo_b, lo_c = 0.0, _base_count(om)
    for b in grid:
        c = count(b)
        for k in range(lo_c + 1, c + 1):
            lo, hi = lo_b, b
            while hi - lo > root_tol * max(1.0, hi):
                mid = 0.5 * (lo + hi)
                if count(mid) >= k:
                    hi = mid
                else:
                    lo = mid
            crossings.append(0.5 * (lo + hi))
        lo_b, lo_c = b, max(c, lo_c)
    crossings.sort()
    roots = []
    i = 0
    while i < len(crossings):
        j = i
        while j + 1 < len(crossings) and crossings[j + 1] - crossings[i] <= MERGE_TOL:
            j += 1
        beta = float(np.mean(crossings[i:j + 1]))
        _, nul, _ = _counts(assemble(beta, ecc, om, n))
        roots.append((beta, j - i + 1, nul))
        i = j + 1
    return Slice(om, float(ecc), float(beta_max), n, tuple(crossings), tuple(roots))


def degenerate_betas(omega, ecc: float, beta_max: float = 12.0, **kw) -> list:
    """All ``(beta, multiplicity)`` with ``nu_omega(beta, e) >= 1``, ``beta <= beta_max``."""
    s = scan_slice(omega, ecc, beta_max, **kw)
    return [(b, m) for b, m, _ in s.roots]


# ----------------------------------------------------------------------
# curves

@dataclass(frozen=True)
class DegeneracyCurve:
    """Samples of one degenerate curve.

    ``gap`` is ``beta_{2n} - beta_{2n-1}`` at each sample: the distance
    between the two crossings that make up ``Gamma_n`` or the separation of
    ``Xi_n^-`` and ``Xi_n^+``.
    """

    omega: float
    label: str
    n: int
    samples: tuple
    multiplicity: tuple
    N_used: tuple
    gap: tuple
    expected_start: float
    diagnostics: tuple = ()

    @property
    def e(self) -> np.ndarray:
        return np.array([s[0] for s in self.samples])

    @property
    def beta(self) -> np.ndarray:
        return np.array([s[1] for s in self.samples])

    @property
    def start_beta(self) -> float:
        if self.samples and self.samples[0][0] == 0.0:
            return self.samples[0][1]
        return float("nan")

    def at(self, ecc: float) -> float:
        """``beta`` at ``ecc`` by linear interpolation (``nan`` outside)."""
        e, b = self.e, self.beta
        if len(e) == 0 or ecc < e[0] - 1e-15 or ecc > e[-1] + 1e-15:
            return float("nan")
        hit = np.nonzero(np.abs(e - ecc) <= 1e-15)[0]
        if hit.size:
            return float(b[hit[0]])
        return float(np.interp(ecc, e, b))

    def rows(self):
        for (e, b), m, n in zip(self.samples, self.multiplicity, self.N_used):
            yield (self.label, e, b, m, n)


def _labels(omega: float, n: int):
    if omega == 1:
        return [(f"Gamma_{n}", beta_hat(n + 1))]
    return [(f"Xi_{n}^-", beta_hat(n + 0.5)), (f"Xi_{n}^+", beta_hat(n + 0.5))]


def _scan_args(args):
    return scan_slice(*args)


def scan_slices(omega, e_grid, beta_max=12.0, step=SCAN_STEP, workers=1):
    """Independent slices, evaluated in parallel and returned in grid order."""
    args = [(omega, float(e), beta_max, step) for e in e_grid]
    workers = worker_count(workers)
    if workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(args))) as ex:
            return list(ex.map(_scan_args, args))
    return [_scan_args(a) for a in args]


def trace_curves(omega, e_grid, beta_max: float = 12.0, step: float = SCAN_STEP,
                 slope_cap: float = SLOPE_CAP, workers: int | None = 1, slices=None):
    """Follow every degenerate curve across ascending ``e_grid``.

    The n-th pair of crossings on each slice is continued into the n-th
    pair on the next one; this is the order the curves are proven to keep.
    A jump larger than ``slope_cap * delta_e`` ends the curve with a
    diagnostic instead of joining two different curves.
    """
    om = _omega_value(omega)
    e_grid = [float(e) for e in e_grid]
    if any(b <= a for a, b in zip(e_grid[:-1], e_grid[1:])):
        raise InputError("e_grid must be strictly ascending")
    if slices is None:
        slices = scan_slices(om, e_grid, beta_max, step, workers)
    n_pairs = max((len(s.crossings) + 1) // 2 for s in slices) if slices else 0
    curves = []
    for n in range(1, n_pairs + 1):
        for pos, (label, start) in enumerate(_labels(om, n)):
            samples, mult, nused, gaps, diag = [], [], [], [], []
            stopped = False
            for s in slices:
                c = s.crossings
                if len(c) < 2 * n - 1 + (1 if om == 1 or pos == 1 else 0):
                    if samples and not stopped:
                        diag.append(f"left the window beta <= {s.beta_max} at e={s.ecc}")
                        stopped = True
                    continue
                if stopped:
                    continue
                first = c[2 * n - 2]
                second = c[2 * n - 1] if len(c) >= 2 * n else math.nan
                gap = second - first
                if om == 1:
                    beta = first if math.isnan(second) else 0.5 * (first + second)
                    m = 2 if gap <= MERGE_TOL else 1
                else:
                    beta = first if pos == 0 else second
                    m = 2 if gap <= MERGE_TOL else 1
                if samples:
                    de = s.ecc - samples[-1][0]
                    if abs(beta - samples[-1][1]) > slope_cap * de:
                        diag.append(f"slope cap exceeded between e={samples[-1][0]} and e={s.ecc}")
                        stopped = True
                        continue
                samples.append((s.ecc, float(beta)))
                mult.append(m)
                nused.append(s.N)
                gaps.append(float(gap))
            if samples and samples[0][0] == 0.0 and abs(samples[0][1] - start) > 1e-6:
                diag.append(f"start {samples[0][1]!r} differs from expected {start!r}")
            if samples:
                curves.append(DegeneracyCurve(om, label, n, tuple(samples), tuple(mult),
                                              tuple(nused), tuple(gaps), start, tuple(diag)))
    return curves


@dataclass(frozen=True)
class OrderReport:
    ecc: float
    sequence: tuple
    ok: bool
    violations: tuple


def slice_positions(curves, ecc: float):
    """``(xi_pairs, gammas)`` at ``ecc`` read off traced curves."""
    xi = {}
    gam = {}
    for c in curves:
        b = c.at(ecc)
        if math.isnan(b):
            continue
        if c.omega == 1:
            gam[c.n] = b
        else:
            xi.setdefault(c.n, [math.nan, math.nan])[0 if c.label.endswith("-") else 1] = b
    gammas = [gam[n] for n in sorted(gam)]
    pairs = [tuple(xi[n]) for n in sorted(xi)]
    return pairs, gammas


def order_check(curves, ecc: float) -> OrderReport:
    """Check ``0 < Xi_1^- <= Xi_1^+ < Gamma_1 < Xi_2^- <= ...`` at one slice."""
    pairs, gammas = slice_positions(curves, ecc)
    seq = []
    for n in range(max(len(pairs), len(gammas))):
        if n < len(pairs):
            seq.append((f"Xi_{n + 1}^-", pairs[n][0]))
            seq.append((f"Xi_{n + 1}^+", pairs[n][1]))
        if n < len(gammas):
            seq.append((f"Gamma_{n + 1}", gammas[n]))
    seq = [(lab, b) for lab, b in seq if not math.isnan(b)]
    violations = []
    if seq and not seq[0][1] > 0:
        violations.append(("0", seq[0][0]))
    for (la, a), (lb, b) in zip(seq[:-1], seq[1:]):
        weak = la.startswith("Xi") and lb.startswith("Xi") and la[:-2] == lb[:-2]
        if (b < a) if weak else (b <= a):
            violations.append((la, lb))
    return OrderReport(float(ecc), tuple(seq), not violations, tuple(violations))


# ----------------------------------------------------------------------
# regions

_ROMAN = ["i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix", "x", "xi", "xii", "xiii", "xiv"]


@dataclass(frozen=True)
class Prediction:
    """Stability data the region theorem assigns to one ``(beta, e)``."""

    case: str
    n: int
    i_plus: int
    nu_plus: int
    i_minus: int
    nu_minus: int
    label: str


def theorem_prediction(beta: float, xi_pairs, gammas, tol: float = ON_CURVE_TOL) -> Prediction:
    """Case of the region theorem from the positions of the curves on a slice.

    ``xi_pairs`` is the list of ``(Xi_n^-, Xi_n^+)`` and ``gammas`` the list
    of ``Gamma_n`` at the slice, both in increasing ``n``.
    """
    if beta <= tol:
        return Prediction("i", 0, 0, 3, 2, 0, "I2⋄N1(1,1)")
    for k, g in enumerate(gammas, 1):
        if abs(beta - g) <= tol:
            return Prediction("viii", k, 2 * k + 1, 2, 2 * k + 2, 0, "I2⋄D(2)")
    n = sum(1 for g in gammas if g < beta)
    if n >= len(xi_pairs):
        raise InputError(f"beta={beta} lies beyond the traced curves")
    lo, hi = xi_pairs[n]
    if math.isnan(lo) or math.isnan(hi):
        raise InputError(f"beta={beta} lies beyond the traced curves")
    i1, base = 2 * n + 3, 2 * n + 2
    shift = 0 if n == 0 else 7
    if beta < lo - tol:
        pos, im, nm, lab = 1, base, 0, "R(θ∈(0,π))⋄D(2)"
    elif abs(beta - lo) <= tol and abs(beta - hi) <= tol:
        pos, im, nm, lab = 2, base, 2, "-I2⋄D(2)"
    elif abs(beta - lo) <= tol:
        pos, im, nm, lab = 3, base, 1, "N1(-1,-1)⋄D(2)"
    elif beta < hi - tol:
        pos, im, nm, lab = 4, base + 1, 0, "D(-2)⋄D(2)"
    elif abs(beta - hi) <= tol:
        pos, im, nm, lab = 5, base + 1, 1, "N1(-1,1)⋄D(2)"
    else:
        if n >= len(gammas):
            raise InputError(f"beta={beta} lies beyond the traced curves")
        pos, im, nm, lab = 6, base + 2, 0, "R(θ∈(π,2π))⋄D(2)"
    return Prediction(_ROMAN[pos + shift], n, i1, 0, im, nm, lab)


@dataclass(frozen=True)
class RegionRecord:
    """Predicted and computed stability data at one point."""

    beta: float
    ecc: float
    prediction: Prediction
    i_plus: int
    nu_plus: int
    i_minus: int
    nu_minus: int
    tag: str
    normal_form: str
    propagated_i_minus: int | None
    conflicts: tuple = ()
    notes: tuple = field(default=())

    @property
    def ok(self) -> bool:
        return not self.conflicts


def _check_distance(beta, pairs, gammas):
    for b in [g for g in gammas] + [x for p in pairs for x in p]:
        if ON_CURVE_TOL < abs(beta - b) < NEAR_CURVE_TOL:
            raise AmbiguityError(f"beta={beta} is {abs(beta - b):.2e} from a curve at {b}")


def region_classify(beta: float, ecc: float, curves=None, beta_max: float | None = None,
                    raise_on_conflict: bool = False, **mono_kw) -> RegionRecord:
    """Locate ``(beta, e)`` among the curves and compare with direct computation.

    Without ``curves`` the two slices through ``ecc`` are scanned directly.
    The prediction is compared with the normal form of the monodromy matrix,
    both Galerkin index pairs and the index propagated from ``i_1``.
    """
    if curves is None:
        bm = beta_max if beta_max is not None else max(12.0, beta + 1.0)
        sp = scan_slice(1, ecc, bm)
        sm = scan_slice(-1, ecc, bm)
        gammas = [0.5 * (sp.crossings[2 * k] + sp.crossings[2 * k + 1])
                  for k in range(len(sp.crossings) // 2)]
        pairs = [(sm.crossings[2 * k], sm.crossings[2 * k + 1])
                 for k in range(len(sm.crossings) // 2)]
    else:
        pairs, gammas = slice_positions(curves, ecc)
    _check_distance(beta, pairs, gammas)
    pred = theorem_prediction(beta, pairs, gammas)

    mono = monodromy(EssentialSystem(beta, ecc), **mono_kw)
    cls = classify(mono)
    plus = morse_index(assemble(beta, ecc, 1.0))
    minus = morse_index(assemble(beta, ecc, -1.0))
    prop = None
    conflicts = []
    if cls.tag is not None:
        prop = propagate_index(plus.index, cls.tag, -1.0)
        if prop != minus.index:
            conflicts.append(f"propagated i_-1={prop} but Galerkin gives {minus.index}")
    else:
        conflicts.append("classification ambiguous: " + "; ".join(cls.notes))
    for name, want, got in (("i_1", pred.i_plus, plus.index), ("nu_1", pred.nu_plus, plus.nullity),
                            ("i_-1", pred.i_minus, minus.index),
                            ("nu_-1", pred.nu_minus, minus.nullity),
                            ("class", pred.label, cls.label)):
        if want != got:
            conflicts.append(f"{name}: predicted {want}, computed {got}")
    rec = RegionRecord(float(beta), float(ecc), pred, plus.index, plus.nullity, minus.index,
                       minus.nullity, cls.label, str(cls.tag) if cls.tag else "", prop,
                       tuple(conflicts), tuple(cls.notes))
    if conflicts and raise_on_conflict:
        raise ClassificationConflict("; ".join(conflicts), rec)
    return rec


@dataclass(frozen=True)
class GridCell:
    beta: float
    ecc: float
    i_plus: int
    nu_plus: int
    i_minus: int
    nu_minus: int
    tag: str


@dataclass(frozen=True)
class AtlasGrid:
    betas: tuple
    eccs: tuple
    cells: tuple

    def rows(self):
        for c in self.cells:
            yield (c.ecc, c.beta, c.i_plus, c.nu_plus, c.i_minus, c.nu_minus, c.tag)


def _grid_row(args):
    ecc, betas, mono_kw = args
    out = []
    for b in betas:
        plus = morse_index(assemble(b, ecc, 1.0))
        minus = morse_index(assemble(b, ecc, -1.0))
        cls = classify(monodromy(EssentialSystem(b, ecc), **mono_kw))
        out.append(GridCell(float(b), float(ecc), plus.index, plus.nullity, minus.index,
                            minus.nullity, cls.label))
    return out


def region_grid(betas, eccs, workers: int | None = 1, **mono_kw) -> AtlasGrid:
    """Index pairs at ``+-1`` and the normal-form class on a rectangular grid."""
    betas = tuple(float(b) for b in betas)
    eccs = tuple(float(e) for e in eccs)
    args = [(e, betas, mono_kw) for e in eccs]
    workers = worker_count(workers)
    if workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(args))) as ex:
            rows = list(ex.map(_grid_row, args))
    else:
        rows = [_grid_row(a) for a in args]
    return AtlasGrid(betas, eccs, tuple(c for row in rows for c in row))
