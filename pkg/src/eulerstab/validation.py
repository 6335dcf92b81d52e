"""Acceptance checks run by ``eulerstab validate`` and the test suite.

Each check returns a :class:`CheckResult` with the observed and expected
values.  Checks share a :class:`ValidationContext` that caches slices and
records the numerical hygiene of every monodromy matrix it computes, so the
last check can audit all of them.
"""

from __future__ import annotations

import cmath
import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .atlas import order_check, region_classify, scan_slice, slice_positions, trace_curves
from .central_config import MassTriple, delta_from_geometry, mass_parameter, solve_euler_quintic
from .index_theory import alpha1_e0, analytic_e0_tables, beta_hat, theta_e0
from .monodromy import DEFAULT_ATOL, DEFAULT_RTOL, EssentialSystem, monodromy
from .spectral import index_pair

__all__ = ["CheckResult", "ValidationContext", "CHECKS", "run_checks"]

SYMPLECTIC_LIMIT = 1e-9
BACKWARD_LIMIT = 1e-8


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    observed: object
    expected: object
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"[{status}] {self.number:2d} {self.name}: observed {self.observed}, expected {self.expected}"
        if self.detail:
            text += f" ({self.detail})"
        return text + f" [{self.seconds:.2f} s]"

    def as_dict(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": self.passed,
                "observed": self.observed, "expected": self.expected,
                "detail": self.detail, "seconds": self.seconds}


@dataclass
class ValidationContext:
    """Shared state: integrator tolerances, caches and the hygiene log."""

    rtol: float = DEFAULT_RTOL
    atol: float | None = None
    seed: int = 20240607
    hygiene: list = field(default_factory=list)
    _slices: dict = field(default_factory=dict)

    @property
    def mono_kw(self) -> dict:
        atol = self.atol if self.atol is not None else DEFAULT_ATOL * self.rtol / DEFAULT_RTOL
        return {"rtol": self.rtol, "atol": atol}

    def monodromy(self, beta: float, ecc: float):
        m = monodromy(EssentialSystem(beta, ecc), **self.mono_kw)
        self.hygiene.append((beta, ecc, m.symplectic_defect, m.backward_residual))
        return m

    def slice(self, omega: float, ecc: float, beta_max: float = 12.0):
        key = (omega, float(ecc), float(beta_max))
        if key not in self._slices:
            self._slices[key] = scan_slice(omega, ecc, beta_max)
        return self._slices[key]

    def curves(self, e_grid, beta_max: float = 12.0):
        out = []
        for om in (1.0, -1.0):
            slices = [self.slice(om, e, beta_max) for e in e_grid]
            out += trace_curves(om, e_grid, beta_max, slices=slices)
        return out


def _fmt(x: float) -> str:
    return f"{x:.3g}"


def check_e0_eigenvalues(ctx):
    worst, where = 0.0, None
    for b in np.linspace(0.0, 7.0, 50):
        mu = ctx.monodromy(b, 0.0).eigenvalues()
        lam = math.exp(2 * math.pi * math.sqrt(alpha1_e0(b)))
        th = theta_e0(b)
        want = np.array([lam, 1 / lam, cmath.exp(2j * math.pi * th), cmath.exp(-2j * math.pi * th)])
        cost = np.abs(mu[:, None] - want[None, :]) / np.abs(want[None, :])
        r, c = linear_sum_assignment(cost)
        err = float(cost[r, c].max())
        if err > worst:
            worst, where = err, b
    return worst < 1e-7, _fmt(worst), "< 1e-07", f"worst at beta={where:.4g}"


def check_e0_tables(ctx):
    betas = list(np.linspace(0.0, 7.0, 100)) + [beta_hat(2), beta_hat(3), beta_hat(1.5), beta_hat(2.5)]
    bad = []
    for b in betas:
        t = analytic_e0_tables(b)
        plus = index_pair(b, 0.0, 1.0).as_tuple()
        minus = index_pair(b, 0.0, -1.0).as_tuple()
        if plus != (t.i_plus, t.nu_plus) or minus != (t.i_minus, t.nu_minus):
            bad.append((round(float(b), 6), plus, minus))
    return not bad, f"{len(bad)} mismatches", f"0 of {len(betas)}", str(bad[:3]) if bad else ""


def check_beta_zero(ctx):
    bad = []
    for e in (0.0, 0.3, 0.6, 0.9):
        if index_pair(0.0, e, 1.0).as_tuple() != (0, 3):
            bad.append((e, 1))
        for w in (-1.0, cmath.exp(1j * math.pi / 3)):
            if index_pair(0.0, e, w).as_tuple() != (2, 0):
                bad.append((e, w))
    return not bad, f"{len(bad)} mismatches", "0 of 12", str(bad) if bad else ""


def check_nullity_agreement(ctx):
    rng = np.random.default_rng(ctx.seed)
    bad, degenerate = [], 0
    for j in range(30):
        e = float(rng.uniform(0.0, 0.9))
        om = float(rng.choice([1.0, -1.0]))
        beta = float(rng.uniform(0.0, 7.0))
        if j % 3 == 0:
            roots = ctx.slice(om, e, 7.0).roots
            if roots:
                beta = roots[int(rng.integers(len(roots)))][0]
        nu_op = index_pair(beta, e, om).nullity
        nu_mono = ctx.monodromy(beta, e).kernel_dimension(om)
        degenerate += nu_op > 0
        if nu_op != nu_mono:
            bad.append((round(beta, 6), round(e, 4), om, nu_op, nu_mono))
    return (not bad, f"{len(bad)} mismatches", "0 of 30",
            f"{degenerate} degenerate triples" + (f"; {bad[:3]}" if bad else ""))


def check_delta_identity(ctx):
    rng = np.random.default_rng(ctx.seed + 1)
    worst = 0.0
    for m in rng.uniform(1e-3, 1.0, size=(1000, 3)):
        masses = MassTriple(*m)
        x = solve_euler_quintic(masses)
        worst = max(worst, abs(delta_from_geometry(masses, x) - (mass_parameter(masses, x) + 1.0)))
    return worst < 1e-10, _fmt(worst), "< 1e-10", ""


def check_parity_multiplicity(ctx):
    even, bad_roots, roots = [], [], 0
    for e in (0.2, 0.5, 0.8):
        for b in np.linspace(0.05, 12.0, 40):
            i1 = index_pair(b, e, 1.0).index
            if i1 % 2 == 0:
                even.append((round(float(b), 4), e, i1))
        for beta, mult, nul in ctx.slice(1.0, e).roots:
            roots += 1
            kd = ctx.monodromy(beta, e).kernel_dimension(1.0)
            if (mult, nul, kd) != (2, 2, 2):
                bad_roots.append((round(beta, 8), e, mult, nul, kd))
    ok = not even and not bad_roots and roots > 0
    return (ok, f"{len(even)} even indices, {len(bad_roots)} roots with kernel != 2",
            "0 and 0", f"{roots} degenerate points checked")


def check_curve_starts(ctx):
    curves = {c.label: c for c in ctx.curves([0.0, 1e-3])}
    want = {"Gamma_1": beta_hat(2), "Gamma_2": beta_hat(3), "Xi_1^-": beta_hat(1.5),
            "Xi_1^+": beta_hat(1.5), "Xi_2^-": beta_hat(2.5), "Xi_2^+": beta_hat(2.5)}
    start_err, slope = 0.0, 0.0
    missing = [k for k in want if k not in curves or len(curves[k].samples) < 2]
    for k, b in want.items():
        if k in missing:
            continue
        c = curves[k]
        start_err = max(start_err, abs(c.start_beta - b))
        slope = max(slope, abs(c.beta[1] - c.beta[0]) / (c.e[1] - c.e[0]))
    ok = not missing and start_err < 1e-6 and slope < 0.05
    return (ok, f"start error {_fmt(start_err)}, slope {_fmt(slope)}", "< 1e-06 and < 0.05",
            f"missing {missing}" if missing else "")


def check_ordering(ctx):
    eccs = (0.1, 0.3, 0.5, 0.7)
    curves = ctx.curves((0.0,) + eccs)
    failed = [(e, order_check(curves, e).violations) for e in eccs if not order_check(curves, e).ok]
    gap = max((g for c in curves if c.omega == 1 for g in c.gap), default=math.inf)
    ok = not failed and gap < 1e-6
    return ok, f"{len(failed)} ordering violations, max Gamma gap {_fmt(gap)}", "0 and < 1e-06", \
        str(failed) if failed else ""


def check_regions(ctx):
    e = 0.3
    curves = ctx.curves((0.0, 0.1, 0.3))
    pairs, gammas = slice_positions(curves, e)
    lo, hi = pairs[0]
    probes = {"ii": 0.5 * lo, "v": 0.5 * (lo + hi), "vii": 0.5 * (hi + gammas[0]), "viii": gammas[0]}
    conflicts = []
    for case, b in probes.items():
        rec = region_classify(b, e, curves, **ctx.mono_kw)
        if rec.prediction.case != case:
            conflicts.append(f"{case}: landed in case {rec.prediction.case}")
        conflicts += [f"{case}: {c}" for c in rec.conflicts]
    return not conflicts, f"{len(conflicts)} conflicts", "0", "; ".join(conflicts[:3])


def check_index_bound(ctx):
    c = 2.0 / (3.0 * math.sqrt(2.0) - 1.0)
    bad, tested = [], 0
    for n in (1, 2, 3):
        for e in np.linspace(0.0, 0.9, 10):
            top = c * (n * n - e / (1 + e)) * (1 - e) - 1
            if top <= 0:
                continue
            for b in np.linspace(0.0, top, 6, endpoint=False):
                tested += 1
                i1 = index_pair(b, e, 1.0).index
                if i1 > 4 * n + 2:
                    bad.append((n, round(float(e), 2), round(float(b), 4), i1))
    return (not bad and tested > 0, f"{len(bad)} violations", f"0 of {tested}",
            str(bad[:3]) if bad else "")


def _clusters(roots, width=1e-6):
    out = []
    for beta, mult, _ in roots:
        if out and beta - out[-1][-1][0] <= width:
            out[-1].append((beta, mult))
        else:
            out.append([(beta, mult)])
    return out


def check_monotonicity(ctx):
    decreasing, bad_jumps, jumps = [], [], 0
    grid = np.linspace(0.01, 12.0, 60)
    for om in (1.0, -1.0):
        for e in (0.2, 0.5, 0.8):
            idx = [index_pair(b, e, om).index for b in grid]
            decreasing += [(om, e, round(float(b), 3)) for b, i, j in zip(grid[1:], idx[:-1], idx[1:]) if j < i]
            cl = _clusters(ctx.slice(om, e).roots)
            for k, group in enumerate(cl):
                left, right = group[0][0], group[-1][0]
                room = [1e-4]
                if k > 0:
                    room.append((left - cl[k - 1][-1][0]) / 3)
                if k + 1 < len(cl):
                    room.append((cl[k + 1][0][0] - right) / 3)
                h = min(room)
                centre = 0.5 * (left + right)
                jump = index_pair(right + h, e, om).index - index_pair(left - h, e, om).index
                nul = index_pair(centre, e, om).nullity if len(group) == 1 else sum(m for _, m in group)
                jumps += 1
                if jump != nul or jump != sum(m for _, m in group):
                    bad_jumps.append((om, e, round(centre, 8), jump, nul))
    ok = not decreasing and not bad_jumps
    return (ok, f"{len(decreasing)} decreases, {len(bad_jumps)} bad jumps", "0 and 0",
            f"{jumps} jumps checked" + (f"; {bad_jumps[:3]}" if bad_jumps else ""))


def check_hygiene(ctx):
    if not ctx.hygiene:
        for b, e in ((0.5, 0.3), (2.0, 0.6), (7.0, 0.9)):
            ctx.monodromy(b, e)
    sd = max(h[2] for h in ctx.hygiene)
    br = max(h[3] for h in ctx.hygiene)
    ok = sd < SYMPLECTIC_LIMIT and br < BACKWARD_LIMIT
    return (ok, f"symplectic {_fmt(sd)}, backward {_fmt(br)}", "< 1e-09 and < 1e-08",
            f"{len(ctx.hygiene)} monodromy matrices")


CHECKS = (
    (1, "e=0 eigenvalue law", check_e0_eigenvalues, 5.0),
    (2, "e=0 index tables", check_e0_tables, 60.0),
    (3, "beta=0 boundary indices", check_beta_zero, None),
    (4, "operator and monodromy nullity agree", check_nullity_agreement, None),
    (5, "delta identity", check_delta_identity, 1.0),
    (6, "parity of i_1 and multiplicity 2", check_parity_multiplicity, None),
    (7, "curve starts and orthogonality", check_curve_starts, None),
    (8, "ordering and non-intersection", check_ordering, None),
    (9, "region normal forms at e=0.3", check_regions, None),
    (10, "index bound", check_index_bound, None),
    (11, "monotonicity and jumps", check_monotonicity, None),
    (12, "numerical hygiene", check_hygiene, None),
)


def run_one(number: int, ctx: ValidationContext) -> CheckResult:
    """Run a single check; exceptions count as failures."""
    _, name, fn, budget = next(c for c in CHECKS if c[0] == number)
    t0 = time.perf_counter()
    try:
        ok, observed, expected, detail = fn(ctx)
    except Exception as exc:  # a crash is a failed check, not a crashed suite
        ok, observed, expected, detail = False, type(exc).__name__, "no error", str(exc)
    dt = time.perf_counter() - t0
    if budget is not None and dt > budget:
        ok = False
        detail = (detail + "; " if detail else "") + f"runtime {dt:.1f} s over budget {budget} s"
    return CheckResult(number, name, bool(ok), observed, expected, detail, dt)


def run_checks(rtol: float = DEFAULT_RTOL, atol: float | None = None, only=None,
               ctx: ValidationContext | None = None, progress=None) -> list[CheckResult]:
    """Run the acceptance checks in order and return one record per check.

    ``rtol`` and ``atol`` are passed to every monodromy integration, which
    lets a deliberately loose tolerance show up in the hygiene check.
    """
    ctx = ctx or ValidationContext(rtol=rtol, atol=atol)
    out = []
    for number, *_ in CHECKS:
        if only is not None and number not in only:
            continue
        res = run_one(number, ctx)
        if progress is not None:
            progress(res)
        out.append(res)
    return out
