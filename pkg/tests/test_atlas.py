import math

import numpy as np
import pytest

from eulerstab.atlas import (
    Slice,
    degenerate_betas,
    order_check,
    region_classify,
    region_grid,
    scan_slice,
    scan_slices,
    slice_positions,
    theorem_prediction,
    trace_curves,
    worker_count,
)
from eulerstab.errors import AmbiguityError, ClassificationConflict, DomainError, InputError
from eulerstab.index_theory import analytic_e0_tables, beta_hat

E_GRID = [0.0, 0.001, 0.1, 0.3]


@pytest.fixture(scope="module")
def curves():
    return trace_curves(1, E_GRID) + trace_curves(-1, E_GRID)


def by_label(curves):
    return {c.label: c for c in curves}


def test_circular_roots():
    got = degenerate_betas(1, 0.0, 12.0)
    assert [m for _, m in got] == [2, 2]
    assert got[0][0] == pytest.approx(beta_hat(2), abs=1e-9)
    assert got[1][0] == pytest.approx((6 + math.sqrt(612)) / 4, abs=1e-9)
    got = degenerate_betas(-1, 0.0, 6.0)
    assert [m for _, m in got] == [2, 2]
    assert got[0][0] == pytest.approx(1.013086, abs=1e-6)
    assert got[1][0] == pytest.approx(beta_hat(2.5), abs=1e-9)


def test_no_roots_near_axis():
    for e in (0.0, 0.5, 0.9):
        assert degenerate_betas(1, e, 1.2) == []


def test_scan_kernel_dimension():
    s = scan_slice(1, 0.5, 8.0)
    assert all(nul == 2 and mult == 2 for _, mult, nul in s.roots)
    assert len(s.crossings) == 2 * len(s.roots)


def test_scan_domain():
    with pytest.raises(DomainError):
        scan_slice(1, 0.3, 60.0)
    with pytest.raises(DomainError):
        scan_slice(1j, 0.3, 5.0)


def test_curve_starts_and_multiplicity(curves):
    c = by_label(curves)
    assert c["Gamma_1"].start_beta == pytest.approx(beta_hat(2), abs=1e-6)
    assert c["Gamma_2"].start_beta == pytest.approx(beta_hat(3), abs=1e-6)
    for lab in ("Xi_1^-", "Xi_1^+"):
        assert c[lab].start_beta == pytest.approx(beta_hat(1.5), abs=1e-6)
    for lab in ("Xi_2^-", "Xi_2^+"):
        assert c[lab].start_beta == pytest.approx(beta_hat(2.5), abs=1e-6)
    for cur in curves:
        assert not cur.diagnostics
        assert all(b > a for a, b in zip(cur.e[:-1], cur.e[1:]))
        if cur.omega == 1:
            assert set(cur.multiplicity) == {2}
            assert max(cur.gap) < 1e-6
        else:
            for m, g in zip(cur.multiplicity, cur.gap):
                assert m == (2 if g <= 1e-9 else 1)


def test_start_slope(curves):
    for cur in curves:
        if cur.n <= 2:
            slope = (cur.beta[1] - cur.beta[0]) / (cur.e[1] - cur.e[0])
            assert abs(slope) < 0.05


def test_xi_split_observed(curves):
    c = by_label(curves)
    assert c["Xi_1^+"].at(0.3) - c["Xi_1^-"].at(0.3) > 1e-6
    assert c["Xi_1^+"].at(0.0) == c["Xi_1^-"].at(0.0)


def test_order(curves):
    for e in E_GRID:
        rep = order_check(curves, e)
        assert rep.ok, rep.violations
    labels = [lab for lab, _ in order_check(curves, 0.0).sequence]
    assert labels[:6] == ["Xi_1^-", "Xi_1^+", "Gamma_1", "Xi_2^-", "Xi_2^+", "Gamma_2"]


def _fake(omega, e, crossings):
    return Slice(float(omega), e, 12.0, 24, tuple(crossings), ())


def test_slope_cap_truncates():
    slices = [_fake(1, 0.0, [2.7, 2.7]), _fake(1, 0.01, [2.7, 2.7]), _fake(1, 0.02, [5.0, 5.0])]
    (cur,) = trace_curves(1, [0.0, 0.01, 0.02], slices=slices)
    assert len(cur.samples) == 2
    assert "slope cap" in cur.diagnostics[0]


def test_curve_leaving_window():
    slices = [_fake(1, 0.0, [2.7, 2.7, 7.6, 7.6]), _fake(1, 0.1, [2.69, 2.69])]
    c = by_label(trace_curves(1, [0.0, 0.1], slices=slices))
    assert len(c["Gamma_2"].samples) == 1
    assert "left the window" in c["Gamma_2"].diagnostics[0]


def test_order_violation_reported():
    gam = trace_curves(1, [0.0], slices=[_fake(1, 0.0, [0.9, 0.9])])
    xi = trace_curves(-1, [0.0], slices=[_fake(-1, 0.0, [1.0, 1.0])])
    rep = order_check(gam + xi, 0.0)
    assert not rep.ok
    assert ("Xi_1^+", "Gamma_1") in rep.violations


def test_grid_must_ascend():
    with pytest.raises(InputError):
        trace_curves(1, [0.1, 0.0])


def test_prediction_table():
    pairs, gammas = [(1.0, 1.1), (5.0, 5.0)], [2.7, 7.6]
    cases = {0.0: ("i", "I2⋄N1(1,1)", 0, 2), 0.5: ("ii", "R(θ∈(0,π))⋄D(2)", 3, 2),
             1.0: ("iv", "N1(-1,-1)⋄D(2)", 3, 2), 1.05: ("v", "D(-2)⋄D(2)", 3, 3),
             1.1: ("vi", "N1(-1,1)⋄D(2)", 3, 3), 2.0: ("vii", "R(θ∈(π,2π))⋄D(2)", 3, 4),
             2.7: ("viii", "I2⋄D(2)", 3, 4), 4.0: ("ix", "R(θ∈(0,π))⋄D(2)", 5, 4),
             5.0: ("x", "-I2⋄D(2)", 5, 4), 6.0: ("xiv", "R(θ∈(π,2π))⋄D(2)", 5, 6)}
    for beta, (case, label, i1, im) in cases.items():
        p = theorem_prediction(beta, pairs, gammas)
        assert (p.case, p.label, p.i_minus) == (case, label, im)
        assert p.i_plus == (0 if case == "i" else i1)
    with pytest.raises(InputError):
        theorem_prediction(9.0, pairs, gammas)


def test_region_examples(curves):
    pairs, gammas = slice_positions(curves, 0.3)
    lo, hi = pairs[0]
    rec = region_classify(0.5 * lo, 0.3, curves)
    assert rec.ok and rec.prediction.case == "ii"
    assert (rec.i_plus, rec.nu_plus, rec.i_minus) == (3, 0, 2)
    rec = region_classify(0.5 * (hi + gammas[0]), 0.3, curves)
    assert rec.ok and rec.i_minus == 4 and rec.tag == "R(θ∈(π,2π))⋄D(2)"
    rec = region_classify(0.0, 0.3, curves)
    assert rec.ok and rec.tag == "I2⋄N1(1,1)"
    rec = region_classify(hi, 0.3, curves)
    assert rec.ok and rec.prediction.case == "vi"


def test_region_without_curves():
    rec = region_classify(1.5, 0.3, beta_max=4.0)
    assert rec.ok and rec.prediction.case == "vii"


def test_region_near_curve_is_ambiguous(curves):
    _, gammas = slice_positions(curves, 0.3)
    with pytest.raises(AmbiguityError):
        region_classify(gammas[0] + 1e-6, 0.3, curves)


def test_conflict_detected():
    # curves placed deliberately in the wrong spot
    gam = trace_curves(1, [0.3], slices=[_fake(1, 0.3, [2.0, 2.0])])
    xi = trace_curves(-1, [0.3], slices=[_fake(-1, 0.3, [0.97, 0.98, 4.7, 4.7])])
    rec = region_classify(2.3, 0.3, gam + xi)
    assert not rec.ok
    with pytest.raises(ClassificationConflict):
        region_classify(2.3, 0.3, gam + xi, raise_on_conflict=True)


def test_grid_circular_row_and_regions(curves):
    betas = np.linspace(0.0, 8.0, 17)
    grid = region_grid(betas, [0.0, 0.3])
    for cell in grid.cells:
        if cell.ecc == 0.0:
            t = analytic_e0_tables(cell.beta)
            assert (cell.i_plus, cell.nu_plus, cell.i_minus, cell.nu_minus) == \
                (t.i_plus, t.nu_plus, t.i_minus, t.nu_minus)
            assert cell.tag == t.branch
    # the class only changes where a curve lies in between
    for e in (0.0, 0.3):
        row = [c for c in grid.cells if c.ecc == e]
        walls = [c.at(e) for c in curves]
        for a, b in zip(row[:-1], row[1:]):
            if a.beta == 0.0:
                continue
            crossed = any(a.beta < w < b.beta for w in walls)
            assert crossed or a.tag == b.tag


def test_constant_on_probe_subgrid():
    cells = region_grid(np.linspace(0.2, 0.6, 5), np.linspace(0.2, 0.4, 5)).cells
    assert len({(c.i_plus, c.nu_plus, c.i_minus, c.nu_minus, c.tag) for c in cells}) == 1


def test_workers(monkeypatch):
    monkeypatch.setenv("EULERSTAB_WORKERS", "2")
    assert worker_count(8) == 2
    monkeypatch.setenv("EULERSTAB_WORKERS", "x")
    with pytest.raises(InputError):
        worker_count(3)
    monkeypatch.delenv("EULERSTAB_WORKERS")
    par = scan_slices(1, [0.0, 0.2], 4.0, workers=2)
    ser = scan_slices(1, [0.0, 0.2], 4.0, workers=1)
    assert [s.crossings for s in par] == [s.crossings for s in ser]
