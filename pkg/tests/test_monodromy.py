import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from eulerstab.errors import DomainError, IntegrationError
from eulerstab.index_theory import alpha1_e0, theta_e0
from eulerstab.monodromy import (
    EssentialSystem,
    coefficient_matrix,
    e0_characteristic_polynomial,
    e0_generator,
    modified_coefficient,
    modified_path,
    monodromy,
    monodromy_e0_exact,
    rotation4,
    _integrate,
)
from eulerstab.symplectic import J4, SymplecticMatrix, symplectic_defect


def rel_diff(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


def test_coefficient_beta0_circular():
    want = np.array([[1, 0, 0, 1], [0, 1, -1, 0], [0, -1, -2, 0], [1, 0, 0, 1]], dtype=float)
    for t in (0.0, 1.0, 4.0):
        assert np.array_equal(coefficient_matrix(EssentialSystem(0, 0), t), want)


def test_coefficient_circular_block():
    b = coefficient_matrix(EssentialSystem(2.5, 0), 0.7)
    assert np.allclose(np.diag(b)[2:], [-2 * 2.5 - 2, 2.5 + 1], atol=0, rtol=1e-15)


def test_coefficient_symmetric_and_periodic(rng):
    for beta, e, t in zip(rng.uniform(0, 7, 100), rng.uniform(0, 0.99, 100), rng.uniform(0, 7, 100)):
        s = EssentialSystem(beta, e)
        b = coefficient_matrix(s, t)
        assert np.array_equal(b, b.T)
    s = EssentialSystem(1.3, 0.6)
    assert np.allclose(coefficient_matrix(s, 0.0), coefficient_matrix(s, 2 * math.pi), atol=1e-15)


@pytest.mark.parametrize("beta,e", [(-0.1, 0.2), (1.0, 1.0), (1.0, -0.1), (math.nan, 0.1)])
def test_domain_errors(beta, e):
    with pytest.raises(DomainError):
        EssentialSystem(beta, e)


def test_high_eccentricity_needs_flag():
    with pytest.raises(DomainError):
        EssentialSystem(1.0, 0.995)
    with pytest.warns(RuntimeWarning):
        EssentialSystem(1.0, 0.995, allow_high_ecc=True)


def test_identity_spectrum_at_origin():
    m = monodromy(EssentialSystem(0, 0))
    # a Jordan block at 1 limits the accuracy to about sqrt(eps)
    assert np.max(np.abs(m.eigenvalues() - 1)) < 2e-7


def test_real_pair_beta1():
    m = monodromy(EssentialSystem(1.0, 0.0))
    mu = m.eigenvalues()
    lam = math.exp(2 * math.pi * math.sqrt(math.sqrt(20) / 2))
    assert lam == pytest.approx(12034.749, rel=1e-7)
    assert mu[-1].real == pytest.approx(lam, rel=1e-8)
    assert mu[0].real == pytest.approx(1 / lam, rel=1e-7)
    exact = np.linalg.eigvals(expm(2 * math.pi * e0_generator(1.0)))
    assert np.max(np.abs(exact)) == pytest.approx(lam, rel=1e-8)


@pytest.mark.parametrize("beta", [0.0, 0.5, 1.4, 3.0, 7.0])
def test_integrator_matches_exponential(beta):
    m = monodromy(EssentialSystem(beta, 0.0))
    ex = monodromy_e0_exact(beta)
    assert rel_diff(m.entries, ex.entries) < 1e-8


def test_elliptic_pair_equal_masses():
    th = theta_e0(1.4)
    assert th == pytest.approx(math.sqrt((-0.4 + math.sqrt(32.64)) / 2), rel=1e-14)
    assert th == pytest.approx(1.62990, abs=1e-5)
    mu = monodromy_e0_exact(1.4).eigenvalues()
    unit = mu[np.abs(np.abs(mu) - 1) < 1e-6]
    want = np.exp(2j * math.pi * th)
    assert np.min(np.abs(unit - want)) < 1e-9
    assert np.min(np.abs(unit - want.conjugate())) < 1e-9


def test_characteristic_polynomial(rng):
    for beta in rng.uniform(0, 7, 20):
        got = np.poly(e0_generator(beta))
        assert np.allclose(got, e0_characteristic_polynomial(beta), atol=1e-10)


def test_alpha1_root_of_quartic():
    for beta in (0.3, 1.4, 5.0):
        a = alpha1_e0(beta)
        p = e0_characteristic_polynomial(beta)
        assert np.polyval(p, math.sqrt(a)) == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("beta,e", [(0.5, 0.3), (2.0, 0.6), (7.0, 0.9)])
def test_hygiene(beta, e):
    m = monodromy(EssentialSystem(beta, e))
    assert m.symplectic_defect < 1e-9
    assert m.det_defect < 1e-9
    assert m.backward_residual < 1e-8
    assert m.n_factors == 16


def test_spectrum_symmetry(rng):
    for beta, e in zip(rng.uniform(0, 7, 5), rng.uniform(0, 0.8, 5)):
        mu = monodromy(EssentialSystem(beta, e)).eigenvalues()
        for z in mu:
            assert np.min(np.abs(mu - 1 / z) / max(1, abs(1 / z))) < 1e-8
            assert np.min(np.abs(mu - np.conj(z)) / max(1, abs(z))) < 1e-8


def test_loose_tolerance_shows_in_defect():
    m = monodromy(EssentialSystem(1.0, 0.5), rtol=1e-3, atol=1e-5)
    assert m.symplectic_defect > 1e-9


def test_integration_error_reports_time():
    with pytest.raises(IntegrationError) as info:
        _integrate(lambda t, y: 1e3 * y * y, 0.0, 1.0, np.ones((4, 4)), 1e-10, 1e-12)
    assert 0.0 <= info.value.t_reached < 1.0


def test_factors_multiply_to_entries():
    m = monodromy(EssentialSystem(0.8, 0.4), segments=5)
    prod = np.eye(4)
    for f in m.factors:
        prod = f @ prod
    assert np.array_equal(prod, m.entries)


def test_modified_coefficient_symmetric(rng):
    for beta, e, t in zip(rng.uniform(0, 7, 20), rng.uniform(0, 0.9, 20), rng.uniform(0, 7, 20)):
        k = modified_coefficient(EssentialSystem(beta, e), t)
        assert np.allclose(k, k.T, atol=1e-15)


def test_modified_path_against_its_own_equation():
    sys_ = EssentialSystem(1.1, 0.4)
    path = modified_path(sys_, samples=8)

    def rhs(t, y):
        return (J4 @ modified_coefficient(sys_, t) @ y.reshape(4, 4)).ravel()

    sol = solve_ivp(rhs, (0, 2 * math.pi), np.eye(4).ravel(), method="Radau",
                    t_eval=path.t, rtol=1e-12, atol=1e-13)
    for j, sample in enumerate(path.samples):
        xi = sol.y[:, j].reshape(4, 4)
        assert rel_diff(sample.entries, xi) < 1e-7


def test_modified_path_endpoints():
    sys_ = EssentialSystem(2.0, 0.3)
    path = modified_path(sys_, samples=16)
    assert np.array_equal(path.samples[0].entries, np.eye(4))
    end = monodromy(sys_)
    assert rel_diff(path.endpoint.entries, end.entries) < 1e-10
    for s in path.samples:
        assert s.symplectic_defect < 1e-9
    assert symplectic_defect(rotation4(0.7)) < 1e-15


def test_matrix_wrapper():
    m = SymplecticMatrix.from_matrix(np.eye(4))
    assert m.kernel_dimension(1.0) == 4
    assert m.kernel_dimension(-1.0) == 0
