import numpy as np
import pytest
from scipy.linalg import expm

from eulerstab.symplectic import J4, SymplecticMatrix, krein_form, standard_j, symplectic_defect


def random_symplectic(rng, scale=1.0):
    h = rng.normal(size=(4, 4))
    return expm(scale * J4 @ (h + h.T))


def test_standard_j():
    j = standard_j(2)
    assert np.array_equal(j, J4)
    assert np.array_equal(j @ j, -np.eye(4))


def test_lift_spectrum(rng):
    fs = [random_symplectic(rng, 0.5) for _ in range(6)]
    m = SymplecticMatrix.from_factors(fs)
    assert m.symplectic_defect < 1e-12 and m.det_defect < 1e-12
    direct = np.sort_complex(np.linalg.eigvals(m.entries))
    assert np.allclose(np.sort_complex(m.eigenvalues()), direct, rtol=1e-8, atol=1e-10)
    mu, vecs = m.eigenpairs()
    for k in range(4):
        assert np.linalg.norm(m.entries @ vecs[:, k] - mu[k] * vecs[:, k]) < 1e-8 * abs(mu[k]) + 1e-10


def test_hyperbolic_product_keeps_small_eigenvalue():
    d = np.diag([30.0, 1.0, 1 / 30.0, 1.0])
    m = SymplecticMatrix.from_factors([d] * 8)
    mu = m.eigenvalues()
    assert mu[0].real == pytest.approx(30.0 ** -8, rel=1e-10)


def test_restrict_returns_invariant_subspace(rng):
    m = SymplecticMatrix.from_factors([random_symplectic(rng, 0.4) for _ in range(3)])
    z = m.eigenvalues()[0]
    basis, block = m.restrict(z, 1e-6)
    assert basis.shape == (4, 1)
    assert np.allclose(m.entries @ basis, basis @ block, atol=1e-8)


def test_krein_sign_of_rotation():
    t = 0.8
    r = np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])
    w, v = np.linalg.eig(r)
    k = np.argmin(np.abs(w - np.exp(1j * t)))
    x = np.zeros(2, dtype=complex)
    x[:] = v[:, k]
    # R(t) in the (x, y) plane of one degree of freedom
    assert krein_form(x) > 0


def test_defect_detects_non_symplectic():
    assert symplectic_defect(np.diag([2.0, 1.0, 1.0, 1.0])) > 0.5
