import cmath
import math

import numpy as np
import pytest
from scipy.linalg import expm

from eulerstab.errors import AmbiguityError, InputError
from eulerstab.index_theory import (
    Block,
    NormalForm,
    alpha1_e0,
    analytic_e0_tables,
    beta_hat,
    classify,
    nullity,
    propagate_index,
    splitting_numbers,
    theta_e0,
)
from eulerstab.monodromy import EssentialSystem, monodromy
from eulerstab.spectral import index_pair
from eulerstab.symplectic import J4, SymplecticMatrix, symplectic_defect


def rot(t):
    return np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])


def diamond(m1, m2):
    """Symplectic sum of two 2x2 matrices in (x1, x2, y1, y2) coordinates."""
    out = np.zeros((4, 4))
    for k, m in ((0, m1), (1, m2)):
        idx = [k, k + 2]
        out[np.ix_(idx, idx)] = m
    return out


def conjugate(m, rng, scale=0.3):
    h = rng.normal(size=(4, 4))
    p = expm(scale * J4 @ (h + h.T))
    return np.linalg.solve(p, m @ p)


D2 = np.diag([2.0, 0.5])


def test_blocks_are_symplectic():
    for m in (diamond(rot(1.0), D2), diamond(np.array([[1, 1], [0, 1.0]]), D2)):
        assert symplectic_defect(m) < 1e-15


def test_nullity_examples():
    assert nullity(np.eye(4), 1.0) == 4
    assert nullity(monodromy(EssentialSystem(0, 0)), 1.0) == 3
    assert nullity(monodromy(EssentialSystem(beta_hat(1.5), 0)), -1.0) == 2


@pytest.mark.parametrize("m1,label", [
    (rot(1.0), "R(θ∈(0,π))⋄D(2)"),
    (rot(2 * math.pi - 1.0), "R(θ∈(π,2π))⋄D(2)"),
    (np.eye(2), "I2⋄D(2)"),
    (-np.eye(2), "-I2⋄D(2)"),
    (np.array([[1, 1], [0, 1.0]]), "N1(1,1)⋄D(2)"),
    (np.array([[1, -1], [0, 1.0]]), "N1(1,-1)⋄D(2)"),
    (np.array([[-1, 1], [0, -1.0]]), "N1(-1,1)⋄D(2)"),
    (np.array([[-1, -1], [0, -1.0]]), "N1(-1,-1)⋄D(2)"),
    (np.diag([-3.0, -1 / 3]), "D(-2)⋄D(2)"),
])
def test_classify_constructed(m1, label, rng):
    m = conjugate(diamond(m1, D2), rng)
    cls = classify(SymplecticMatrix.from_matrix(m))
    assert not cls.ambiguous
    assert cls.label == label
    assert np.allclose(np.sort_complex(cls.tag.eigenvalues()), np.sort_complex(cls.eigenvalues),
                       atol=1e-7)


def test_classify_n2(rng):
    for _ in range(40):
        th = rng.uniform(0.2, 2 * math.pi - 0.2)
        if abs(math.sin(th)) < 0.2:
            continue
        s = rng.normal(size=(2, 2))
        s = s + s.T
        r = rot(th)
        m = np.block([[r, r @ s], [np.zeros((2, 2)), r]])
        b = r @ s
        trivial = (b[0, 1] - b[1, 0]) * math.sin(th) > 0
        if abs(b[0, 1] - b[1, 0]) < 0.1:
            continue
        cls = classify(SymplecticMatrix.from_matrix(conjugate(m, rng, 0.1)))
        assert cls.label == ("N2(trivial)" if trivial else "N2(nontrivial)")


def test_ambiguity_band():
    m = diamond(rot(3e-5), D2)
    cls = classify(SymplecticMatrix.from_matrix(m))
    assert cls.ambiguous and cls.tag is None
    assert all(c.dim == 4 for c in cls.candidates)
    with pytest.raises(AmbiguityError):
        propagate_index(3, cls, -1.0)


def test_monodromy_regions_e03():
    assert classify(monodromy(EssentialSystem(0.5, 0.3))).label == "R(θ∈(0,π))⋄D(2)"
    assert classify(monodromy(EssentialSystem(0.9743, 0.3))).label == "D(-2)⋄D(2)"
    assert classify(monodromy(EssentialSystem(2.6106649289943755, 0.3))).label == "I2⋄D(2)"
    assert classify(monodromy(EssentialSystem(0.0, 0.3))).label == "I2⋄N1(1,1)"


def test_splitting_table():
    th = 1.1
    r = NormalForm((Block("R", th),))
    assert splitting_numbers(r, cmath.exp(1j * th)).as_tuple() == (0, 1)
    assert splitting_numbers(r, cmath.exp(-1j * th)).as_tuple() == (1, 0)
    assert splitting_numbers(Block("N1", 1.0, 1), 1.0).as_tuple() == (1, 1)
    assert splitting_numbers(Block("N1", 1.0, -1), 1.0).as_tuple() == (0, 0)
    assert splitting_numbers(Block("N1", -1.0, 1), -1.0).as_tuple() == (0, 0)
    assert splitting_numbers(Block("N1", -1.0, -1), -1.0).as_tuple() == (1, 1)
    assert splitting_numbers(Block("I2", 1.0), 1.0).as_tuple() == (1, 1)
    for w in (1.0, -1.0, 1j):
        assert splitting_numbers(Block("D", 2.0), w).as_tuple() == (0, 0)
    assert splitting_numbers(Block("N2", cmath.exp(0.7j), 1), cmath.exp(0.7j)).as_tuple() == (1, 1)
    assert splitting_numbers(Block("N2", cmath.exp(0.7j), 0), cmath.exp(0.7j)).as_tuple() == (0, 0)


def test_splitting_axioms(rng):
    blocks = [Block("R", 0.4), Block("R", 5.0), Block("N1", 1.0, 1), Block("N1", -1.0, -1),
              Block("I2", -1.0), Block("D", -3.0), Block("N2", cmath.exp(2.0j), 1)]
    for _ in range(30):
        i, j = rng.choice(len(blocks), 2, replace=False)
        tag = NormalForm((blocks[i], blocks[j]))
        for w in (1.0, -1.0, cmath.exp(0.4j), cmath.exp(-0.4j), cmath.exp(2.0j), cmath.exp(1.3j)):
            s = splitting_numbers(tag, w)
            # additivity
            assert s == splitting_numbers(blocks[i], w) + splitting_numbers(blocks[j], w)
            # conjugation symmetry
            assert s.s_plus == splitting_numbers(tag, np.conj(w)).s_minus
            # vanishing away from the spectrum
            if np.min(np.abs(tag.eigenvalues() - w)) > 1e-6:
                assert s.as_tuple() == (0, 0)


def test_propagation_circular():
    for beta in (1.4, 3.5, 0.5, 6.0):
        i1 = index_pair(beta, 0.0, 1.0).index
        cls = classify(monodromy(EssentialSystem(beta, 0.0)))
        assert propagate_index(i1, cls, -1.0) == index_pair(beta, 0.0, -1.0).index
    assert propagate_index(3, classify(monodromy(EssentialSystem(1.4, 0.0))), -1.0) == 4
    # beta between hat_n and hat_{n+1/2}: i_-1 = i_1 - 1
    b = 0.5 * (beta_hat(2) + beta_hat(2.5))
    cls = classify(monodromy(EssentialSystem(b, 0.0)))
    assert propagate_index(5, cls, -1.0) == 4


def test_propagation_empty_sum():
    tag = NormalForm((Block("R", 2.5), Block("D", 3.0)))
    assert propagate_index(3, tag, cmath.exp(0.5j)) == 3
    assert propagate_index(3, tag, 1.0) == 3


def test_propagation_matches_galerkin_off_axis(rng):
    for _ in range(6):
        beta, e = rng.uniform(0.05, 7), rng.uniform(0, 0.8)
        cls = classify(monodromy(EssentialSystem(beta, e)))
        if cls.ambiguous:
            continue
        i1 = index_pair(beta, e, 1.0).index
        for w in (-1.0, cmath.exp(1j * math.pi / 3)):
            assert propagate_index(i1, cls, w) == index_pair(beta, e, w).index


def test_circular_tables():
    t = analytic_e0_tables(0.0)
    assert (t.i_plus, t.nu_plus, t.i_minus, t.nu_minus) == (0, 3, 2, 0)
    assert theta_e0(0.0) == 1.0
    t = analytic_e0_tables(beta_hat(2))
    assert (t.i_plus, t.nu_plus) == (3, 2)
    assert t.branch == "I2⋄D(2)"
    t = analytic_e0_tables(beta_hat(1.5))
    assert (t.i_minus, t.nu_minus) == (2, 2)
    assert t.branch == "-I2⋄D(2)"
    assert beta_hat(2) == pytest.approx((1 + math.sqrt(97)) / 4, rel=1e-15)
    assert beta_hat(3) == pytest.approx((6 + math.sqrt(612)) / 4, rel=1e-15)
    assert beta_hat(1.5) == pytest.approx(1.013086, abs=1e-6)
    assert beta_hat(2.5) == pytest.approx(4.94365, abs=1e-5)
    assert alpha1_e0(1.0) == pytest.approx(math.sqrt(20) / 2)
    with pytest.raises(InputError):
        analytic_e0_tables(-1.0)


def test_circular_branch_matches_classifier():
    for beta in np.linspace(0.1, 7, 15):
        t = analytic_e0_tables(beta)
        assert classify(monodromy(EssentialSystem(beta, 0.0))).label == t.branch


def test_threshold_ordering():
    seq = [beta_hat(n) for n in (1, 1.5, 2, 2.5, 3, 3.5)]
    assert seq[0] == 0.0
    assert all(a < b for a, b in zip(seq, seq[1:]))
