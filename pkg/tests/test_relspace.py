from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given

from weylscatter import matkit, relspace
from weylscatter.errors import IllConditioned, NonHermitian, NotDissipative, Singular
from weylscatter.relspace import SelfAdjointRelation

from conftest import complex_matrices, hermitian, psd


def _upper(a: np.ndarray, shift: float = 0.5) -> np.ndarray:
    """Random matrix with positive definite imaginary part."""
    return hermitian(a) + 1j * psd(a, shift)


def test_graph_relation():
    r = relspace.graph_relation([[-0.5]])
    assert np.allclose(r.Phi, [[-0.5]]) and np.allclose(r.Psi, [[-1]])
    z = relspace.graph_relation(np.zeros((2, 2)))
    assert relspace.check_selfadjoint(z).rank_defect == 0
    with pytest.raises(NonHermitian):
        relspace.graph_relation([[1j]])


def test_coupling_relation():
    r = relspace.coupling_relation(1)
    # h1 = h2 and h1' + h2' = 0
    assert np.allclose(r.Phi, [[1, -1], [0, 0]]) and np.allclose(r.Psi, [[0, 0], [1, 1]])
    rep = relspace.check_selfadjoint(relspace.coupling_relation(2))
    assert rep.rank_defect == 0 and rep.hermiticity_defect == 0
    with pytest.raises(ValueError):
        relspace.coupling_relation(0)


def test_non_relation_defect():
    rep = relspace.check_selfadjoint(SelfAdjointRelation([[-1j]], [[-1]]))
    assert rep.hermiticity_defect == pytest.approx(2.0)
    with pytest.raises(NonHermitian):
        SelfAdjointRelation.validated([[-1j]], [[-1]])
    with pytest.raises(NonHermitian):
        SelfAdjointRelation.validated(np.zeros((2, 2)), np.diag([1.0, 0.0]))
    with pytest.raises(ValueError):
        SelfAdjointRelation(np.eye(2), np.eye(3))


def test_dilation_relation_dims():
    d = relspace.dilation_relation(np.diag([-0.7, -0.6 - 0.4j]))
    assert d.rank == 1 and d.relation.dim == 3 and d.kernel_basis.shape == (2, 1)
    assert np.allclose(d.projector, np.diag([0, 1]))
    h = relspace.dilation_relation(np.array([[1.0, 0.5], [0.5, -2.0]]))
    assert h.rank == 0 and h.relation.dim == 2
    # pure constraint h' = 0
    assert np.allclose(h.relation.Phi, 0) and np.linalg.matrix_rank(h.relation.Psi) == 2
    with pytest.raises(NotDissipative):
        relspace.dilation_relation([[0.3j]])


def test_dilation_scalar_is_coupling():
    d = relspace.dilation_relation([[-0.5j]]).relation
    c = relspace.coupling_relation(1)
    # same relation iff the row spaces of [Phi | Psi] agree
    a, b = np.hstack([d.Phi, d.Psi]), np.hstack([c.Phi, c.Psi])
    assert np.linalg.matrix_rank(np.vstack([a, b])) == 2


def test_resolvent_examples():
    n, _ = relspace.relation_resolvent(relspace.graph_relation([[2]]), [[1j]])
    assert n[0, 0] == pytest.approx((2 + 1j) / 5)
    n, _ = relspace.relation_resolvent(relspace.coupling_relation(1), np.diag([3, 1 + 1j]))
    assert np.allclose(n, -np.ones((2, 2)) / (4 + 1j))
    dd = relspace.dilation_relation([[-0.5j]])
    w = dd.extended_weyl([[0.5j]], [[-0.5j]])
    assert np.allclose(w, 0.5j * np.eye(2))
    n, _ = relspace.relation_resolvent(dd.relation, w)
    assert np.allclose(n, 1j * np.ones((2, 2)))


def test_resolvent_guards():
    with pytest.raises(Singular):
        relspace.relation_resolvent(relspace.graph_relation([[1.0]]), [[1.0]])
    with pytest.raises(IllConditioned):
        relspace.relation_resolvent(relspace.graph_relation(np.diag([1.0, 2.0])),
                                    np.diag([1.0 - 1e-13, 0.0]), cond_max=1e6)
    with pytest.raises(ValueError):
        relspace.relation_resolvent(relspace.graph_relation([[1.0]]), np.eye(2))


@given(complex_matrices(), complex_matrices())
def test_graph_resolvent_is_inverse(a, b):
    h = hermitian(a)
    w = _upper(np.resize(b, a.shape))
    n, _ = relspace.relation_resolvent(relspace.graph_relation(h), w)
    direct = np.linalg.inv(h - w)
    assert matkit.norm2(n - direct) <= 1e-12 * max(1, matkit.norm2(direct))


@given(complex_matrices(max_n=3), complex_matrices(max_n=3))
def test_coupling_resolvent_identity(a, b):
    k = a.shape[0]
    rel = relspace.coupling_relation(k)
    b = np.resize(b, a.shape)
    w1 = np.block([[_upper(a), np.zeros((k, k))], [np.zeros((k, k)), _upper(b)]])
    w2 = np.block([[_upper(b), np.zeros((k, k))], [np.zeros((k, k)), _upper(a.T)]])
    n1, _ = relspace.relation_resolvent(rel, w1)
    n2, _ = relspace.relation_resolvent(rel, w2)
    assert matkit.norm2(n1 - n2 - n1 @ (w1 - w2) @ n2) <= 1e-10 * max(1, matkit.norm2(n1) * matkit.norm2(n2))
    inv = np.linalg.inv(w1[:k, :k] + w1[k:, k:])
    assert np.allclose(n1, -np.block([[inv, inv], [inv, inv]]))


@given(complex_matrices(max_n=3), complex_matrices(max_n=3))
def test_dilation_corner_is_d_minus_m(a, b):
    n = a.shape[0]
    m = _upper(a)
    d = hermitian(np.resize(b, a.shape)) - 1j * psd(np.resize(b, a.shape)[:, :1])  # rank-1 Im D
    dd = relspace.dilation_relation(d)
    res, _ = relspace.relation_resolvent(dd.relation, dd.extended_weyl(m, d))
    assert np.allclose(res[:n, :n], np.linalg.inv(d - m), atol=1e-10)


def test_resolvent_nevanlinna(rng):
    # N(lambda) = (Theta - W(lambda))^{-1} with W Nevanlinna: Im N >= 0 in the upper half-plane
    h = hermitian(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
    rel = relspace.graph_relation(h)
    for _ in range(20):
        z = complex(rng.uniform(-3, 3), rng.uniform(0.01, 3))
        w = np.diag([z, -1 / z, 2 * z])
        n, _ = relspace.relation_resolvent(rel, w)
        assert np.linalg.eigvalsh(matkit.imag_part(n))[0] >= -1e-12 * max(1, matkit.norm2(n))
