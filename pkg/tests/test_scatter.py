from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from weylscatter import herglotz as hz
from weylscatter import matkit, relspace, scatter
from weylscatter.errors import IllConditioned, NotDissipative

from conftest import complex_matrices, hermitian, psd

S_FREE = np.array([[0, -1j], [-1j, 0]])
M_FREE = np.array([[0, 0.5], [0.5, 0]])
TAU_FREE = 0.5j * np.eye(2)


def delta_s(lam: float, alpha: float) -> complex:
    r = math.sqrt(lam)
    return (2 * r - 1j * alpha) / (2 * r + 1j * alpha)


def random_m(a, shift=0.3):
    return hermitian(a) + 1j * psd(a, shift)


def random_d(b, rank=None):
    n = b.shape[0]
    cols = b[:, : (rank if rank is not None else n)]
    return hermitian(b.T) - 1j * (cols @ cols.conj().T)


def test_channel_space():
    ch = scatter.channel(np.diag([2.0, 0.0]), "H_M")
    assert ch.rank == 1 and ch.ambient_dim == 2
    p = ch.projector
    assert np.allclose(p @ p, p) and np.allclose(p, p.conj().T) and np.trace(p).real == pytest.approx(1)
    assert np.allclose(ch.root, [[math.sqrt(2)], [0]])


def test_selfadjoint_delta():
    m = hz.boundary_value(hz.delta_weyl_family(), 1.0)
    s = scatter.s_selfadjoint(m, relspace.graph_relation([[-0.5]]))
    assert s.value[0, 0] == pytest.approx(-1j, abs=1e-14)
    # Theta = -1/alpha: graph(0) is the alpha -> infinity limit (S = -1), while alpha = 0
    # is the purely multivalued relation {0} x C (no interaction, S = 1)
    s_inf = scatter.s_selfadjoint(m, relspace.graph_relation([[0.0]]))
    assert s_inf.value[0, 0] == pytest.approx(delta_s(1.0, 1e15))
    assert s_inf.value[0, 0] == pytest.approx(-1.0)
    free = scatter.s_selfadjoint(m, relspace.SelfAdjointRelation([[1.0]], [[0.0]]))
    assert free.value[0, 0] == pytest.approx(delta_s(1.0, 0.0))
    neg = scatter.s_selfadjoint(hz.boundary_value(hz.delta_weyl_family(), -1.0),
                                relspace.graph_relation([[-0.5]]))
    assert neg.dim == 0 and "TrivialChannel" in neg.flags


@pytest.mark.parametrize("alpha", [-2, -0.5, 0.5, 2])
def test_selfadjoint_delta_closed_form(alpha):
    fam = hz.delta_weyl_family()
    rel = relspace.graph_relation([[-1.0 / alpha]])
    for lam in np.geomspace(0.01, 100, 50):
        s = scatter.s_selfadjoint(hz.boundary_value(fam, lam), rel)
        assert abs(s.value[0, 0] - delta_s(lam, alpha)) < 1e-12


def test_dilation_delta():
    m, d = [[0.5j]], [[-0.5j]]
    s = scatter.s_dilation(m, d)
    assert np.allclose(s.value, [[0, -1], [-1, 0]], atol=1e-15)
    assert s.ranks == (1, 1) and set(s.blocks()) == {"11", "12", "21", "22"}
    assert scatter.s_dissipative(m, d).value[0, 0] == pytest.approx(0, abs=1e-15)
    assert scatter.s_laxphillips(m, d).value[0, 0] == pytest.approx(0, abs=1e-15)
    assert np.allclose(scatter.char_function(np.conj(m), d).value, 0)


@pytest.mark.parametrize("lam", [0.25, 0.7, 3.0])
def test_laxphillips_delta_closed_form(lam):
    beta = 0.5
    m = hz.boundary_value(hz.delta_weyl_family(), lam)
    lp = scatter.s_laxphillips(m, [[-1j * beta]]).value[0, 0]
    r = math.sqrt(lam)
    assert lp == pytest.approx((1 - 2 * beta * r) / (1 + 2 * beta * r), abs=1e-14)
    tiny = scatter.s_laxphillips(m, [[-1e-9j]]).value[0, 0]
    assert abs(tiny - 1) < 1e-8


def test_hermitian_d_degenerates():
    m = np.array([[0.3 + 0.8j]])
    d = np.array([[0.7]])
    s = scatter.s_dilation(m, d)
    ref = scatter.s_selfadjoint(m, relspace.graph_relation(d))
    assert s.ranks == (1, 0) and np.allclose(s.value, ref.value)
    assert abs(abs(scatter.s_dissipative(m, d).value[0, 0]) - 1) < 1e-14
    w = scatter.char_function(np.conj(m), d)
    assert w.dim == 0
    assert scatter.residual_relation_consistency(m, d, "dilation") < 1e-14


def test_dissipativity_enforced():
    with pytest.raises(NotDissipative):
        scatter.s_dilation([[0.5j]], [[0.5j]])


def test_coupled_free_quarter():
    s = scatter.s_coupled(M_FREE, TAU_FREE)
    assert s.ranks == (0, 2)
    assert np.allclose(s.value, S_FREE, atol=1e-15)
    assert s.blocks()["22"].shape == (2, 2) and s.blocks()["11"].size == 0
    e = scatter.s_energydep(M_FREE, TAU_FREE)
    assert np.allclose(e.value, S_FREE, atol=1e-15)
    assert e.channels[1].label == "H_tau_mu"
    dil = scatter.s_dilation(M_FREE, -TAU_FREE)
    assert np.array_equal(dil.value, e.value)
    w = scatter.straus_char(M_FREE.conj().T, TAU_FREE)
    assert np.allclose(w.value.conj().T, S_FREE, atol=1e-15)
    assert np.array_equal(w.value, scatter.char_function(M_FREE.conj().T, -TAU_FREE).value)


def test_coupled_scalar_singular_case():
    s = scatter.s_coupled([[3.0]], [[1 + 1j]])
    assert s.value[0, 0] == pytest.approx((4 - 1j) / (4 + 1j))
    assert abs(s.value[0, 0]) == pytest.approx(1)


def test_energydep_selfadjoint_straus_point():
    m = np.array([[0.2 + 0.5j]])
    tau = np.array([[-0.8]])
    s = scatter.s_energydep(m, tau)
    ref = scatter.s_selfadjoint(m, relspace.graph_relation(-tau))
    assert s.ranks == (1, 0) and np.allclose(s.value, ref.value)


def test_ill_conditioned_guard():
    # M + tau nearly singular: operations refuse instead of extrapolating
    with pytest.raises(IllConditioned):
        scatter.s_coupled(np.ones((2, 2)), 1e-8j * np.eye(2), cond_max=1e6)
    s = scatter.s_coupled(np.ones((2, 2)), 1e-8j * np.eye(2))
    assert s.cond > 1e6 and s.unitarity_defect < 1e-6


def test_residual_spots():
    fam = hz.delta_weyl_family()
    assert scatter.residual_adamyan_arov(fam, [[-0.5j]], 1.0) < 1e-12
    assert scatter.residual_adamyan_arov(fam, [[0.3]], 1.0) == 0.0
    assert scatter.residual_relation_consistency([[0.5j]], [[-0.5j]], "dilation") < 1e-12
    free_m = hz.const_interval_weyl_family(math.pi, 0.0, 0.5)
    tau = hz.lead_tau_family(0, 0, 0.5, 0.5)
    assert scatter.residual_theorem_main(free_m, tau, 0.25) < 1e-12
    assert scatter.residual_adamyan_arov_energydep(free_m, tau, 0.25) < 1e-12
    # below both band edges: both matrices empty
    assert scatter.residual_theorem_main(free_m, hz.lead_tau_family(1.0, 1.0, 0.5, 0.5), 0.25) == 0.0
    with pytest.raises(ValueError):
        scatter.residual_relation_consistency([[0.5j]], [[-0.5j]], "other")


def test_free_line_full_transmission():
    free_m = hz.const_interval_weyl_family(math.pi, 0.0, 0.5)
    tau = hz.lead_tau_family(0, 0, 0.5, 0.5)
    for lam in np.linspace(0.01, 0.9, 100):
        s = scatter.s_coupled(free_m(lam), tau(lam)).block(1, 1)
        k = math.sqrt(lam)
        assert abs(abs(s[0, 1]) - 1) < 1e-10 and abs(s[0, 0]) < 1e-10
        # closed form -i / (sin kL + i cos kL), up to the channel phase convention
        assert abs(abs(s[0, 1]) - abs(-1j / (math.sin(k * math.pi) + 1j * math.cos(k * math.pi)))) < 1e-12


@given(complex_matrices(max_n=3), complex_matrices(max_n=3), st.integers(0, 3))
def test_dilation_unitary_and_blocks(a, b, rank):
    m = random_m(a)
    d = random_d(np.resize(b, a.shape), min(rank, a.shape[0]))
    s = scatter.s_dilation(m, d)
    assert s.unitarity_defect < 1e-12
    sd, lp = scatter.s_dissipative(m, d), scatter.s_laxphillips(m, d)
    assert np.array_equal(sd.value, s.block(0, 0)) and np.array_equal(lp.value, s.block(1, 1))
    assert sd.contraction_excess <= 1e-10 and lp.contraction_excess <= 1e-10
    assert scatter.residual_relation_consistency(m, d, "dilation") < 1e-10


@given(complex_matrices(max_n=3), complex_matrices(max_n=3))
def test_coupled_unitary(a, b):
    m, t = random_m(a), random_m(np.resize(b, a.shape))
    s = scatter.s_coupled(m, t)
    assert s.unitarity_defect < 1e-12
    assert scatter.residual_relation_consistency(m, t, "coupling") < 1e-10
    assert np.allclose(s.value, scatter.s_energydep(m, t).value, atol=1e-12)


@given(complex_matrices(max_n=3), complex_matrices(max_n=3), st.floats(0.05, 5))
def test_char_function_contractive_below(a, b, depth):
    # M(mu) for Im mu < 0 is any matrix with Im M <= 0
    m_lower = hermitian(a) - 1j * depth * psd(a)
    d = random_d(np.resize(b, a.shape), 1)
    assert scatter.char_function(m_lower, d).contraction_excess <= 1e-10


def test_adamyan_arov_barrier_points():
    from weylscatter.sturm import CoefficientProfile, SLProblem, dirichlet_eigenvalues, sl_weyl_family
    p = SLProblem(0, 2.5, CoefficientProfile.piecewise([(1, 0.5), (0.5, 0.8), (1, 0.5)]),
                  CoefficientProfile.piecewise([(1, 0), (0.5, 2.0), (1, 0)]))
    fam = sl_weyl_family(p)
    kl, kr = 0.8, 0.5 + 0.6j
    d = np.diag([-kl, -kr])
    poles = dirichlet_eigenvalues(p, 8)
    for lam in np.linspace(-1, 8, 60):
        if min(abs(lam - e) for e in poles) < 1e-6:
            continue
        assert scatter.residual_adamyan_arov(fam, d, lam) < 1e-10


def test_embedded_is_basis_free():
    m = np.diag([0.5j, 0.2])
    s = scatter.s_selfadjoint(m, relspace.graph_relation(np.zeros((2, 2))))
    e = s.embedded()
    assert e.shape == (2, 2) and matkit.unitary_defect(e) < 1e-14
    assert e[1, 1] == pytest.approx(1.0)
