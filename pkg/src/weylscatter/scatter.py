"""Scattering matrices and characteristic functions from boundary values.

All matrices are expressed in channel bases: orthonormal eigenvectors of
the relevant imaginary part, ordered by descending eigenvalue. With
``B = sqrt(Im X) V`` for each channel, every formula below has the shape

    S = I + sign * 2i * B_out^* R B_in

for a resolvent-like matrix ``R``. The generic self-adjoint formula is the
reference; dilation, Lax-Phillips, coupled and energy-dependent matrices are
the special cases used by the sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import matkit
from .herglotz import DIRECT, BoundaryMode, HerglotzFamily, boundary_value
from .errors import IllConditioned
from .relspace import (SelfAdjointRelation, coupling_relation, dilation_relation,
                       dissipative_split, relation_resolvent)

TOL = matkit.DEFAULT_TOL
COND_MAX = matkit.COND_MAX


@dataclass(frozen=True)
class ChannelSpace:
    """Subspace ``ran(H)`` of an ambient space, with the half-root ``sqrt(H) V``."""

    basis: np.ndarray  # ambient x rank, orthonormal columns
    root: np.ndarray  # ambient x rank, sqrt(H) @ basis
    label: str

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T


def channel(H, label: str, tol: float = TOL) -> ChannelSpace:
    """Channel of a PSD Hermitian matrix (``Im M``, ``-Im D``, ``Im tau``)."""
    h = matkit.as_cmatrix(H)
    h = (h + h.conj().T) / 2
    basis, _ = matkit.range_basis(h, tol)
    root = matkit.psd_sqrt(h, tol) @ basis
    return ChannelSpace(basis, root, label)


@dataclass
class ScatteringMatrix:
    value: np.ndarray
    channels: tuple[ChannelSpace, ...]
    cond: float = 1.0
    flags: list[str] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.value.shape[0]

    @property
    def unitarity_defect(self) -> float:
        return matkit.unitary_defect(self.value) if self.dim else 0.0

    @property
    def contraction_excess(self) -> float:
        return matkit.contraction_excess(self.value)

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(c.rank for c in self.channels)

    def block(self, i: int, j: int) -> np.ndarray:
        off = np.cumsum((0,) + self.ranks)
        return self.value[off[i]:off[i + 1], off[j]:off[j + 1]]

    def blocks(self) -> dict[str, np.ndarray]:
        if len(self.channels) == 1:
            return {"0": self.value}
        n = len(self.channels)
        return {f"{i + 1}{j + 1}": self.block(i, j) for i in range(n) for j in range(n)}

    def embedded(self) -> np.ndarray:
        """Basis-free form ``V S V^* + (I - V V^*)`` on the direct sum of channel ambients."""
        amb = [c.ambient_dim for c in self.channels]
        v = np.zeros((sum(amb), self.dim), dtype=complex)
        i = j = 0
        for c in self.channels:
            v[i:i + c.ambient_dim, j:j + c.rank] = c.basis
            i += c.ambient_dim
            j += c.rank
        return v @ self.value @ v.conj().T + np.eye(sum(amb)) - v @ v.conj().T


def _assemble(channels: tuple[ChannelSpace, ...], resolvent: np.ndarray, sign: int,
              cond: float) -> ScatteringMatrix:
    b = np.hstack([c.root for c in channels]) if channels else np.zeros((0, 0))
    r = b.shape[1]
    value = np.eye(r, dtype=complex) + sign * 2j * (b.conj().T @ resolvent @ b)
    flags = [] if r else ["TrivialChannel"]
    return ScatteringMatrix(value, channels, cond, flags)


def _inverse(a, cond_max: float, what: str) -> tuple[np.ndarray, float]:
    x, cond = matkit.inv(a)
    if cond > cond_max:
        raise IllConditioned(f"{what}: condition number {cond:.3g} > {cond_max:g}", cond)
    return x, cond


def s_selfadjoint(M, R: SelfAdjointRelation, tol: float = TOL,
                  cond_max: float = COND_MAX) -> ScatteringMatrix:
    """``S = I + 2i P sqrt(Im M) (Theta - M)^{-1} sqrt(Im M)`` on ``ran Im M``.

    ``M`` is the boundary value ``M(lambda + i0)``. A trivial channel gives
    a 0x0 matrix flagged ``TrivialChannel``.
    """
    m = matkit.as_cmatrix(M, "M")
    ch = channel(matkit.imag_part(m), "H_M", tol)
    if ch.rank == 0:
        return _assemble((ch,), np.zeros_like(m), 1, 1.0)
    n, cond = relation_resolvent(R, m, cond_max)
    return _assemble((ch,), n, 1, cond)


def s_dilation(M, D, tol: float = TOL, cond_max: float = COND_MAX) -> ScatteringMatrix:
    """Scattering matrix of the self-adjoint dilation, blocks on ``H_M + H_D``."""
    m = matkit.as_cmatrix(M, "M")
    d = matkit.as_cmatrix(D, "D")
    dissipative_split(d, tol)
    x, cond = _inverse(d - m, cond_max, "D - M")
    chans = (channel(matkit.imag_part(m), "H_M", tol), channel(-matkit.imag_part(d), "H_D", tol))
    return _assemble(chans, x, 1, cond)


def _corner(s: ScatteringMatrix, i: int) -> ScatteringMatrix:
    return ScatteringMatrix(s.block(i, i), (s.channels[i],), s.cond, list(s.flags))


def s_dissipative(M, D, tol: float = TOL, cond_max: float = COND_MAX) -> ScatteringMatrix:
    """Scattering matrix of the dissipative system: upper-left block of :func:`s_dilation`."""
    return _corner(s_dilation(M, D, tol, cond_max), 0)


def s_laxphillips(M, D, tol: float = TOL, cond_max: float = COND_MAX) -> ScatteringMatrix:
    """Lax-Phillips scattering matrix: lower-right block of :func:`s_dilation`."""
    return _corner(s_dilation(M, D, tol, cond_max), 1)


def char_function(M_lower, D, tol: float = TOL, cond_max: float = COND_MAX) -> ScatteringMatrix:
    """Characteristic function ``I - 2i P sqrt(-Im D) (D^* - M(mu))^{-1} sqrt(-Im D)``.

    ``M_lower`` is ``M`` at a point of the closed lower half-plane (for real
    ``mu`` pass ``M(mu - i0)``). Returned in the container of a scattering
    matrix on the single channel ``H_D``.
    """
    m = matkit.as_cmatrix(M_lower, "M")
    d = matkit.as_cmatrix(D, "D")
    dissipative_split(d, tol)
    x, cond = _inverse(d.conj().T - m, cond_max, "D* - M")
    return _assemble((channel(-matkit.imag_part(d), "H_D", tol),), x, -1, cond)


def s_coupled(M, tau, tol: float = TOL, cond_max: float = COND_MAX) -> ScatteringMatrix:
    """Scattering matrix of the coupled system, blocks on ``H_M + H_tau``."""
    m = matkit.as_cmatrix(M, "M")
    t = matkit.as_cmatrix(tau, "tau")
    x, cond = _inverse(m + t, cond_max, "M + tau")
    chans = (channel(matkit.imag_part(m), "H_M", tol), channel(matkit.imag_part(t), "H_tau", tol))
    return _assemble(chans, x, -1, cond)


def s_energydep(M, tau_mu, tol: float = TOL, cond_max: float = COND_MAX) -> ScatteringMatrix:
    """Dilation scattering matrix for the frozen parameter ``D = -tau(mu)``."""
    s = s_dilation(M, -matkit.as_cmatrix(tau_mu, "tau"), tol, cond_max)
    s.channels = (s.channels[0], ChannelSpace(s.channels[1].basis, s.channels[1].root, "H_tau_mu"))
    return s


def straus_char(M_lower, tau_lam, tol: float = TOL, cond_max: float = COND_MAX) -> ScatteringMatrix:
    """Characteristic function of the Straus extension with parameter ``-tau(lambda)``."""
    return char_function(M_lower, -matkit.as_cmatrix(tau_lam, "tau"), tol, cond_max)


# -- identity residuals --------------------------------------------------------

def _diff(a: np.ndarray, b: np.ndarray) -> float:
    if a.shape != b.shape:
        return float("inf")
    return matkit.norm2(a - b)


def residual_adamyan_arov(M_family: HerglotzFamily, D, lam: float, mode: BoundaryMode = DIRECT,
                          tol: float = TOL, cond_max: float = COND_MAX) -> float:
    """``||S_LP(lambda) - W(lambda - i0)^*||`` for a fixed dissipative ``D``."""
    m_up = boundary_value(M_family, lam, mode, "upper")
    m_lo = boundary_value(M_family, lam, mode, "lower")
    lp = s_laxphillips(m_up, D, tol, cond_max).value
    w = char_function(m_lo, D, tol, cond_max).value
    return _diff(lp, w.conj().T)


def residual_adamyan_arov_energydep(M_family: HerglotzFamily, tau_family: HerglotzFamily, mu: float,
                                    mode: BoundaryMode = DIRECT, tol: float = TOL,
                                    cond_max: float = COND_MAX) -> float:
    """``||S_LP,mu(mu) - W_{-tau(mu)}(mu - i0)^*||`` along the Straus family."""
    t = boundary_value(tau_family, mu, mode, "upper")
    m_up = boundary_value(M_family, mu, mode, "upper")
    m_lo = boundary_value(M_family, mu, mode, "lower")
    s = s_energydep(m_up, t, tol, cond_max)
    w = straus_char(m_lo, t, tol, cond_max).value
    return _diff(s.block(1, 1), w.conj().T)


def residual_theorem_main(M_family: HerglotzFamily, tau_family: HerglotzFamily, mu: float,
                          mode: BoundaryMode = DIRECT, tol: float = TOL,
                          cond_max: float = COND_MAX) -> float:
    """``||S_coupled(mu) - S_mu(mu)||``: coupled system versus frozen-energy dilation.

    The frozen-energy side is taken both from the block formula and from the
    generic relation route with ``D = -tau(mu)``; the larger distance is returned.
    """
    m = boundary_value(M_family, mu, mode, "upper")
    t = boundary_value(tau_family, mu, mode, "upper")
    coupled = s_coupled(m, t, tol, cond_max)
    blocks = _diff(coupled.value, s_energydep(m, t, tol, cond_max).value)
    route = _diff(coupled.embedded(), relation_route_dilation(m, -t, tol, cond_max))
    return max(blocks, route)


def relation_route_dilation(M, D, tol: float = TOL, cond_max: float = COND_MAX) -> np.ndarray:
    """Dilation scattering via the generic self-adjoint formula, embedded in ``H + H``."""
    m = matkit.as_cmatrix(M, "M")
    dd = dilation_relation(D, tol)
    s = s_selfadjoint(dd.extended_weyl(m, D), dd.relation, tol, cond_max)
    n, r = m.shape[0], dd.rank
    # isometry H + C^r -> H + H carrying H_D eigen-coordinates back into H
    e = np.zeros((2 * n, n + r), dtype=complex)
    e[:n, :n] = np.eye(n)
    e[n:, n:] = dd.basis
    return e @ s.embedded() @ e.conj().T + np.eye(2 * n) - e @ e.conj().T


def relation_route_coupling(M, tau, tol: float = TOL, cond_max: float = COND_MAX) -> np.ndarray:
    m = matkit.as_cmatrix(M, "M")
    t = matkit.as_cmatrix(tau, "tau")
    n = m.shape[0]
    w = np.zeros((2 * n, 2 * n), dtype=complex)
    w[:n, :n], w[n:, n:] = m, t
    return s_selfadjoint(w, coupling_relation(n), tol, cond_max).embedded()


def residual_relation_consistency(M, D_or_tau, which: str, tol: float = TOL,
                                  cond_max: float = COND_MAX) -> float:
    """Distance between a displayed block formula and the generic relation route."""
    if which == "dilation":
        direct = s_dilation(M, D_or_tau, tol, cond_max).embedded()
        return _diff(direct, relation_route_dilation(M, D_or_tau, tol, cond_max))
    if which == "coupling":
        direct = s_coupled(M, D_or_tau, tol, cond_max).embedded()
        return _diff(direct, relation_route_coupling(M, D_or_tau, tol, cond_max))
    raise ValueError(f"which must be 'dilation' or 'coupling', got {which!r}")
