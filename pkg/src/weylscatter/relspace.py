"""Self-adjoint linear relations on a finite-dimensional boundary space.

A relation is stored in kernel form ``{(h, h'): Phi h + Psi h' = 0}``. Its
resolvent against a matrix ``W`` is then the single formula

    N = (Theta - W)^{-1} = -(Phi + Psi W)^{-1} Psi,

which covers operator parameters, the coupling relation and the dilation
relation (whose multivalued parts make the explicit inverses awkward).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matkit
from .errors import IllConditioned, NonHermitian, NotDissipative


@dataclass(frozen=True)
class SelfAdjointRelation:
    Phi: np.ndarray
    Psi: np.ndarray
    label: str = "Theta"

    def __post_init__(self):
        phi = matkit.as_cmatrix(self.Phi, "Phi")
        psi = matkit.as_cmatrix(self.Psi, "Psi")
        if phi.shape != psi.shape or phi.shape[0] != phi.shape[1]:
            raise ValueError(f"Phi {phi.shape} and Psi {psi.shape} must be equal and square")
        object.__setattr__(self, "Phi", phi)
        object.__setattr__(self, "Psi", psi)

    @property
    def dim(self) -> int:
        return self.Phi.shape[0]

    @classmethod
    def validated(cls, Phi, Psi, label: str = "Theta", tol: float = 1e-10) -> "SelfAdjointRelation":
        rel = cls(Phi, Psi, label)
        rep = check_selfadjoint(rel, tol)
        scale = max(1.0, matkit.norm2(np.hstack([rel.Phi, rel.Psi])) ** 2)
        if rep.rank_defect or rep.hermiticity_defect > tol * scale:
            raise NonHermitian(f"{label} is not self-adjoint: {rep}")
        return rel


@dataclass(frozen=True)
class SelfAdjointReport:
    rank_defect: int
    hermiticity_defect: float


def check_selfadjoint(rel: SelfAdjointRelation, tol: float = 1e-10) -> SelfAdjointReport:
    block = np.hstack([rel.Phi, rel.Psi])
    s = np.linalg.svd(block, compute_uv=False)
    rank = int(np.sum(s > tol * max(1.0, s[0] if s.size else 0.0)))
    herm = rel.Phi @ rel.Psi.conj().T
    return SelfAdjointReport(rel.dim - rank, matkit.norm2(herm - herm.conj().T))


def graph_relation(H) -> SelfAdjointRelation:
    """Graph of a Hermitian matrix: ``Phi = H``, ``Psi = -I``."""
    h = matkit.as_cmatrix(H, "H")
    if h.shape[0] != h.shape[1] or matkit.hermitian_defect(h) > matkit.HERMITIAN_TOL * matkit.scale_of(h):
        raise NonHermitian("graph_relation needs a Hermitian matrix")
    return SelfAdjointRelation(h, -np.eye(h.shape[0], dtype=complex), "graph")


def coupling_relation(n: int) -> SelfAdjointRelation:
    """``{((v, v), (w, -w))}`` on ``C^n + C^n``: equal values, opposite derivatives."""
    if n < 1:
        raise ValueError("n must be >= 1")
    eye, zero = np.eye(n), np.zeros((n, n))
    phi = np.block([[eye, -eye], [zero, zero]])
    psi = np.block([[zero, zero], [eye, eye]])
    return SelfAdjointRelation(phi, psi, "coupling")


@dataclass(frozen=True)
class DilationData:
    relation: SelfAdjointRelation
    projector: np.ndarray  # P_D on H, onto ran(-Im D)
    rank: int
    basis: np.ndarray  # n x rank, eigenvectors of -Im D (descending eigenvalue)
    weights: np.ndarray  # the positive eigenvalues of -Im D, same order
    kernel_basis: np.ndarray  # n x (n - rank), orthonormal basis of ker(Im D)

    def tau(self, side: str = "upper") -> np.ndarray:
        """Lead Weyl function ``-i P_D Im D`` on ``H_D`` (constant; sign flips below the axis)."""
        t = 1j * np.diag(self.weights).astype(complex)
        return t if side == "upper" else -t

    def extended_weyl(self, M, D, side: str = "upper") -> np.ndarray:
        """Block ``diag(M - Re D, tau)`` on ``H + H_D``."""
        m = matkit.as_cmatrix(M) - matkit.real_part(D)
        n, r = m.shape[0], self.rank
        out = np.zeros((n + r, n + r), dtype=complex)
        out[:n, :n] = m
        out[n:, n:] = self.tau(side)
        return out


def dissipative_split(D, tol: float = matkit.DEFAULT_TOL):
    """Check ``Im D <= 0`` and return ``(basis of H_D, weights, kernel basis)``."""
    d = matkit.as_cmatrix(D, "D")
    neg_im = -matkit.imag_part(d)
    dec = matkit.eigh(neg_im)
    scale = matkit.scale_of(d)
    if dec.eigenvalues.size and dec.eigenvalues[0] < -tol * scale:
        raise NotDissipative(f"Im D has eigenvalue {-dec.eigenvalues[0]:.3g} > 0")
    basis, weights = matkit.range_basis(neg_im, tol)
    p = basis @ basis.conj().T
    # kernel basis: eigenvectors not in the range, ascending order as returned by eigh
    keep = np.abs(dec.eigenvalues) <= tol * max(1.0, float(np.max(np.abs(dec.eigenvalues), initial=0.0)))
    kernel = dec.eigenvectors[:, keep]
    return basis, np.clip(weights, 0.0, None), kernel, (p + p.conj().T) / 2


def dilation_relation(D, tol: float = matkit.DEFAULT_TOL) -> DilationData:
    """Relation ``{((u, v, v), (0, -w, w))}`` on ``ker(Im D) + H_D + H_D``.

    The first component is kept in the original coordinates of ``H`` (so it
    pairs with ``M - Re D`` directly); the second copy of ``H_D`` is in the
    eigenbasis of ``-Im D``. Rows enforce: equal ``H_D`` values, zero
    ``ker(Im D)`` derivative, opposite ``H_D`` derivatives.
    """
    basis, weights, kernel, proj = dissipative_split(D, tol)
    n, r = basis.shape
    k = kernel.shape[1]
    d = n + r
    phi = np.zeros((d, d), dtype=complex)
    psi = np.zeros((d, d), dtype=complex)
    bh = basis.conj().T
    phi[:r, :n] = bh
    phi[:r, n:] = -np.eye(r)
    psi[r:r + k, :n] = kernel.conj().T
    psi[r + k:, :n] = bh
    psi[r + k:, n:] = np.eye(r)
    rel = SelfAdjointRelation(phi, psi, "dilation")
    return DilationData(rel, proj, r, basis, weights, kernel)


def relation_resolvent(rel: SelfAdjointRelation, W, cond_max: float = matkit.COND_MAX) -> tuple[np.ndarray, float]:
    """``(Theta - W)^{-1} = -(Phi + Psi W)^{-1} Psi`` and the condition number of the solve."""
    w = matkit.as_cmatrix(W, "W")
    if w.shape != rel.Phi.shape:
        raise ValueError(f"W is {w.shape}, relation has dimension {rel.dim}")
    n, cond = matkit.solve(rel.Phi + rel.Psi @ w, rel.Psi)
    if cond > cond_max:
        raise IllConditioned(f"relation resolvent condition number {cond:.3g} > {cond_max:g}", cond)
    return -n, cond
