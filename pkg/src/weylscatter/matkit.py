"""Small dense complex matrix kernel.

Everything here works on plain ``numpy`` complex arrays. Matrices are tiny
(boundary spaces of dimension <= 8), so exact SVD-based norms and condition
numbers are affordable and preferred over estimates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonHermitian, NonSquare, NotPSD, Singular

DEFAULT_TOL = 1e-10
COND_MAX = 1e12
SINGULAR_PIVOT = 1e-14
HERMITIAN_TOL = 1e-10


def as_cmatrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a 2-D complex array, rejecting NaN/Inf entries."""
    m = np.array(a, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def _square(a, name: str = "matrix") -> np.ndarray:
    m = as_cmatrix(a, name)
    if m.shape[0] != m.shape[1]:
        raise NonSquare(f"{name} is {m.shape[0]}x{m.shape[1]}, expected square")
    return m


def norm2(a) -> float:
    """Spectral norm (largest singular value); 0 for empty matrices."""
    m = np.asarray(a)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def adjoint(a) -> np.ndarray:
    return np.asarray(a).conj().T


def scale_of(a) -> float:
    return max(1.0, norm2(a))


def hermitian_defect(a) -> float:
    m = np.asarray(a)
    return norm2(m - m.conj().T)


def _require_hermitian(h, name: str = "matrix") -> np.ndarray:
    m = _square(h, name)
    if hermitian_defect(m) > HERMITIAN_TOL * scale_of(m):
        raise NonHermitian(f"{name} is not Hermitian (defect {hermitian_defect(m):.3g})")
    # symmetrize away rounding so eigh sees an exactly Hermitian input
    return (m + m.conj().T) / 2


@dataclass(frozen=True)
class HermitianDecomposition:
    eigenvalues: np.ndarray  # ascending, real
    eigenvectors: np.ndarray  # columns, unitary

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


def eigh(h) -> HermitianDecomposition:
    m = _require_hermitian(h)
    w, u = np.linalg.eigh(m)
    return HermitianDecomposition(w, u)


def imag_part(a) -> np.ndarray:
    """Hermitian imaginary part ``(A - A*) / 2i``."""
    m = _square(a)
    return (m - m.conj().T) / 2j


def real_part(a) -> np.ndarray:
    """Hermitian real part ``(A + A*) / 2``."""
    m = _square(a)
    return (m + m.conj().T) / 2


def psd_sqrt(h, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Hermitian PSD square root.

    Eigenvalues in ``[-tol*scale, 0)`` are clipped to zero; anything more
    negative raises :class:`NotPSD`.
    """
    dec = eigh(h)
    scale = max(1.0, float(np.max(np.abs(dec.eigenvalues), initial=0.0)))
    w = dec.eigenvalues
    if w.size and w[0] < -tol * scale:
        raise NotPSD(f"eigenvalue {w[0]:.3g} below -{tol:g}*{scale:.3g}")
    root = np.sqrt(np.clip(w, 0.0, None))
    u = dec.eigenvectors
    s = (u * root) @ u.conj().T
    return (s + s.conj().T) / 2


def range_basis(h, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal basis of the range of a Hermitian matrix.

    Returns ``(V, e)`` where the columns of ``V`` are eigenvectors whose
    eigenvalues satisfy ``|e| > tol*max(1, ||H||)``, ordered by descending
    eigenvalue. ``V`` has shape ``(n, rank)``.
    """
    dec = eigh(h)
    w, u = dec.eigenvalues, dec.eigenvectors
    scale = max(1.0, float(np.max(np.abs(w), initial=0.0)))
    keep = np.abs(w) > tol * scale
    order = np.argsort(-w[keep], kind="stable")
    v = u[:, keep][:, order]
    # fix the phase of each column (largest-modulus entry real positive) for reproducibility
    for j in range(v.shape[1]):
        k = int(np.argmax(np.abs(v[:, j])))
        v[:, j] *= np.conj(v[k, j]) / abs(v[k, j])
    return v, w[keep][order]


def range_projector(h, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, int]:
    v, _ = range_basis(h, tol)
    p = v @ v.conj().T
    return (p + p.conj().T) / 2, v.shape[1]


def cond2(a) -> float:
    m = np.asarray(a)
    if m.size == 0:
        return 1.0
    s = np.linalg.svd(m, compute_uv=False)
    if s[-1] == 0.0:
        return float("inf")
    return float(s[0] / s[-1])


def solve(a, b) -> tuple[np.ndarray, float]:
    """Solve ``A X = B``; returns ``(X, cond)``.

    Raises :class:`Singular` when the smallest singular value of ``A`` is
    below ``1e-14 * max(1, ||A||)``. Large but finite condition numbers are
    only reported; the caller decides what to do with them.
    """
    m = _square(a, "A")
    rhs = as_cmatrix(b, "B") if np.ndim(b) != 1 else np.asarray(b, dtype=complex)
    if rhs.shape[0] != m.shape[0]:
        raise ValueError(f"B has {rhs.shape[0]} rows, A is {m.shape[0]}x{m.shape[0]}")
    if m.shape[0] == 0:
        return np.zeros(rhs.shape, dtype=complex), 1.0
    s = np.linalg.svd(m, compute_uv=False)
    if s[-1] < SINGULAR_PIVOT * max(1.0, s[0]):
        raise Singular(f"matrix is numerically singular (sigma_min={s[-1]:.3g})")
    x = np.linalg.solve(m, rhs)
    return x, float(s[0] / s[-1])


def inv(a) -> tuple[np.ndarray, float]:
    m = _square(a)
    return solve(m, np.eye(m.shape[0], dtype=complex))


def unitary_defect(u) -> float:
    """``||U*U - I||`` in the spectral norm."""
    m = _square(u, "U")
    return norm2(m.conj().T @ m - np.eye(m.shape[0]))


def contraction_excess(a) -> float:
    return max(0.0, norm2(a) - 1.0)
