"""Matrix Nevanlinna (Herglotz) functions and their boundary values.

A :class:`HerglotzFamily` wraps an evaluator ``lambda -> (dim x dim)`` that is
holomorphic off the real axis, symmetric under conjugation and has a
positive semidefinite imaginary part on the upper half-plane. Weyl functions,
lead functions and block compositions of those are all families.

The square root used throughout has its cut on ``[0, inf)``: the argument is
taken in ``[0, 2*pi)``, so ``Im sqrt(z) > 0`` off the cut and ``sqrt(x) >= 0``
on it. With this convention ``F(x - i0) = F(x + i0)*`` holds automatically
for the closed-form families.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from . import matkit
from .errors import NearPole, NoBoundaryLimit, OutsideDomain

Evaluator = Callable[[complex], np.ndarray]
DomainPredicate = Callable[[float], bool]


class HalfPlane(str, Enum):
    UPPER = "upper"
    LOWER = "lower"
    REAL_FROM_ABOVE = "real_boundary_from_above"
    REAL_FROM_BELOW = "real_boundary_from_below"


@dataclass(frozen=True)
class EnergyPoint:
    value: complex
    half_plane: HalfPlane

    def __post_init__(self):
        im = complex(self.value).imag
        hp = HalfPlane(self.half_plane)
        ok = {
            HalfPlane.UPPER: im > 0,
            HalfPlane.LOWER: im < 0,
            HalfPlane.REAL_FROM_ABOVE: im == 0,
            HalfPlane.REAL_FROM_BELOW: im == 0,
        }[hp]
        if not ok:
            raise ValueError(f"tag {hp.value!r} inconsistent with Im={im!r}")
        object.__setattr__(self, "half_plane", hp)
        object.__setattr__(self, "value", complex(self.value))

    @classmethod
    def at(cls, z: complex) -> "EnergyPoint":
        z = complex(z)
        if z.imag > 0:
            return cls(z, HalfPlane.UPPER)
        if z.imag < 0:
            return cls(z, HalfPlane.LOWER)
        return cls(z, HalfPlane.REAL_FROM_ABOVE)


def sqrt_branch(z: complex) -> complex:
    """Square root with the cut along ``[0, inf)``."""
    z = complex(z)
    if z == 0:
        return 0j
    arg = math.atan2(z.imag, z.real)
    if arg < 0:
        arg += 2 * math.pi
    return cmath.exp(0.5 * (math.log(abs(z)) + 1j * arg))


def _always(_: float) -> bool:
    return True


@dataclass(frozen=True)
class HerglotzFamily:
    dim: int
    evaluator: Evaluator
    real_domain: DomainPredicate = _always
    label: str = "F"
    singular_points: tuple[float, ...] = field(default=())

    def __call__(self, lam: complex) -> np.ndarray:
        z = lam.value if isinstance(lam, EnergyPoint) else complex(lam)
        out = np.asarray(self.evaluator(z), dtype=complex).reshape(self.dim, self.dim)
        return out


def eval_upper(F: HerglotzFamily, lam) -> np.ndarray:
    z = lam.value if isinstance(lam, EnergyPoint) else complex(lam)
    if z.imag <= 0:
        raise ValueError(f"eval_upper needs Im(lambda) > 0, got {z!r}")
    return F(z)


@dataclass(frozen=True)
class BoundaryMode:
    strategy: str = "direct"  # "direct" | "epsilon_ladder"
    eps0: float = 1e-3
    levels: int = 8
    extrapolation_tol: float = 1e-8

    def __post_init__(self):
        if self.strategy not in ("direct", "epsilon_ladder"):
            raise ValueError(f"unknown boundary strategy {self.strategy!r}")
        if not self.eps0 > 0:
            raise ValueError("eps0 must be positive")
        if self.levels < 2:
            raise ValueError("levels must be >= 2")


DIRECT = BoundaryMode()
LADDER = BoundaryMode(strategy="epsilon_ladder")


def _richardson(F: HerglotzFamily, mu: float, sign: int, mode: BoundaryMode) -> np.ndarray:
    # tableau rows: eps_j = eps0 * 2^-j; column k removes the eps^k term
    rows: list[list[np.ndarray]] = []
    best_diff = math.inf
    for j in range(mode.levels):
        eps = mode.eps0 * 2.0 ** (-j)
        row = [F(complex(mu, sign * eps))]
        for k in range(1, j + 1):
            prev = rows[j - 1][k - 1]
            row.append(row[k - 1] + (row[k - 1] - prev) / (2.0**k - 1.0))
        rows.append(row)
        if j >= 1:
            diff = matkit.norm2(row[j] - rows[j - 1][j - 1])
            scale = max(1.0, matkit.norm2(row[j]))
            best_diff = min(best_diff, diff)
            if diff < mode.extrapolation_tol * scale:
                return row[j]
    raise NoBoundaryLimit(
        f"{F.label}: epsilon ladder at {mu:g} did not converge "
        f"(last difference {best_diff:.3g} > {mode.extrapolation_tol:g})"
    )


def boundary_value(F: HerglotzFamily, mu: float, mode: BoundaryMode = DIRECT,
                   side: str = "upper") -> np.ndarray:
    """``F(mu + i0)`` (``side="upper"``) or ``F(mu - i0)`` (``side="lower"``)."""
    mu = float(mu)
    if side not in ("upper", "lower"):
        raise ValueError(f"side must be 'upper' or 'lower', got {side!r}")
    if mode.strategy == "direct":
        if not F.real_domain(mu):
            raise OutsideDomain(f"{F.label}: {mu:g} is outside the real domain")
        value = F(complex(mu, 0.0))
        return value if side == "upper" else value.conj().T
    return _richardson(F, mu, 1 if side == "upper" else -1, mode)


@dataclass
class NevanlinnaReport:
    max_negative_eig: float
    max_symmetry_defect: float

    def passed(self, tol: float = 1e-10) -> bool:
        return self.max_negative_eig <= tol and self.max_symmetry_defect <= tol


def check_nevanlinna(F: HerglotzFamily, samples, relative: bool = False) -> NevanlinnaReport:
    """Worst Nevanlinna violations over ``samples`` (complex, Im != 0).

    ``max_negative_eig`` is the largest ``-min eig(sign(Im z) Im F(z))``;
    ``max_symmetry_defect`` the largest ``||F(conj z) - F(z)*||``. With
    ``relative=True`` both are divided by ``max(1, ||F(z)||)``.
    """
    neg, sym = 0.0, 0.0
    for s in samples:
        z = s.value if isinstance(s, EnergyPoint) else complex(s)
        if z.imag == 0:
            raise ValueError("Nevanlinna samples must be off the real axis")
        fz = F(z)
        scale = max(1.0, matkit.norm2(fz)) if relative else 1.0
        im = np.sign(z.imag) * matkit.imag_part(fz)
        lo = float(np.linalg.eigvalsh((im + im.conj().T) / 2)[0])
        neg = max(neg, -lo / scale)
        sym = max(sym, matkit.norm2(F(z.conjugate()) - fz.conj().T) / scale)
    return NevanlinnaReport(neg, sym)


# -- built-in families -------------------------------------------------------

def delta_weyl_family() -> HerglotzFamily:
    """Weyl function ``i / (2 sqrt(lambda))`` of the point interaction at 0."""

    def ev(z: complex) -> np.ndarray:
        r = sqrt_branch(z)
        if r == 0:
            raise NearPole("delta Weyl function is singular at 0", 0j)
        return np.array([[1j / (2 * r)]])

    return HerglotzFamily(1, ev, lambda x: x != 0.0, "delta", (0.0,))


def lead_tau_family(v_l: float, v_r: float, m_l: float, m_r: float) -> HerglotzFamily:
    """Diagonal lead function ``diag(i sqrt((z-v_l)/2m_l), i sqrt((z-v_r)/2m_r))``."""
    if not (m_l > 0 and m_r > 0):
        raise ValueError("lead masses must be positive")

    def ev(z: complex) -> np.ndarray:
        return np.diag([
            1j * sqrt_branch((z - v_l) / (2 * m_l)),
            1j * sqrt_branch((z - v_r) / (2 * m_r)),
        ])

    return HerglotzFamily(2, ev, _always, f"tau(v=({v_l:g},{v_r:g}))",
                          tuple(sorted({float(v_l), float(v_r)})))


def const_fundamental(L: float, v0: float, m0: float, z: complex) -> tuple[complex, complex, complex, complex]:
    """Closed-form ``(phi, w_phi, psi, w_psi)`` at ``x = L`` for constant coefficients.

    ``w = f'/m0``; initial data ``phi = (1, 0)``, ``psi = (0, 1)``.
    """
    k = sqrt_branch(2 * m0 * (z - v0))
    c = cmath.cos(k * L)
    s_over_k = _sinc_len(k, L)
    phi = c
    w_phi = 2 * (v0 - z) * s_over_k
    psi = m0 * s_over_k
    w_psi = c
    return phi, w_phi, psi, w_psi


def _sinc_len(k: complex, L: float) -> complex:
    """``sin(k L) / k`` with the ``k -> 0`` limit ``L``."""
    x = k * L
    if abs(x) < 1e-4:
        x2 = x * x
        return L * (1 - x2 / 6 + x2 * x2 / 120)
    return cmath.sin(x) / k


def weyl_from_solutions(phi: complex, w_psi: complex, psi: complex,
                        scale: float, tol_pole: float, where: complex) -> np.ndarray:
    if abs(psi) < tol_pole * max(1.0, scale):
        raise NearPole(f"psi(x_r) = {abs(psi):.3g} at lambda={where!r}: Dirichlet eigenvalue", where)
    return np.array([[-phi, 1.0], [1.0, -w_psi]], dtype=complex) / (2 * psi)


def const_interval_weyl_family(L: float, v0: float, m0: float,
                               tol_pole: float = 1e-12) -> HerglotzFamily:
    """Closed-form 2x2 Weyl function of a constant-coefficient interval of length ``L``."""
    if not (L > 0 and m0 > 0):
        raise ValueError("need L > 0 and m0 > 0")

    def ev(z: complex) -> np.ndarray:
        phi, w_phi, psi, w_psi = const_fundamental(L, v0, m0, z)
        scale = max(abs(phi), abs(w_phi), abs(w_psi))
        return weyl_from_solutions(phi, w_psi, psi, scale, tol_pole, z)

    def domain(x: float) -> bool:
        try:
            ev(complex(x, 0.0))
        except NearPole:
            return False
        return True

    return HerglotzFamily(2, ev, domain, f"const(L={L:g},v0={v0:g},m0={m0:g})")


def block_diag_family(*families: HerglotzFamily, label: str | None = None) -> HerglotzFamily:
    dims = [f.dim for f in families]

    def ev(z: complex) -> np.ndarray:
        out = np.zeros((sum(dims), sum(dims)), dtype=complex)
        i = 0
        for f, d in zip(families, dims):
            out[i:i + d, i:i + d] = f(z)
            i += d
        return out

    return HerglotzFamily(
        sum(dims), ev, lambda x: all(f.real_domain(x) for f in families),
        label or "diag(" + ",".join(f.label for f in families) + ")",
        tuple(sorted({p for f in families for p in f.singular_points})),
    )


def anti_herglotz_control(dim: int = 1) -> HerglotzFamily:
    """``F(z) = conj(z) I``: symmetric but with negative imaginary part. A test control."""
    return HerglotzFamily(dim, lambda z: np.conj(z) * np.eye(dim), _always, "anti-herglotz")
