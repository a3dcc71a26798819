"""Regular Sturm-Liouville problems ``-(1/2)(f'/m)' + V f = lambda f`` on ``(x_l, x_r)``.

The equation is integrated as the first-order system in ``(f, w)`` with the
quasi-derivative ``w = f'/m``::

    f' = m w,    w' = 2 (V - lambda) f.

Note the normalisation: the boundary maps of the triplet use ``f'/(2m)``,
while the fundamental solutions here are normalised with ``w = f'/m``. The
factor 1/2 is already absorbed in the Weyl-matrix formula; mixing the two
conventions rescales M by 2.
"""

from __future__ import annotations

import bisect
import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import NearPole, ProfileGap, StepFailure
from .herglotz import HerglotzFamily, _sinc_len, sqrt_branch, weyl_from_solutions

RK_RTOL = 1e-10
RK_ATOL = 1e-12
RK_MAX_STEPS = 1_000_000
WRONSKIAN_TOL = 1e-9


@dataclass(frozen=True)
class CoefficientProfile:
    """A real coefficient on an interval.

    ``kind="piecewise_constant"``: ``segments`` is a sequence of
    ``(length, value)`` laid out left to right from ``x_l``.
    ``kind="sampled"``: ``grid`` is a sequence of ``(x, value)`` with
    strictly increasing ``x``; ``interpolation`` is ``"step"`` (value held
    up to the next node) or ``"linear"``.
    """

    kind: str
    segments: tuple[tuple[float, float], ...] = ()
    grid: tuple[tuple[float, float], ...] = ()
    interpolation: str = "step"

    def __post_init__(self):
        if self.kind == "piecewise_constant":
            segs = tuple((float(a), float(b)) for a, b in self.segments)
            if not segs:
                raise ValueError("piecewise_constant profile needs at least one segment")
            if any(length <= 0 for length, _ in segs):
                raise ValueError("segment lengths must be positive")
            object.__setattr__(self, "segments", segs)
        elif self.kind == "sampled":
            grid = tuple((float(a), float(b)) for a, b in self.grid)
            if len(grid) < 1:
                raise ValueError("sampled profile needs at least one node")
            xs = [x for x, _ in grid]
            if any(b <= a for a, b in zip(xs, xs[1:])):
                raise ValueError("sampled grid must be strictly increasing")
            if self.interpolation not in ("step", "linear"):
                raise ValueError(f"unknown interpolation {self.interpolation!r}")
            object.__setattr__(self, "grid", grid)
        else:
            raise ValueError(f"unknown profile kind {self.kind!r}")

    @classmethod
    def constant(cls, value: float, length: float) -> "CoefficientProfile":
        return cls("piecewise_constant", segments=((length, value),))

    @classmethod
    def piecewise(cls, segments: Sequence[tuple[float, float]]) -> "CoefficientProfile":
        return cls("piecewise_constant", segments=tuple(segments))

    @classmethod
    def sampled(cls, grid: Sequence[tuple[float, float]], interpolation: str = "step") -> "CoefficientProfile":
        return cls("sampled", grid=tuple(grid), interpolation=interpolation)

    @property
    def values(self) -> list[float]:
        src = self.segments if self.kind == "piecewise_constant" else self.grid
        return [v for _, v in src]

    @property
    def is_stepwise(self) -> bool:
        return self.kind == "piecewise_constant" or self.interpolation == "step"

    def nodes(self, x_l: float) -> list[float]:
        """Positions where the profile may be non-smooth."""
        if self.kind == "piecewise_constant":
            out, x = [], x_l
            for length, _ in self.segments:
                x += length
                out.append(x)
            return out[:-1]
        return [x for x, _ in self.grid]

    def check_cover(self, x_l: float, x_r: float, name: str) -> None:
        tol = 1e-12 * max(1.0, abs(x_l), abs(x_r))
        if self.kind == "piecewise_constant":
            total = sum(length for length, _ in self.segments)
            if total < (x_r - x_l) - tol:
                raise ProfileGap(f"{name} segments cover {total:g} < interval length {x_r - x_l:g}")
        else:
            lo, hi = self.grid[0][0], self.grid[-1][0]
            if lo > x_l + tol or hi < x_r - tol:
                raise ProfileGap(f"{name} samples [{lo:g}, {hi:g}] do not cover [{x_l:g}, {x_r:g}]")

    def at(self, x: float, x_l: float) -> float:
        """Value at ``x``; on a node the value to the right is returned."""
        if self.kind == "piecewise_constant":
            pos = x_l
            for length, v in self.segments:
                pos += length
                if x < pos:
                    return v
            return self.segments[-1][1]
        xs = [p for p, _ in self.grid]
        vs = [v for _, v in self.grid]
        if self.interpolation == "step":
            i = bisect.bisect_right(xs, x) - 1
            return vs[max(i, 0)]
        return float(np.interp(x, xs, vs))


@dataclass(frozen=True)
class SLProblem:
    x_l: float
    x_r: float
    mass: CoefficientProfile
    potential: CoefficientProfile

    def __post_init__(self):
        if not self.x_r > self.x_l:
            raise ValueError("need x_l < x_r")
        self.mass.check_cover(self.x_l, self.x_r, "mass")
        self.potential.check_cover(self.x_l, self.x_r, "potential")
        if min(self.mass_range()) <= 0:
            raise ValueError("mass must be positive")

    @classmethod
    def constant(cls, length: float, v0: float, m0: float, x_l: float = 0.0) -> "SLProblem":
        return cls(x_l, x_l + length, CoefficientProfile.constant(m0, length),
                   CoefficientProfile.constant(v0, length))

    @property
    def length(self) -> float:
        return self.x_r - self.x_l

    def _range(self, prof: CoefficientProfile) -> list[float]:
        vals = [prof.at(a, self.x_l) for a, _ in self.cells()]
        if prof.kind == "sampled" and prof.interpolation == "linear":
            vals += [prof.at(self.x_r, self.x_l)]
        return vals

    def mass_range(self) -> list[float]:
        return self._range(self.mass)

    def _cells(self) -> list[float]:
        inner = {x for p in (self.mass, self.potential) for x in p.nodes(self.x_l)
                 if self.x_l < x < self.x_r}
        return [self.x_l, *sorted(inner), self.x_r]

    def cells(self) -> list[tuple[float, float]]:
        pts = self._cells()
        return list(zip(pts, pts[1:]))

    @property
    def is_piecewise_constant(self) -> bool:
        return self.mass.kind == "piecewise_constant" and self.potential.kind == "piecewise_constant"

    def max_mass(self) -> float:
        return max(self.mass_range())

    def sup_potential(self) -> float:
        return max(abs(v) for v in self._range(self.potential))


@dataclass(frozen=True)
class ShootingResult:
    phi: complex
    w_phi: complex
    psi: complex
    w_psi: complex
    wronskian_defect: float

    @property
    def scale(self) -> float:
        return max(1.0, abs(self.phi), abs(self.w_phi), abs(self.w_psi))


def _wronskian_defect(phi, w_phi, psi, w_psi) -> float:
    # relative to the size of the two products; equals the absolute defect for O(1) solutions
    a, b = phi * w_psi, psi * w_phi
    return abs(a - b - 1.0) / max(1.0, abs(a), abs(b))


def segment_transfer(length: float, m: float, v: float, lam: complex) -> np.ndarray:
    """Exact propagator of ``(f, w)`` across a constant-coefficient segment."""
    k = sqrt_branch(2 * m * (lam - v))
    c = cmath.cos(k * length)
    s = _sinc_len(k, length)
    return np.array([[c, m * s], [2 * (v - lam) * s, c]], dtype=complex)


def _propagate_exact(problem: SLProblem, lam: complex) -> np.ndarray:
    t = np.eye(2, dtype=complex)
    for a, b in problem.cells():
        m = problem.mass.at(a, problem.x_l)
        v = problem.potential.at(a, problem.x_l)
        t = segment_transfer(b - a, m, v, lam) @ t
    return t


def _propagate_rk(problem: SLProblem, lam: complex) -> np.ndarray:
    y = np.array([1.0, 0.0, 0.0, 1.0], dtype=complex)  # phi, w_phi, psi, w_psi
    mass, pot, x_l = problem.mass, problem.potential, problem.x_l
    for a, b in problem.cells():
        if mass.is_stepwise and pot.is_stepwise:
            m0, v0 = mass.at(a, x_l), pot.at(a, x_l)

            def rhs(x, u, m0=m0, v0=v0):
                g = 2 * (v0 - lam)
                return np.array([m0 * u[1], g * u[0], m0 * u[3], g * u[2]])
        else:
            # evaluate just inside the cell so one-sided values are used at the ends
            def rhs(x, u, a=a, b=b):
                xc = min(max(x, a), b)
                m = mass.at(xc, x_l)
                g = 2 * (pot.at(xc, x_l) - lam)
                return np.array([m * u[1], g * u[0], m * u[3], g * u[2]])

        sol = solve_ivp(rhs, (a, b), y, method="RK45", rtol=RK_RTOL, atol=RK_ATOL)
        if not sol.success:
            raise StepFailure(f"RK integration failed on [{a:g}, {b:g}]: {sol.message}")
        if sol.t.size > RK_MAX_STEPS:
            raise StepFailure("RK step budget exhausted")
        y = sol.y[:, -1]
    return np.array([[y[0], y[2]], [y[1], y[3]]])


def propagate(problem: SLProblem, lam: complex, method: str = "auto") -> ShootingResult:
    """Fundamental solutions and quasi-derivatives at ``x_r``.

    ``method``: ``"exact"`` (segment propagators, requires stepwise
    coefficients), ``"rk"`` (adaptive Runge-Kutta) or ``"auto"`` (exact for
    piecewise-constant profiles, RK otherwise).
    """
    lam = complex(lam)
    if not (math.isfinite(lam.real) and math.isfinite(lam.imag)):
        raise ValueError("lambda must be finite")
    if method == "auto":
        method = "exact" if problem.is_piecewise_constant else "rk"
    if method == "exact":
        if not (problem.mass.is_stepwise and problem.potential.is_stepwise):
            raise ValueError("exact propagation needs piecewise-constant coefficients")
        t = _propagate_exact(problem, lam)
    elif method == "rk":
        t = _propagate_rk(problem, lam)
    else:
        raise ValueError(f"unknown method {method!r}")
    phi, psi, w_phi, w_psi = t[0, 0], t[0, 1], t[1, 0], t[1, 1]
    return ShootingResult(complex(phi), complex(w_phi), complex(psi), complex(w_psi),
                          _wronskian_defect(phi, w_phi, psi, w_psi))


def weyl_matrix(problem: SLProblem, lam: complex, tol_pole: float = 1e-10,
                method: str = "auto") -> np.ndarray:
    """2x2 Weyl matrix ``(1/(2 psi)) [[-phi, 1], [1, -w_psi]]`` evaluated at ``x_r``."""
    r = propagate(problem, lam, method)
    return weyl_from_solutions(r.phi, r.w_psi, r.psi, r.scale, tol_pole, complex(lam))


def dirichlet_eigenvalues(problem: SLProblem, lam_max: float, method: str = "auto") -> list[float]:
    """Dirichlet eigenvalues (zeros of ``lambda -> psi_lambda(x_r)``) up to ``lam_max``."""
    lo = -problem.sup_potential() - 1.0
    if lam_max <= lo:
        return []
    step = math.pi**2 / (8 * 2 * problem.max_mass() * problem.length**2)
    n = max(2, int(math.ceil((lam_max - lo) / step)) + 1)
    grid = np.linspace(lo, lam_max, n)

    def psi(x: float) -> float:
        return propagate(problem, complex(x, 0.0), method).psi.real

    vals = [psi(x) for x in grid]
    roots: list[float] = []
    for i in range(n - 1):
        a, b, fa, fb = grid[i], grid[i + 1], vals[i], vals[i + 1]
        if fa == 0.0:
            roots.append(float(a))
        elif fa * fb < 0:
            roots.append(float(brentq(psi, a, b, xtol=1e-13, rtol=4 * np.finfo(float).eps)))
    if vals[-1] == 0.0:
        roots.append(float(grid[-1]))
    return sorted(roots)


def sl_weyl_family(problem: SLProblem, tol_pole: float = 1e-10, method: str = "auto") -> HerglotzFamily:
    def ev(z: complex) -> np.ndarray:
        return weyl_matrix(problem, z, tol_pole, method)

    def domain(x: float) -> bool:
        try:
            ev(complex(x, 0.0))
        except NearPole:
            return False
        return True

    return HerglotzFamily(2, ev, domain, f"SL({problem.x_l:g},{problem.x_r:g})")
