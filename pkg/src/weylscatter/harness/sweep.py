"""Energy-grid sweeps: one :class:`SweepRow` per grid point."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache, partial

import numpy as np

from .. import scatter
from ..errors import (Abort, EvaluationFailed, IllConditioned, NearPole, NoBoundaryLimit,
                      OutsideDomain, Singular)
from ..herglotz import DIRECT, HerglotzFamily, boundary_value
from ..sturm import dirichlet_eigenvalues
from .config import SweepConfig

GUARD_ERRORS = (NearPole, OutsideDomain, IllConditioned, Singular, NoBoundaryLimit, EvaluationFailed)
UNITARY_KINDS = {"s_dilation", "s_coupled", "s_energydep"}
CONTRACTIVE_KINDS = {"s_dissipative", "s_laxphillips", "char_function"}


@dataclass
class SweepRow:
    lam: float
    outputs: dict[str, dict[str, np.ndarray] | float] = field(default_factory=dict)
    unitarity_defect: float = math.nan
    contraction_excess: float = math.nan
    cond: float = math.nan
    rank_M: int | None = None
    rank_tau: int | None = None
    flags: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class _Context:
    M: HerglotzFamily
    tau: HerglotzFamily | None
    D: np.ndarray | None


@lru_cache(maxsize=8)
def _context(config: SweepConfig) -> _Context:
    M = config.problem.weyl_family(config.guards.tol_pole)
    if config.coupling.type == "dissipative":
        return _Context(M, None, config.coupling.matrix)
    return _Context(M, config.coupling.tau_family(), None)


def pole_list(config: SweepConfig) -> tuple[float, ...]:
    """Dirichlet eigenvalues up to the top of the grid (empty for the point interaction)."""
    problem = config.problem.sl_problem()
    if problem is None:
        return ()
    return tuple(dirichlet_eigenvalues(problem, config.grid.max))


def _guard_name(exc: Exception) -> str:
    return type(exc).__name__


def compute_row(config: SweepConfig, poles: tuple[float, ...], lam: float) -> SweepRow:
    ctx = _context(config)
    g = config.guards
    row = SweepRow(float(lam))
    abort = g.skip_policy == "abort"

    def flag(name: str):
        row.flags.append(name)
        if abort and not name.startswith("TrivialChannel"):
            raise Abort(f"guard {name} fired at lambda={lam!r}")

    if any(abs(lam - p) <= 10 * g.tol_pole * max(1.0, abs(p)) for p in poles):
        flag("NearPole")
        return row
    try:
        m_up = boundary_value(ctx.M, lam, DIRECT, "upper")
    except GUARD_ERRORS as exc:
        flag(_guard_name(exc))
        return row
    m_lo = m_up.conj().T
    tol, cmax = scatter.TOL, g.cond_max
    row.rank_M = scatter.channel(scatter.matkit.imag_part(m_up), "H_M").rank

    if ctx.D is not None:
        D, t = ctx.D, None
    else:
        t = boundary_value(ctx.tau, lam, DIRECT, "upper")
        D = -t
    row.rank_tau = scatter.channel(-scatter.matkit.imag_part(D), "H_tau").rank

    unit, contr, conds = [], [], []

    def record(s: scatter.ScatteringMatrix, kind: str | None, unitary: bool):
        conds.append(s.cond)
        (unit if unitary else contr).append(s.unitarity_defect if unitary else s.contraction_excess)
        if kind is not None:
            row.outputs[kind] = s.blocks()
            if "TrivialChannel" in s.flags:
                flag(f"TrivialChannel:{kind}")

    def guarded(kind: str, fn):
        try:
            fn()
        except GUARD_ERRORS as exc:
            flag(f"{_guard_name(exc)}:{kind}")

    # primary object: drives diagnostics even when no outputs are requested
    if t is None:
        guarded("primary", lambda: record(scatter.s_dilation(m_up, D, tol, cmax), None, True))
    else:
        guarded("primary", lambda: record(scatter.s_coupled(m_up, t, tol, cmax), None, True))

    def one(kind: str):
        if kind == "weyl":
            row.outputs[kind] = {"0": m_up}
        elif kind == "s_dilation":
            record(scatter.s_dilation(m_up, D, tol, cmax), kind, True)
        elif kind == "s_dissipative":
            record(scatter.s_dissipative(m_up, D, tol, cmax), kind, False)
        elif kind == "s_laxphillips":
            record(scatter.s_laxphillips(m_up, D, tol, cmax), kind, False)
        elif kind == "char_function":
            if t is None:
                record(scatter.char_function(m_lo, D, tol, cmax), kind, False)
            else:
                record(scatter.straus_char(m_lo, t, tol, cmax), kind, False)
        elif kind == "s_coupled":
            record(scatter.s_coupled(m_up, t, tol, cmax), kind, True)
        elif kind == "s_energydep":
            if config.coupling.type == "energy_dep":
                for j, mu in enumerate(config.coupling.mu_list):
                    t_mu = boundary_value(ctx.tau, mu, DIRECT, "upper")
                    guarded(f"{kind}_mu{j}", lambda t_mu=t_mu, j=j: record(
                        scatter.s_energydep(m_up, t_mu, tol, cmax), f"{kind}_mu{j}", True))
            else:
                record(scatter.s_energydep(m_up, t, tol, cmax), kind, True)
        elif kind == "residual_adamyan_arov":
            if t is None:
                r = scatter.residual_adamyan_arov(ctx.M, D, lam, DIRECT, tol, cmax)
            else:
                r = scatter.residual_adamyan_arov_energydep(ctx.M, ctx.tau, lam, DIRECT, tol, cmax)
            row.outputs[kind] = r
        elif kind == "residual_theorem_main":
            row.outputs[kind] = scatter.residual_theorem_main(ctx.M, ctx.tau, lam, DIRECT, tol, cmax)
        elif kind == "residual_relation_consistency":
            if t is None:
                r = scatter.residual_relation_consistency(m_up, D, "dilation", tol, cmax)
            else:
                r = max(scatter.residual_relation_consistency(m_up, t, "coupling", tol, cmax),
                        scatter.residual_relation_consistency(m_up, D, "dilation", tol, cmax))
            row.outputs[kind] = r
        elif kind == "eigenvalues":
            row.outputs[kind] = float(sum(1 for p in poles if p <= lam))
        else:  # pragma: no cover - rejected by config validation
            raise ValueError(kind)

    for kind in config.output.kinds:
        guarded(kind, lambda kind=kind: one(kind))

    row.unitarity_defect = max(unit) if unit else math.nan
    row.contraction_excess = max(contr) if contr else math.nan
    row.cond = max(conds) if conds else math.nan
    return row


def run_sweep(config: SweepConfig, workers: int = 1) -> list[SweepRow]:
    """Evaluate every grid point; rows come back in ascending ``lambda``.

    Parallel execution (``workers > 1``) farms points out to processes and
    returns exactly the rows of the serial run.
    """
    poles = pole_list(config)
    points = sorted(float(x) for x in config.grid.points())
    fn = partial(compute_row, config, poles)
    if workers <= 1:
        return [fn(x) for x in points]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, points, chunksize=max(1, len(points) // (4 * workers))))
