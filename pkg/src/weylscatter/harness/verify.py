"""Verification suites: identity residuals and oracle agreement over a config's grid.

Failures are report content, never exceptions. Points where a guard fires
(pole, ill-conditioning, missing boundary limit) are recorded as skipped.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .. import matkit, scatter, sturm
from ..herglotz import DIRECT, LADDER, boundary_value, check_nevanlinna
from .config import SweepConfig
from .sweep import GUARD_ERRORS, _context, pole_list

SUITES = ("unitarity", "adamyan-arov", "theorem-main", "nevanlinna", "wronskian", "oracle")

UNITARITY_TOL = 1e-8
CONTRACTION_TOL = 1e-10
IDENTITY_TOL = 1e-10
NEVANLINNA_TOL = 1e-10
SYMMETRY_TOL = 1e-12
LADDER_TOL = 1e-6
RK_TOL = 1e-8
PROJECTOR_TOL = 1e-12
MAX_SAMPLES = 20
SKIP_RECORD = 20


@dataclass
class Check:
    threshold: float
    max: float = 0.0
    points: int = 0
    skipped: list[float] = field(default_factory=list)
    n_skipped: int = 0

    @property
    def passed(self) -> bool:
        return self.max <= self.threshold

    def add(self, value: float):
        self.points += 1
        if not value <= self.max:  # also captures nan
            self.max = value if not math.isnan(value) else math.inf

    def skip(self, lam):
        self.n_skipped += 1
        if len(self.skipped) < SKIP_RECORD:
            self.skipped.append(lam)

    def report(self) -> dict:
        return {"passed": self.passed, "max": self.max, "threshold": self.threshold,
                "points": self.points, "skipped": self.n_skipped, "skipped_at": self.skipped}


class _Suite:
    def __init__(self):
        self.checks: dict[str, Check] = {}
        self.status = "run"

    def check(self, name: str, threshold: float) -> Check:
        return self.checks.setdefault(name, Check(threshold))

    def measure(self, name: str, threshold: float, lam, fn):
        c = self.check(name, threshold)
        try:
            c.add(float(fn()))
        except GUARD_ERRORS:
            c.skip(lam)


def _sample(points: np.ndarray, k: int = MAX_SAMPLES) -> np.ndarray:
    if len(points) <= k:
        return points
    return points[np.linspace(0, len(points) - 1, k).round().astype(int)]


def _grid(config: SweepConfig, poles) -> tuple[list[float], list[float]]:
    tol = config.guards.tol_pole
    good, bad = [], []
    for x in sorted(float(v) for v in config.grid.points()):
        (bad if any(abs(x - p) <= 10 * tol * max(1.0, abs(p)) for p in poles) else good).append(x)
    return good, bad


def _unitarity(config, ctx, lams, suite: _Suite):
    cm, leads = config.guards.cond_max, ctx.tau is not None
    for lam in lams:
        def mats():
            m = boundary_value(ctx.M, lam, DIRECT, "upper")
            t = boundary_value(ctx.tau, lam, DIRECT, "upper") if leads else None
            return m, t, (-t if leads else ctx.D)
        try:
            m, t, D = mats()
        except GUARD_ERRORS:
            for name in suite.checks:
                suite.checks[name].skip(lam)
            continue
        ml = m.conj().T
        if leads:
            suite.measure("s_coupled", UNITARITY_TOL, lam,
                          lambda: scatter.s_coupled(m, t, cond_max=cm).unitarity_defect)
            suite.measure("s_energydep", UNITARITY_TOL, lam,
                          lambda: scatter.s_energydep(m, t, cond_max=cm).unitarity_defect)
            suite.measure("char_function", CONTRACTION_TOL, lam,
                          lambda: scatter.straus_char(ml, t, cond_max=cm).contraction_excess)
        else:
            suite.measure("char_function", CONTRACTION_TOL, lam,
                          lambda: scatter.char_function(ml, D, cond_max=cm).contraction_excess)
        suite.measure("s_dilation", UNITARITY_TOL, lam,
                      lambda: scatter.s_dilation(m, D, cond_max=cm).unitarity_defect)
        suite.measure("s_dissipative", CONTRACTION_TOL, lam,
                      lambda: scatter.s_dissipative(m, D, cond_max=cm).contraction_excess)
        suite.measure("s_laxphillips", CONTRACTION_TOL, lam,
                      lambda: scatter.s_laxphillips(m, D, cond_max=cm).contraction_excess)
    # characteristic function off the axis, strictly in the lower half-plane
    if not leads:
        for lam in _sample(np.asarray(lams)):
            z = complex(lam, -0.5)
            suite.measure("char_function_lower_half_plane", CONTRACTION_TOL, lam, lambda: scatter.char_function(
                ctx.M(z.conjugate()).conj().T, ctx.D, cond_max=cm).contraction_excess)


def _adamyan_arov(config, ctx, lams, suite: _Suite):
    cm = config.guards.cond_max
    for lam in lams:
        if ctx.tau is None:
            suite.measure("fixed_D", IDENTITY_TOL, lam,
                          lambda: scatter.residual_adamyan_arov(ctx.M, ctx.D, lam, DIRECT, cond_max=cm))
        else:
            suite.measure("energy_dependent", IDENTITY_TOL, lam,
                          lambda: scatter.residual_adamyan_arov_energydep(ctx.M, ctx.tau, lam, DIRECT,
                                                                          cond_max=cm))
            # frozen D = -tau(lambda) as a fixed dissipative matrix
            suite.measure("fixed_D", IDENTITY_TOL, lam, lambda: scatter.residual_adamyan_arov(
                ctx.M, -boundary_value(ctx.tau, lam), lam, DIRECT, cond_max=cm))


def _theorem_main(config, ctx, lams, suite: _Suite):
    if ctx.tau is None:
        suite.status = "skipped"
        return
    for lam in lams:
        suite.measure("coupled_vs_energydep", IDENTITY_TOL, lam, lambda: scatter.residual_theorem_main(
            ctx.M, ctx.tau, lam, DIRECT, cond_max=config.guards.cond_max))


def _nevanlinna(config, ctx, lams, suite: _Suite):
    samples = [complex(x, 1.0) for x in _sample(np.asarray(lams), 50)]
    fams = [("M", ctx.M)] + ([("tau", ctx.tau)] if ctx.tau is not None else [])
    for name, fam in fams:
        for z in samples:
            try:
                rep = check_nevanlinna(fam, [z], relative=True)
            except GUARD_ERRORS:
                suite.check(f"{name}.negativity", NEVANLINNA_TOL).skip(z.real)
                continue
            suite.check(f"{name}.negativity", NEVANLINNA_TOL).add(rep.max_negative_eig)
            suite.check(f"{name}.symmetry", SYMMETRY_TOL).add(rep.max_symmetry_defect)


def _wronskian(config, ctx, lams, suite: _Suite):
    problem = config.problem.sl_problem()
    if problem is None:
        suite.status = "skipped"
        return
    for lam in _sample(np.asarray(lams), 50):
        for z in (complex(lam), complex(lam, 1.0)):
            suite.measure("defect", sturm.WRONSKIAN_TOL, lam,
                          lambda: sturm.propagate(problem, z).wronskian_defect)


def _oracle(config, ctx, lams, poles, suite: _Suite):
    cm = config.guards.cond_max
    # boundary-limit ladder vs direct evaluation, away from known singular points
    singular = list(poles) + list(ctx.M.singular_points)
    if ctx.tau is not None:
        singular += list(ctx.tau.singular_points)
    fams = [("M", ctx.M)] + ([("tau", ctx.tau)] if ctx.tau is not None else [])
    for lam in _sample(np.asarray(lams)):
        near = any(abs(lam - s) < 10 * LADDER.eps0 for s in singular)
        for name, fam in fams:
            c = suite.check(f"ladder.{name}", LADDER_TOL)
            if near:
                c.skip(lam)
                continue
            try:
                a = boundary_value(fam, lam, DIRECT)
                b = boundary_value(fam, lam, LADDER)
            except GUARD_ERRORS:
                c.skip(lam)
                continue
            c.add(matkit.norm2(a - b) / max(1.0, matkit.norm2(a)))
    # shooting vs closed-form propagator products
    problem = config.problem.sl_problem()
    if problem is not None and problem.is_piecewise_constant:
        for lam in _sample(np.asarray(lams)):
            z = complex(lam, 0.5)

            def rel():
                a = sturm.weyl_matrix(problem, z, method="rk")
                b = sturm.weyl_matrix(problem, z, method="exact")
                return matkit.norm2(a - b) / max(1.0, matkit.norm2(b))
            suite.measure("rk_vs_exact", RK_TOL, lam, rel)
    # generic relation formula vs displayed block formulas
    for lam in lams:
        def consistency():
            m = boundary_value(ctx.M, lam)
            if ctx.tau is None:
                return scatter.residual_relation_consistency(m, ctx.D, "dilation", cond_max=cm)
            t = boundary_value(ctx.tau, lam)
            return max(scatter.residual_relation_consistency(m, t, "coupling", cond_max=cm),
                       scatter.residual_relation_consistency(m, -t, "dilation", cond_max=cm))
        suite.measure("relation_consistency", IDENTITY_TOL, lam, consistency)
    # channel projectors
    for lam in _sample(np.asarray(lams)):
        def proj():
            m = boundary_value(ctx.M, lam)
            mats = [matkit.imag_part(m)]
            mats.append(-matkit.imag_part(ctx.D) if ctx.tau is None
                        else matkit.imag_part(boundary_value(ctx.tau, lam)))
            worst = 0.0
            for h in mats:
                p = scatter.channel(h, "H").projector
                worst = max(worst, matkit.norm2(p @ p - p), matkit.norm2(p - p.conj().T),
                            matkit.norm2(p @ h - h) / max(1.0, matkit.norm2(h)))
            return worst
        suite.measure("projector", PROJECTOR_TOL, lam, proj)


def verify_suite(config: SweepConfig, suites=("all",)) -> dict:
    """Run the requested suites; returns a JSON-ready report."""
    wanted = SUITES if "all" in suites else tuple(suites)
    for s in wanted:
        if s not in SUITES:
            raise ValueError(f"unknown suite {s!r}; choose from {SUITES}")
    t0 = time.perf_counter()
    ctx = _context(config)
    poles = pole_list(config)
    lams, flagged = _grid(config, poles)
    out = {}
    for name in wanted:
        t1 = time.perf_counter()
        suite = _Suite()
        if name == "unitarity":
            _unitarity(config, ctx, lams, suite)
        elif name == "adamyan-arov":
            _adamyan_arov(config, ctx, lams, suite)
        elif name == "theorem-main":
            _theorem_main(config, ctx, lams, suite)
        elif name == "nevanlinna":
            _nevanlinna(config, ctx, lams, suite)
        elif name == "wronskian":
            _wronskian(config, ctx, lams, suite)
        else:
            _oracle(config, ctx, lams, poles, suite)
        checks = {k: c.report() for k, c in suite.checks.items()}
        if suite.status != "skipped":
            suite.status = "pass" if all(c["passed"] for c in checks.values()) else "fail"
        out[name] = {"status": suite.status, "checks": checks,
                     "runtime": time.perf_counter() - t1}
    return {
        "config": config.name,
        "passed": all(s["status"] != "fail" for s in out.values()),
        "grid_points": len(lams) + len(flagged),
        "flagged_points": flagged,
        "suites": out,
        "runtime": time.perf_counter() - t0,
    }
