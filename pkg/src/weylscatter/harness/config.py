"""Sweep configuration: TOML text -> validated :class:`SweepConfig`.

Matrices are written as nested arrays of ``[re, im]`` pairs::

    [coupling]
    type = "dissipative"
    D = [[[0.0, -0.5]]]

Coefficient profiles are tables: ``segments`` lists ``[length, value]``
pairs laid out from ``x_l``; ``samples`` lists ``[x, value]`` nodes with an
optional ``interpolation = "step" | "linear"``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from ..errors import NotDissipative, ParseError, ValidationError
from ..herglotz import (HerglotzFamily, const_interval_weyl_family, delta_weyl_family,
                        lead_tau_family)
from ..matkit import COND_MAX
from ..relspace import dissipative_split
from ..sturm import CoefficientProfile, SLProblem, sl_weyl_family

PROBLEM_TYPES = ("sl", "delta", "const_interval")
COUPLING_TYPES = ("dissipative", "leads", "energy_dep")
OUTPUT_KINDS = (
    "weyl", "s_dilation", "s_dissipative", "s_laxphillips", "s_coupled", "s_energydep",
    "char_function", "residual_adamyan_arov", "residual_theorem_main",
    "residual_relation_consistency", "eigenvalues",
)
LEAD_ONLY = {"s_coupled", "s_energydep", "residual_theorem_main"}

_ALLOWED = {
    "problem": {"type", "x_l", "x_r", "mass", "potential"},
    "coupling": {"type", "D", "v_l", "v_r", "m_l", "m_r", "mu_list"},
    "grid": {"min", "max", "count", "scale"},
    "guards": {"tol_pole", "cond_max", "skip_policy"},
    "output": {"kinds", "format", "path"},
}


@dataclass(frozen=True)
class ProblemSpec:
    type: str
    x_l: float = 0.0
    x_r: float = 1.0
    mass: CoefficientProfile | float | None = None
    potential: CoefficientProfile | float | None = None

    @property
    def dim(self) -> int:
        return 1 if self.type == "delta" else 2

    def sl_problem(self) -> SLProblem | None:
        if self.type == "sl":
            return SLProblem(self.x_l, self.x_r, self.mass, self.potential)
        if self.type == "const_interval":
            return SLProblem.constant(self.x_r - self.x_l, self.potential, self.mass, self.x_l)
        return None

    def weyl_family(self, tol_pole: float = 1e-10) -> HerglotzFamily:
        if self.type == "delta":
            return delta_weyl_family()
        if self.type == "const_interval":
            return const_interval_weyl_family(self.x_r - self.x_l, self.potential, self.mass, tol_pole)
        return sl_weyl_family(self.sl_problem(), tol_pole)


@dataclass(frozen=True)
class CouplingSpec:
    type: str
    D: tuple[tuple[complex, ...], ...] | None = None
    v_l: float = 0.0
    v_r: float = 0.0
    m_l: float = 0.5
    m_r: float = 0.5
    mu_list: tuple[float, ...] = ()

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.D, dtype=complex)

    def tau_family(self) -> HerglotzFamily:
        return lead_tau_family(self.v_l, self.v_r, self.m_l, self.m_r)


@dataclass(frozen=True)
class GridSpec:
    min: float
    max: float
    count: int
    scale: str = "linear"

    def points(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.min])
        if self.scale == "log":
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)


@dataclass(frozen=True)
class Guards:
    tol_pole: float = 1e-10
    cond_max: float = COND_MAX
    skip_policy: str = "skip_and_flag"


@dataclass(frozen=True)
class OutputSpec:
    kinds: tuple[str, ...] = ()
    format: str = "csv"
    path: str | None = None


@dataclass(frozen=True)
class SweepConfig:
    problem: ProblemSpec
    coupling: CouplingSpec
    grid: GridSpec
    guards: Guards = field(default_factory=Guards)
    output: OutputSpec = field(default_factory=OutputSpec)
    name: str = "config"


def _num(table: dict, key: str, section: str, default=None, positive: bool = False) -> float:
    if key not in table:
        if default is None:
            raise ValidationError(f"{section}.{key}", "missing")
        return default
    v = table[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ValidationError(f"{section}.{key}", f"expected a finite number, got {v!r}")
    if positive and v <= 0:
        raise ValidationError(f"{section}.{key}", "must be positive")
    return float(v)


def _pairs(v, field_name: str) -> tuple[tuple[float, float], ...]:
    if not isinstance(v, list) or not v:
        raise ValidationError(field_name, "expected a non-empty array of [a, b] pairs")
    out = []
    for item in v:
        if not (isinstance(item, list) and len(item) == 2 and all(isinstance(t, (int, float)) for t in item)):
            raise ValidationError(field_name, f"bad pair {item!r}")
        out.append((float(item[0]), float(item[1])))
    return tuple(out)


def _profile(v, name: str) -> CoefficientProfile:
    if not isinstance(v, dict):
        raise ValidationError(name, "expected a table with 'segments' or 'samples'")
    unknown = set(v) - {"segments", "samples", "interpolation"}
    if unknown:
        raise ValidationError(f"{name}.{sorted(unknown)[0]}", "unknown key")
    try:
        if "segments" in v:
            return CoefficientProfile.piecewise(_pairs(v["segments"], f"{name}.segments"))
        if "samples" in v:
            return CoefficientProfile.sampled(_pairs(v["samples"], f"{name}.samples"),
                                              v.get("interpolation", "step"))
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(name, str(exc)) from exc
    raise ValidationError(name, "needs 'segments' or 'samples'")


def _matrix(v, name: str) -> tuple[tuple[complex, ...], ...]:
    if not isinstance(v, list) or not v:
        raise ValidationError(name, "expected a nested array of [re, im] pairs")
    rows = []
    for row in v:
        if not isinstance(row, list) or len(row) != len(v):
            raise ValidationError(name, "matrix must be square")
        rows.append(tuple(complex(*_pairs([e], name)[0]) for e in row))
    return tuple(rows)


def _problem(t: dict) -> ProblemSpec:
    kind = t.get("type")
    if kind not in PROBLEM_TYPES:
        raise ValidationError("problem.type", f"expected one of {PROBLEM_TYPES}, got {kind!r}")
    if kind == "delta":
        return ProblemSpec("delta")
    x_l = _num(t, "x_l", "problem", 0.0)
    x_r = _num(t, "x_r", "problem")
    if not x_r > x_l:
        raise ValidationError("problem.x_r", "must exceed x_l")
    if kind == "const_interval":
        return ProblemSpec(kind, x_l, x_r, _num(t, "mass", "problem", positive=True),
                           _num(t, "potential", "problem", 0.0))
    mass = _profile(t.get("mass"), "problem.mass")
    pot = _profile(t.get("potential"), "problem.potential")
    spec = ProblemSpec(kind, x_l, x_r, mass, pot)
    try:
        spec.sl_problem()
    except ValueError as exc:
        raise ValidationError("problem", str(exc)) from exc
    return spec


def _coupling(t: dict, dim: int) -> CouplingSpec:
    kind = t.get("type")
    if kind not in COUPLING_TYPES:
        raise ValidationError("coupling.type", f"expected one of {COUPLING_TYPES}, got {kind!r}")
    if kind == "dissipative":
        D = _matrix(t.get("D"), "coupling.D")
        if len(D) != dim:
            raise ValidationError("coupling.D", f"must be {dim}x{dim} for this problem")
        try:
            dissipative_split(np.array(D, dtype=complex))
        except NotDissipative as exc:
            raise ValidationError("coupling.D", str(exc)) from exc
        return CouplingSpec(kind, D=D)
    if dim != 2:
        raise ValidationError("coupling.type", "lead coupling needs a two-endpoint problem")
    leads = dict(
        v_l=_num(t, "v_l", "coupling", 0.0), v_r=_num(t, "v_r", "coupling", 0.0),
        m_l=_num(t, "m_l", "coupling", 0.5, positive=True),
        m_r=_num(t, "m_r", "coupling", 0.5, positive=True),
    )
    mus: tuple[float, ...] = ()
    if kind == "energy_dep":
        raw = t.get("mu_list")
        if not isinstance(raw, list) or not raw:
            raise ValidationError("coupling.mu_list", "energy_dep coupling needs a non-empty list")
        mus = tuple(_num({"mu": m}, "mu", "coupling.mu_list") for m in raw)
    return CouplingSpec(kind, mu_list=mus, **leads)


def _grid(t: dict) -> GridSpec:
    lo, hi = _num(t, "min", "grid"), _num(t, "max", "grid")
    count = t.get("count")
    if isinstance(count, bool) or not isinstance(count, int) or count < 1:
        raise ValidationError("grid.count", "must be an integer >= 1")
    if not lo < hi:
        raise ValidationError("grid.min", "must be below grid.max")
    scale = t.get("scale", "linear")
    if scale not in ("linear", "log"):
        raise ValidationError("grid.scale", "must be 'linear' or 'log'")
    if scale == "log" and lo <= 0:
        raise ValidationError("grid.min", "log grids need min > 0")
    return GridSpec(lo, hi, count, scale)


def _guards(t: dict) -> Guards:
    policy = t.get("skip_policy", "skip_and_flag")
    if policy not in ("skip_and_flag", "abort"):
        raise ValidationError("guards.skip_policy", "must be 'skip_and_flag' or 'abort'")
    return Guards(_num(t, "tol_pole", "guards", 1e-10, positive=True),
                  _num(t, "cond_max", "guards", COND_MAX, positive=True), policy)


def _output(t: dict, problem: ProblemSpec, coupling: CouplingSpec) -> OutputSpec:
    kinds = t.get("kinds", [])
    if not isinstance(kinds, list):
        raise ValidationError("output.kinds", "expected an array of strings")
    for k in kinds:
        if k not in OUTPUT_KINDS:
            raise ValidationError("output.kinds", f"unknown output {k!r}")
        if k in LEAD_ONLY and coupling.type == "dissipative":
            raise ValidationError("output.kinds", f"{k!r} needs lead coupling")
        if k == "eigenvalues" and problem.type == "delta":
            raise ValidationError("output.kinds", "'eigenvalues' needs an interval problem")
    if len(set(kinds)) != len(kinds):
        raise ValidationError("output.kinds", "duplicate entries")
    fmt = t.get("format", "csv")
    if fmt not in ("csv", "jsonl"):
        raise ValidationError("output.format", "must be 'csv' or 'jsonl'")
    path = t.get("path")
    if path is not None and not isinstance(path, str):
        raise ValidationError("output.path", "must be a string")
    return OutputSpec(tuple(kinds), fmt, path)


_LOC = re.compile(r"line (\d+), column (\d+)")


def load_config(text: str, name: str = "config") -> SweepConfig:
    """Parse and validate a sweep configuration; fills every default."""
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = _LOC.search(str(exc))
        line, col = (int(m.group(1)), int(m.group(2))) if m else (None, None)
        raise ParseError(f"invalid TOML: {exc}", line, col) from exc
    for section in raw:
        if section not in _ALLOWED:
            raise ValidationError(section, "unknown section")
        if not isinstance(raw[section], dict):
            raise ValidationError(section, "expected a table")
        for key in raw[section]:
            if key not in _ALLOWED[section]:
                raise ValidationError(f"{section}.{key}", "unknown key")
    for section in ("problem", "coupling", "grid"):
        if section not in raw:
            raise ValidationError(section, "missing section")
    problem = _problem(raw["problem"])
    coupling = _coupling(raw["coupling"], problem.dim)
    grid = _grid(raw["grid"])
    guards = _guards(raw.get("guards", {}))
    output = _output(raw.get("output", {}), problem, coupling)
    return SweepConfig(problem, coupling, grid, guards, output, name)
