"""Configuration, sweeps, verification suites and output."""

from .config import SweepConfig, load_config
from .emit import emit, render
from .presets import PRESETS, preset
from .sweep import SweepRow, run_sweep
from .verify import SUITES, verify_suite

__all__ = ["SweepConfig", "load_config", "emit", "render", "PRESETS", "preset",
           "SweepRow", "run_sweep", "SUITES", "verify_suite"]
