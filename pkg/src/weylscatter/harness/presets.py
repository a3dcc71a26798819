"""Built-in configurations, stored as TOML text so they go through ``load_config``."""

from __future__ import annotations

from ..errors import ValidationError
from .config import SweepConfig, load_config

# fixed "random" barrier shared by the dissipative and lead presets
_BARRIER = """
[problem]
type = "sl"
x_l = 0.0
x_r = 3.0
mass = { segments = [[0.9, 0.5], [1.2, 0.35], [0.9, 0.5]] }
potential = { segments = [[0.9, 0.0], [1.2, 1.7], [0.9, -0.4]] }
"""

PRESETS: dict[str, str] = {
    "delta": """
[problem]
type = "delta"

[coupling]
type = "dissipative"
D = [[[0.0, -0.5]]]

[grid]
min = 0.01
max = 100.0
count = 50
scale = "log"

[output]
kinds = ["weyl", "s_dilation", "s_dissipative", "s_laxphillips", "char_function",
         "residual_adamyan_arov", "residual_relation_consistency"]
""",
    "buslaev_fomin_free": """
[problem]
type = "const_interval"
x_l = 0.0
x_r = 3.141592653589793
mass = 0.5
potential = 0.0

[coupling]
type = "leads"
v_l = 0.0
v_r = 0.0
m_l = 0.5
m_r = 0.5

[grid]
min = 0.01
max = 0.9
count = 100

[output]
kinds = ["s_coupled", "s_energydep", "residual_theorem_main", "residual_adamyan_arov"]
""",
    "dissipative_barrier": _BARRIER + """
[coupling]
type = "dissipative"
D = [[[-0.6, -0.4], [0.0, 0.0]], [[0.0, 0.0], [-0.8, -0.3]]]

[grid]
min = 0.05
max = 6.0
count = 200

[output]
kinds = ["s_dilation", "s_dissipative", "s_laxphillips", "char_function",
         "residual_adamyan_arov", "residual_relation_consistency", "eigenvalues"]
""",
    "transmitting_barrier": _BARRIER + """
[coupling]
type = "leads"
v_l = 0.0
v_r = 0.2
m_l = 0.5
m_r = 0.4

[grid]
min = 0.05
max = 6.0
count = 200

[output]
kinds = ["s_coupled", "s_energydep", "s_dissipative", "s_laxphillips", "char_function",
         "residual_theorem_main", "residual_adamyan_arov", "residual_relation_consistency"]
""",
    "free_interval_poles": """
[problem]
type = "const_interval"
x_l = 0.0
x_r = 3.141592653589793
mass = 0.5
potential = 0.0

[coupling]
type = "dissipative"
D = [[[0.0, -1.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, -1.0]]]

[grid]
min = 0.5
max = 1.5
count = 11

[output]
kinds = ["weyl", "s_dilation", "eigenvalues"]
""",
}

DESCRIPTIONS = {
    "delta": "point interaction M = i/(2 sqrt(lambda)) with D = -i/2, log grid on [0.01, 100]",
    "buslaev_fomin_free": "free interval (0, pi), m = 1/2, V = 0, coupled to equal free leads",
    "dissipative_barrier": "3-segment barrier with diagonal dissipative boundary matrix",
    "transmitting_barrier": "3-segment barrier coupled to leads with different offsets and masses",
    "free_interval_poles": "free interval (0, pi) on a grid through the Dirichlet eigenvalue 1",
}


def preset_text(name: str) -> str:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValidationError("preset", f"unknown preset {name!r}; have {sorted(PRESETS)}") from None


def preset(name: str) -> SweepConfig:
    return load_config(preset_text(name), name)
