from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile(
    "repo", derandomize=True, deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


@st.composite
def complex_matrices(draw, n=None, max_n=4, bound=3.0):
    n = n or draw(st.integers(1, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    return bound * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2 * n)


def hermitian(a: np.ndarray) -> np.ndarray:
    return (a + a.conj().T) / 2


def psd(a: np.ndarray, shift: float = 0.0) -> np.ndarray:
    return a @ a.conj().T + shift * np.eye(a.shape[0])


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)


# acceptance criteria record one line each; printed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
