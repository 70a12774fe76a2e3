"""Shared fixtures: cached solver runs and the acceptance summary hook."""

from __future__ import annotations

import numpy as np
import pytest

from nsg import (
    Grid,
    LPFilterBank,
    NormSpec,
    SolverConfig,
    besov_norm,
    random_divergence_free,
    step_solve,
)

RNG_SEED = 5


@pytest.fixture(scope="session")
def grid16():
    return Grid(2, 16)


@pytest.fixture(scope="session")
def grid32():
    return Grid(2, 32)


@pytest.fixture(scope="session")
def bank16(grid16):
    return LPFilterBank(grid16)


@pytest.fixture(scope="session")
def bank32(grid32):
    return LPFilterBank(grid32)


def _scaled_initial(grid, bank, target, sigma=3.0, seed=RNG_SEED):
    raw = random_divergence_free(grid, seed=seed, sigma=sigma)
    spec = NormSpec(0.5, 2.0, 2.0)
    return (target / besov_norm(raw, spec, bank)) * raw


@pytest.fixture(scope="session")
def small_initial(grid32, bank32):
    """Divergence-free random data rescaled to critical norm 0.05."""
    return _scaled_initial(grid32, bank32, 0.05)


@pytest.fixture(scope="session")
def small_run(grid32, small_initial):
    """One small-data solve to T=1, shared by the slower diagnostics tests."""
    config = SolverConfig(grid=grid32, T=1.0, steps=100, record_every=5)
    return step_solve(small_initial, config)


@pytest.fixture(scope="session")
def decay_run(grid32, bank32):
    """Small-data solve from a flatter (|k|^-2) spectrum, for decay scaling."""
    u0 = _scaled_initial(grid32, bank32, 0.05, sigma=2.0)
    config = SolverConfig(grid=grid32, T=1.0, steps=100, record_every=5)
    return step_solve(u0, config)


# --- acceptance criterion reporting -----------------------------------------

class AcceptanceLog:
    def __init__(self):
        self.lines: list[str] = []

    def record(self, criterion: str, passed: bool, detail: str) -> None:
        status = "PASS" if passed else "FAIL"
        self.lines.append(f"[{status}] {criterion}: {detail}")


@pytest.fixture(scope="session")
def acceptance(request):
    log = AcceptanceLog()
    request.config._acceptance_log = log
    return log


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = getattr(config, "_acceptance_log", None)
    if log is None or not log.lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in log.lines:
        terminalreporter.write_line(line)
