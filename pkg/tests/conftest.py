import numpy as np
import pytest

from deadleaves.grains import GrainLaw1D, GrainLaw2D

@pytest.fixture
def rng():
    return np.random.default_rng(12345)

@pytest.fixture
def unit_law():
    return GrainLaw1D.fixed_length(1.0)

@pytest.fixture
def disk_law():
    return GrainLaw2D.disk(1.0)

@pytest.fixture
def square_law():
    return GrainLaw2D.square(1.0)

def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
