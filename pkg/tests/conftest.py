import numpy as np
import pytest

from fracbeam import DofLayout, FracParams, Mesh, QuadRule, build_basis
from fracbeam.config import BeamConfig


@pytest.fixture(scope="session")
def default_config():
    return BeamConfig()


@pytest.fixture(scope="session")
def small_basis():
    mesh = Mesh(1.0, 10)
    return build_basis(mesh, DofLayout(mesh), QuadRule(4), FracParams(0.8, 0.2))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance_report(request):
    """Print and record one ``PASS``/``FAIL`` line for an acceptance criterion."""

    def report(number, title, passed, detail):
        line = f"criterion {number} {title}: {'PASS' if passed else 'FAIL'} ({detail})"
        print(line)
        request.config.stash.setdefault(_ACCEPTANCE, []).append(line)
        return line

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
