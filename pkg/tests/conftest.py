import numpy as np
import pytest
from scipy.special import sph_harm_y

from nullmem.sphere.grid import SphereGrid
from nullmem.sphere.fields import ScalarField


def real_ylm(l, m, theta, phi):
    """Real orthonormal harmonic without Condon-Shortley phase, from scipy."""
    am = abs(m)
    y = sph_harm_y(l, am, theta, phi)
    if m == 0:
        return y.real
    cs = (-1.0) ** am
    return np.sqrt(2.0) * cs * (y.real if m > 0 else y.imag)


def ylm_field(grid, l, m):
    th, ph = np.meshgrid(grid.theta, grid.phi, indexing="ij")
    return ScalarField(grid, real_ylm(l, m, th, ph))


def rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    den = np.max(np.abs(b))
    return float(np.max(np.abs(a - b)) / (den if den > 0 else 1.0))


@pytest.fixture(scope="session")
def grid16():
    return SphereGrid(16)


@pytest.fixture(scope="session")
def grid8():
    return SphereGrid(8)


# one line per acceptance criterion, repeated at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
