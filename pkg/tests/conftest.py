import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from discordgame import linalg, qstate

ACCEPTANCE_LINES = []

# fixed example sequence: statistical checks must not flake between runs
settings.register_profile("repro", derandomize=True, deadline=None)
settings.load_profile("repro")


@pytest.fixture
def paper_rho():
    return qstate.make_paper_state()


@pytest.fixture
def bell():
    return qstate.bell_state()


def _from_ginibre(re, im):
    g = re + 1j * im
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


_entries = st.floats(-1, 1, allow_nan=False, width=64)


@st.composite
def density_matrices(draw, dim=4):
    """Random full- or low-rank density matrices from a Ginibre factor."""
    rank = draw(st.integers(1, dim))
    re = draw(hnp.arrays(float, (dim, rank), elements=_entries))
    im = draw(hnp.arrays(float, (dim, rank), elements=_entries))
    if np.linalg.norm(re) + np.linalg.norm(im) < 1e-3:
        re = re + np.eye(dim, rank)
    return _from_ginibre(re, im)


@st.composite
def separable_states(draw):
    """Convex mixtures of random product states."""
    terms = draw(st.integers(1, 4))
    weights = np.array(draw(st.lists(st.floats(0.05, 1), min_size=terms, max_size=terms)))
    weights = weights / weights.sum()
    rho = np.zeros((4, 4), dtype=complex)
    for w in weights:
        a = draw(density_matrices(2))
        b = draw(density_matrices(2))
        rho += w * linalg.kron(a, b)
    return rho


@st.composite
def bloch_angles(draw):
    theta = draw(st.floats(0, np.pi))
    phi = draw(st.floats(0, 2 * np.pi, exclude_max=True))
    return theta, phi


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
