import numpy as np
import pytest
from hypothesis import settings, strategies as st

from conelag.jordan import ConeStructure

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

SYM2 = ConeStructure(2, 1)
HERM2 = ConeStructure(2, 2)
LINE = ConeStructure(1, 1)

eig = st.floats(0.3, 2.0)
angle = st.floats(0.0, np.pi)
phase = st.floats(0.0, 2 * np.pi)


def rotation(theta, phi=0.0, multiplicity=1):
    c, s = np.cos(theta), np.sin(theta)
    if multiplicity == 1:
        return np.array([[c, -s], [s, c]])
    return np.array([[c, -s * np.exp(-1j * phi)], [s * np.exp(1j * phi), c]])


@st.composite
def cone_points(draw, multiplicity=1):
    ev = np.array([draw(eig), draw(eig)])
    k = rotation(draw(angle), draw(phase), multiplicity)
    x = k @ np.diag(ev) @ k.conj().T
    x = 0.5 * (x + x.conj().T)
    return np.real(x) if multiplicity == 1 else x


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for key in sorted(lines):
            terminalreporter.write_line(lines[key])
