import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from magnoep import PhysicalParams, ThreeModeModel, TwoModeModel

settings.register_profile(
    "default", deadline=None, max_examples=150, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

rates = st.floats(-0.3, 0.3, allow_nan=False)
couplings = st.floats(0.0, 0.4, allow_nan=False)
carriers = st.floats(0.5, 2.0, allow_nan=False)


@st.composite
def two_mode_models(draw):
    return TwoModeModel(draw(carriers), draw(rates), draw(rates), draw(couplings))


@st.composite
def pseudo_hermitian_models(draw):
    return ThreeModeModel.pseudo_hermitian(
        omega_2=draw(carriers),
        delta=draw(st.floats(-0.5, 0.5)),
        gamma_1=draw(st.floats(-0.3, 0.3).filter(lambda g: abs(g) > 1e-3)),
        j=draw(couplings),
    )


@st.composite
def three_mode_models(draw):
    return ThreeModeModel(
        delta_m=draw(carriers),
        kappa_m=draw(rates),
        g_m_lin=draw(couplings),
        omega_1=draw(carriers),
        gamma_1=draw(rates),
        omega_2=draw(carriers),
        j=draw(couplings),
    )


@st.composite
def physical_params(draw):
    return PhysicalParams(
        delta_a=draw(st.floats(-1, 1)),
        delta_m=draw(st.floats(-1, 1)),
        kappa_a=draw(st.floats(0.5, 5.0)),
        kappa_m=draw(st.floats(-5.0, -0.5) | st.floats(0.5, 5.0)),
        g_a_lin=draw(couplings),
        g_m_lin=draw(couplings),
        omega_1=draw(carriers),
        omega_2=draw(carriers),
        j=draw(couplings),
    )


def multiset_distance(a, b):
    """Largest distance after greedily pairing two equal-size complex multisets."""
    a, b = list(np.asarray(a, dtype=complex)), list(np.asarray(b, dtype=complex))
    worst = 0.0
    for x in a:
        k = int(np.argmin([abs(x - y) for y in b]))
        worst = max(worst, abs(x - b.pop(k)))
    return worst


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is not None and acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(acceptance.RESULTS, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
