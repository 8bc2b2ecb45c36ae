import sys
import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from samplecurve import FourierSpec, make_fourier

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], print_blob=True
)
settings.load_profile("default")

GOLDEN_TAU = (np.sqrt(5.0) - 1.0) / 4.0


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def three_harmonic(period_T=1.0):
    """The 3-harmonic signal used for reconstruction checks; covering at d=3."""
    return make_fourier(FourierSpec(period_T, ((1, 0.0, 1.0), (2, 0.4, 0.0), (3, 0.0, 0.2))))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for i in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[i])
