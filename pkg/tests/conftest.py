import numpy as np
import pytest

from MagnonFisher.dynamics import gaussian_state
from MagnonFisher.fisher import sensitivity
from MagnonFisher.params import SystemParams, two_pi_mhz


@pytest.fixture(scope="session")
def baseline():
    return SystemParams.baseline()


@pytest.fixture(scope="session")
def baseline_state(baseline):
    return gaussian_state(baseline)


@pytest.fixture(scope="session")
def baseline_sens(baseline, baseline_state):
    return sensitivity(baseline, baseline_state, "analytic")


@pytest.fixture
def bistable():
    """J = 0 and a strongly red magnon detuning put P_l = 0.8 W inside the hysteresis window."""
    return SystemParams.baseline(J=0.0, delta_m=two_pi_mhz(-100.0), P_l=0.8)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
