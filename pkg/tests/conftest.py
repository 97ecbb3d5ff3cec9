import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from qspdc.crystal import PumpSpec, bbo
from qspdc.dispersion import QuadraticModel, TypeIModel
from qspdc.kernels import QSModel

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def bbo_model():
    return TypeIModel(bbo(2000.0), 0.515)


@pytest.fixture(scope="session")
def bbo_summary(bbo_model):
    return bbo_model.summary()


@pytest.fixture(scope="session")
def pump():
    return PumpSpec(0.515, 150.0, 150.0, 1.0)


@pytest.fixture(scope="session")
def qs(bbo_summary, pump):
    return QSModel(bbo_summary, pump)


@pytest.fixture(scope="session")
def quad(bbo_summary):
    return QuadraticModel.from_scales(bbo_summary.omega_gvd, bbo_summary.q_diff, 2000.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE: dict[int, list[tuple[bool, str]]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        rows = ACCEPTANCE[num]
        mark = "PASS" if all(ok for ok, _ in rows) else "FAIL"
        terminalreporter.write_line(f"criterion {num:2d}: {mark}  " + "; ".join(d for _, d in rows))
