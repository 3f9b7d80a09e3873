import numpy as np
import pytest

from psodisagg.model import DeviceLibrary, DeviceProfile

_acceptance = {}


@pytest.fixture
def simple_profile():
    return DeviceProfile(0, [[4, 0, 0, 0, 0, 0], [3, 0, 0, 0, 0, 0]], [2, 0, 0, 0, 0, 0], 2)


@pytest.fixture
def simple_library(simple_profile):
    return DeviceLibrary((simple_profile,))


def random_integer_library(rng, n_devices, max_tau=8):
    """Library with small integer powers, so every sum is exact in floating point."""
    profiles = []
    for i in range(n_devices):
        tau = int(rng.integers(0, max_tau + 1))
        transient = rng.integers(-50, 200, size=(tau, 6)).astype(float)
        steady = rng.integers(0, 150, size=6).astype(float)
        profiles.append(DeviceProfile(i, transient, steady, tau))
    return DeviceLibrary(tuple(profiles))


def random_events(rng, T, M, n_events):
    S = np.zeros((T, M), dtype=np.int8)
    cells = rng.choice(T * M, size=min(n_events, T * M), replace=False)
    S.flat[cells] = rng.choice([-1, 1], size=cells.size)
    return S


def pytest_runtest_logreport(report):
    if "test_acceptance" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        _acceptance[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, outcome in _acceptance.items():
        name = nodeid.split("::")[-1]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}")
