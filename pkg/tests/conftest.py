import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from leachsim import ScenarioConfig, run

settings.register_profile("repo", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

TABLE2 = dict(e_elec_tx=50e-9, e_elec_rx=50e-9, eps_fs=100e-12, e_da=50e-12)


@pytest.fixture(scope="session", autouse=True)
def warm_jit():
    """Compile (or load cached) kernels once so timing-sensitive tests are fair."""
    for p in ("Leach", "LeachC", "SLeachD", "MultiHopLeach", "MLeach", "LeachSC"):
        run(ScenarioConfig(protocol=p, rounds_max=3), seed=0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(results):
        terminalreporter.write_line(results[num])
