import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def prob_vectors(k: int):
    """Hypothesis strategy for probability vectors of length k."""
    return st.lists(st.floats(0.0, 1.0), min_size=k, max_size=k).filter(
        lambda w: sum(w) > 1e-3).map(lambda w: np.asarray(w) / sum(w))


def kernels(k: int):
    """Hypothesis strategy for k x k column-stochastic matrices."""
    return st.lists(prob_vectors(k), min_size=k, max_size=k).map(lambda cols: np.array(cols).T)


seeds = st.integers(0, 2**32 - 1)


ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def acceptance_log(request):
    """Per-session record of acceptance verdicts, printed in the terminal summary."""
    return request.config.stash.setdefault(ACCEPTANCE, {})


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash.get(ACCEPTANCE, {})
    if log:
        terminalreporter.section("acceptance criteria")
        for key in sorted(log):
            terminalreporter.write_line(log[key])
