import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def blobs(seed, center_scale=2.0, spread=1.0, noise=3.0, n_per=50, n_inf=5, n_noise=45):
    """Three Gaussian clusters living in the first ``n_inf`` features.

    Returns ``(X, y)`` with X feature-major (d x N).
    """
    rng = np.random.default_rng(seed)
    y = np.repeat(np.arange(3), n_per)
    centers = rng.normal(0.0, center_scale, size=(3, n_inf))
    inf = centers[y] + rng.normal(0.0, spread, size=(3 * n_per, n_inf))
    junk = rng.normal(0.0, noise, size=(3 * n_per, n_noise))
    return np.hstack([inf, junk]).T, y


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def fixture_30x12():
    """The fixed 30-instance, 12-feature selection fixture."""
    rng = np.random.default_rng(2024)
    y = np.repeat(np.arange(3), 10)
    centers = rng.normal(0.0, 3.0, size=(3, 4))
    inf = centers[y] + rng.normal(size=(30, 4))
    return np.hstack([inf, rng.normal(size=(30, 8))]).T


# -- acceptance reporting ----------------------------------------------------------

ACCEPTANCE = {}


class Criterion:
    """Context manager recording one acceptance criterion's verdict.

    Any exception inside the block (including a failed assert) marks it FAIL.
    """

    def __init__(self, number, title):
        self.number, self.title, self.detail = number, title, ""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        ok = exc_type is None
        if not ok and not self.detail:
            self.detail = f"{exc_type.__name__}: {exc}"
        ACCEPTANCE[self.number] = (ok, self.title, self.detail)
        return False


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, title, detail = ACCEPTANCE[num]
        line = f"criterion {num:2d} {'PASS' if ok else 'FAIL'}  {title}"
        terminalreporter.write_line(line + (f"  [{detail}]" if detail else ""))
