import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from artinian import linalg as la
from artinian.rings import ring_make

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SMALL_RINGS = ["F2", "F3", "F4", "F5", "F2[t]/t^2", "F3[t]/t^2", "F2[t]/t^3", "F4[t]/t^2",
               "Z/4", "Z/8", "Z/9", "Z/25", "W2(F4)", "W3(F3)"]


@st.composite
def rings(draw, specs=SMALL_RINGS):
    return ring_make(draw(st.sampled_from(specs)))


@st.composite
def ring_with_elements(draw, count=3, specs=SMALL_RINGS):
    A = draw(rings(specs))
    xs = [A(draw(st.integers(0, A.cardinality - 1))) for _ in range(count)]
    return A, xs


@st.composite
def invertible_matrices(draw, specs=SMALL_RINGS, sizes=(1, 2, 3)):
    A = draw(rings(specs))
    n = draw(st.sampled_from(sizes))
    while True:
        X = np.array(draw(st.lists(st.integers(0, A.cardinality - 1), min_size=n * n, max_size=n * n)),
                     dtype=la.INDEX).reshape(n, n)
        if A.unit_mask[la.det(A, X)[0]]:
            return A, X
        # nudge towards invertibility instead of rejecting
        X = X.copy()
        X[np.arange(n), np.arange(n)] = A.one_index
        if A.unit_mask[la.det(A, X)[0]]:
            return A, X


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
