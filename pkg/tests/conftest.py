import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from qtanner.gf2 import BitMatrix

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def naive_rank(dense) -> int:
    """Textbook elimination on a copy; independent of the packed implementation."""
    m = np.array(dense, dtype=np.uint8) % 2
    r = 0
    for c in range(m.shape[1]):
        hit = [i for i in range(r, m.shape[0]) if m[i, c]]
        if not hit:
            continue
        m[[r, hit[0]]] = m[[hit[0], r]]
        for i in range(m.shape[0]):
            if i != r and m[i, c]:
                m[i] ^= m[r]
        r += 1
    return r


@st.composite
def dense_matrices(draw, max_rows=12, max_cols=80, min_rows=0, min_cols=0):
    rows = draw(st.integers(min_rows, max_rows))
    cols = draw(st.integers(min_cols, max_cols))
    density = draw(st.sampled_from([0.1, 0.3, 0.5, 0.9]))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    return (rng.random((rows, cols)) < density).astype(np.uint8)


@st.composite
def bit_matrices(draw, **kw):
    d = draw(dense_matrices(**kw))
    return BitMatrix.from_dense(d) if d.shape[0] else BitMatrix.zeros(0, d.shape[1])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance criteria report: number -> (verdict, detail)
ACCEPTANCE: dict[int, tuple[str, str]] = {}


def record_criterion(number: int, passed: bool | None, detail: str) -> None:
    verdict = {True: "PASS", False: "FAIL", None: "INCONCLUSIVE"}[passed]
    ACCEPTANCE[number] = (verdict, detail)
    print(f"criterion {number}: {verdict}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        verdict, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:>2}: {verdict:<12} {detail}")
