import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from memtrees.schedules import (
    CustomJ,
    Macroscopic,
    Mesoscopic,
    Sarrt,
    WindowlessScheduleError,
    uniform_quantile,
    window,
)


def test_window_macroscopic_examples():
    assert window(Macroscopic(0.5), 10) == (5, 10)
    assert window(Macroscopic(0.5), 1) == (1, 1)  # clamped to 1


def test_window_mesoscopic_example():
    # 2 - floor(sqrt(2)) = 1
    assert window(Mesoscopic(0.5), 2) == (1, 2)


def test_window_rejects_sarrt():
    s = Sarrt(uniform_quantile(0.0, 1.0))
    with pytest.raises(WindowlessScheduleError, match="windowless"):
        window(s, 5)


@pytest.mark.parametrize("theta", [0.1, 0.3, 0.5, 0.9])
def test_macroscopic_j_matches_direct_floor(theta):
    sched = Macroscopic(theta)
    for n in list(range(1, 2000)) + [10**6, 10**7, 123456789]:
        lo, hi = window(sched, n)
        assert hi == n
        assert lo == max(1, int(np.floor(np.longdouble(theta) * n)))


@pytest.mark.parametrize("beta", [0.25, 0.5, 0.75])
def test_mesoscopic_j_monotone_and_in_range(beta):
    sched = Mesoscopic(beta)
    prev = 1
    for n in range(1, 3000):
        lo, hi = window(sched, n)
        assert 1 <= lo <= hi == n
        j = n - lo if lo > 1 else None
        assert lo >= prev  # j(n) = n - floor(n**beta) is non-decreasing
        prev = lo


@pytest.mark.parametrize("beta", [0.25, 0.5, 0.75, 0.9])
def test_lo_block_agrees_with_scalar(beta):
    sched = Mesoscopic(beta)
    m = np.arange(1, 5000, dtype=np.int64)
    lo = sched.lo_block(m)
    for i in (0, 1, 2, 100, 999, 4998):
        assert lo[i] == sched.window_lo(int(m[i]))


def test_lo_block_agrees_with_scalar_macro():
    sched = Macroscopic(0.3)
    m = np.arange(1, 5000, dtype=np.int64)
    lo = sched.lo_block(m)
    assert all(lo[i] == sched.window_lo(int(m[i])) for i in range(0, 4999, 7))


def test_mesoscopic_perfect_powers_floor_exactly():
    # m = k**2 must give floor(m**0.5) = k, not k-1, at every scale
    sched = Mesoscopic(0.5)
    for k in (2, 3, 10, 100, 1000, 31623):
        m = k * k
        assert window(sched, m)[0] == max(1, m - k)


@pytest.mark.parametrize("bad", [0.0, 1.0, -0.5, 1.5])
def test_parameter_validation(bad):
    with pytest.raises(ValueError):
        Macroscopic(bad)
    with pytest.raises(ValueError):
        Mesoscopic(bad)


def test_custom_j_validation():
    sched = CustomJ(lambda n: n + 1)
    with pytest.raises(ValueError):
        window(sched, 5)


def test_sarrt_quantile_validation():
    with pytest.raises(ValueError):
        Sarrt(lambda u: np.asarray(u) * 2.0)


@given(
    theta=st.floats(min_value=0.01, max_value=0.99),
    n=st.integers(min_value=1, max_value=10**9),
)
@settings(max_examples=200, deadline=None)
def test_window_always_legal(theta, n):
    lo, hi = window(Macroscopic(theta), n)
    assert 1 <= lo <= hi == n


@given(beta=st.floats(min_value=0.05, max_value=0.95), n=st.integers(min_value=1, max_value=10**9))
@settings(max_examples=200, deadline=None)
def test_mesoscopic_window_always_legal(beta, n):
    lo, hi = window(Mesoscopic(beta), n)
    assert 1 <= lo <= hi == n
