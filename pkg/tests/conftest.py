import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile("repo", derandomize=True, max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


def ginibre(rng, n, m=None):
    m = n if m is None else m
    return rng.normal(size=(n, m)) + 1j * rng.normal(size=(n, m))


def hermitian(rng, n):
    G = ginibre(rng, n)
    return (G + G.conj().T) / 2


def unitary(rng, n):
    Q, R = np.linalg.qr(ginibre(rng, n))
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def unit(n, i, j):
    E = np.zeros((n, n), dtype=np.complex128)
    E[i, j] = 1
    return E


@st.composite
def complex_matrices(draw, min_n=2, max_n=8, hermitian_only=False):
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    return hermitian(rng, n) if hermitian_only else ginibre(rng, n)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
