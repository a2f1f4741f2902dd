import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from opdiam.errors import NonSquare, NotNormal
from opdiam.linalg import operator_norm
from opdiam.numrange import (centering_constants, jung_circle, numerical_diameter,
                             numerical_radius, range_sample, spectral_diameter,
                             support_function)

from conftest import complex_matrices, ginibre, hermitian, unit, unitary

OMEGA = np.exp(2j * np.pi / 3)
CUBE = np.diag([1, OMEGA, OMEGA ** 2])


def diam(E):
    return numerical_diameter(E).value


def test_support_function_examples():
    assert support_function(np.eye(2), 0.0) == pytest.approx(1.0)
    for t in np.linspace(0, 2 * np.pi, 7):
        assert support_function(unit(2, 0, 1), t) == pytest.approx(0.5, abs=1e-12)
    assert support_function(np.diag([2.0, -3.0]), 0.0) == pytest.approx(2.0)
    with pytest.raises(NonSquare):
        support_function(np.zeros((2, 3)), 0.0)


def test_support_function_width_is_spread(rng):
    E = ginibre(rng, 5)
    t = 0.7
    w = np.linalg.eigvalsh((np.exp(1j * t) * E + np.exp(-1j * t) * E.conj().T) / 2)
    assert support_function(E, t) + support_function(E, t + np.pi) == pytest.approx(w[-1] - w[0])


def test_projection_identity(rng):
    E = ginibre(rng, 4)
    assert support_function(E, 0.0) == pytest.approx(np.linalg.eigvalsh((E + E.conj().T) / 2)[-1])


def test_diameter_examples(rng):
    for _ in range(20):
        n = int(rng.integers(2, 9))
        u, v = ginibre(rng, n, 1)[:, 0], ginibre(rng, n, 1)[:, 0]
        u, v = u / np.linalg.norm(u), v / np.linalg.norm(v)
        assert diam(np.outer(u, v.conj())) == pytest.approx(1.0, abs=1e-8)
    assert diam((2 - 1j) * np.eye(3)) == 0.0
    assert diam(CUBE) == pytest.approx(math.sqrt(3), abs=1e-8)


def test_diameter_witness_pair(rng):
    for _ in range(10):
        E = ginibre(rng, 6)
        res = numerical_diameter(E)
        p, q = res.witness_points(E)
        assert abs(p - q) >= res.value * (1 - 1e-9)


def test_hermitian_branch_is_exact():
    E = np.diag([5.0, 2.0, -1.0])
    res = numerical_diameter(E)
    assert res.value == 6.0 and res.theta_star == 0.0


def test_radius_examples(rng):
    assert numerical_radius(unit(2, 0, 1)) == pytest.approx(0.5, abs=1e-12)
    assert numerical_radius(np.diag([-3.0, 1.0])) == pytest.approx(3.0)
    assert numerical_radius(unitary(rng, 5)) == pytest.approx(1.0, abs=1e-8)


def test_spectral_diameter():
    assert spectral_diameter(CUBE) == pytest.approx(math.sqrt(3))
    assert spectral_diameter(np.diag([5.0, 2.0, -1.0])) == pytest.approx(6.0)
    assert spectral_diameter(3 * np.eye(2)) == 0.0
    with pytest.raises(NotNormal):
        spectral_diameter(unit(2, 0, 1))


def test_centering_examples():
    c = centering_constants(np.diag([0.0, 4.0]))
    assert c.k_re == pytest.approx(2.0)
    assert np.linalg.norm(np.diag([0.0, 4.0]) - c.k_re * np.eye(2), 2) == pytest.approx(2.0)
    c = centering_constants(CUBE)
    assert abs(c.c_jung) < 1e-9
    assert jung_circle(CUBE).radius / diam(CUBE) == pytest.approx(1 / math.sqrt(3), abs=1e-6)
    c = centering_constants(np.eye(2))
    assert (c.k_re, c.k_im) == (1.0, 0.0) and abs(c.c_jung - 1) < 1e-12


@given(complex_matrices(max_n=8))
def test_centering_inequalities(E):
    c = centering_constants(E)
    d = diam(E)
    assert operator_norm(E - complex(c.k_re, c.k_im) * np.eye(len(E))) <= d * (1 + 1e-8) + 1e-12
    r = numerical_radius(E - c.c_jung * np.eye(len(E)))
    assert r <= d / math.sqrt(3) * (1 + 1e-6) + 1e-6


@given(complex_matrices(max_n=12, hermitian_only=True))
def test_hermitian_centering(E):
    c = centering_constants(E)
    assert operator_norm(E - c.k_re * np.eye(len(E))) == pytest.approx(diam(E) / 2, abs=1e-8)


@given(complex_matrices(max_n=8), st.complex_numbers(max_magnitude=5, allow_nan=False,
                                                      allow_infinity=False))
def test_seminorm_properties(E, c):
    d = diam(E)
    tol = 1e-8 * max(1.0, d)
    assert diam(E + c * np.eye(len(E))) == pytest.approx(d, abs=tol)
    assert diam(E.conj().T) == pytest.approx(d, abs=tol)
    assert diam(c * E) == pytest.approx(abs(c) * d, abs=tol * max(1, abs(c)))
    F = np.roll(E, 1, axis=0)
    assert diam(E + F) <= d + diam(F) + 1e-8 * (d + diam(F))
    r = numerical_radius(E)
    assert d <= 2 * operator_norm(E) + tol and d <= 2 * r + tol
    assert r <= operator_norm(E) + tol and operator_norm(E) <= 2 * r + tol
    assert numerical_radius(E.conj().T) == pytest.approx(r, rel=1e-8)


@given(st.integers(2, 8), st.integers(0, 2**32 - 1))
def test_normal_diameter_is_spectral(n, seed):
    r = np.random.default_rng(seed)
    U = unitary(r, n)
    N = U @ np.diag(r.normal(size=n) + 1j * r.normal(size=n)) @ U.conj().T
    assert diam(N) == pytest.approx(spectral_diameter(N), abs=1e-8 * max(1, diam(N)))


def test_range_sample_invariants(rng):
    for E in (ginibre(rng, 4), hermitian(rng, 3), unit(3, 0, 2)):
        s = range_sample(E, 64)
        assert len(s.thetas) == len(s.support) == len(s.boundary) == 64
        proj = np.real(np.exp(1j * s.thetas)[None, :] * s.boundary[:, None])
        assert np.all(proj <= s.support[None, :] + 1e-10)


def test_identity_range_is_a_point():
    s = range_sample(np.eye(2), 16)
    assert np.allclose(s.boundary, 1.0)
