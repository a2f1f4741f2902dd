import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from opdiam.errors import DimensionMismatch, EmptyInput, NonHermitian, NonSquare, ParseError
from opdiam.linalg import (block_apply, dagger, hermitian_eig, im_part, jacobi_eigh, kron,
                           matrix_from_json, matrix_to_json, min_enclosing_circle,
                           operator_norm, re_part, trace_norm)

from conftest import complex_matrices, hermitian, unit, unitary


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_eig_diagonal_and_pauli(method):
    assert np.allclose(hermitian_eig(np.diag([3, -1, 2]), method=method).values, [-1, 2, 3])
    assert np.allclose(hermitian_eig([[0, 1], [1, 0]], method=method).values, [-1, 1])


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_eig_residual_and_orthonormality(rng, method):
    for _ in range(10):
        A = hermitian(rng, 8)
        d = hermitian_eig(A, method=method)
        resid = np.linalg.norm(A @ d.vectors - d.vectors * d.values, axis=0)
        assert resid.max() <= 1e-10 * np.linalg.norm(A, 2)
        assert np.allclose(d.vectors.conj().T @ d.vectors, np.eye(8), atol=1e-10)
        assert np.all(np.diff(d.values) >= 0)


def test_jacobi_agrees_with_lapack(rng):
    for n in (1, 2, 5, 16, 32):
        A = hermitian(rng, n)
        assert np.allclose(jacobi_eigh(A).values, np.linalg.eigvalsh(A), atol=1e-10)


def test_eig_errors():
    with pytest.raises(NonHermitian):
        hermitian_eig([[0, 1], [0, 0]])
    with pytest.raises(NonSquare):
        hermitian_eig(np.zeros((2, 3)))


def test_eigenvalue_sum_is_trace(rng):
    for n in (2, 8, 32):
        A = hermitian(rng, n)
        w = hermitian_eig(A).values
        assert abs(w.sum() - np.trace(A).real) <= 1e-9 * np.linalg.norm(A, 2) * n


def test_operator_norm_examples(rng):
    assert operator_norm(unit(2, 0, 1)) == pytest.approx(1.0, abs=1e-15)
    assert operator_norm([[0, 2], [0, 0]]) == pytest.approx(2.0, abs=1e-15)
    for n in (2, 5, 9):
        assert operator_norm(unitary(rng, n)) == pytest.approx(1.0, abs=1e-12)


@given(complex_matrices(max_n=6), st.integers(0, 2**32 - 1))
def test_operator_norm_unitarily_invariant(A, seed):
    r = np.random.default_rng(seed)
    U, V = unitary(r, len(A)), unitary(r, len(A))
    assert operator_norm(U @ A @ V) == pytest.approx(operator_norm(A), rel=1e-9)


def test_trace_norm_of_unit():
    assert trace_norm(unit(3, 0, 2)) == pytest.approx(1.0)


def test_parts_and_kron():
    assert np.allclose(re_part([[0, 1], [0, 0]]), [[0, 0.5], [0.5, 0]])
    H = np.array([[2, 1j], [-1j, 1]])
    assert np.allclose(im_part(H), 0)
    assert np.allclose(kron(np.eye(2), np.eye(2)), np.eye(4))
    with pytest.raises(NonSquare):
        re_part(np.zeros((2, 3)))


@given(complex_matrices())
def test_dagger_and_reconstruction(A):
    assert np.array_equal(dagger(dagger(A)), A)
    assert np.allclose(re_part(A) + 1j * im_part(A), A, atol=1e-14)
    for P in (re_part(A), im_part(A)):
        assert np.allclose(P, P.conj().T)


def test_block_apply_transposes_blocks():
    X = np.arange(16).reshape(4, 4).astype(complex)
    Y = block_apply(lambda B: B.T, X, 2)
    assert np.array_equal(Y[:2, 2:], X[:2, 2:].T)
    with pytest.raises(DimensionMismatch):
        block_apply(lambda B: B, X, 3)


def test_circle_examples():
    w = np.exp(2j * np.pi / 3)
    c = min_enclosing_circle([1, w, w * w])
    assert abs(c.center) < 1e-12 and c.radius == pytest.approx(1.0, abs=1e-12)
    c = min_enclosing_circle([2 + 1j])
    assert c.center == 2 + 1j and c.radius == 0
    c = min_enclosing_circle([0, 2])
    assert c.center == pytest.approx(1) and c.radius == pytest.approx(1)
    with pytest.raises(EmptyInput):
        min_enclosing_circle([])


def _brute_circle(pts):
    # smallest circle through two or three points that contains all points
    if len(pts) == 1:
        return 0.0
    best = math.inf
    cands = []
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            cands.append(((pts[i] + pts[j]) / 2, abs(pts[i] - pts[j]) / 2))
            for k in range(j + 1, len(pts)):
                a, b, c = pts[i], pts[j], pts[k]
                d = 2 * ((b - a).real * (c - a).imag - (b - a).imag * (c - a).real)
                if abs(d) < 1e-12:
                    continue
                b2, c2 = abs(b - a) ** 2, abs(c - a) ** 2
                ux = ((c - a).imag * b2 - (b - a).imag * c2) / d
                uy = ((b - a).real * c2 - (c - a).real * b2) / d
                ctr = a + complex(ux, uy)
                cands.append((ctr, abs(ctr - a)))
    for ctr, r in cands:
        if all(abs(p - ctr) <= r + 1e-9 for p in pts):
            best = min(best, r)
    return best


@given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                min_size=2, max_size=9))
def test_circle_matches_brute_force_and_jung(points):
    c = min_enclosing_circle(points)
    assert all(c.contains(p, 1e-9) for p in points)
    pts = np.asarray(points)
    diam = np.abs(pts[:, None] - pts[None, :]).max()
    assert c.radius <= diam / math.sqrt(3) + 1e-12 * max(1.0, diam)
    assert c.radius == pytest.approx(_brute_circle(list(np.unique(pts))), abs=1e-7)


def test_json_round_trip_is_bit_exact(rng):
    A = rng.normal(size=(3, 4)) + 1j * rng.normal(size=(3, 4))
    back = matrix_from_json(json.loads(json.dumps(matrix_to_json(A))))
    assert np.array_equal(back, A)
    real = matrix_to_json(np.eye(2))
    assert "im" not in real and np.array_equal(matrix_from_json(real), np.eye(2))


@pytest.mark.parametrize("obj", [
    [1, 2], {"rows": 2, "cols": 2}, {"rows": 0, "cols": 1, "re": []},
    {"rows": 2, "cols": 2, "re": [[1, 2], [3]]}, {"rows": 1, "cols": 1, "re": [["x"]]},
])
def test_json_errors(obj):
    with pytest.raises(ParseError):
        matrix_from_json(obj)
