"""Dense complex matrix primitives.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Everything here
is a pure function of its inputs.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyInput, NonHermitian, NonSquare, ParseError

ATOL = 1e-10
RTOL = 1e-9


@dataclass(frozen=True)
class EigenDecomposition:
    values: np.ndarray  # ascending, real
    vectors: np.ndarray  # columns are orthonormal eigenvectors


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float

    def contains(self, z: complex, atol: float = 1e-12) -> bool:
        return abs(z - self.center) <= self.radius + atol


def as_matrix(A) -> np.ndarray:
    M = np.asarray(A, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] == 0 or M.shape[1] == 0:
        raise DimensionMismatch(f"expected a nonempty 2-d matrix, got shape {M.shape}")
    return M


def as_square(A) -> np.ndarray:
    M = as_matrix(A)
    if M.shape[0] != M.shape[1]:
        raise NonSquare(f"expected a square matrix, got shape {M.shape}")
    return M


def dagger(A) -> np.ndarray:
    return as_matrix(A).conj().T


def re_part(A) -> np.ndarray:
    """Hermitian real part ``(A + A*)/2``."""
    M = as_square(A)
    return (M + M.conj().T) / 2


def im_part(A) -> np.ndarray:
    """Hermitian imaginary part ``(A - A*)/(2i)``."""
    M = as_square(A)
    return (M - M.conj().T) / 2j


def hermitian_defect(A) -> float:
    M = as_square(A)
    return float(np.max(np.abs(M - M.conj().T)))


def is_hermitian(A, atol: float = ATOL) -> bool:
    return hermitian_defect(A) <= atol


def kron(A, B) -> np.ndarray:
    return np.kron(as_matrix(A), as_matrix(B))


def block_apply(f: Callable[[np.ndarray], np.ndarray], X, block: int) -> np.ndarray:
    """Apply ``f`` to every ``block x block`` block of the square block matrix ``X``.

    ``X`` is read as ``[X_ab]`` with the block index outermost; the result is
    ``[f(X_ab)]`` with the same outer layout.
    """
    M = as_square(X)
    k, rem = divmod(M.shape[0], block)
    if rem or block <= 0:
        raise DimensionMismatch(f"size {M.shape[0]} is not a multiple of block {block}")
    rows = []
    for a in range(k):
        row = [np.asarray(f(M[a * block:(a + 1) * block, b * block:(b + 1) * block]))
               for b in range(k)]
        rows.append(row)
    return np.block(rows).astype(np.complex128)


def jacobi_eigh(A, tol: float = 1e-12, max_sweeps: int = 100) -> EigenDecomposition:
    """Cyclic Jacobi eigensolver for a complex Hermitian matrix.

    Each rotation first removes the phase of the pivot ``a_pq`` and then
    applies a real symmetric Schur rotation.  Iteration stops once the
    off-diagonal Frobenius norm drops below ``tol * ||A||_F``.
    """
    M = as_square(A)
    if not is_hermitian(M):
        raise NonHermitian("jacobi_eigh needs a Hermitian matrix")
    a = ((M + M.conj().T) / 2).copy()
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    threshold = tol * max(np.linalg.norm(a), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                phase = apq / mag
                tau = (a[q, q].real - a[p, p].real) / (2 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1 + tau * tau))
                c = 1 / np.sqrt(1 + t * t)
                s = t * c
                # G = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                G = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ G
                a[idx, :] = G.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ G
    values = np.real(np.diag(a))
    order = np.argsort(values, kind="stable")
    return EigenDecomposition(values[order], v[:, order])


def hermitian_eig(A, atol: float = ATOL, method: str = "lapack") -> EigenDecomposition:
    """Ascending eigenvalues and orthonormal eigenvectors of a Hermitian matrix.

    ``method="lapack"`` uses ``numpy.linalg.eigh``; ``method="jacobi"`` uses
    :func:`jacobi_eigh`.
    """
    M = as_square(A)
    if hermitian_defect(M) > atol:
        raise NonHermitian(f"max|A - A*| = {hermitian_defect(M):.3e} exceeds atol={atol}")
    H = (M + M.conj().T) / 2
    if method == "jacobi":
        return jacobi_eigh(H)
    if method != "lapack":
        raise ValueError(f"unknown eigensolver {method!r}")
    w, V = np.linalg.eigh(H)
    return EigenDecomposition(w, V)


def eigvalsh(A) -> np.ndarray:
    """Eigenvalues of the Hermitian part; works on stacks of matrices."""
    M = np.asarray(A, dtype=np.complex128)
    return np.linalg.eigvalsh((M + np.swapaxes(M, -1, -2).conj()) / 2)


def lambda_min(A) -> float:
    return float(eigvalsh(A)[0])


def lambda_max(A) -> float:
    return float(eigvalsh(A)[-1])


def operator_norm(A) -> float:
    """Largest singular value, as ``sqrt(lambda_max(A* A))``."""
    M = as_matrix(A)
    top = np.linalg.eigvalsh(M.conj().T @ M)[-1]
    return float(np.sqrt(max(top, 0.0)))


def trace_norm(A) -> float:
    return float(np.sum(np.linalg.svd(as_matrix(A), compute_uv=False)))


def polar_unitary(A) -> np.ndarray:
    """Unitary factor ``W V*`` of the SVD ``A = W S V*``."""
    W, _, Vh = np.linalg.svd(as_square(A))
    return W @ Vh


# ---------------------------------------------------------------------------
# minimum enclosing circle


def _circle_two(a: complex, b: complex) -> tuple[complex, float]:
    c = (a + b) / 2
    return c, abs(a - c)


def _circle_three(a: complex, b: complex, c: complex) -> tuple[complex, float]:
    bx, by = (b - a).real, (b - a).imag
    cx, cy = (c - a).real, (c - a).imag
    d = 2 * (bx * cy - by * cx)
    scale = max(abs(b - a), abs(c - a), abs(c - b))
    if abs(d) <= 1e-14 * scale * scale:
        # collinear: the farthest pair spans the circle
        pairs = [(a, b), (a, c), (b, c)]
        return max((_circle_two(p, q) for p, q in pairs), key=lambda t: t[1])
    b2, c2 = bx * bx + by * by, cx * cx + cy * cy
    ux = (cy * b2 - by * c2) / d
    uy = (bx * c2 - cx * b2) / d
    center = a + complex(ux, uy)
    radius = max(abs(center - a), abs(center - b), abs(center - c))
    return center, radius


def min_enclosing_circle(points: Sequence[complex], seed: int = 0) -> Circle:
    """Smallest circle containing every point (randomized incremental Welzl).

    The shuffle is seeded, so results are deterministic for a given input.
    """
    pts = np.unique(np.asarray(points, dtype=np.complex128).ravel())
    if pts.size == 0:
        raise EmptyInput("min_enclosing_circle needs at least one point")
    if not np.all(np.isfinite(pts)):
        raise ParseError("points must be finite")
    if pts.size == 1:
        return Circle(complex(pts[0]), 0.0)
    pts = pts[np.random.default_rng(seed).permutation(pts.size)]
    scale = float(np.max(np.abs(pts - pts[0])))
    eps = 1e-12 * max(scale, 1e-300)

    def outside(idx_stop: int, start: int, c: complex, r: float) -> int:
        # index of the first point in pts[start:idx_stop] outside (c, r), or -1
        if start >= idx_stop:
            return -1
        d = np.abs(pts[start:idx_stop] - c)
        hit = np.flatnonzero(d > r + eps)
        return start + int(hit[0]) if hit.size else -1

    c, r = complex(pts[0]), 0.0
    i = outside(pts.size, 1, c, r)
    while i >= 0:
        c, r = complex(pts[i]), 0.0
        j = outside(i, 0, c, r)
        while j >= 0:
            c, r = _circle_two(pts[i], pts[j])
            k = outside(j, 0, c, r)
            while k >= 0:
                c, r = _circle_three(pts[i], pts[j], pts[k])
                k = outside(j, k + 1, c, r)
            j = outside(i, j + 1, c, r)
        i = outside(pts.size, i + 1, c, r)
    return Circle(complex(c), float(r))


# ---------------------------------------------------------------------------
# JSON


def matrix_to_json(A) -> dict:
    M = as_matrix(A)
    out = {"rows": int(M.shape[0]), "cols": int(M.shape[1]), "re": M.real.tolist()}
    if np.any(M.imag != 0):
        out["im"] = M.imag.tolist()
    return out


def matrix_from_json(obj, where: str = "matrix") -> np.ndarray:
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object with rows/cols/re")
    for key in ("rows", "cols", "re"):
        if key not in obj:
            raise ParseError(f"{where}: missing field {key!r}")
    rows, cols = obj["rows"], obj["cols"]
    if not (isinstance(rows, int) and isinstance(cols, int) and rows > 0 and cols > 0):
        raise ParseError(f"{where}: rows and cols must be positive integers")

    def grid(name):
        try:
            arr = np.asarray(obj[name], dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{where}.{name}: non-numeric entry ({exc})") from None
        if arr.shape != (rows, cols):
            raise ParseError(f"{where}.{name}: shape {arr.shape} != ({rows}, {cols})")
        return arr

    re = grid("re")
    im = grid("im") if "im" in obj else np.zeros_like(re)
    return re + 1j * im
