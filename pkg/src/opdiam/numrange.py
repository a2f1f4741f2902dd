"""Numerical range geometry: support functions, diameters, radius, centering."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NotNormal, ValidationError
from .linalg import (ATOL, RTOL, Circle, as_square, eigvalsh, hermitian_defect,
                     im_part, min_enclosing_circle, operator_norm, re_part)

@dataclass(frozen=True)
class RangeSample:
    thetas: np.ndarray
    support: np.ndarray
    boundary: np.ndarray

    def __post_init__(self):
        if not (len(self.thetas) == len(self.support) == len(self.boundary)):
            raise ValueError("thetas, support and boundary must have equal length")


@dataclass(frozen=True)
class DiameterResult:
    value: float
    theta_star: float
    witness_pair: tuple[np.ndarray, np.ndarray]

    def witness_points(self, E) -> tuple[complex, complex]:
        M = as_square(E)
        v, w = self.witness_pair
        return complex(np.vdot(v, M @ v)), complex(np.vdot(w, M @ w))


class Centering(NamedTuple):
    k_re: float
    k_im: float
    c_jung: complex


def rotated_real_parts(E, thetas) -> np.ndarray:
    """Stack of ``Re(exp(i theta) E)`` for each angle."""
    M = as_square(E)
    ph = np.exp(1j * np.asarray(thetas, dtype=float))[:, None, None]
    return (ph * M + np.conj(ph) * M.conj().T) / 2


def _is_scalar(M: np.ndarray, atol: float = ATOL) -> bool:
    n = M.shape[0]
    shifted = M - (np.trace(M) / n) * np.eye(n)
    return float(np.max(np.abs(shifted))) <= atol * max(1.0, float(np.max(np.abs(M))))


def support_function(E, theta: float) -> float:
    """``lambda_max(Re(exp(i theta) E))``."""
    return float(eigvalsh(rotated_real_parts(E, [theta]))[0, -1])


def range_sample(E, grid: int = 256) -> RangeSample:
    """Support values and boundary points of W(E) on ``grid`` angles in [0, 2pi)."""
    M = as_square(E)
    thetas = 2 * np.pi * np.arange(grid) / grid
    w, V = np.linalg.eigh(rotated_real_parts(M, thetas))
    top = V[:, :, -1]
    boundary = np.einsum("ti,ij,tj->t", top.conj(), M, top)
    return RangeSample(thetas, w[:, -1].copy(), boundary)


def _zoom_max(f, lo: float, hi: float, tol: float, max_rounds: int,
              points: int = 33) -> tuple[float, float]:
    """Maximize a unimodal ``f`` on [lo, hi]; ``f`` maps an array of angles to values.

    Each round evaluates ``points`` equispaced angles in one batch and keeps
    the two cells around the best one.
    """
    best_t, best_v = lo, -np.inf
    for _ in range(max_rounds):
        ts = np.linspace(lo, hi, points)
        vals = f(ts)
        i = int(np.argmax(vals))
        if vals[i] > best_v:
            best_t, best_v = float(ts[i]), float(vals[i])
        step = (hi - lo) / (points - 1)
        lo, hi = ts[i] - step, ts[i] + step
        if 2 * step < tol:
            break
    return best_t, best_v


def _peak_indices(values: np.ndarray, count: int) -> list[int]:
    # circular local maxima, best first, lowest index on ties
    left, right = np.roll(values, 1), np.roll(values, -1)
    peaks = np.flatnonzero((values >= left) & (values >= right))
    if peaks.size == 0:
        peaks = np.array([int(np.argmax(values))])
    order = sorted(peaks.tolist(), key=lambda i: (-values[i], i))
    return order[:count]


def _refined_max(width, values: np.ndarray, thetas: np.ndarray, step: float,
                 refine_iters: int, tol: float, peaks: int = 3) -> tuple[float, float]:
    best_i = int(np.argmax(values))
    best_theta, best_val = float(thetas[best_i]), float(values[best_i])
    for i in _peak_indices(values, peaks):
        t0 = float(thetas[i])
        t, val = _zoom_max(width, t0 - step, t0 + step, tol, refine_iters)
        if val > best_val:
            best_theta, best_val = t, val
    return best_theta, best_val


def numerical_diameter(E, grid: int = 256, refine_iters: int = 200,
                       tol: float = 1e-10, peaks: int = 3) -> DiameterResult:
    """Diameter of W(E) as the largest spread of ``Re(exp(i theta) E)`` over theta.

    The width function has period pi, so ``grid`` angles cover [0, pi); the best
    cells (``peaks`` of them) are refined by batched zooming.  The witness vectors are the
    top and bottom eigenvectors at the optimal angle.
    """
    M = as_square(E)
    n = M.shape[0]
    if grid < 8:
        raise ValidationError("grid must be at least 8")
    if _is_scalar(M):
        e1 = np.eye(n, dtype=np.complex128)[:, 0]
        return DiameterResult(0.0, 0.0, (e1, e1.copy()))
    if hermitian_defect(M) <= ATOL:
        w, V = np.linalg.eigh((M + M.conj().T) / 2)
        return DiameterResult(float(w[-1] - w[0]), 0.0, (V[:, -1], V[:, 0]))

    def width(ts: np.ndarray) -> np.ndarray:
        w = eigvalsh(rotated_real_parts(M, ts))
        return w[:, -1] - w[:, 0]

    thetas = np.pi * np.arange(grid) / grid
    w = eigvalsh(rotated_real_parts(M, thetas))
    theta, _ = _refined_max(width, w[:, -1] - w[:, 0], thetas, np.pi / grid, refine_iters, tol,
                            peaks)
    theta = float(np.mod(theta, np.pi))
    ww, V = np.linalg.eigh(rotated_real_parts(M, [theta])[0])
    v, u = V[:, -1], V[:, 0]
    gap = abs(np.vdot(v, M @ v) - np.vdot(u, M @ u))
    return DiameterResult(float(max(gap, ww[-1] - ww[0])), theta, (v, u))


def numerical_radius(E, grid: int = 256, refine_iters: int = 200, tol: float = 1e-10) -> float:
    """``max |z|`` over W(E), as the largest support value over [0, 2pi)."""
    M = as_square(E)
    if _is_scalar(M):
        return float(abs(np.trace(M) / M.shape[0]))
    if hermitian_defect(M) <= ATOL:
        w = eigvalsh(M)
        return float(max(abs(w[0]), abs(w[-1])))

    def h(ts: np.ndarray) -> np.ndarray:
        return eigvalsh(rotated_real_parts(M, ts))[:, -1]

    count = 2 * grid
    thetas = 2 * np.pi * np.arange(count) / count
    support = eigvalsh(rotated_real_parts(M, thetas))[:, -1]
    _, val = _refined_max(h, support, thetas, 2 * np.pi / count, refine_iters, tol)
    return float(val)


def is_normal(E, atol: float = ATOL) -> bool:
    M = as_square(E)
    comm = M @ M.conj().T - M.conj().T @ M
    scale = operator_norm(M) ** 2
    return operator_norm(comm) <= atol * max(scale, 1.0)


def spectral_diameter(E, atol: float = ATOL) -> float:
    """Diameter of the spectrum of a normal matrix."""
    M = as_square(E)
    if hermitian_defect(M) <= atol:
        w = eigvalsh(M)
        return float(w[-1] - w[0])
    if not is_normal(M, atol):
        raise NotNormal("spectral_diameter needs a normal matrix; use numerical_diameter")
    ev = np.linalg.eigvals(M)
    return float(np.max(np.abs(ev[:, None] - ev[None, :])))


def jung_circle(E, grid: int = 256) -> Circle:
    """Smallest circle around the sampled boundary of W(E)."""
    return min_enclosing_circle(range_sample(E, grid).boundary)


def centering_constants(E, grid: int = 256) -> Centering:
    """Midpoints of the spectra of Re(E) and Im(E), plus the Jung center of W(E)."""
    M = as_square(E)
    wr = eigvalsh(re_part(M))
    wi = eigvalsh(im_part(M))
    k_re = 0.5 * float(wr[-1] + wr[0])
    k_im = 0.5 * float(wi[-1] + wi[0])
    return Centering(k_re, k_im, jung_circle(M, grid).center)


__all__ = [
    "RangeSample", "DiameterResult", "Centering", "support_function", "range_sample",
    "numerical_diameter", "numerical_radius", "spectral_diameter", "is_normal",
    "centering_constants", "jung_circle", "rotated_real_parts", "RTOL",
]
