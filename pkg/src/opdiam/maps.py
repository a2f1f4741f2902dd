"""Named example maps and seeded random ensembles."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, ResourceLimit, UnknownExample
from .superop import (MAX_DIM, SuperOp, apply, from_function, from_kraus, identity_map,
                      trace_map)

SQRT_HALF = 1 / np.sqrt(2)


def _unit(n: int, i: int, j: int) -> np.ndarray:
    E = np.zeros((n, n), dtype=np.complex128)
    E[i, j] = 1
    return E


def diambound() -> SuperOp:
    """``[[a, b], [c, d]] -> diag(a + b, d - b) / sqrt 2``: norm 1 but diameter ratio sqrt 2."""
    def f(A):
        a, b, d = A[0, 0], A[0, 1], A[1, 1]
        return np.diag([(a + b) * SQRT_HALF, (d - b) * SQRT_HALF])
    return _labelled(from_function(f, 2, 2), "diambound")


def corner(n: int = 1) -> SuperOp:
    """``[[A, B], [C, D]] -> [[0, B], [0, 0]]`` on ``M_2(M_n)``."""
    P = np.zeros((2 * n, 2 * n))
    P[:n, :n] = np.eye(n)
    Q = np.zeros((2 * n, 2 * n))
    Q[n:, n:] = np.eye(n)
    return _labelled(from_function(lambda A: P @ A @ Q, 2 * n, 2 * n), f"corner({n})")


def transpose(n: int = 2) -> SuperOp:
    return _labelled(from_function(lambda A: A.T, n, n), f"transpose({n})")


def choi_map(n: int = 2) -> SuperOp:
    """``A -> n tr(A) I - A``."""
    return _labelled(from_function(lambda A: n * np.trace(A) * np.eye(n) - A, n, n),
                     f"choi_map({n})")


def counterexample() -> SuperOp:
    """``[[a, b], [c, d]] -> [[a - d, b], [c, a + d]]``: unital, self-adjoint, injective,
    not scaled trace-preserving."""
    def f(A):
        a, b, c, d = A[0, 0], A[0, 1], A[1, 0], A[1, 1]
        return np.array([[a - d, b], [c, a + d]])
    return _labelled(from_function(f, 2, 2), "counterexample")


def final_psi(n: int = 2) -> SuperOp:
    """Unital trace-preserving CP map ``A -> A^T / n^2 + (n^2 - 1)/n^3 tr(A) I``."""
    s = (n * n - 1) / n ** 3
    return _labelled(from_function(lambda A: A.T / n ** 2 + s * np.trace(A) * np.eye(n), n, n),
                     f"final_psi({n})")


def final_phi(n: int = 2) -> SuperOp:
    """Inverse of :func:`final_psi`: ``A -> n^2 A^T - (n^2 - 1)/n tr(A) I``."""
    s = (n * n - 1) / n
    return _labelled(from_function(lambda A: n * n * A.T - s * np.trace(A) * np.eye(n), n, n),
                     f"final_phi({n})")


def id_plus_tr(n: int = 2) -> SuperOp:
    return _labelled(identity_map(n) + trace_map(n, n), f"id_plus_tr({n})")


def completely_depolarizing(n: int = 2) -> SuperOp:
    """``A -> tr(A) I / n``."""
    return _labelled(trace_map(n, n) * (1 / n), f"completely_depolarizing({n})")


def paulsen() -> SuperOp:
    """Extension to ``M_4`` of ``[[aI, B], [C, dI]] -> [[aI, B^T], [C^T, dI]]``.

    Diagonal blocks are replaced by their normalized trace times ``I_2``, which
    agrees with the original map on its operator system.  The extension is not
    positive on all of ``M_4``; no positive extension exists.
    """
    def f(X):
        A, B, C, D = X[:2, :2], X[:2, 2:], X[2:, :2], X[2:, 2:]
        I = np.eye(2)
        return np.block([[np.trace(A) / 2 * I, B.T], [C.T, np.trace(D) / 2 * I]])
    return _labelled(from_function(f, 4, 4), "paulsen")


def paulsen_span_basis() -> list[np.ndarray]:
    """Basis of ``{[[aI, B], [C, dI]]}`` inside ``M_4`` (complex dimension 10)."""
    basis = [np.diag([1, 1, 0, 0]).astype(np.complex128),
             np.diag([0, 0, 1, 1]).astype(np.complex128)]
    for i in range(2):
        for j in range(2):
            basis.append(_unit(4, i, 2 + j))
            basis.append(_unit(4, 2 + i, j))
    return basis


def random_paulsen_positive(rng: np.random.Generator) -> np.ndarray:
    """A positive element ``[[aI, B], [B*, dI]]`` of the span, with ``||B|| <= sqrt(ad)``."""
    a, d = rng.uniform(0.05, 2.0, size=2)
    B = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    # half the draws sit on the boundary ||B|| = sqrt(ad)
    scale = 1.0 if rng.random() < 0.5 else rng.random()
    B *= scale * np.sqrt(a * d) / np.linalg.norm(B, 2)
    I = np.eye(2)
    return np.block([[a * I, B], [B.conj().T, d * I]])


def paulsen_positive_on_span(phi: SuperOp | None = None, probes: int = 500, seed: int = 0,
                             atol: float = 1e-10) -> bool:
    """Sampled check that ``phi`` sends positive elements of the span to positive matrices."""
    phi = paulsen() if phi is None else phi
    rng = np.random.default_rng(seed)
    for _ in range(probes):
        X = random_paulsen_positive(rng)
        Y = apply(phi, X)
        if np.linalg.eigvalsh((Y + Y.conj().T) / 2)[0] < -atol * max(1.0, np.abs(Y).max()):
            return False
    return True


@dataclass(frozen=True)
class TrigMap:
    """``a + b z + c conj(z) -> [[a, 2b], [2c, a]]`` on trigonometric polynomials.

    Functions are given by their coefficients ``(a, b, c)``.  The range of
    ``f`` on the circle is an ellipse, so the diameter of its numerical range
    in ``C(T)`` is ``2(|b| + |c|)``.
    """

    label: str = "trig"

    def __call__(self, coeffs) -> np.ndarray:
        a, b, c = (complex(x) for x in coeffs)
        return np.array([[a, 2 * b], [2 * c, a]])

    @staticmethod
    def function_values(coeffs, samples: int = 4096) -> np.ndarray:
        a, b, c = (complex(x) for x in coeffs)
        z = np.exp(2j * np.pi * np.arange(samples) / samples)
        return a + b * z + c * np.conj(z)

    @staticmethod
    def function_diameter(coeffs) -> float:
        _, b, c = (complex(x) for x in coeffs)
        return 2 * (abs(b) + abs(c))

    @classmethod
    def sup_norm(cls, coeffs, samples: int = 4096) -> float:
        return float(np.max(np.abs(cls.function_values(coeffs, samples))))


def trig() -> TrigMap:
    return TrigMap()


_EXAMPLES = {
    "diambound": (diambound, False),
    "corner": (corner, True),
    "transpose": (transpose, True),
    "paulsen": (paulsen, False),
    "trig": (trig, False),
    "choi_map": (choi_map, True),
    "counterexample": (counterexample, False),
    "final_psi": (final_psi, True),
    "final_phi": (final_phi, True),
    "id_plus_tr": (id_plus_tr, True),
    "identity": (identity_map, True),
    "completely_depolarizing": (completely_depolarizing, True),
}

EXAMPLE_IDS = tuple(_EXAMPLES)


def named_example(name: str, n: int | None = None, max_dim: int = MAX_DIM):
    """Construct an example map by id; ``n`` sizes the families that take one."""
    if name not in _EXAMPLES:
        raise UnknownExample(f"unknown example {name!r}; known: {', '.join(EXAMPLE_IDS)}")
    ctor, sized = _EXAMPLES[name]
    if not sized:
        return ctor()
    n = 2 if n is None else int(n)
    if n < 1:
        raise DimensionMismatch("example size must be positive")
    if n > max_dim:
        raise ResourceLimit(f"n={n} exceeds max_dim={max_dim}")
    if name == "identity":
        return _labelled(identity_map(n), f"identity({n})")
    return ctor(n)


def _labelled(phi: SuperOp, label: str) -> SuperOp:
    return SuperOp(phi.dim_in, phi.dim_out, phi.choi, label)


# ---------------------------------------------------------------------------
# random ensembles

RANDOM_KINDS = ("hermitian_choi", "ginibre_cp", "unital_channel", "ucp_bijection")


def _ginibre(rng: np.random.Generator, *shape) -> np.ndarray:
    return (rng.normal(size=shape) + 1j * rng.normal(size=shape)) / np.sqrt(2)


def random_isometry(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    Q, R = np.linalg.qr(_ginibre(rng, rows, cols))
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_unital_channel(n: int, m: int, rng: np.random.Generator) -> SuperOp:
    """``A -> V*(A (x) I_r)V`` for a random isometry ``V``."""
    r = max(2, -(-m // n))
    Q = random_isometry(rng, r * n, m)
    kraus = [Q[l * n:(l + 1) * n, :].conj().T for l in range(r)]
    return from_kraus(kraus)


def random_superop(kind: str, n: int, m: int | None = None, seed: int = 0,
                   max_dim: int = MAX_DIM) -> SuperOp:
    m = n if m is None else m
    if n < 1 or m < 1:
        raise DimensionMismatch("dimensions must be positive")
    if max(n, m) > max_dim:
        raise ResourceLimit(f"dimension {max(n, m)} exceeds max_dim={max_dim}")
    rng = np.random.default_rng(seed)
    if kind == "hermitian_choi":
        G = _ginibre(rng, n * m, n * m)
        return SuperOp(n, m, (G + G.conj().T) / 2, "hermitian_choi")
    if kind == "ginibre_cp":
        G = _ginibre(rng, n * m, n * m)
        return SuperOp(n, m, G @ G.conj().T / (n * m), "ginibre_cp")
    if kind == "unital_channel":
        return _labelled(random_unital_channel(n, m, rng), "unital_channel")
    if kind == "ucp_bijection":
        if m != n:
            raise DimensionMismatch("ucp_bijection needs n == m")
        noise = random_unital_channel(n, n, rng)
        t = 0.5
        while True:
            phi = identity_map(n) * (1 - t) + noise * t
            if np.linalg.cond(phi.transfer) < 1e8:
                return _labelled(phi, "ucp_bijection")
            t /= 2
    raise ValueError(f"unknown random kind {kind!r}; known: {', '.join(RANDOM_KINDS)}")
