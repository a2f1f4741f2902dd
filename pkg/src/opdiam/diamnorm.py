"""Certified estimates of induced norms and numerical-diameter seminorms of maps.

Every estimate is an interval ``[lower, upper]``.  ``lower`` is the ratio
attained by a stored witness matrix, so it can be re-checked independently;
``upper`` comes from a named structural certificate.

Searches are monotone ascent schemes:

* operator norm: alternate between the top singular pair of ``Phi(A)`` and
  the unitary polar factor of ``Phi^dag(x y*)``;
* self-adjoint diameter: alternate between the diameter witness of
  ``Phi(E)`` and the projection onto the positive part of the Hermitian
  linear functional it induces (the supremum is attained on projections);
* general diameter: supergradient ascent on the ratio with backtracking.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .errors import NullSpaceTooLarge, ResourceLimit
from .linalg import ATOL, operator_norm, polar_unitary, trace_norm
from .numrange import numerical_diameter
from .superop import (MAX_DIM, SuperOp, compose, from_kraus, from_transfer, is_scalar_valued,
                      left_inverse, unit_image)

QUANTITIES = ("op_norm", "diam", "sdiam", "cb", "cbdiam", "cbsdiam")
LEVEL_QUANTITY = {"cb": "op_norm", "cbdiam": "diam", "cbsdiam": "sdiam"}
INF = math.inf
STALL = 1e-13


@dataclass(frozen=True)
class Budget:
    restarts: int = 32
    iters: int = 400
    seed: int = 7
    grid: int = 256
    max_dim: int = MAX_DIM


@dataclass(frozen=True)
class DiamEstimate:
    quantity: str
    lower: float
    upper: float
    witness: np.ndarray | None = field(repr=False)
    certificate: str
    level: int = 1
    unbounded: bool = False
    witness_ratio: float = 0.0

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise ValueError(f"unknown quantity {self.quantity!r}")
        if not self.unbounded and self.lower > self.upper + 1e-8 * max(1.0, abs(self.upper)):
            raise ArithmeticError(
                f"{self.quantity}: lower {self.lower!r} exceeds certified upper {self.upper!r} "
                f"({self.certificate})")

    def brackets(self, value: float, tol: float) -> bool:
        """Both ends of the interval lie within ``tol`` of ``value``."""
        return (not self.unbounded and value - tol <= self.lower <= value + tol
                and value - tol <= self.upper <= value + tol)

    def as_dict(self) -> dict:
        return {
            "quantity": self.quantity,
            "level": self.level,
            "lower": _json_num(self.lower),
            "upper": _json_num(self.upper),
            "certificate": self.certificate,
            "unbounded": self.unbounded,
            "witness_ratio": _json_num(self.witness_ratio),
        }


def _json_num(x: float):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(x)


# ---------------------------------------------------------------------------
# amplified action without forming the amplified Choi matrix


class Amplified:
    """Blockwise action of ``phi`` on ``k x k`` block matrices."""

    def __init__(self, phi: SuperOp, k: int = 1):
        self.phi = phi
        self.k = k
        self.n = k * phi.dim_in
        self.m = k * phi.dim_out

    def __call__(self, X: np.ndarray) -> np.ndarray:
        k, n, m = self.k, self.phi.dim_in, self.phi.dim_out
        Y = np.einsum("aibj,ipjq->apbq", X.reshape(k, n, k, n), self.phi.tensor)
        return Y.reshape(k * m, k * m)

    def adjoint(self, Y: np.ndarray) -> np.ndarray:
        k, n, m = self.k, self.phi.dim_in, self.phi.dim_out
        X = np.einsum("apbq,ipjq->aibj", Y.reshape(k, m, k, m), self.phi.tensor.conj())
        return X.reshape(k * n, k * n)


def _diam_value(F: np.ndarray, grid: int, tol: float = 1e-10) -> float:
    # loose tolerance marks a search-time evaluation: refine only the best peak
    peaks = 1 if tol >= SEARCH_TOL else 3
    return numerical_diameter(F, grid=grid, tol=tol, peaks=peaks).value


# angle tolerance inside ascent loops; the width is flat to second order at its peak
SEARCH_TOL = 1e-7


def witness_ratio(phi: SuperOp, W, quantity: str, level: int = 1, grid: int = 256) -> float:
    """Ratio attained by ``W`` for the seminorm ``quantity`` at amplification ``level``."""
    base = LEVEL_QUANTITY.get(quantity, quantity)
    L = Amplified(phi, level)
    W = np.asarray(W, dtype=np.complex128)
    if W.shape != (L.n, L.n):
        raise ValueError(f"witness shape {W.shape} does not match level {level}")
    if base == "op_norm":
        d = operator_norm(W)
        return operator_norm(L(W)) / d if d > 0 else 0.0
    d = _diam_value(W, grid)
    return _diam_value(L(W), grid) / d if d > 1e-14 else 0.0


# ---------------------------------------------------------------------------
# upper-bound certificates


@dataclass(frozen=True)
class _Cert:
    value: float
    name: str
    all_levels: bool  # valid for the supremum over every amplification level


def _finite_min(certs: Iterable[_Cert]) -> tuple[float, str]:
    best = min(certs, key=lambda c: c.value, default=None)
    if best is None:
        return INF, "none"
    return best.value, best.name


def _haagerup(phi: SuperOp) -> float:
    """``||Phi||_cb <= ||sum L L*||^1/2 ||sum R* R||^1/2`` for ``Phi(A) = sum L A R``."""
    n, m = phi.dim_in, phi.dim_out
    # M[(p, i), (j, q)] = C[i, p, j, q] factors as sum_k L_k[p, i] R_k[j, q]
    M = phi.tensor.transpose(1, 0, 2, 3).reshape(m * n, n * m)
    U, s, Vh = np.linalg.svd(M)
    keep = s > 1e-14 * max(s[0], 1e-300)
    if not np.any(keep):
        return 0.0
    sq = np.sqrt(s[keep])
    Ls = (U[:, keep] * sq).T.reshape(-1, m, n)
    Rs = (Vh[keep, :] * sq[:, None]).reshape(-1, n, m)
    left = np.einsum("kpi,kqi->pq", Ls, Ls.conj())
    right = np.einsum("kjq,kjr->qr", Rs.conj(), Rs)
    return math.sqrt(operator_norm(left) * operator_norm(right))


def _rank_one_factors(phi: SuperOp):
    n, m = phi.dim_in, phi.dim_out
    M = phi.tensor.transpose(1, 0, 2, 3).reshape(m * n, n * m)
    U, s, Vh = np.linalg.svd(M)
    if s[0] == 0 or (len(s) > 1 and s[1] > 1e-12 * s[0]):
        return None
    L = (U[:, 0] * math.sqrt(s[0])).reshape(m, n)
    R = (Vh[0, :] * math.sqrt(s[0])).reshape(n, m)
    return L, R


def _square_zero_corner(phi: SuperOp) -> float | None:
    """``Phi(A) = L A R`` with ``L R = 0`` gives ``diam Phi(E) <= ||L|| ||R|| diam(E)/2``
    for Hermitian ``E`` (doubled when ``R L != 0``); the form survives amplification."""
    if phi.dim_in != phi.dim_out:
        return None
    f = _rank_one_factors(phi)
    if f is None:
        return None
    L, R = f
    scale = operator_norm(L) * operator_norm(R)
    if operator_norm(L @ R) > 1e-12 * max(scale, 1e-300):
        return None
    nilpotent = operator_norm(R @ L) <= 1e-12 * max(scale, 1e-300)
    return scale / 2 if nilpotent else scale


def _commutative_range(phi: SuperOp) -> float | None:
    """Exact norm when every ``Phi(E_ij)`` is diagonal; equals the cb norm."""
    T = phi.tensor
    m = phi.dim_out
    off = T * (1 - np.eye(m))[None, :, None, :]
    if np.max(np.abs(off)) > ATOL * max(1.0, np.max(np.abs(T))):
        return None
    # Phi(A)[k, k] = tr(F_k^T A) with F_k[i, j] = C[i, k, j, k]
    return max(trace_norm(T[:, k, :, k]) for k in range(m))


def _cp_split_terms(phi: SuperOp):
    """Eigen-split of the Choi matrix as (eigenvalues, unit images of rank-one pieces)."""
    n, m = phi.dim_in, phi.dim_out
    H = (phi.choi + phi.choi.conj().T) / 2
    w, V = np.linalg.eigh(H)
    K = V.T.reshape(-1, n, m).transpose(0, 2, 1)  # K_k = u_k.reshape(n, m).T
    units = np.einsum("kpi,kqi->kpq", K, K.conj())
    return w, units


def _cp_split_value(w, units, gamma: float) -> float:
    lam = w + gamma
    pos = np.einsum("k,kpq->pq", np.clip(lam, 0, None), units)
    neg = np.einsum("k,kpq->pq", np.clip(-lam, 0, None), units)
    return operator_norm(pos) + operator_norm(neg)


def _best_translate(w, units) -> tuple[float, float]:
    """Minimize the convex function gamma -> cp-split bound of ``Phi + gamma tr(.) I``."""
    kinks = np.unique(-w)
    vals = [_cp_split_value(w, units, g) for g in kinks]
    i = int(np.argmin(vals))
    best_g, best_v = float(kinks[i]), float(vals[i])
    lo = kinks[i - 1] if i > 0 else kinks[i] - 1.0
    hi = kinks[i + 1] if i + 1 < len(kinks) else kinks[i] + 1.0
    for a, b in ((lo, kinks[i]), (kinks[i], hi)):
        g = _golden_min(lambda t: _cp_split_value(w, units, t), float(a), float(b))
        v = _cp_split_value(w, units, g)
        if v < best_v:
            best_g, best_v = g, v
    return best_g, best_v


def _golden_min(f: Callable[[float], float], lo: float, hi: float, iters: int = 80) -> float:
    g = (math.sqrt(5) - 1) / 2
    x1, x2 = hi - g * (hi - lo), lo + g * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - g * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + g * (hi - lo)
            f2 = f(x2)
    return x1 if f1 <= f2 else x2


def _partial_transpose_choi(phi: SuperOp) -> np.ndarray:
    """Choi matrix of ``A -> Phi(A^T)``."""
    n, m = phi.dim_in, phi.dim_out
    return phi.tensor.transpose(2, 1, 0, 3).reshape(n * m, n * m)


def _lambda_min(H: np.ndarray) -> float:
    return float(np.linalg.eigvalsh((H + H.conj().T) / 2)[0])


class Certificates:
    """Upper bounds for every quantity, derived once per map."""

    def __init__(self, phi: SuperOp):
        self.phi = phi
        self.flags = phi.flags
        self._op: list[_Cert] = []
        self._sd: list[_Cert] = []
        self._dm: list[_Cert] = []
        self._build()

    def _build(self):
        phi, fl = self.phi, self.flags
        n = phi.dim_in
        op, sd, dm = self._op, self._sd, self._dm
        c = complex(fl.paraunital_scalar) if fl.paraunital else None

        if fl.cp:
            op.append(_Cert(operator_norm(unit_image(phi)), "cp: norm at the unit", True))
        if fl.self_adjoint:
            w, units = _cp_split_terms(phi)
            op.append(_Cert(_cp_split_value(w, units, 0.0), "cp-split", True))
        op.append(_Cert(_haagerup(phi), "haagerup", True))
        comm = _commutative_range(phi)
        if comm is not None:
            op.append(_Cert(comm, "commutative-range", True))
        if fl.self_adjoint and not fl.cp and _lambda_min(_partial_transpose_choi(phi)) >= \
                -ATOL * max(1.0, np.max(np.abs(phi.choi))):
            op.append(_Cert(operator_norm(unit_image(phi)), "co-cp: norm at the unit", False))

        if not fl.paraunital:
            return
        if is_scalar_valued(phi):
            sd.append(_Cert(0.0, "phi.1 structure", False))
            dm.append(_Cert(0.0, "phi.1 structure", False))
        corner = _square_zero_corner(phi)
        if corner is not None:
            sd.append(_Cert(corner, "square-zero-corner", True))
        if fl.cp:
            sd.append(_Cert(abs(c), "ucp: diam <= Phi(1) scalar", True))
            dm.append(_Cert(abs(c), "ucp: diam <= Phi(1) scalar", True))
        if fl.self_adjoint:
            # a positive translate Phi + g tr(.) I is c' times a unital positive map
            scale = max(1.0, float(np.max(np.abs(phi.choi))))
            for label, H in (("cp", phi.choi), ("co-cp", _partial_transpose_choi(phi))):
                g = -_lambda_min(H) + 4 * ATOL * scale
                cc = c.real + g * n
                sd.append(_Cert(cc, f"{label} translate: diam <= Phi(1) scalar", False))
            g, v = _best_translate(w, units)
            sd.append(_Cert(v, "sdiam<=op_norm (trace translate)", False))
        for cert in list(op):
            sd.append(_Cert(cert.value, f"sdiam<=op_norm [{cert.name}]", cert.all_levels))
            dm.append(_Cert(2 * cert.value, f"2*op_norm_upper [{cert.name}]", cert.all_levels))
        if fl.self_adjoint:
            # diam = sdiam for self-adjoint maps, at every level
            for cert in list(sd):
                dm.append(_Cert(cert.value, f"self-adjoint: diam = sdiam [{cert.name}]",
                                cert.all_levels))

    def upper(self, quantity: str) -> tuple[float, str]:
        if quantity == "op_norm":
            return _finite_min(self._op)
        if quantity == "cb":
            return _finite_min(c for c in self._op if c.all_levels)
        pool = self._sd if quantity in ("sdiam", "cbsdiam") else self._dm
        if quantity in ("cbsdiam", "cbdiam"):
            pool = [c for c in pool if c.all_levels]
            if quantity == "cbdiam" and self.flags.self_adjoint:
                # self-adjoint maps have cbdiam = cbsdiam = cb
                pool = pool + [_Cert(c.value, f"self-adjoint: cbdiam = cb [{c.name}]", True)
                               for c in self._op if c.all_levels]
        return _finite_min(pool)


# ---------------------------------------------------------------------------
# searches


def _rng(budget: Budget, *stream: int) -> np.random.Generator:
    return np.random.default_rng([budget.seed, *stream])


def _random_hermitian(rng, n):
    G = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (G + G.conj().T) / 2


def _random_unitary(rng, n):
    Q, R = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def _norm_ascent(L: Amplified, A: np.ndarray, iters: int) -> tuple[float, np.ndarray]:
    A = polar_unitary(A) if operator_norm(A) > 0 else np.eye(L.n, dtype=np.complex128)
    best, best_A = -1.0, A
    for _ in range(iters):
        F = L(A)
        U, s, Vh = np.linalg.svd(F)
        if s[0] <= best * (1 + STALL):
            break
        best, best_A = float(s[0]), A
        G = L.adjoint(np.outer(U[:, 0], Vh[0, :]))
        if operator_norm(G) == 0:
            break
        A = polar_unitary(G)
    return best, best_A


def _diameter_functional(F: np.ndarray, grid: int):
    """``D`` with ``Re tr(F D) = diam(F)`` and ``|Re tr(X D)| <= diam(X)`` for all X."""
    res = numerical_diameter(F, grid=grid, tol=SEARCH_TOL, peaks=1)
    v, w = res.witness_pair
    D = np.exp(1j * res.theta_star) * (np.outer(v, v.conj()) - np.outer(w, w.conj()))
    return res.value, D


def _positive_projection(H: np.ndarray) -> np.ndarray | None:
    w, V = np.linalg.eigh(H)
    scale = max(abs(w[0]), abs(w[-1]))
    if scale == 0:
        return None
    keep = w > 1e-14 * scale
    if not np.any(keep) or np.all(keep):
        return None
    P = V[:, keep]
    return P @ P.conj().T


def _sdiam_ascent(L: Amplified, E: np.ndarray, iters: int, grid: int) -> tuple[float, np.ndarray]:
    E = (E + E.conj().T) / 2
    w = np.linalg.eigvalsh(E)
    if w[-1] - w[0] <= 1e-14 * max(1.0, abs(w).max()):
        return 0.0, E
    E = (E - w[0] * np.eye(L.n)) / (w[-1] - w[0])
    best, best_E = _diam_value(L(E), grid, SEARCH_TOL), E
    for _ in range(iters):
        _, D = _diameter_functional(L(best_E), grid)
        Y = L.adjoint(D.conj().T).conj().T
        P = _positive_projection((Y + Y.conj().T) / 2)
        if P is None:
            break
        val = _diam_value(L(P), grid, SEARCH_TOL)
        if val <= best * (1 + STALL) + 1e-15:
            break
        best, best_E = val, P
    return best, best_E


def _diam_ascent(L: Amplified, E: np.ndarray, iters: int, grid: int,
                 incumbent: float = 0.0) -> tuple[float, np.ndarray]:
    def normalize(X):
        X = X - np.trace(X) / L.n * np.eye(L.n)
        d = _diam_value(X, grid, SEARCH_TOL)
        return (X / d, d) if d > 1e-14 else (None, 0.0)

    E, _ = normalize(E)
    if E is None:
        return 0.0, np.zeros((L.n, L.n), dtype=np.complex128)
    f, D_F = _diameter_functional(L(E), grid)
    step, window = 1.0, [f]
    for it in range(iters):
        _, D_E = _diameter_functional(E, grid)
        G = L.adjoint(D_F.conj().T) - f * D_E.conj().T
        G -= np.trace(G) / L.n * np.eye(L.n)
        gnorm = np.linalg.norm(G)
        if gnorm < 1e-13:
            break
        G /= gnorm
        improved = False
        while step > 1e-6:
            cand, _ = normalize(E + step * G)
            if cand is not None:
                fc, D_c = _diameter_functional(L(cand), grid)
                if fc > f * (1 + STALL):
                    E, f, D_F = cand, fc, D_c
                    improved = True
                    step = min(step * 2, 4.0)
                    break
            step /= 2
        if not improved:
            break
        window.append(f)
        if len(window) > 10 and window[-1] - window[-11] <= 1e-7 * max(1.0, f):
            break
        # abandon restarts that trail the incumbent and have slowed to a crawl
        if it == 10 and f < 0.95 * incumbent:
            break
        if it >= 10 and f < incumbent and window[-1] - window[-11] <= 1e-4 * f:
            break
    return f, E


# ---------------------------------------------------------------------------
# witness library


def swap_witness(n: int) -> np.ndarray:
    """``sum E_ij (x) E_ji`` at level ``n``: block ``(i, j)`` is ``E_ji``."""
    S = np.zeros((n, n, n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            S[i, j, j, i] = 1
    return S.reshape(n * n, n * n)


def off_diagonal_identity(n: int) -> np.ndarray:
    """``[[0, I], [I, 0]]`` at level 2."""
    Z, I = np.zeros((n, n)), np.eye(n)
    return np.block([[Z, I], [I, Z]]).astype(np.complex128)


def lift_witness(W: np.ndarray, n: int, j: int, k: int) -> np.ndarray:
    """Carry a level-``j`` witness to level ``k >= j`` without changing its ratio.

    With ``k = q j + r`` the result is ``I_q (x) W`` direct-summed with the
    leading ``r x r`` block compression of ``W``; numerical ranges and norms of
    both the argument and its image are unchanged.
    """
    if k < j:
        raise ValueError("can only lift to a higher level")
    q, r = divmod(k, j)
    blocks = [W] * q
    if r:
        blocks.append(W[: r * n, : r * n])
    out = np.zeros((k * n, k * n), dtype=np.complex128)
    at = 0
    for B in blocks:
        s = B.shape[0]
        out[at:at + s, at:at + s] = B
        at += s
    return out


def _direct_sum(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    s, t = A.shape[0], B.shape[0]
    out = np.zeros((s + t, s + t), dtype=np.complex128)
    out[:s, :s], out[s:, s:] = A, B
    return out


def _interleave_level(X: np.ndarray, Y: np.ndarray, n: int) -> np.ndarray:
    """Place level-``h`` matrices ``X`` and ``Y`` as ``[[0, X], [Y, 0]]`` at level ``2h``."""
    Z = np.zeros_like(X)
    return np.block([[Z, X], [Y, Z]])


def witness_library(n: int, level: int, hermitian: bool,
                    lower_witnesses: dict[int, np.ndarray] | None = None) -> list[np.ndarray]:
    """Known extremal arguments at ``level`` for maps on ``M_n``."""
    out: list[np.ndarray] = []
    if level == 1:
        for i in range(n):
            for j in range(n):
                if i == j and n > 1:
                    E = np.zeros((n, n), dtype=np.complex128)
                    E[i, i] = 1
                    out.append(E)
                elif not hermitian and i != j:
                    E = np.zeros((n, n), dtype=np.complex128)
                    E[i, j] = 1
                    out.append(E)
        if hermitian:
            for i in range(n):
                for j in range(i + 1, n):
                    E = np.zeros((n, n), dtype=np.complex128)
                    E[i, j] = E[j, i] = 1
                    out.append(E)
        out.append(np.eye(n, dtype=np.complex128))
        return out
    if level == n:
        out.append(swap_witness(n))
    if level == 2:
        out.append(off_diagonal_identity(n))
    if level % 2 == 0:
        h = level // 2
        bases = []
        if h == n:
            bases.append(swap_witness(n))
        if h == 2:
            bases.append(off_diagonal_identity(n))
        if lower_witnesses and h in lower_witnesses:
            bases.append(lower_witnesses[h])
        for A in bases:
            out.append(_direct_sum(A, -A))
            out.append(_interleave_level(A, A.conj().T, n))
    return out


# ---------------------------------------------------------------------------
# estimators


def _unbounded(phi: SuperOp, quantity: str, level: int, grid: int) -> DiamEstimate:
    """Non-paraunital maps: ``I + eps X`` has arbitrarily large ratio."""
    L = Amplified(phi, level)
    F0 = L(np.eye(L.n, dtype=np.complex128))
    d0 = _diam_value(F0, grid)
    X = np.zeros((L.n, L.n), dtype=np.complex128)
    X[0, 0] = 1
    dX = _diam_value(L(X), grid)
    eps = d0 / (2 * (1e4 + dX))
    W = np.eye(L.n) + eps * X
    ratio = _diam_value(L(W), grid) / _diam_value(W, grid)
    return DiamEstimate(quantity, INF, INF, W, "non-paraunital: unbounded", level, True, ratio)


def _trivial_domain(quantity: str, level: int) -> DiamEstimate:
    return DiamEstimate(quantity, 0.0, 0.0, np.eye(level, dtype=np.complex128),
                        "M_1 has no argument of positive diameter", level, False, 0.0)


def _best(cands: list[tuple[float, np.ndarray]]) -> tuple[float, np.ndarray]:
    # max ratio, first index on ties
    best_i = 0
    for i, (v, _) in enumerate(cands):
        if v > cands[best_i][0]:
            best_i = i
    return cands[best_i]


def _reached(value: float, target: float) -> bool:
    return value >= target - 1e-12 * max(1.0, abs(target))


def _search(L: Amplified, quantity: str, seeds: list[np.ndarray], budget: Budget,
            stream: int, target: float = np.inf,
            restarts: int | None = None) -> tuple[float, np.ndarray]:
    base = LEVEL_QUANTITY.get(quantity, quantity)
    grid = budget.grid
    # ascent steps use a coarse angle grid; recorded ratios use the full one
    coarse = min(grid, 64)
    if base == "op_norm":
        ratio = lambda W: operator_norm(L(W)) / operator_norm(W)
        ascent = lambda W, inc: _norm_ascent(L, W, budget.iters)
        draw = lambda rng: _random_unitary(rng, L.n)
    elif base == "sdiam":
        ratio = lambda W: _diam_value(L(W), grid) / _diam_value(W, grid)
        ascent = lambda W, inc: _sdiam_ascent(L, W, budget.iters, coarse)
        draw = lambda rng: _random_hermitian(rng, L.n)
    elif L.phi.flags.self_adjoint:
        # self-adjoint maps attain the diameter ratio on Hermitian arguments at
        # every level, so the projection ascent does the work
        ratio = lambda W: _diam_value(L(W), grid) / _diam_value(W, grid)
        ascent = lambda W, inc: _sdiam_ascent(L, (W + W.conj().T) / 2, budget.iters, coarse)
        draw = lambda rng: _random_hermitian(rng, L.n)
    else:
        ratio = lambda W: _diam_value(L(W), grid) / _diam_value(W, grid)
        ascent = lambda W, inc: _diam_ascent(L, W, budget.iters, coarse, inc)
        draw = lambda rng: (rng.normal(size=(L.n, L.n)) + 1j * rng.normal(size=(L.n, L.n)))

    def safe_ratio(W):
        den = operator_norm(W) if base == "op_norm" else _diam_value(W, grid)
        return ratio(W) if den > 1e-14 else -1.0

    scored = [(safe_ratio(W), W) for W in seeds]
    cands = [s for s in scored if s[0] >= 0]
    order = sorted(range(len(cands)), key=lambda i: (-cands[i][0], i))
    restarts = budget.restarts if restarts is None else restarts
    starts = [cands[i][1] for i in order][:restarts]
    rng = _rng(budget, stream)
    while len(starts) < restarts:
        starts.append(draw(rng))
    incumbent = max((v for v, _ in cands), default=0.0)
    for W in starts:
        if _reached(incumbent, target):
            break
        _, Wv = ascent(W, incumbent)
        v = safe_ratio(Wv)
        cands.append((v, Wv))
        incumbent = max(incumbent, v)
    if base == "diam" and L.phi.flags.self_adjoint and cands and not _reached(incumbent, target):
        # polish the best Hermitian witness over general arguments
        _, Wv = _diam_ascent(L, _best(cands)[1], budget.iters, coarse)
        cands.append((safe_ratio(Wv), Wv))
    return _best(cands) if cands else (0.0, np.eye(L.n, dtype=np.complex128))


def _estimate(phi: SuperOp, quantity: str, level: int, budget: Budget,
              extra_seeds: list[np.ndarray] = (), stream: int = 0,
              certs: Certificates | None = None) -> DiamEstimate:
    certs = certs or Certificates(phi)
    base = LEVEL_QUANTITY.get(quantity, quantity)
    L = Amplified(phi, level)
    if base != "op_norm":
        if L.n == 1:
            return _trivial_domain(quantity, level)
        if not phi.flags.paraunital:
            return _unbounded(phi, quantity, level, budget.grid)
    if quantity in ("sdiam", "diam") and is_scalar_valued(phi):
        W = witness_library(phi.dim_in, 1, base == "sdiam")[0]
        return DiamEstimate(quantity, 0.0, 0.0, W, "phi.1 structure", 1, False, 0.0)
    seeds = list(extra_seeds) + witness_library(phi.dim_in, level, base == "sdiam")
    upper, cert = certs.upper(quantity)
    # amplified levels start from lifted witnesses, so fewer random restarts suffice
    restarts = budget.restarts if level == 1 else max(4, budget.restarts // level)
    value, W = _search(L, quantity, seeds, budget, stream, upper, restarts)
    return DiamEstimate(quantity, value, upper, W, cert, level, False, value)


def map_norm(phi: SuperOp, budget: Budget = Budget()) -> DiamEstimate:
    """``||Phi|| = max ||Phi(A)||`` over ``||A|| <= 1``."""
    return _estimate(phi, "op_norm", 1, budget)


def sdiam_estimate(phi: SuperOp, budget: Budget = Budget()) -> DiamEstimate:
    """Supremum of ``diam Phi(E) / diam E`` over Hermitian ``E``."""
    return _estimate(phi, "sdiam", 1, budget)


def diam_estimate(phi: SuperOp, budget: Budget = Budget(),
                  sdiam: DiamEstimate | None = None) -> DiamEstimate:
    """Supremum of ``diam Phi(E) / diam E`` over all ``E``.

    For self-adjoint maps this equals the Hermitian version; the Hermitian
    witness seeds the complex search.
    """
    seeds = []
    if phi.flags.paraunital and phi.dim_in > 1:
        sd = sdiam if sdiam is not None else sdiam_estimate(phi, budget)
        if sd.witness is not None and not sd.unbounded:
            seeds.append(sd.witness)
    return _estimate(phi, "diam", 1, budget, seeds, stream=1)


def cb_lower(phi: SuperOp, level: int, quantity: str = "cb",
             budget: Budget = Budget(), full_chain: bool = False) -> DiamEstimate:
    """Lower bound for ``quantity`` in {cb, cbdiam, cbsdiam} from levels ``1..level``.

    Each level is seeded with the lifted best witness of the previous level,
    so the reported lower bound never decreases with ``level``.  The upper
    bound is valid for the supremum over all levels.  The chain stops once
    the lower bound meets it, unless ``full_chain`` is set.
    """
    if quantity not in LEVEL_QUANTITY:
        raise ValueError(f"cb_lower quantity must be one of {sorted(LEVEL_QUANTITY)}")
    if level < 1:
        raise ValueError("level must be positive")
    n = phi.dim_in
    if level * max(n, phi.dim_out) > budget.max_dim:
        raise ResourceLimit(f"level {level} needs dimension {level * max(n, phi.dim_out)} "
                            f"> max_dim={budget.max_dim}")
    certs = Certificates(phi)
    base = LEVEL_QUANTITY[quantity]
    witnesses: dict[int, np.ndarray] = {}
    best: DiamEstimate | None = None
    best_level = 1
    for j in range(1, level + 1):
        seeds = witness_library(n, j, base == "sdiam", witnesses)
        if best is not None and best.witness is not None and not best.unbounded:
            seeds.insert(0, lift_witness(best.witness, n, best_level, j))
        est = _estimate(phi, quantity, j, budget, seeds, stream=100 + j, certs=certs)
        if est.unbounded:
            return est
        witnesses[j] = est.witness
        if best is not None and est.lower < best.lower - 1e-9 * max(1.0, best.lower):
            raise ArithmeticError(f"level {j} lower bound decreased: {est.lower} < {best.lower}")
        if best is None or est.lower >= best.lower:
            best, best_level = est, j
        if not full_chain and _reached(best.lower, best.upper):
            break
    return best


# ---------------------------------------------------------------------------
# whole-map analysis and the inequality ledger


@dataclass(frozen=True)
class LedgerEntry:
    relation: str
    status: str  # pass | violation | skipped | inconclusive | refuted
    lhs: float | None = None
    rhs: float | None = None
    detail: str = ""

    def as_dict(self) -> dict:
        return {"relation": self.relation, "status": self.status,
                "lhs": None if self.lhs is None else _json_num(self.lhs),
                "rhs": None if self.rhs is None else _json_num(self.rhs),
                "detail": self.detail}


def default_levels(phi: SuperOp, max_dim: int = MAX_DIM) -> dict[str, int]:
    """Amplification levels used by :func:`analyze_map`.

    The cb norm of a map into ``M_m`` is attained at level ``m``; diameter
    quantities get ``2m`` so that doubled witnesses fit.
    """
    cap = max(1, max_dim // max(phi.dim_in, phi.dim_out))
    m = phi.dim_out
    # doubling witnesses pay off for self-adjoint maps; general arguments at
    # high levels are expensive to search
    diam_level = 2 * m if phi.flags.self_adjoint else 2
    return {"cb": min(m, cap), "cbsdiam": min(2 * m, cap), "cbdiam": min(diam_level, cap)}


def analyze_map(phi: SuperOp, budget: Budget = Budget(),
                levels: dict[str, int] | None = None) -> dict[str, DiamEstimate]:
    levels = levels or default_levels(phi, budget.max_dim)
    out = {"op_norm": map_norm(phi, budget), "sdiam": sdiam_estimate(phi, budget)}
    out["diam"] = diam_estimate(phi, budget, out["sdiam"])
    for q in ("cb", "cbsdiam", "cbdiam"):
        out[q] = cb_lower(phi, levels[q], q, budget)
    return out


def section_inverse_cp(phi: SuperOp) -> SuperOp | None:
    """A CP left inverse of ``phi`` when the canonical one is CP, else None."""
    if not (phi.flags.self_adjoint and phi.dim_in > 1):
        return None
    try:
        psi = left_inverse(phi)
    except NullSpaceTooLarge:
        return None
    return psi if psi.flags.cp else None


def _check(relation: str, lower: float | None, upper: float | None, tol: float,
           detail: str = "") -> LedgerEntry:
    """Sound check ``lower <= upper``: only certified ends are compared."""
    if lower is None or upper is None or math.isinf(upper) or math.isnan(lower):
        return LedgerEntry(relation, "skipped", lower, upper, "missing certified bound")
    ok = lower <= upper + tol * max(1.0, abs(upper))
    return LedgerEntry(relation, "pass" if ok else "violation", lower, upper, detail)


def inequality_ledger(phi: SuperOp, estimates: dict[str, DiamEstimate],
                      tol: float = 1e-6) -> list[LedgerEntry]:
    """Check the general inequalities between the seminorms of ``phi``.

    Each relation ``a <= b`` compares a certified lower bound for ``a`` with a
    certified upper bound for ``b``, so a violation means a genuine bug.
    """
    e = estimates
    fl = phi.flags

    def lo(q):
        est = e.get(q)
        return None if est is None or est.unbounded else est.lower

    def up(q):
        est = e.get(q)
        return None if est is None or est.unbounded else est.upper

    def scaled(x, s, shift=0.0):
        return None if x is None else s * x + shift

    out = [
        _check("diam <= 2 op_norm", lo("diam"), scaled(up("op_norm"), 2), tol),
        _check("sdiam <= op_norm", lo("sdiam"), up("op_norm"), tol),
        _check("sdiam <= diam", lo("sdiam"), up("diam"), tol),
        _check("op_norm <= cb", lo("op_norm"), up("cb"), tol),
        _check("diam <= cbdiam", lo("diam"), up("cbdiam"), tol),
        _check("sdiam <= cbsdiam", lo("sdiam"), up("cbsdiam"), tol),
        _check("cb/2 <= cbsdiam", scaled(lo("cb"), 0.5), up("cbsdiam"), tol),
        _check("cbsdiam <= cb", lo("cbsdiam"), up("cb"), tol),
        _check("cbsdiam <= cbdiam", lo("cbsdiam"), up("cbdiam"), tol),
        _check("cbdiam <= 2 cb", lo("cbdiam"), scaled(up("cb"), 2), tol),
    ]
    if fl.self_adjoint:
        out.append(_check("self-adjoint: cb <= cbsdiam", lo("cb"), up("cbsdiam"), tol))
        out.append(_check("self-adjoint: diam <= sdiam", lo("diam"), up("sdiam"), tol))
    if fl.unital and fl.cp:
        out.append(_check("ucp: diam <= 1", lo("diam"), 1.0, tol))
        out.append(_check("ucp: cbdiam <= 1", lo("cbdiam"), 1.0, tol))
    if fl.unital and fl.self_adjoint and section_inverse_cp(phi) is not None:
        out.append(_check("section: 1 <= sdiam", 1.0, up("sdiam"), tol))
        out.append(_check("section: op_norm <= 4 sdiam - 2", lo("op_norm"),
                          scaled(up("sdiam"), 4, -2.0), tol))
    return out


def submultiplicativity(psi: SuperOp, phi: SuperOp, budget: Budget = Budget(),
                        tol: float = 1e-6) -> LedgerEntry:
    """``diam(psi o phi) <= diam(psi) diam(phi)``, checked lower against uppers."""
    comp = diam_estimate(compose(psi, phi), budget)
    a, b = diam_estimate(psi, budget), diam_estimate(phi, budget)
    if comp.unbounded or a.unbounded or b.unbounded:
        return LedgerEntry("diam(psi o phi) <= diam(psi) diam(phi)", "skipped",
                           detail="a factor is not paraunital")
    return _check("diam(psi o phi) <= diam(psi) diam(phi)", comp.lower, a.upper * b.upper, tol)


def separation_check(psi: SuperOp, budget: Budget = Budget(), samples: int = 4,
                     tol: float = 1e-6) -> list[LedgerEntry]:
    """Distance from a ucp bijection ``psi`` to unitary conjugations ``U``.

    With ``eps = sdiam(psi^-1) - 1``, every ``U`` satisfies
    ``||psi - U||_cb >= eps/(1+eps)``: the norm of ``id - U^-1 psi`` on
    Hermitian arguments is at most its cb norm, and ``(1 - that) sdiam(psi^-1) <= 1``.
    This bound is checked soundly (pass, violation or inconclusive).

    The twice-larger bound ``2 eps/(1+eps)`` is reported as a separate soft
    entry.  It is ``refuted`` when the certified cb upper bound falls below
    it; the depolarizing mixes ``(1-t) id + t tr(.)I/n`` do this for every t.
    """
    fl = psi.flags
    if not (fl.unital and fl.cp) or psi.dim_in != psi.dim_out or psi.dim_in < 2:
        return [LedgerEntry("separation from unitary conjugations", "skipped",
                            detail="needs a unital CP bijection")]
    n = psi.dim_in
    inv = from_transfer(np.linalg.inv(psi.transfer), n, n)
    eps = max(0.0, sdiam_estimate(inv, budget).lower - 1)
    rng = _rng(budget, 900)
    units = [np.eye(n, dtype=np.complex128)] + [_random_unitary(rng, n) for _ in range(samples)]
    level = max(1, min(n, budget.max_dim // n))
    out = []
    for idx, u in enumerate(units):
        est = cb_lower(psi - from_kraus([u]), level, "cb", budget)
        low, high = est.lower, est.upper
        info = f"eps={eps:.6g}; cb distance in [{low:.6g}, {high:.6g}]"
        bound = eps / (1 + eps)
        rel = f"separation U#{idx}: ||psi - U||_cb >= eps/(1+eps)"
        if low >= bound - tol:
            out.append(LedgerEntry(rel, "pass", bound, low, info))
        elif high < bound - tol:
            out.append(LedgerEntry(rel, "violation", bound, high, info))
        else:
            out.append(LedgerEntry(rel, "inconclusive", bound, high, info))
        stated = 2 * eps / (1 + eps)
        rel = f"separation U#{idx}: ||psi - U||_cb >= 2eps/(1+eps) (stated)"
        if low >= stated - tol:
            out.append(LedgerEntry(rel, "pass", stated, low, info))
        elif high < stated - tol:
            out.append(LedgerEntry(rel, "refuted", stated, high, info))
        else:
            out.append(LedgerEntry(rel, "inconclusive", stated, high, info))
    return out


__all__ = [
    "Budget", "DiamEstimate", "Amplified", "Certificates", "LedgerEntry", "QUANTITIES",
    "map_norm", "sdiam_estimate", "diam_estimate", "cb_lower", "witness_ratio",
    "witness_library", "swap_witness", "off_diagonal_identity", "lift_witness",
    "analyze_map", "default_levels", "inequality_ledger", "submultiplicativity",
    "separation_check", "section_inverse_cp",
]
