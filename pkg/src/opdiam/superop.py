"""Linear maps between matrix algebras, stored by their Choi matrix.

Conventions
-----------
For ``Phi: M_n -> M_m`` the Choi matrix is the ``nm x nm`` block matrix whose
block ``(i, j)`` is ``Phi(E_ij)``; entry ``choi[i*m + p, j*m + q]`` equals
``Phi(E_ij)[p, q]``.  Viewed as a 4-tensor ``C[i, p, j, q]``::

    Phi(A)[p, q] = sum_ij A[i, j] C[i, p, j, q]

Vectorization stacks columns: ``vec(A)[i + n*j] = A[i, j]``.  The transfer
matrix ``T`` satisfies ``vec(Phi(A)) = T vec(A)`` and

    T[p + m*q, i + n*j] = C[i, p, j, q]

A Kraus operator ``K`` (``m x n``) contributes ``vec(K) vec(K)^*`` to the Choi
matrix, with ``vec(K)[i*m + p] = K[p, i]``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import (DimensionMismatch, NonSelfAdjoint, NotParaunital, NotScaledTP,
                     NullSpaceTooLarge, ParseError, ResourceLimit)
from .linalg import ATOL, as_matrix, matrix_from_json, matrix_to_json, operator_norm

MAX_DIM = 64
POSITIVITY_PROBES = 500


@dataclass(frozen=True)
class Flags:
    self_adjoint: bool
    unital: bool
    paraunital: bool
    paraunital_scalar: complex | None
    scaled_tp: bool
    trace_scale: complex | None
    cp: bool
    positive_sampled: bool
    probes: int

    def as_dict(self) -> dict:
        def num(z):
            if z is None:
                return None
            z = complex(z)
            return z.real if z.imag == 0 else [z.real, z.imag]

        return {
            "self_adjoint": self.self_adjoint,
            "unital": self.unital,
            "paraunital": self.paraunital,
            "paraunital_scalar": num(self.paraunital_scalar),
            "scaled_tp": self.scaled_tp,
            "trace_scale": num(self.trace_scale),
            "cp": self.cp,
            "positive_sampled": self.positive_sampled,
            "positive_probes": self.probes,
        }


@dataclass(frozen=True, eq=False)
class SuperOp:
    """A linear map ``M_n -> M_m``; immutable once built."""

    dim_in: int
    dim_out: int
    choi: np.ndarray = field(repr=False)
    label: str = ""

    def __post_init__(self):
        n, m = self.dim_in, self.dim_out
        C = np.array(self.choi, dtype=np.complex128)
        if C.shape != (n * m, n * m):
            raise DimensionMismatch(f"Choi matrix must be {n * m}x{n * m}, got {C.shape}")
        C.setflags(write=False)
        object.__setattr__(self, "choi", C)

    # -- views --------------------------------------------------------------
    @cached_property
    def tensor(self) -> np.ndarray:
        """``C[i, p, j, q] = Phi(E_ij)[p, q]``."""
        n, m = self.dim_in, self.dim_out
        return self.choi.reshape(n, m, n, m)

    @cached_property
    def transfer(self) -> np.ndarray:
        n, m = self.dim_in, self.dim_out
        return self.tensor.transpose(3, 1, 2, 0).reshape(m * m, n * n)

    @cached_property
    def flags(self) -> Flags:
        return classify(self)

    def block(self, i: int, j: int) -> np.ndarray:
        m = self.dim_out
        return self.choi[i * m:(i + 1) * m, j * m:(j + 1) * m]

    # -- action -------------------------------------------------------------
    def __call__(self, A) -> np.ndarray:
        return apply(self, A)

    def adjoint_apply(self, B) -> np.ndarray:
        """Hilbert-Schmidt adjoint: ``tr(B* Phi(A)) = tr(Phi^dag(B)* A)``."""
        B = np.asarray(B, dtype=np.complex128)
        return np.einsum("...pq,ipjq->...ij", B, self.tensor.conj())

    # -- arithmetic ---------------------------------------------------------
    def _check_same(self, other: "SuperOp"):
        if (self.dim_in, self.dim_out) != (other.dim_in, other.dim_out):
            raise DimensionMismatch("maps have different dimensions")

    def __add__(self, other: "SuperOp") -> "SuperOp":
        self._check_same(other)
        return SuperOp(self.dim_in, self.dim_out, self.choi + other.choi)

    def __sub__(self, other: "SuperOp") -> "SuperOp":
        self._check_same(other)
        return SuperOp(self.dim_in, self.dim_out, self.choi - other.choi)

    def __mul__(self, scalar) -> "SuperOp":
        return SuperOp(self.dim_in, self.dim_out, complex(scalar) * self.choi)

    __rmul__ = __mul__

    def __neg__(self) -> "SuperOp":
        return SuperOp(self.dim_in, self.dim_out, -self.choi)

    def translate(self, gamma) -> "SuperOp":
        """``A -> Phi(A) + gamma tr(A) I_m``."""
        return self + complex(gamma) * trace_map(self.dim_in, self.dim_out)


@dataclass(frozen=True)
class KrausDecomposition:
    """``Phi(A) = sum K A K* (ops_plus) - sum L A L* (ops_minus)``."""

    ops_plus: list[np.ndarray]
    ops_minus: list[np.ndarray]


class SectionTranslation(NamedTuple):
    gamma: float
    phi_sec: SuperOp
    psi_cp: SuperOp
    beta: float


# ---------------------------------------------------------------------------
# construction


def from_choi(choi, dim_in: int, dim_out: int | None = None, label: str = "") -> SuperOp:
    C = as_matrix(choi)
    if dim_out is None:
        dim_out, rem = divmod(C.shape[0], dim_in)
        if rem:
            raise DimensionMismatch(f"Choi size {C.shape[0]} not divisible by dim_in={dim_in}")
    return SuperOp(dim_in, dim_out, C, label)


def _kraus_vec(K: np.ndarray) -> np.ndarray:
    return K.T.reshape(-1)


def from_kraus(plus: Sequence, minus: Sequence = (), label: str = "") -> SuperOp:
    ops = [as_matrix(K) for K in plus] + [as_matrix(K) for K in minus]
    if not ops:
        raise DimensionMismatch("at least one Kraus operator is needed to fix dimensions")
    m, n = ops[0].shape
    if any(K.shape != (m, n) for K in ops):
        raise DimensionMismatch("Kraus operators must share one shape")
    C = np.zeros((n * m, n * m), dtype=np.complex128)
    for K in plus:
        v = _kraus_vec(as_matrix(K))
        C += np.outer(v, v.conj())
    for K in minus:
        v = _kraus_vec(as_matrix(K))
        C -= np.outer(v, v.conj())
    return SuperOp(n, m, C, label)


def from_transfer(T, dim_in: int, dim_out: int, label: str = "") -> SuperOp:
    T = as_matrix(T)
    n, m = dim_in, dim_out
    if T.shape != (m * m, n * n):
        raise DimensionMismatch(f"transfer matrix must be {m * m}x{n * n}, got {T.shape}")
    C = T.reshape(m, m, n, n).transpose(3, 1, 2, 0).reshape(n * m, n * m)
    return SuperOp(n, m, C, label)


def from_function(f: Callable[[np.ndarray], np.ndarray], dim_in: int, dim_out: int,
                  label: str = "") -> SuperOp:
    """Tabulate a linear function on the matrix units."""
    n, m = dim_in, dim_out
    C = np.zeros((n * m, n * m), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            E = np.zeros((n, n), dtype=np.complex128)
            E[i, j] = 1
            out = as_matrix(f(E))
            if out.shape != (m, m):
                raise DimensionMismatch(f"f returned shape {out.shape}, expected ({m}, {m})")
            C[i * m:(i + 1) * m, j * m:(j + 1) * m] = out
    return SuperOp(n, m, C, label)


def trace_map(dim_in: int, dim_out: int) -> SuperOp:
    """``A -> tr(A) I_m``; its Choi matrix is the identity."""
    return SuperOp(dim_in, dim_out, np.eye(dim_in * dim_out), "trace")


def identity_map(n: int) -> SuperOp:
    return from_kraus([np.eye(n)], label="identity")


def apply(phi: SuperOp, A) -> np.ndarray:
    """``Phi(A)``; also accepts a stack of matrices with shape ``(..., n, n)``."""
    A = np.asarray(A, dtype=np.complex128)
    if A.shape[-2:] != (phi.dim_in, phi.dim_in):
        raise DimensionMismatch(f"argument shape {A.shape} does not match dim_in={phi.dim_in}")
    return np.einsum("...ij,ipjq->...pq", A, phi.tensor)


def compose(psi: SuperOp, phi: SuperOp) -> SuperOp:
    """``psi o phi``."""
    if phi.dim_out != psi.dim_in:
        raise DimensionMismatch(f"cannot compose: phi outputs M_{phi.dim_out}, psi takes M_{psi.dim_in}")
    T = np.einsum("ipjq,prqs->irjs", phi.tensor, psi.tensor)
    n, k = phi.dim_in, psi.dim_out
    return SuperOp(n, k, T.reshape(n * k, n * k))


def adjoint_map(phi: SuperOp) -> SuperOp:
    """Hilbert-Schmidt adjoint ``M_m -> M_n``."""
    n, m = phi.dim_in, phi.dim_out
    C = phi.tensor.conj().transpose(1, 0, 3, 2).reshape(n * m, n * m)
    return SuperOp(m, n, C)


# ---------------------------------------------------------------------------
# classification


def unit_image(phi: SuperOp) -> np.ndarray:
    return np.einsum("ipiq->pq", phi.tensor)


def _scale(phi: SuperOp) -> float:
    return max(1.0, float(np.max(np.abs(phi.choi))))


def classify(phi: SuperOp, atol: float = ATOL, probes: int = POSITIVITY_PROBES,
             seed: int = 0) -> Flags:
    """Structural flags of ``phi``.

    ``positive_sampled`` is one-sided: it reports that none of ``probes``
    random rank-one projections was sent to a non-positive matrix.
    """
    n, m = phi.dim_in, phi.dim_out
    tol = atol * _scale(phi)
    C = phi.choi
    self_adjoint = float(np.max(np.abs(C - C.conj().T))) <= tol

    U = unit_image(phi)
    c = np.trace(U) / m
    paraunital = float(np.max(np.abs(U - c * np.eye(m)))) <= tol
    unital = paraunital and abs(c - 1) <= tol

    traces = np.einsum("ipjp->ij", phi.tensor)
    k = traces[0, 0]
    scaled_tp = float(np.max(np.abs(traces - k * np.eye(n)))) <= tol

    cp = False
    positive = False
    if self_adjoint:
        H = (C + C.conj().T) / 2
        w = np.linalg.eigvalsh(H)
        cp = bool(w[0] >= -atol * max(1.0, float(np.max(np.abs(w)))))
        if cp:
            positive = True
        elif probes > 0:
            rng = np.random.default_rng(seed)
            V = rng.normal(size=(probes, n)) + 1j * rng.normal(size=(probes, n))
            V /= np.linalg.norm(V, axis=1, keepdims=True)
            P = np.einsum("ti,tj->tij", V, V.conj())
            out = apply(phi, P)
            ev = np.linalg.eigvalsh((out + np.swapaxes(out, -1, -2).conj()) / 2)
            positive = bool(np.all(ev[:, 0] >= -tol))

    return Flags(
        self_adjoint=bool(self_adjoint),
        unital=bool(unital),
        paraunital=bool(paraunital),
        paraunital_scalar=complex(c) if paraunital else None,
        scaled_tp=bool(scaled_tp),
        trace_scale=complex(k) if scaled_tp else None,
        cp=cp,
        positive_sampled=positive,
        probes=probes,
    )


def is_scalar_valued(phi: SuperOp, atol: float = ATOL) -> bool:
    """True when every ``Phi(E_ij)`` is a multiple of the identity (``Phi = phi . 1``)."""
    m = phi.dim_out
    T = phi.tensor
    diag = np.einsum("ipjp->ij", T) / m
    resid = T - np.einsum("ij,pq->ipjq", diag, np.eye(m))
    return float(np.max(np.abs(resid))) <= atol * _scale(phi)


# ---------------------------------------------------------------------------
# transformations


def amplify(phi: SuperOp, k: int, max_dim: int = MAX_DIM) -> SuperOp:
    """Blockwise action ``[A_ab] -> [Phi(A_ab)]`` on ``M_k(M_n)``."""
    if k < 1:
        raise ValueError("amplification level must be positive")
    if k * max(phi.dim_in, phi.dim_out) > max_dim:
        raise ResourceLimit(
            f"level {k} needs dimension {k * max(phi.dim_in, phi.dim_out)} > max_dim={max_dim}")
    if k == 1:
        return phi
    n, m = phi.dim_in, phi.dim_out
    I = np.eye(k)
    T = np.einsum("ac,bd,ipjq->aicpbjdq", I, I, phi.tensor)
    size = k * n * k * m
    label = f"{phi.label}^({k})" if phi.label else ""
    return SuperOp(k * n, k * m, T.reshape(size, size), label)


def choi_kraus(phi: SuperOp, atol: float = ATOL) -> KrausDecomposition:
    """Jordan split of a self-adjoint map into two CP maps via the Choi spectrum."""
    if not phi.flags.self_adjoint:
        raise NonSelfAdjoint("choi_kraus needs a self-adjoint map (Hermitian Choi matrix)")
    n, m = phi.dim_in, phi.dim_out
    H = (phi.choi + phi.choi.conj().T) / 2
    w, V = np.linalg.eigh(H)
    cut = atol * max(1.0, float(np.max(np.abs(w))))
    plus, minus = [], []
    for lam, vec in zip(w[::-1], V[:, ::-1].T):
        K = np.sqrt(abs(lam)) * vec.reshape(n, m).T
        if lam > cut:
            plus.append(K)
        elif lam < -cut:
            minus.append(K)
    return KrausDecomposition(plus, minus)


def negative_part(phi: SuperOp, atol: float = ATOL) -> SuperOp:
    kd = choi_kraus(phi, atol)
    if not kd.ops_minus:
        return SuperOp(phi.dim_in, phi.dim_out, np.zeros_like(phi.choi))
    return from_kraus(kd.ops_minus)


def trace_translate_cp(phi: SuperOp, atol: float = ATOL) -> tuple[float, SuperOp]:
    """Smallest-effort CP translate ``Phi + beta tr(.) I_m``.

    ``beta = m^2 ||Phi_-(I_n)||`` where ``Phi_-`` is the negative CP part of the
    Choi split; the norm of a CP map is attained at the unit.
    """
    kd = choi_kraus(phi, atol)
    if not kd.ops_minus:
        return 0.0, phi
    neg = from_kraus(kd.ops_minus)
    m = phi.dim_out
    beta = m * m * operator_norm(unit_image(neg))
    return beta, phi.translate(beta)


def hermitian_basis(n: int) -> list[np.ndarray]:
    """Orthonormal (for ``tr(A* B)``) basis of M_n made of Hermitian matrices."""
    basis = []
    for k in range(n):
        E = np.zeros((n, n), dtype=np.complex128)
        E[k, k] = 1
        basis.append(E)
    s = 1 / np.sqrt(2)
    for k in range(n):
        for l in range(k + 1, n):
            X = np.zeros((n, n), dtype=np.complex128)
            X[k, l] = X[l, k] = s
            Y = np.zeros((n, n), dtype=np.complex128)
            Y[k, l], Y[l, k] = 1j * s, -1j * s
            basis.extend([X, Y])
    return basis


def traceless_hermitian_basis(n: int) -> list[np.ndarray]:
    """Orthonormal basis of the trace-zero Hermitian matrices (dimension n^2 - 1)."""
    basis = [B for B in hermitian_basis(n) if np.count_nonzero(np.diag(B)) == 0]
    for k in range(1, n):
        d = np.zeros(n)
        d[:k] = 1
        d[k] = -k
        basis.append(np.diag(d / np.linalg.norm(d)).astype(np.complex128))
    return basis


def _coords(basis: list[np.ndarray], X: np.ndarray) -> np.ndarray:
    return np.array([np.trace(H @ X) for H in basis])


def injective_on_traceless(phi: SuperOp, rtol: float = 1e-9) -> bool:
    n = phi.dim_in
    basis = traceless_hermitian_basis(n)
    if not basis:
        return True
    cols = np.stack([apply(phi, B).reshape(-1) for B in basis], axis=1)
    s = np.linalg.svd(cols, compute_uv=False)
    return bool(s[-1] > rtol * max(s[0], 1e-300))


def left_inverse(phi: SuperOp) -> SuperOp:
    """A left inverse ``M_m -> M_n`` of an injective map.

    It inverts ``phi`` on its image, using coordinates in a Hermitian basis so
    that self-adjoint maps get a self-adjoint inverse, and sends a Hermitian
    complement of the image to zero.
    """
    n, m = phi.dim_in, phi.dim_out
    dom = hermitian_basis(n)
    cod = hermitian_basis(m)
    P = np.stack([_coords(cod, apply(phi, B)) for B in dom], axis=1)
    if not phi.flags.self_adjoint:
        raise NonSelfAdjoint("left_inverse works in real Hermitian coordinates")
    P = np.real(P)
    U, s, _ = np.linalg.svd(P)
    if s[-1] <= 1e-9 * s[0]:
        raise NullSpaceTooLarge("map is not injective")
    complement = U[:, n * n:]
    R = np.linalg.inv(np.hstack([P, complement]))[: n * n, :]
    # coordinates of each matrix unit E_pq of M_m in the Hermitian basis
    X = np.array([[[H[q, p] for q in range(m)] for p in range(m)] for H in cod])
    a = np.einsum("rt,tpq->rpq", R, X)
    C = np.einsum("rpq,rij->piqj", a, np.stack(dom))
    return SuperOp(m, n, C.reshape(m * n, m * n), "left-inverse")


def section_translate(phi: SuperOp, atol: float = ATOL, rtol: float = 1e-8) -> SectionTranslation:
    """Translate ``phi`` by a multiple of the trace into a section of a CP map.

    Needs ``phi`` self-adjoint, paraunital, scaled trace-preserving and with
    null space inside the span of the identity.  Returns ``gamma`` with
    ``phi_sec = phi + gamma tr(.) I_m`` and a CP map ``psi_cp`` such that
    ``psi_cp o phi_sec`` is the identity on ``M_n``.
    """
    flags = phi.flags
    if not flags.self_adjoint:
        raise NonSelfAdjoint("section_translate needs a self-adjoint map")
    if not flags.scaled_tp:
        raise NotScaledTP("tr(Phi(A)) is not a fixed multiple of tr(A)")
    if not flags.paraunital:
        raise NotParaunital("Phi(I) is not a multiple of the identity")
    if not injective_on_traceless(phi):
        raise NullSpaceTooLarge("null space of Phi is not contained in span{I}")

    n, m = phi.dim_in, phi.dim_out
    c = float(np.real(flags.paraunital_scalar))
    k = float(np.real(flags.trace_scale))
    shift = 0.0
    work = phi
    if c <= atol:
        shift = abs(c) + 1
        work = phi.translate(shift)
        c += shift * n
        k += shift * m

    psi = left_inverse(work)

    beta, psi_cp = trace_translate_cp(psi, atol)
    gamma_local = -beta * k / (1 / c + beta * m)
    phi_sec = work.translate(gamma_local)
    gamma = shift + gamma_local

    ident = compose(psi_cp, phi_sec)
    err = float(np.max(np.abs(ident.transfer - np.eye(n * n))))
    if err > rtol * max(1.0, float(np.max(np.abs(phi_sec.choi)))):
        raise ArithmeticError(f"section postcondition failed: |psi o phi - id| = {err:.3e}")
    if not classify(psi_cp, atol, probes=0).cp:
        raise ArithmeticError("translated inverse is not completely positive")
    return SectionTranslation(float(gamma), phi_sec, psi_cp, float(beta))


# ---------------------------------------------------------------------------
# JSON


def superop_to_json(phi: SuperOp, kind: str = "choi") -> dict:
    out = {"dim_in": phi.dim_in, "dim_out": phi.dim_out, "kind": kind}
    if kind == "choi":
        out["data"] = matrix_to_json(phi.choi)
    elif kind == "transfer":
        out["data"] = matrix_to_json(phi.transfer)
    elif kind == "kraus":
        kd = choi_kraus(phi)
        out["data"] = {"plus": [matrix_to_json(K) for K in kd.ops_plus],
                       "minus": [matrix_to_json(K) for K in kd.ops_minus]}
    else:
        raise ValueError(f"unknown SuperOp kind {kind!r}")
    return out


def superop_from_json(obj) -> SuperOp:
    if not isinstance(obj, dict):
        raise ParseError("superop: expected a JSON object")
    for key in ("dim_in", "dim_out", "kind", "data"):
        if key not in obj:
            raise ParseError(f"superop: missing field {key!r}")
    n, m, kind = obj["dim_in"], obj["dim_out"], obj["kind"]
    if not (isinstance(n, int) and isinstance(m, int) and n > 0 and m > 0):
        raise ParseError("superop: dim_in and dim_out must be positive integers")
    data = obj["data"]
    try:
        if kind == "choi":
            return from_choi(matrix_from_json(data, "superop.data"), n, m)
        if kind == "transfer":
            return from_transfer(matrix_from_json(data, "superop.data"), n, m)
        if kind == "kraus":
            if not isinstance(data, dict) or "plus" not in data:
                raise ParseError("superop.data: Kraus payload needs a 'plus' list")
            plus = [matrix_from_json(K, f"superop.data.plus[{i}]") for i, K in enumerate(data["plus"])]
            minus = [matrix_from_json(K, f"superop.data.minus[{i}]")
                     for i, K in enumerate(data.get("minus", []))]
            if not plus and not minus:
                return SuperOp(n, m, np.zeros((n * m, n * m)))
            phi = from_kraus(plus, minus)
            if (phi.dim_in, phi.dim_out) != (n, m):
                raise ParseError(f"superop: Kraus shapes give M_{phi.dim_in}->M_{phi.dim_out}, "
                                 f"declared M_{n}->M_{m}")
            return phi
    except DimensionMismatch as exc:
        raise ParseError(f"superop: {exc}") from None
    raise ParseError(f"superop: unknown kind {kind!r}")


def load_superop(path) -> SuperOp:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: line {exc.lineno} col {exc.colno}: {exc.msg}") from None
    return superop_from_json(obj)
