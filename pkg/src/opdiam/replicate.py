"""Replication suite: every concrete example fact, checked at desk scale.

Each fact is a small function returning a computed interval.  A row passes
when the interval and the expected value agree under the fact's relation:

* ``brackets``: ``lower - tol <= expected <= upper + tol``;
* ``at_least``: the certified lower end is at least ``expected - tol``;
* ``at_most``: the certified upper end is at most ``expected + tol``.
"""
from __future__ import annotations

import csv
import fnmatch
import functools
import io
import json
import math
import time
import zlib
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .diamnorm import (Budget, analyze_map, cb_lower, diam_estimate, inequality_ledger,
                       map_norm, off_diagonal_identity, sdiam_estimate, separation_check,
                       submultiplicativity, swap_witness, witness_ratio)
from .errors import NotAnObservable, NotScaledTP, NotUCP
from .linalg import as_square, is_hermitian, lambda_max, lambda_min
from .maps import (EXAMPLE_IDS, TrigMap, choi_map, completely_depolarizing, corner,
                   counterexample, diambound, final_phi, final_psi, id_plus_tr, named_example,
                   paulsen, paulsen_positive_on_span, random_superop, transpose)
from .numrange import (centering_constants, jung_circle, numerical_diameter,
                       rotated_real_parts)
from .superop import (SuperOp, apply, compose, identity_map, section_translate, trace_map,
                      trace_translate_cp)

RELATIONS = ("brackets", "at_least", "at_most")
SEARCH_TOL = 2e-3


class Computed(NamedTuple):
    lower: float
    upper: float
    detail: str = ""
    inconclusive: bool = False


@dataclass(frozen=True)
class Fact:
    fact_id: str
    locator: str
    expected: float
    provenance: str  # published | derived | trivial
    relation: str
    tol: float
    compute: Callable[[int, Budget], Computed]


@dataclass(frozen=True)
class ReportRow:
    fact_id: str
    locator: str
    expected: float
    provenance: str
    relation: str
    lower: float
    upper: float
    tol: float
    status: str  # pass | fail | inconclusive
    runtime_ms: float
    detail: str = ""

    @property
    def regime(self) -> str:
        return "search" if self.tol >= 1e-4 else "closed-form"

    def as_dict(self, timings: bool = False) -> dict:
        out = {"fact_id": self.fact_id, "locator": self.locator,
               "expected": _num(self.expected), "provenance": self.provenance,
               "relation": self.relation, "lower": _num(self.lower), "upper": _num(self.upper),
               "tol": self.tol, "regime": self.regime, "status": self.status,
               "detail": self.detail}
        if timings:
            out["runtime_ms"] = round(self.runtime_ms, 3)
        return out


def _num(x: float):
    return x if math.isfinite(x) else ("inf" if x > 0 else ("-inf" if x < 0 else "nan"))


def judge(relation: str, expected: float, lower: float, upper: float, tol: float) -> bool:
    if relation == "brackets":
        return lower - tol <= expected <= upper + tol
    if relation == "at_least":
        return lower >= expected - tol
    if relation == "at_most":
        return upper <= expected + tol
    raise ValueError(f"unknown relation {relation!r}")


_FACTS: dict[str, Fact] = {}


def fact(fact_id: str, locator: str, expected: float, provenance: str,
         relation: str = "brackets", tol: float = 1e-8):
    def register(fn):
        _FACTS[fact_id] = Fact(fact_id, locator, expected, provenance, relation, tol, fn)
        return fn
    return register


def facts() -> list[Fact]:
    return [_FACTS[k] for k in sorted(_FACTS)]


def _rng(seed: int, fact_id: str) -> np.random.Generator:
    # one stream per fact so rows do not depend on each other
    return np.random.default_rng([seed, zlib.crc32(fact_id.encode())])


def _unit_vector(rng, n):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def _random_hermitian(rng, n):
    G = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (G + G.conj().T) / 2


def _spread(values) -> Computed:
    v = np.asarray(values, dtype=float)
    return Computed(float(v.min()), float(v.max()), f"{len(v)} samples")


def _point(x: float, detail: str = "") -> Computed:
    return Computed(float(x), float(x), detail)


def _interval(est) -> Computed:
    return Computed(est.lower, est.upper, f"{est.certificate}; level {est.level}")


def _matrix_unit(n, i, j):
    E = np.zeros((n, n), dtype=np.complex128)
    E[i, j] = 1
    return E


# ---------------------------------------------------------------------------
# numerical range geometry

@fact("range.rank_one.diam", "rank-one operators have numerical diameter one", 1.0, "published")
def _rank_one(seed, budget):
    rng = _rng(seed, "range.rank_one.diam")
    vals = []
    for _ in range(100):
        n = int(rng.integers(2, 9))
        u, v = _unit_vector(rng, n), _unit_vector(rng, n)
        vals.append(numerical_diameter(np.outer(u, v.conj())).value)
    return _spread(vals)


def _cube_roots() -> np.ndarray:
    w = np.exp(2j * np.pi / 3)
    return np.diag([1, w, w * w])


@fact("range.jung.diam", "diagonal unitary of cube roots: diameter", math.sqrt(3), "derived")
def _jung_diam(seed, budget):
    return _point(numerical_diameter(_cube_roots()).value)


@fact("range.jung.radius", "diagonal unitary of cube roots: enclosing radius", 1.0, "derived",
      tol=1e-6)
def _jung_radius(seed, budget):
    return _point(jung_circle(_cube_roots()).radius)


@fact("range.jung.ratio", "Jung bound saturated by the diagonal unitary", 1 / math.sqrt(3),
      "published", tol=1e-6)
def _jung_ratio(seed, budget):
    E = _cube_roots()
    return _point(jung_circle(E).radius / numerical_diameter(E).value)


@fact("range.centering.hermitian", "centered Hermitian norm is half the diameter", 0.0, "published")
def _centering(seed, budget):
    rng = _rng(seed, "range.centering.hermitian")
    gaps = []
    for _ in range(100):
        E = _random_hermitian(rng, int(rng.integers(2, 13)))
        k = centering_constants(E).k_re
        shifted = np.linalg.norm(E - k * np.eye(len(E)), 2)
        gaps.append(abs(shifted - numerical_diameter(E).value / 2))
    return _point(max(gaps), "max deviation over 100 samples")


# ---------------------------------------------------------------------------
# seminorms of the example maps

@fact("diambound.op_norm", "paraunital map of norm one", 1.0, "published", tol=1e-3)
def _diambound_norm(seed, budget):
    return _interval(map_norm(diambound(), budget))


@fact("diambound.diam", "paraunital map with diameter ratio at least sqrt 2", math.sqrt(2),
      "published", "at_least", 1e-3)
def _diambound_diam(seed, budget):
    return _interval(diam_estimate(diambound(), budget))


@fact("diambound.diam.witness", "matrix unit E_12 attains ratio sqrt 2", math.sqrt(2), "published")
def _diambound_witness(seed, budget):
    return _point(witness_ratio(diambound(), _matrix_unit(2, 0, 1), "diam"))


@fact("corner.op_norm", "corner map has norm one", 1.0, "published", tol=1e-3)
def _corner_norm(seed, budget):
    return _interval(map_norm(corner(1), budget))


@fact("corner.cb", "corner map has cb norm one", 1.0, "published", tol=1e-3)
def _corner_cb(seed, budget):
    return _interval(cb_lower(corner(1), 2, "cb", budget))


@fact("corner.sdiam", "corner map self-adjoint diameter one half", 0.5, "published", tol=SEARCH_TOL)
def _corner_sdiam(seed, budget):
    return _interval(sdiam_estimate(corner(1), budget))


@fact("corner.cbsdiam", "corner map amplified self-adjoint diameter one half", 0.5, "published",
      tol=SEARCH_TOL)
def _corner_cbsdiam(seed, budget):
    return _interval(cb_lower(corner(1), 2, "cbsdiam", budget, full_chain=True))


@fact("corner.block.sdiam", "block corner map on 2x2 blocks: self-adjoint diameter", 0.5,
      "published", tol=SEARCH_TOL)
def _corner_block_sdiam(seed, budget):
    return _interval(cb_lower(corner(2), 2, "cbsdiam", budget, full_chain=True))


def _transpose_diam(n):
    @fact(f"transpose.n{n}.diam", f"transpose on M_{n} has diameter one", 1.0, "published",
          tol=SEARCH_TOL)
    def run(seed, budget):
        return _interval(diam_estimate(transpose(n), budget))


def _transpose_cb(n):
    @fact(f"transpose.n{n}.cb", f"transpose on M_{n} has cb norm {n} via SWAP", float(n),
          "published", tol=1e-9)
    def run(seed, budget):
        phi = transpose(n)
        ratio = witness_ratio(phi, swap_witness(n), "cb", level=n)
        est = cb_lower(phi, n, "cb", budget)
        return Computed(ratio, est.upper, f"SWAP ratio {ratio:.12g}; {est.certificate}")


for _n in (2, 3):
    _transpose_diam(_n)
    _transpose_cb(_n)


@fact("transpose.n3.cbdiam", "amplified diameter of transpose on M_3 exceeds its diameter", 3.0,
      "published", "at_least", 1e-9)
def _transpose_cbdiam(seed, budget):
    return _interval(cb_lower(transpose(3), 6, "cbdiam", budget))


@fact("paulsen.positive_on_span", "transpose-corner map is positive on its operator system",
      1.0, "published", tol=0.0)
def _paulsen_positive(seed, budget):
    return _point(float(paulsen_positive_on_span(seed=seed)), "sampled")


@fact("paulsen.unital", "transpose-corner map is unital", 0.0, "published")
def _paulsen_unital(seed, budget):
    return _point(np.abs(apply(paulsen(), np.eye(4)) - np.eye(4)).max())


@fact("trig.norm", "unital positive map on trigonometric polynomials has norm two", 2.0,
      "published", tol=1e-6)
def _trig_norm(seed, budget):
    T = TrigMap()
    rng = _rng(seed, "trig.norm")
    best = np.linalg.norm(T((0, 1, 0)), 2) / T.sup_norm((0, 1, 0))
    for _ in range(200):
        f = rng.normal(size=3) + 1j * rng.normal(size=3)
        best = max(best, np.linalg.norm(T(f), 2) / T.sup_norm(f))
    return Computed(float(best), 2.0, "sampled lower; upper from 2x2 entries")


@fact("trig.diam", "trigonometric map preserves the diameter of z", 2.0, "published")
def _trig_diam(seed, budget):
    T = TrigMap()
    return _point(numerical_diameter(T((0, 1, 0))).value)


@fact("trig.diam_contractive", "trigonometric map is diameter contractive", 1.0, "published",
      "at_most", 1e-8)
def _trig_contractive(seed, budget):
    T = TrigMap()
    rng = _rng(seed, "trig.diam_contractive")
    ratios = []
    for _ in range(200):
        f = rng.normal(size=3) + 1j * rng.normal(size=3)
        ratios.append(numerical_diameter(T(f)).value / T.function_diameter(f))
    return _spread(ratios)


# ---------------------------------------------------------------------------
# Choi calculus and translations

@fact("choi_map.cp", "n tr(A) I - A is completely positive for n = 2..5", 0.0, "published",
      "at_least", 1e-10)
def _choi_cp(seed, budget):
    worst = min(lambda_min(choi_map(n).choi) / n for n in range(2, 6))
    return _point(worst, "smallest normalized Choi eigenvalue")


@fact("trace_translate.cp", "trace translate by m^2 |Phi_-(I)| is completely positive", 0.0,
      "published", "at_least", 1e-9)
def _trace_translate(seed, budget):
    rng = _rng(seed, "trace_translate.cp")
    worst = math.inf
    for _ in range(100):
        n, m = (int(x) for x in rng.integers(1, 5, size=2))
        phi = random_superop("hermitian_choi", n, m, seed=int(rng.integers(2**31)))
        _, cp = trace_translate_cp(phi)
        worst = min(worst, lambda_min(cp.choi) / max(1.0, np.linalg.norm(cp.choi, 2)))
    return _point(worst, "smallest relative Choi eigenvalue over 100 maps")


@fact("final.roundtrip", "final example maps are mutually inverse", 0.0, "derived", tol=1e-9)
def _final_roundtrip(seed, budget):
    comp = compose(final_psi(2), final_phi(2))
    return _point(np.abs(comp.choi - identity_map(2).choi).max())


@fact("final.section_translate", "section translate of the final map needs no shift", 0.0,
      "derived", tol=1e-9)
def _final_section(seed, budget):
    res = section_translate(final_phi(2))
    return _point(abs(res.gamma) + abs(res.beta), f"gamma={res.gamma:.3g} beta={res.beta:.3g}")


@fact("counterexample.not_scaled_tp", "counterexample map is not scaled trace-preserving", 1.0,
      "published", tol=0.0)
def _counter_raises(seed, budget):
    try:
        section_translate(counterexample())
    except NotScaledTP as exc:
        return _point(1.0, str(exc))
    return _point(0.0, "section_translate accepted the map")


@fact("counterexample.positive_image", "every trace translate sends diag(1,-1) to diag(2,0)",
      0.0, "published", tol=1e-12)
def _counter_image(seed, budget):
    phi = counterexample()
    A = np.diag([1.0, -1.0])
    err = max(np.abs(apply(phi + trace_map(2, 2) * g, A) - np.diag([2.0, 0.0])).max()
              for g in (-2, -1, 0, 1, 2))
    return _point(err)


@fact("final.psi.ucp_tp", "Psi is unital, trace-preserving and completely positive", 0.0,
      "published", tol=1e-10)
def _final_psi_flags(seed, budget):
    psi = final_psi(2)
    unital = np.abs(apply(psi, np.eye(2)) - np.eye(2)).max()
    tp = max(abs(np.trace(apply(psi, _matrix_unit(2, i, j))) - (i == j))
             for i in range(2) for j in range(2))
    cp = max(0.0, -lambda_min(psi.choi))
    return _point(max(unital, tp, cp), f"unital {unital:.1e}, tp {tp:.1e}, cp {cp:.1e}")


@fact("final.phi.unital", "the inverse map is unital", 0.0, "derived")
def _final_phi_unital(seed, budget):
    return _point(np.abs(apply(final_phi(2), np.eye(2)) - np.eye(2)).max())


@fact("final.phi.diam", "the inverse map has diameter n^2 = 4", 4.0, "published", tol=SEARCH_TOL)
def _final_phi_diam(seed, budget):
    return _interval(diam_estimate(final_phi(2), budget))


@fact("final.phi.diam.witness", "E_12 attains diameter ratio 4 under the inverse map", 4.0,
      "published", tol=1e-9)
def _final_phi_witness(seed, budget):
    return _point(witness_ratio(final_phi(2), _matrix_unit(2, 0, 1), "diam"))


@fact("final.phi.cb.swap", "SWAP gives cb ratio 6.5 for the inverse map", 6.5, "derived",
      tol=1e-9)
def _final_phi_swap(seed, budget):
    return _point(witness_ratio(final_phi(2), swap_witness(2), "cb", level=2))


@fact("final.phi.cb", "cb norm of the inverse map exceeds n^3 - n^2 + 1 = 5", 5.0, "published",
      "at_least", 1e-9)
def _final_phi_cb(seed, budget):
    return _interval(cb_lower(final_phi(2), 2, "cb", budget))


@fact("id_plus_tr.diam", "identity plus trace has diameter one", 1.0, "published", tol=SEARCH_TOL)
def _idtr_diam(seed, budget):
    return _interval(diam_estimate(id_plus_tr(2), budget))


@fact("id_plus_tr.cbdiam.level2", "off-diagonal identity at level 2 gives ratio 3", 3.0,
      "published", tol=1e-9)
def _idtr_cbdiam(seed, budget):
    return _point(witness_ratio(id_plus_tr(2), off_diagonal_identity(2), "cbdiam", level=2))


# ---------------------------------------------------------------------------
# contractive and expansive properties

@fact("ucp.support_dominance", "unital channels shrink every support value", 0.0, "published",
      "at_most", 1e-8)
def _ucp_support(seed, budget):
    rng = _rng(seed, "ucp.support_dominance")
    thetas = 2 * np.pi * np.arange(64) / 64
    worst = -math.inf
    for _ in range(100):
        n, m = (int(x) for x in rng.integers(2, 5, size=2))
        phi = random_superop("unital_channel", n, m, seed=int(rng.integers(2**31)))
        E = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        h_in = np.linalg.eigvalsh(rotated_real_parts(E, thetas))[:, -1]
        h_out = np.linalg.eigvalsh(rotated_real_parts(apply(phi, E), thetas))[:, -1]
        worst = max(worst, float(np.max(h_out - h_in)))
    return _point(worst, "largest support excess over 100 channels and 64 angles")


@functools.lru_cache(maxsize=4)
def _ucp_sdiam_estimates(seed: int, budget: Budget) -> tuple:
    rng = _rng(seed, "ucp.sdiam")
    # only the certificate and the direction of the lower bound matter here
    light = Budget(restarts=4, iters=100, seed=budget.seed, grid=64, max_dim=budget.max_dim)
    out = []
    for _ in range(100):
        n, m = (int(x) for x in rng.integers(2, 5, size=2))
        phi = random_superop("unital_channel", n, m, seed=int(rng.integers(2**31)))
        out.append(sdiam_estimate(phi, light))
    return tuple(out)


@fact("ucp.sdiam.upper", "unital channels have certified diameter at most one", 1.0, "published",
      "at_most", 1e-12)
def _ucp_upper(seed, budget):
    ests = _ucp_sdiam_estimates(seed, budget)
    return Computed(max(e.lower for e in ests), max(e.upper for e in ests),
                    "largest bounds over 100 channels")


@fact("ucp.sdiam.lower", "search never exceeds the unit bound for unital channels", 1.0,
      "derived", "at_most", SEARCH_TOL)
def _ucp_lower(seed, budget):
    worst = max(e.lower for e in _ucp_sdiam_estimates(seed, budget))
    return _point(worst, "largest lower bound over 100 channels")


@fact("section.expansive", "sections of positive unital maps widen the spectrum", 0.0, "published",
      "at_least", 1e-9)
def _section_expansive(seed, budget):
    rng = _rng(seed, "section.expansive")
    phi = final_phi(2)
    slack = math.inf
    for _ in range(100):
        A = _random_hermitian(rng, 2)
        B = apply(phi, A)
        slack = min(slack, lambda_min(A) - lambda_min(B), lambda_max(B) - lambda_max(A))
    return _point(slack, "smallest slack over 100 samples")


# ---------------------------------------------------------------------------
# observable degradation

class Distinguishability(NamedTuple):
    diam_before: float
    diam_after: float
    ratio: float


def distinguishability_report(psi: SuperOp, E, atol: float = 1e-6) -> Distinguishability:
    """How much a unital channel blurs a two-outcome observable ``E``."""
    E = as_square(E)
    if E.shape[0] != psi.dim_in:
        raise NotAnObservable(f"observable has size {E.shape[0]}, channel input {psi.dim_in}")
    if not is_hermitian(E, atol):
        raise NotAnObservable("observable must be Hermitian")
    ev = np.linalg.eigvalsh((E + E.conj().T) / 2)
    if np.any(np.minimum(np.abs(ev - 1), np.abs(ev + 1)) > atol):
        raise NotAnObservable("observable eigenvalues must be +1 or -1")
    if ev[0] > 0 or ev[-1] < 0:
        raise NotAnObservable("observable needs both outcomes +1 and -1")
    fl = psi.flags
    if not (fl.unital and fl.cp):
        raise NotUCP("channel must be unital and completely positive")
    after = numerical_diameter(apply(psi, E)).value
    return Distinguishability(2.0, after, after / 2.0)


@fact("distinguish.identity", "identity channel keeps an observable sharp", 1.0, "trivial")
def _dist_id(seed, budget):
    return _point(distinguishability_report(identity_map(2), np.diag([1, -1])).ratio)


@fact("distinguish.depolarizing", "completely depolarizing channel erases an observable", 0.0,
      "trivial")
def _dist_dep(seed, budget):
    return _point(distinguishability_report(completely_depolarizing(2), np.diag([1, -1])).ratio)


@fact("distinguish.final_psi", "final channel shrinks a traceless observable by 1/n^2", 0.25,
      "derived")
def _dist_psi(seed, budget):
    return _point(distinguishability_report(final_psi(2), np.diag([1, -1])).ratio)


# ---------------------------------------------------------------------------
# inequality ledger

def _ledger_fact(name: str):
    @fact(f"ledger.{name}", f"seminorm inequalities hold for {name}", 0.0, "published", tol=0.0)
    def run(seed, budget):
        phi = named_example(name)
        entries = inequality_ledger(phi, analyze_map(phi, budget))
        bad = [e.relation for e in entries if e.status == "violation"]
        passed = sum(e.status == "pass" for e in entries)
        skipped = sum(e.status == "skipped" for e in entries)
        detail = f"{passed} pass, {skipped} skipped"
        if bad:
            detail += "; violations: " + ", ".join(bad)
        return _point(float(len(bad)), detail)


for _name in EXAMPLE_IDS:
    if _name != "trig":
        _ledger_fact(_name)


@fact("ledger.submultiplicativity", "diameter is submultiplicative under composition", 0.0,
      "published", tol=0.0)
def _submult(seed, budget):
    pairs = [(final_psi(2), final_phi(2)), (transpose(2), id_plus_tr(2)),
             (random_superop("unital_channel", 2, seed=seed), diambound())]
    entries = [submultiplicativity(a, b, budget) for a, b in pairs]
    bad = sum(e.status == "violation" for e in entries)
    return _point(float(bad), "; ".join(f"{e.lhs:.6g} <= {e.rhs:.6g}" for e in entries
                                        if e.status != "skipped"))


def _separation_entries(psi: SuperOp, budget: Budget, stated: bool) -> Computed:
    entries = [e for e in separation_check(psi, budget)
               if e.relation.endswith("(stated)") == stated]
    bad = sum(e.status in ("violation", "refuted") for e in entries)
    soft = sum(e.status == "inconclusive" for e in entries)
    detail = f"{len(entries)} unitaries, {bad} below, {soft} inconclusive"
    if entries:
        detail += f"; {entries[0].detail}"
    return Computed(float(bad), float(bad), detail, inconclusive=soft > 0)


@fact("separation.random", "ucp bijections stay eps/(1+eps) away from unitary conjugations",
      0.0, "derived", tol=0.0)
def _separation(seed, budget):
    return _separation_entries(random_superop("ucp_bijection", 2, seed=seed), budget, False)


@fact("separation.depolarizing", "depolarizing mix stays eps/(1+eps) away from conjugations",
      0.0, "derived", tol=0.0)
def _separation_dep(seed, budget):
    psi = identity_map(2) * 0.5 + completely_depolarizing(2) * 0.5
    return _separation_entries(psi, budget, False)


@fact("separation.stated_bound", "distance 2 eps/(1+eps) from conjugations for a depolarizing mix",
      0.0, "published", tol=0.0)
def _separation_stated(seed, budget):
    # the certified distance 0.75 is below the stated bound 1.0, so this row fails
    psi = identity_map(2) * 0.5 + completely_depolarizing(2) * 0.5
    return _separation_entries(psi, budget, True)


# ---------------------------------------------------------------------------
# running and formatting

def run_fact(f: Fact, seed: int = 7, budget: Budget | None = None) -> ReportRow:
    budget = budget or Budget(seed=seed)
    start = time.perf_counter()
    try:
        c = f.compute(seed, budget)
    except Exception as exc:  # a failing fact never aborts the suite
        ms = (time.perf_counter() - start) * 1e3
        return ReportRow(f.fact_id, f.locator, f.expected, f.provenance, f.relation,
                         math.nan, math.nan, f.tol, "fail", ms,
                         f"{type(exc).__name__}: {exc}")
    ms = (time.perf_counter() - start) * 1e3
    ok = judge(f.relation, f.expected, c.lower, c.upper, f.tol)
    status = "pass" if ok and not c.inconclusive else ("inconclusive" if ok else "fail")
    return ReportRow(f.fact_id, f.locator, f.expected, f.provenance, f.relation,
                     c.lower, c.upper, f.tol, status, ms, c.detail)


def run_suite(filter: str | None = None, seed: int = 7,
              budget: Budget | None = None) -> list[ReportRow]:
    """Run every fact whose id matches the glob ``filter``, in fact-id order."""
    budget = budget or Budget(seed=seed)
    chosen = [f for f in facts() if filter is None or fnmatch.fnmatchcase(f.fact_id, filter)]
    return [run_fact(f, seed, budget) for f in chosen]


def format_report(rows: list[ReportRow], fmt: str = "json", timings: bool = False) -> str:
    dicts = [r.as_dict(timings) for r in rows]
    if fmt == "json":
        return json.dumps({"rows": dicts,
                           "summary": {s: sum(r.status == s for r in rows)
                                       for s in ("pass", "fail", "inconclusive")}},
                          indent=2) + "\n"
    keys = list(dicts[0]) if dicts else list(ReportRow.__dataclass_fields__)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        w.writerows(dicts)
        return buf.getvalue()
    if fmt == "md":
        lines = ["| " + " | ".join(keys) + " |", "|" + "---|" * len(keys)]
        for d in dicts:
            lines.append("| " + " | ".join(_md_cell(d[k]) for k in keys) + " |")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def _md_cell(x) -> str:
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x).replace("|", "\\|")


__all__ = [
    "Computed", "Fact", "ReportRow", "Distinguishability", "facts", "run_fact", "run_suite",
    "format_report", "distinguishability_report", "judge", "RELATIONS",
]
