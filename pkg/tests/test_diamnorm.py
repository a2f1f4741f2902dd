import math

import numpy as np
import pytest

from opdiam.diamnorm import (Budget, Certificates, DiamEstimate, analyze_map, cb_lower,
                             diam_estimate, inequality_ledger, lift_witness, map_norm,
                             off_diagonal_identity, sdiam_estimate, separation_check,
                             submultiplicativity, swap_witness, witness_ratio)
from opdiam.errors import ResourceLimit
from opdiam.maps import (completely_depolarizing, corner, diambound, final_phi, final_psi,
                         id_plus_tr, random_superop, transpose)
from opdiam.superop import from_function, identity_map, trace_map

from conftest import unit

SMALL = Budget(restarts=8, iters=150, grid=128)


def test_identity_and_trace():
    for est in (map_norm(identity_map(3)), sdiam_estimate(identity_map(3)),
                diam_estimate(identity_map(3))):
        assert est.brackets(1.0, 1e-8)
    est = diam_estimate(trace_map(3, 3))
    assert est.upper == pytest.approx(0.0, abs=1e-12)


def test_diambound_values():
    phi = diambound()
    assert map_norm(phi).brackets(1.0, 1e-3)
    est = diam_estimate(phi)
    assert est.lower >= math.sqrt(2) - 1e-3
    assert witness_ratio(phi, unit(2, 0, 1), "diam") >= math.sqrt(2) - 1e-9


def test_corner_values():
    phi = corner()
    assert sdiam_estimate(phi).brackets(0.5, 2e-3)
    assert map_norm(phi).brackets(1.0, 1e-3)
    # not self-adjoint: the off-diagonal unit reaches ratio one
    assert witness_ratio(phi, unit(2, 0, 1), "diam") == pytest.approx(1.0)
    est = cb_lower(phi, 2, "cbsdiam", full_chain=True)
    assert est.brackets(0.5, 2e-3) and est.level == 2


@pytest.mark.parametrize("n", [2, 3])
def test_transpose_values(n):
    phi = transpose(n)
    assert diam_estimate(phi).brackets(1.0, 2e-3)
    assert witness_ratio(phi, swap_witness(n), "cb", level=n) == pytest.approx(n, abs=1e-12)
    est = cb_lower(phi, n, "cb")
    assert est.brackets(n, 1e-9)


def test_final_phi_values():
    phi = final_phi(2)
    est = diam_estimate(phi)
    assert est.brackets(4.0, 2e-3)
    assert witness_ratio(phi, unit(2, 0, 1), "diam") == pytest.approx(4.0, abs=1e-9)
    assert witness_ratio(phi, swap_witness(2), "cb", level=2) == pytest.approx(6.5, abs=1e-9)


def test_id_plus_trace_amplified():
    phi = id_plus_tr(2)
    assert diam_estimate(phi).brackets(1.0, 2e-3)
    r = witness_ratio(phi, off_diagonal_identity(2), "cbdiam", level=2)
    assert r == pytest.approx(3.0, abs=1e-9)


@pytest.mark.parametrize("seed", range(4))
def test_witness_certifies_lower(seed):
    phi = random_superop("ucp_bijection", 2, seed=seed)
    phi = phi + 0.3 * trace_map(2, 2)
    for q, fn in (("op_norm", map_norm), ("sdiam", sdiam_estimate), ("diam", diam_estimate)):
        est = fn(phi, SMALL)
        assert witness_ratio(phi, est.witness, q) == pytest.approx(est.lower, abs=1e-6)
        assert est.lower <= est.upper * (1 + 1e-8)


def test_cb_levels_monotone():
    phi = random_superop("hermitian_choi", 2, seed=3)
    prev = 0.0
    for k in (1, 2, 3):
        est = cb_lower(phi, k, "cb", SMALL, full_chain=True)
        assert est.lower >= prev - 1e-9
        prev = est.lower


def test_lift_witness_keeps_ratio():
    phi = transpose(2)
    W = swap_witness(2)
    for k in (2, 3, 5):
        assert witness_ratio(phi, lift_witness(W, 2, 2, k), "cb", level=k) == pytest.approx(2)


def test_translation_invariance():
    phi = random_superop("unital_channel", 3, seed=9)
    base = diam_estimate(phi, SMALL)
    for g in (-1.5, 2.0):
        est = diam_estimate(phi.translate(g), SMALL)
        assert est.lower == pytest.approx(base.lower, abs=2e-3)


def test_seed_determinism():
    phi = random_superop("hermitian_choi", 3, seed=2)
    a, b = diam_estimate(phi, SMALL), diam_estimate(phi, SMALL)
    assert (a.lower, a.upper) == (b.lower, b.upper)
    assert np.array_equal(a.witness, b.witness)


def test_not_paraunital_is_unbounded():
    phi = from_function(lambda A: np.diag([1.0, 2.0]) * np.trace(A) + A, 2, 2)
    est = diam_estimate(phi, SMALL)
    assert est.unbounded and est.upper == math.inf
    assert est.witness_ratio > 1e3
    # the operator norm stays finite
    assert not map_norm(phi, SMALL).unbounded


def test_certificates():
    # Psi(E) = E/4 on traceless E
    assert Certificates(final_psi(2)).upper("diam")[0] == pytest.approx(0.25)
    val, name = Certificates(transpose(3)).upper("cb")
    assert val == pytest.approx(3.0)
    with pytest.raises(ArithmeticError):
        DiamEstimate("diam", 2.0, 1.0, None, "bogus")


def test_resource_limit():
    with pytest.raises(ResourceLimit):
        cb_lower(transpose(3), 30, "cb")


def _statuses(entries):
    return {e.status for e in entries}


@pytest.mark.parametrize("phi", [corner(), transpose(3), final_psi(2)], ids=["corner", "transpose3", "ucp"])
def test_ledger_has_no_violations(phi):
    est = analyze_map(phi, SMALL)
    entries = inequality_ledger(phi, est)
    assert "violation" not in _statuses(entries)
    assert sum(e.status == "pass" for e in entries) >= 8


def test_ledger_flags_a_fake_violation():
    phi = transpose(2)
    est = analyze_map(phi, SMALL)
    fake = dict(est)
    fake["op_norm"] = DiamEstimate("op_norm", 0.1, 0.1, None, "fake")
    entries = inequality_ledger(phi, fake)
    bad = [e.relation for e in entries if e.status == "violation"]
    assert "diam <= 2 op_norm" in bad and "sdiam <= op_norm" in bad


def test_submultiplicativity():
    e = submultiplicativity(final_psi(2), final_phi(2), SMALL)
    assert e.status == "pass"


def test_separation_semantics():
    psi = identity_map(2) * 0.8 + completely_depolarizing(2) * 0.2
    entries = separation_check(psi, SMALL, samples=1)
    sound = [e for e in entries if "stated" not in e.relation]
    stated = [e for e in entries if "stated" in e.relation]
    assert _statuses(sound) == {"pass"}
    # the identity conjugation sits at cb distance 1.5 t = 0.3 below the stated 2 t bound
    assert stated[0].status == "refuted"
    assert stated[0].rhs == pytest.approx(0.3, abs=1e-6)
    assert stated[0].lhs == pytest.approx(0.4, abs=1e-3)
    assert separation_check(transpose(2), SMALL)[0].status == "skipped"
