import csv
import io
import json

import numpy as np
import pytest

from opdiam.errors import NotAnObservable, NotUCP
from opdiam.maps import completely_depolarizing, final_psi, transpose
from opdiam.replicate import (distinguishability_report, facts, format_report, judge,
                              run_suite)
from opdiam.superop import identity_map


@pytest.fixture(scope="module")
def full_suite():
    return run_suite()


def test_every_row_passes_except_the_stated_separation_bound(full_suite):
    status = {r.fact_id: r.status for r in full_suite}
    assert [r.fact_id for r in full_suite] == sorted(status)
    failing = {k for k, v in status.items() if v != "pass"}
    # the stated separation constant is refuted by a depolarizing mix
    assert failing == {"separation.stated_bound"}


def test_rows_record_regime(full_suite):
    by_id = {r.fact_id: r for r in full_suite}
    assert by_id["corner.sdiam"].regime == "search"
    assert by_id["range.rank_one.diam"].regime == "closed-form"
    for r in full_suite:
        assert r.provenance in ("published", "derived", "trivial")


def test_filter_selects_by_glob():
    rows = run_suite("range.*")
    ids = [r.fact_id for r in rows]
    assert "range.rank_one.diam" in ids and "range.jung.ratio" in ids
    assert all(i.startswith("range.") for i in ids)
    assert run_suite("no.such.*") == []


def test_counterexample_row():
    (row,) = run_suite("counterexample.positive_image")
    assert row.status == "pass"


def test_determinism():
    a = format_report(run_suite("range.*", seed=3), "json")
    b = format_report(run_suite("range.*", seed=3), "json")
    assert a == b


def test_formats():
    rows = run_suite("distinguish.*")
    data = json.loads(format_report(rows, "json"))
    assert data["summary"]["pass"] == 3
    assert "runtime_ms" not in data["rows"][0]
    assert "runtime_ms" in json.loads(format_report(rows, "json", timings=True))["rows"][0]
    table = list(csv.DictReader(io.StringIO(format_report(rows, "csv"))))
    assert [t["fact_id"] for t in table] == [r.fact_id for r in rows]
    md = format_report(rows, "md").splitlines()
    assert md[0].startswith("| fact_id") and len(md) == 2 + len(rows)
    with pytest.raises(ValueError):
        format_report(rows, "xml")


def test_judge_relations():
    assert judge("brackets", 1.0, 0.999, 1.001, 0)
    assert not judge("brackets", 1.0, 1.01, 1.02, 1e-3)
    assert judge("at_least", 5.0, 6.5, float("inf"), 0)
    assert judge("at_most", 1.0, 0.2, 1.0, 0)
    with pytest.raises(ValueError):
        judge("near", 1, 1, 1, 0)


def test_a_raising_fact_becomes_a_failed_row(monkeypatch):
    import opdiam.replicate as rep
    f = rep._FACTS["distinguish.identity"]

    def boom(seed, budget):
        raise RuntimeError("broken")

    monkeypatch.setitem(rep._FACTS, f.fact_id, rep.Fact(f.fact_id, f.locator, f.expected,
                                                        f.provenance, f.relation, f.tol, boom))
    rows = run_suite("distinguish.*")
    status = {r.fact_id: r.status for r in rows}
    assert status == {"distinguish.depolarizing": "pass", "distinguish.final_psi": "pass",
                      "distinguish.identity": "fail"}
    assert rows[-1].detail == "RuntimeError: broken"


def test_distinguishability_examples():
    E = np.diag([1.0, -1.0])
    assert distinguishability_report(identity_map(2), E).ratio == pytest.approx(1.0)
    r = distinguishability_report(completely_depolarizing(2), E)
    assert r.diam_after == pytest.approx(0.0, abs=1e-12) and r.ratio == pytest.approx(0.0, abs=1e-12)
    r = distinguishability_report(final_psi(2), E)
    assert (r.diam_before, r.diam_after, r.ratio) == pytest.approx((2.0, 0.5, 0.25))


def test_distinguishability_errors():
    with pytest.raises(NotAnObservable):
        distinguishability_report(identity_map(2), np.diag([1.0, 0.5]))
    with pytest.raises(NotAnObservable):
        distinguishability_report(identity_map(2), np.array([[0, 1], [0, 0]]))
    with pytest.raises(NotUCP):
        distinguishability_report(transpose(2), np.diag([1.0, -1.0]))


def test_fact_ids_are_unique_and_sorted():
    ids = [f.fact_id for f in facts()]
    assert ids == sorted(set(ids))
