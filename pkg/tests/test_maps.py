import numpy as np
import pytest

from opdiam.errors import DimensionMismatch, ResourceLimit, UnknownExample
from opdiam.maps import (EXAMPLE_IDS, RANDOM_KINDS, TrigMap, named_example, paulsen,
                         paulsen_positive_on_span, paulsen_span_basis, random_superop)
from opdiam.superop import SuperOp, apply


def test_every_example_builds():
    for name in EXAMPLE_IDS:
        ex = named_example(name)
        assert isinstance(ex, SuperOp) or isinstance(ex, TrigMap)


def test_unknown_and_limits():
    with pytest.raises(UnknownExample):
        named_example("nope")
    with pytest.raises(ResourceLimit):
        named_example("transpose", 100)
    with pytest.raises(DimensionMismatch):
        named_example("transpose", 0)


def test_corner_blocks():
    phi = named_example("corner", 2)
    X = np.arange(16).reshape(4, 4).astype(complex)
    out = apply(phi, X)
    assert np.array_equal(out[:2, 2:], X[:2, 2:])
    assert np.count_nonzero(out) == np.count_nonzero(X[:2, 2:])


def test_example_flags():
    assert named_example("choi_map", 3).flags.cp
    assert np.allclose(apply(named_example("final_phi", 2), np.eye(2)), np.eye(2))
    f = named_example("counterexample").flags
    # Phi(I) = diag(0, 2): self-adjoint and injective but not paraunital
    assert f.self_adjoint and not f.paraunital and not f.scaled_tp
    f = named_example("transpose", 3).flags
    assert f.unital and f.self_adjoint and not f.cp
    assert named_example("completely_depolarizing").flags.cp


def test_exact_entries():
    phi = named_example("diambound")
    out = apply(phi, np.array([[1, 1], [0, 0]]))
    assert np.allclose(out, np.diag([2, -1]) / np.sqrt(2), atol=0, rtol=1e-15)


def test_paulsen_span():
    B = paulsen_span_basis()
    assert len(B) == 10
    assert np.linalg.matrix_rank(np.array([b.reshape(-1) for b in B])) == 10
    assert paulsen_positive_on_span()
    phi = paulsen()
    assert np.allclose(apply(phi, np.eye(4)), np.eye(4))
    # the extension is positive on the span but not on all of M_4
    assert not phi.flags.positive_sampled


def test_trig_map():
    T = TrigMap()
    assert np.allclose(T((0, 1, 0)), [[0, 2], [0, 0]])
    assert T.sup_norm((0, 1, 0)) == pytest.approx(1.0)
    assert T.function_diameter((0, 1, 0)) == 2
    vals = T.function_values((1, 0.5, 0.25j), 4096)
    spread = np.abs(vals[:, None] - vals[None, ::7]).max()
    assert spread == pytest.approx(T.function_diameter((1, 0.5, 0.25j)), rel=1e-3)


@pytest.mark.parametrize("kind", RANDOM_KINDS)
def test_random_flags_and_determinism(kind):
    a = random_superop(kind, 2, seed=11)
    b = random_superop(kind, 2, seed=11)
    assert np.array_equal(a.choi, b.choi)
    if kind == "hermitian_choi":
        assert a.flags.self_adjoint
    if kind in ("unital_channel", "ucp_bijection"):
        assert a.flags.unital and a.flags.cp
    if kind == "ginibre_cp":
        assert a.flags.cp
    if kind == "ucp_bijection":
        assert np.linalg.cond(a.transfer) < 1e8


def test_unital_channel_rectangular():
    phi = random_superop("unital_channel", 2, 3, seed=1)
    assert (phi.dim_in, phi.dim_out) == (2, 3)
    assert phi.flags.unital and phi.flags.cp


def test_random_errors():
    with pytest.raises(ValueError):
        random_superop("nope", 2)
    with pytest.raises(DimensionMismatch):
        random_superop("ucp_bijection", 2, 3)
    with pytest.raises(ResourceLimit):
        random_superop("hermitian_choi", 100)
