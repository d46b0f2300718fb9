import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphhybrid.glv import build_initial_state
from graphhybrid.variable_basis import (
    BasisSet,
    BoolTensor,
    PairBasis,
    State,
    StateError,
    VBTensor,
    VBVector,
    bool_combine,
    classify_state,
    complete_zero_state,
    empty_state,
    state_combine,
    state_scalar_mul,
    tensor_combine,
    validate_state,
    vec_combine,
)

from conftest import UNIVERSE12, states
from oracle import ref_state_combine

STARS = pytest.mark.parametrize("star", ["union", "inter"])


def test_basis_is_canonical():
    assert BasisSet((3, 1, 2, 1)).labels == (1, 2, 3)
    assert BasisSet((2, 1)) == BasisSet((1, 2))
    assert PairBasis(((2, 1), (1, 2))).pairs == ((1, 2), (2, 1))
    assert BasisSet((1, 2)).square().pairs == ((1, 1), (1, 2), (2, 1), (2, 2))


def test_coefficient_count_checked():
    with pytest.raises(ValueError):
        VBVector(BasisSet((1, 2)), [1.0])


def test_vec_combine_examples():
    x = VBVector(BasisSet((2, 3)), [1, 2])
    y = VBVector(BasisSet((1, 2, 3, 4)), [10, 20, 30, 40])
    u = vec_combine("union", x, y)
    assert u.basis.labels == (1, 2, 3, 4) and u.coeffs.tolist() == [10, 21, 32, 40]
    i = vec_combine("inter", x, y)
    assert i.basis.labels == (2, 3) and i.coeffs.tolist() == [21, 32]
    assert vec_combine("union", x, VBVector(BasisSet(), [])) == x


def test_tensor_combine_examples():
    w = VBTensor.from_dict({(1, 2): 0.3})
    v = VBTensor.from_dict({(1, 2): 0.1, (2, 3): 1.0})
    assert tensor_combine("union", w, v).as_dict() == pytest.approx({(1, 2): 0.4, (2, 3): 1.0})
    assert tensor_combine("inter", w, v).as_dict() == pytest.approx({(1, 2): 0.4})
    assert tensor_combine("union", w, VBTensor(PairBasis(), [])) == w


def test_bool_combine_examples():
    a = BoolTensor.from_dict({(1, 2): True, (2, 1): False})
    e = BoolTensor.from_dict({(1, 2): False, (2, 1): False})
    assert bool_combine("union", a, e).as_dict() == {(1, 2): True, (2, 1): False}
    a = BoolTensor.from_dict({(1, 2): True})
    e = BoolTensor.from_dict({(1, 2): True, (2, 1): True})
    assert bool_combine("inter", a, e).as_dict() == {(1, 2): True}
    assert bool_combine("union", a, BoolTensor(PairBasis(), [])) == a


def test_unknown_star_rejected():
    with pytest.raises(ValueError):
        vec_combine("sum", VBVector(BasisSet(), []), VBVector(BasisSet(), []))


def test_state_identities():
    x = build_initial_state()
    assert state_combine("union", x, empty_state()) == x
    assert state_combine("inter", x, complete_zero_state(range(1, 12))) == x


def test_state_scalar_examples():
    x = State.from_dicts({1: 0.5}, {(1, 1): 0.25})
    assert state_scalar_mul(1.0, x) == x
    z = state_scalar_mul(0.0, x)
    assert classify_state(z, [1]).null and z.edge(1, 1)
    two = state_scalar_mul(2.0, x)
    assert two.attr(1) == 1.0 and two.weight(1, 1) == 0.5


def test_union_reexpands_to_full_square():
    x = State.from_dicts({1: 1.0}, {(1, 1): 2.0})
    y = State.from_dicts({2: 3.0}, {(2, 2): 4.0})
    z = state_combine("union", x, y)
    assert z.pair_basis == BasisSet((1, 2)).square()
    assert not z.edge(1, 2) and z.weight(1, 2) == 0.0
    assert validate_state(z) == []


def test_inter_masks_one_sided_edges():
    x = State.from_dicts({1: 1.0, 2: 1.0}, {(1, 2): 0.5})
    y = State.from_dicts({1: 1.0, 2: 1.0}, {(2, 1): 0.5})
    z = state_combine("inter", x, y)
    assert not z.a.any() and not z.w.any()


def test_validate_state_flags_noncanonical():
    basis = BasisSet((1, 2))
    bad = State(basis, [1, 1], [[0, 0.5], [0, 0]], np.zeros((2, 2), bool))
    assert any("absent edge (1, 2)" in p for p in validate_state(bad))
    no_loops = State(basis, [1, 1], np.zeros((2, 2)), np.eye(2, dtype=bool), allow_loops=False)
    assert any("loop" in p for p in validate_state(no_loops))


def test_state_arrays_are_read_only():
    x = build_initial_state()
    with pytest.raises(ValueError):
        x.x[0] = 5.0


def test_classify_state_examples():
    uni = BasisSet(tuple(range(1, 12)))
    kind = classify_state(complete_zero_state(uni, allow_loops=False), uni)
    assert (kind.total, kind.complete, kind.null, kind.has_loops) == (True, True, True, False)
    kind = classify_state(empty_state(), uni)
    assert (kind.total, kind.complete, kind.null, kind.has_loops) == (False, True, True, False)
    kind = classify_state(build_initial_state(), uni)
    assert (kind.total, kind.complete, kind.null, kind.has_loops) == (False, True, False, True)


def _dicts(s: State):
    labels = s.basis.labels
    x = dict(zip(labels, s.x.tolist()))
    w = {(p, q): float(s.w[i, j]) for i, p in enumerate(labels) for j, q in enumerate(labels)}
    a = {(p, q) for i, p in enumerate(labels) for j, q in enumerate(labels) if s.a[i, j]}
    return x, w, a


@STARS
@given(x=states(), y=states())
def test_state_combine_matches_oracle(star, x, y):
    z = state_combine(star, x, y)
    attrs, weights, adj = ref_state_combine(star, *_dicts(x), *_dicts(y))
    zx, zw, za = _dicts(z)
    assert zx == attrs and za == adj and zw == weights


@STARS
@given(x=states(), y=states(), z=states())
@settings(max_examples=50)
def test_state_laws(star, x, y, z):
    assert state_combine(star, x, y) == state_combine(star, y, x)
    left = state_combine(star, state_combine(star, x, y), z)
    right = state_combine(star, x, state_combine(star, y, z))
    assert left.isclose(right)
    assert validate_state(left) == []


@STARS
@given(lam=st.floats(-3, 3), x=states(), y=states())
@settings(max_examples=50)
def test_state_scalar_distributes(star, lam, x, y):
    lhs = state_scalar_mul(lam, state_combine(star, x, y))
    rhs = state_combine(star, state_scalar_mul(lam, x), state_scalar_mul(lam, y))
    assert lhs.isclose(rhs)


@given(x=states(), y=states())
def test_union_zero_fill_keeps_exclusive_coordinates(x, y):
    z = state_combine("union", x, y)
    only_x = set(x.basis.labels) - set(y.basis.labels)
    for i in only_x:
        assert z.attr(i) == x.attr(i)
    assert z.basis == x.basis.union(y.basis)


@given(states())
def test_identity_elements(x):
    assert state_combine("union", x, empty_state()) == x
    assert state_combine("inter", x, complete_zero_state(UNIVERSE12)) == x


def test_from_dicts_unknown_label_raises():
    with pytest.raises(KeyError):
        State.from_dicts({1: 0.0}, {(1, 2): 1.0})


def test_state_error_is_value_error():
    assert issubclass(StateError, ValueError)
