import numpy as np
import pytest
from hypothesis import given, strategies as st

from ncgx.errors import EmptyWindow, GroupNotAbelian, InvalidGroupLaw, MarginTooLarge, WindowOverflow
from ncgx.groups import (FiniteGroup, GroupHopfData, Weight, WindowedZ, build_group_operators, classify_weight,
                         cyclic, interior_indices, left_regular, symmetric3, translation_function)


def test_windowed_z_escape_is_flagged():
    G = WindowedZ(3)
    assert G.mul(2, 1) == 3
    assert G.mul(2, 2) is None
    with pytest.raises(WindowOverflow):
        G.mul_strict(3, 1)


def test_window_bounds():
    with pytest.raises(EmptyWindow):
        WindowedZ(0)
    with pytest.raises(ValueError):
        WindowedZ(40)


def test_invalid_tables():
    with pytest.raises(InvalidGroupLaw):
        FiniteGroup([[0, 1], [1, 1]])
    # a Latin square that is not associative
    with pytest.raises(InvalidGroupLaw):
        FiniteGroup([[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]])


def test_s3_is_nonabelian():
    S = symmetric3()
    assert S.order == 6 and not S.abelian
    with pytest.raises(GroupNotAbelian):
        GroupHopfData(S, "identity")


def test_z2_operators():
    G = cyclic(2)
    ops = build_group_operators(G, Weight(G, [0.0, 1.0]))
    assert np.allclose(ops.lambda_[1].dense(), [[0, 1], [1, 0]])
    assert np.allclose(ops.M_l.dense(), np.diag([0, 1]))
    assert ops.J_G.antilinear and np.allclose(ops.J_G.dense(), np.eye(2))


@given(st.integers(-3, 3), st.integers(-3, 3))
def test_left_regular_is_a_homomorphism_inside_window(g, h):
    G = WindowedZ(8)
    lhs = (left_regular(G, g) @ left_regular(G, h)).dense()
    rhs = left_regular(G, g + h).dense()
    inner = interior_indices(G, 6)
    assert np.allclose(lhs[np.ix_(inner, inner)], rhs[np.ix_(inner, inner)])


def test_weight_classes():
    G = WindowedZ(8)
    inc = classify_weight(Weight.inclusion(G))
    assert inc.homomorphism and inc.first_order and inc.dirac and inc.antisymmetric
    ab = classify_weight(Weight.absolute(G))
    assert ab.length_function and ab.symmetric and not ab.first_order and ab.dirac
    w = ab.witnesses["first_order"]
    assert w["lhs"] != w["rhs"]
    const = classify_weight(Weight.constant(G, 2.0))
    assert const.constant and const.first_order and not const.homomorphism


@given(st.lists(st.integers(-8, 8).map(lambda k: k / 2), min_size=6, max_size=6))
def test_classification_implications(values):
    S = symmetric3()
    c = classify_weight(Weight(S, values))
    if c.homomorphism:
        assert c.first_order
    if c.first_order:
        assert c.dirac


def test_translation_function_of_inclusion_is_constant():
    G = WindowedZ(6)
    lg = translation_function(Weight.inclusion(G), 2)
    assert set(lg.values()) == {2.0}


def test_interior_margin_too_large():
    with pytest.raises(MarginTooLarge):
        interior_indices(WindowedZ(4), 5)
    assert interior_indices(cyclic(3), 10).all()


def test_star_of():
    G = WindowedZ(4)
    assert GroupHopfData(G, "inverse").star_of(3) == -3
    assert GroupHopfData(G, "identity").star_of(3) == 3
