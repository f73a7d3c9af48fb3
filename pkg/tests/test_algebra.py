import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncgx.algebra import AlgebraAction, BasedAlgebra, crossed_product
from ncgx.errors import ActionDoesNotPreserveAlgebra, AlgebraNotClosed, WindowOverflow
from ncgx.groups import WindowedZ, cyclic, symmetric3
from ncgx.opalg import SIGMA_1, SIGMA_3, ComplexOperator, HilbertSpace

E = np.eye(2)
MATRIX_UNITS = [ComplexOperator(np.outer(E[i], E[j])) for i in range(2) for j in range(2)]


def m2():
    return BasedAlgebra.from_operators(MATRIX_UNITS)


def test_matrix_units_structure_constants():
    A = m2()
    assert A.product(0, 1) == {1: 1}
    assert A.product(1, 2) == {0: 1}
    assert A.product(1, 0) == {}
    assert A.star({1: 2j}) == {2: -2j}
    assert A.unit == {0: 1, 3: 1}


def test_not_closed():
    with pytest.raises(AlgebraNotClosed):
        BasedAlgebra.from_operators([ComplexOperator(np.eye(2)), ComplexOperator(np.outer(E[0], E[1]))])


def test_group_algebra_window():
    Q = BasedAlgebra.group_algebra(WindowedZ(6), radius=2)
    assert Q.labels == (-2, -1, 0, 1, 2)
    assert Q.multiply({Q.index(1): 1}, {Q.index(1): 1}) == {Q.index(2): 1}
    with pytest.raises(WindowOverflow):
        Q.product(Q.index(2), Q.index(1))


def test_action_must_preserve_algebra():
    diag = [ComplexOperator(np.diag(E[i])) for i in range(2)]
    G = cyclic(2)
    with pytest.raises(ActionDoesNotPreserveAlgebra):
        AlgebraAction.from_unitaries(G, diag, {0: ComplexOperator(E), 1: ComplexOperator((SIGMA_1 + SIGMA_3) / np.sqrt(2))})


def crossed_m2():
    G = symmetric3()
    A = m2()
    # S_3 acts through sign: odd permutations conjugate by sigma_3
    perms = [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]
    us = {}
    for g in G.elements:
        p = perms[g]
        inversions = sum(1 for i in range(3) for j in range(i + 1, 3) if p[i] > p[j])
        us[g] = ComplexOperator(SIGMA_3 if inversions % 2 else E)
    return crossed_product(A, AlgebraAction.from_unitaries(G, MATRIX_UNITS, us))


B = crossed_m2()
idx = st.integers(0, B.dim - 1)


@given(idx, idx, idx)
@settings(max_examples=60, deadline=None)
def test_crossed_product_associative(p, q, r):
    x, y, z = {p: 1}, {q: 1}, {r: 1}
    lhs = B.multiply(B.multiply(x, y), z)
    rhs = B.multiply(x, B.multiply(y, z))
    assert lhs == rhs


@given(idx, idx)
@settings(max_examples=60, deadline=None)
def test_crossed_product_star_antimultiplicative(p, q):
    x, y = {p: 1j}, {q: 2}
    lhs = B.star(B.multiply(x, y))
    rhs = B.multiply(B.star(y), B.star(x))
    clean = lambda d: {k: v for k, v in d.items() if abs(v) > 1e-12}
    assert clean(lhs) == clean(rhs)


def test_crossed_unit():
    for p in range(B.dim):
        assert B.multiply(B.unit, {p: 1}) == {p: 1}
        assert B.multiply({p: 1}, B.unit) == {p: 1}
