import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncgx.errors import MixedParity, SpaceMismatch
from ncgx.opalg import (SIGMA_1, SIGMA_2, SIGMA_3, ComplexOperator, HilbertSpace, Tolerance, cc, commutator,
                        identity, is_self_adjoint, is_unitary, masked_residual, op_norm, pauli, relation_residual,
                        span_coordinates, spectrum, tensor)

entries = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)


def mat(n):
    return st.lists(entries, min_size=n * n, max_size=n * n).map(lambda v: np.array(v).reshape(n, n))


def vec(n):
    return st.lists(entries, min_size=n, max_size=n).map(np.array)


def test_pauli_commutator():
    c = commutator(pauli(1), pauli(3))
    assert np.allclose(c.dense(), -2j * SIGMA_2)


def test_tensor_order_is_kronecker():
    e0 = np.array([1, 0], dtype=complex)
    v = tensor(pauli(1), pauli(2)).apply(np.kron(e0, e0))
    assert np.allclose(v, 1j * np.kron([0, 1], [0, 1]))


def test_antilinear_tensor_conjugates_once():
    e0 = np.array([1, 0], dtype=complex)
    v = tensor(cc(2), cc(2)).apply(np.kron(1j * e0, e0))
    assert np.allclose(v, -1j * np.kron(e0, e0))


def test_mixed_parity_tensor_rejected():
    with pytest.raises(MixedParity):
        tensor(cc(2), pauli(1))


def test_space_mismatch():
    with pytest.raises(SpaceMismatch):
        pauli(1) @ identity(3)


def test_antilinear_sigma2_squares_to_minus_one():
    K = ComplexOperator(SIGMA_2, antilinear=True)
    assert np.allclose((K @ K).dense(), -np.eye(2))


def test_antilinear_scalar_rules():
    K = cc(2)
    # K (c v) = conj(c) K v
    v = np.array([1, 2j])
    assert np.allclose((K * 1j).apply(v), K.apply(1j * v))
    assert np.allclose((1j * K).apply(v), 1j * K.apply(v))


@given(mat(3), mat(3), vec(3))
@settings(max_examples=40, deadline=None)
def test_composition_matches_application(a, b, v):
    for pa in (False, True):
        for pb in (False, True):
            A, B = ComplexOperator(a, antilinear=pa), ComplexOperator(b, antilinear=pb)
            assert np.allclose((A @ B).apply(v), A.apply(B.apply(v)), atol=1e-9)


@given(mat(3), vec(3), vec(3))
@settings(max_examples=40, deadline=None)
def test_antilinear_adjoint(a, v, w):
    # <w, K v> = conj(<K* w, v>) for antilinear K
    K = ComplexOperator(a, antilinear=True)
    lhs = np.vdot(w, K.apply(v))
    rhs = np.conj(np.vdot(K.adjoint().apply(w), v))
    assert np.isclose(lhs, rhs, atol=1e-8)


@given(mat(3))
@settings(max_examples=30, deadline=None)
def test_inverse_both_parities(a):
    a = a + 8 * np.eye(3)
    for anti in (False, True):
        A = ComplexOperator(a, antilinear=anti)
        assert relation_residual(A @ A.inverse(), identity(3)) < 1e-9


def test_spectrum_sorted_and_real_for_hermitian():
    s = spectrum(ComplexOperator(np.diag([3.0, -1.0, 2.0])))
    assert s == [-1, 2, 3]


def test_predicates():
    assert is_unitary(pauli(2)) and is_self_adjoint(pauli(2))
    assert not is_self_adjoint(ComplexOperator(1j * np.eye(2)))
    assert op_norm(ComplexOperator(np.diag([1, -4]))) == pytest.approx(4)


def test_masked_residual_ignores_outside():
    diff = np.diag([0.0, 5.0])
    assert masked_residual(diff, np.array([True, False])) == 0
    assert masked_residual(diff, None) == 5


def test_span_coordinates_recovers_combination():
    basis = [pauli(k) for k in (1, 2, 3)] + [identity(2)]
    target = ComplexOperator(2 * SIGMA_1 - 1j * SIGMA_3 + np.eye(2))
    coords, r = span_coordinates(basis, target)
    assert r < 1e-12
    assert np.allclose(coords, [2, 0, -1j, 1])


def test_tolerance():
    tol = Tolerance(1e-9, 1e-6)
    assert tol.threshold(10) == pytest.approx(1e-9 + 1e-5)
    assert Tolerance.exact().allows(0.0) and not Tolerance.exact().allows(1e-300)
    with pytest.raises(ValueError):
        Tolerance(-1)


def test_hilbert_space_tensor():
    assert HilbertSpace(2).tensor(HilbertSpace(3)).dim == 6


def test_operators_are_immutable():
    a = pauli(3)
    with pytest.raises(AttributeError):
        a.antilinear = True
    assert np.allclose(SIGMA_3, np.diag([1, -1]))
    assert np.allclose(pauli(1).dense(), SIGMA_1)
